#include "core/ternary.hpp"

#include <algorithm>

namespace rdtlgn {

namespace {

constexpr Trit TRITS[3] = {-1, 0, +1};

// Ordered pairs (x, y) with x <= y / x ⊑ y, used to enumerate the
// comparable input pairs during monotonicity checks.
struct TritPair {
  Trit lo, hi;
};

std::vector<TritPair> comparable_pairs(bool information) {
  std::vector<TritPair> out;
  for (Trit x : TRITS)
    for (Trit y : TRITS) {
      bool cmp = information ? leq_information(x, y) : leq_numerical(x, y);
      if (cmp) out.push_back({x, y});
    }
  return out;
}

}  // namespace

GateId encode_gate(const GateTable& g) {
  int id = 0;
  int pow3 = 1;
  for (int i = 0; i < 9; ++i) {
    id += trit_ord(g.entries[i]) * pow3;
    pow3 *= 3;
  }
  return static_cast<GateId>(id);
}

GateTable decode_gate(GateId id) {
  GateTable g;
  int rest = id;
  for (int i = 0; i < 9; ++i) {
    g.entries[i] = trit_from_ord(rest % 3);
    rest /= 3;
  }
  return g;
}

GateClass classify_gate(const GateTable& g) {
  // Monotonicity is decided by exhaustive enumeration of comparable pairs;
  // this classifier is the oracle the rest of the library trusts.
  static const std::vector<TritPair> num_pairs = comparable_pairs(false);
  static const std::vector<TritPair> inf_pairs = comparable_pairs(true);

  GateClass c;
  c.is_nm = true;
  for (const auto& pa : num_pairs) {
    for (const auto& pb : num_pairs) {
      if (!leq_numerical(g.apply(pa.lo, pb.lo), g.apply(pa.hi, pb.hi))) {
        c.is_nm = false;
        break;
      }
    }
    if (!c.is_nm) break;
  }
  c.is_im = true;
  for (const auto& pa : inf_pairs) {
    for (const auto& pb : inf_pairs) {
      if (!leq_information(g.apply(pa.lo, pb.lo), g.apply(pa.hi, pb.hi))) {
        c.is_im = false;
        break;
      }
    }
    if (!c.is_im) break;
  }
  c.is_constant =
      std::all_of(g.entries.begin(), g.entries.end(), [&](Trit t) { return t == g.entries[0]; });
  return c;
}

int hamming_distance(const GateTable& g1, const GateTable& g2) {
  int d = 0;
  for (int i = 0; i < 9; ++i)
    if (g1.entries[i] != g2.entries[i]) ++d;
  return d;
}

std::vector<GateId> enumerate_vocabulary(VocabularyKind kind) {
  std::vector<GateId> out;
  for (int id = 0; id < GATE_COUNT; ++id) {
    GateTable g = decode_gate(static_cast<GateId>(id));
    GateClass c = classify_gate(g);
    if (kind.exclude_constants && c.is_constant) continue;
    bool keep = false;
    switch (kind.tag) {
      case VocabularyTag::Full: keep = true; break;
      case VocabularyTag::NM: keep = c.is_nm; break;
      case VocabularyTag::IM: keep = c.is_im; break;
      case VocabularyTag::NMAndIM: keep = c.is_nm && c.is_im; break;
    }
    if (keep) out.push_back(static_cast<GateId>(id));
  }
  return out;
}

GateTable kleene_and() {
  GateTable g;
  for (Trit a : TRITS)
    for (Trit b : TRITS) g.entries[3 * trit_ord(a) + trit_ord(b)] = std::min(a, b);
  return g;
}

GateTable kleene_or() {
  GateTable g;
  for (Trit a : TRITS)
    for (Trit b : TRITS) g.entries[3 * trit_ord(a) + trit_ord(b)] = std::max(a, b);
  return g;
}

GateTable kleene_not_first() {
  GateTable g;
  for (Trit a : TRITS)
    for (Trit b : TRITS) g.entries[3 * trit_ord(a) + trit_ord(b)] = static_cast<Trit>(-a);
  return g;
}

GateTable kleene_not_second() {
  GateTable g;
  for (Trit a : TRITS)
    for (Trit b : TRITS) g.entries[3 * trit_ord(a) + trit_ord(b)] = static_cast<Trit>(-b);
  return g;
}

GateTable projection_first() {
  GateTable g;
  for (Trit a : TRITS)
    for (Trit b : TRITS) g.entries[3 * trit_ord(a) + trit_ord(b)] = a;
  return g;
}

GateTable projection_second() {
  GateTable g;
  for (Trit a : TRITS)
    for (Trit b : TRITS) g.entries[3 * trit_ord(a) + trit_ord(b)] = b;
  return g;
}

GateTable constant_gate(Trit c) {
  GateTable g;
  g.entries.fill(c);
  return g;
}

}  // namespace rdtlgn
