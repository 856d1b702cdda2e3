#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace rdtlgn {

// The ternary domain T = {-1, 0, +1}; 0 means "unknown".
using Trit = std::int8_t;

inline constexpr Trit TRIT_FALSE = -1;
inline constexpr Trit TRIT_UNKNOWN = 0;
inline constexpr Trit TRIT_TRUE = +1;

inline constexpr bool is_trit(int v) { return v >= -1 && v <= +1; }
inline constexpr int trit_ord(Trit t) { return static_cast<int>(t) + 1; }  // -1,0,+1 -> 0,1,2
inline constexpr Trit trit_from_ord(int o) { return static_cast<Trit>(o - 1); }

// Numerical ordering: -1 <= 0 <= +1 (total).
inline constexpr bool leq_numerical(Trit a, Trit b) { return a <= b; }

// Information ordering: 0 below both -1 and +1, which are incomparable.
inline constexpr bool leq_information(Trit a, Trit b) { return a == 0 || a == b; }

inline constexpr int GATE_COUNT = 19683;  // 3^9 two-input ternary gates

// Canonical base-3 index of a gate table, in [0, 19683).
using GateId = std::uint16_t;

// Truth table of a two-input ternary gate g : T^2 -> T.
// Entry order: a outer, b inner, both iterated -1, 0, +1,
// so entries[3*ord(a) + ord(b)] = g(a, b).
struct GateTable {
  std::array<Trit, 9> entries{};

  Trit apply(Trit a, Trit b) const { return entries[3 * trit_ord(a) + trit_ord(b)]; }
  bool operator==(const GateTable&) const = default;
};

// id = sum_i ord(entries[i]) * 3^i
GateId encode_gate(const GateTable& g);
GateTable decode_gate(GateId id);

struct GateClass {
  bool is_nm = false;       // monotone under the numerical ordering
  bool is_im = false;       // monotone under the information ordering
  bool is_constant = false;
};

GateClass classify_gate(const GateTable& g);

// Entrywise count of differing table entries, in [0, 9].
int hamming_distance(const GateTable& g1, const GateTable& g2);

enum class VocabularyTag { Full, NM, IM, NMAndIM };

struct VocabularyKind {
  VocabularyTag tag = VocabularyTag::Full;
  bool exclude_constants = false;
};

// Ascending list of gate ids in the vocabulary.
std::vector<GateId> enumerate_vocabulary(VocabularyKind kind);

// Named gates, defined by table (ids are derived, never hard-coded).
GateTable kleene_and();          // pointwise min
GateTable kleene_or();           // pointwise max
GateTable kleene_not_first();    // g(a,b) = not a
GateTable kleene_not_second();   // g(a,b) = not b
GateTable projection_first();    // g(a,b) = a
GateTable projection_second();   // g(a,b) = b
GateTable constant_gate(Trit c);

}  // namespace rdtlgn
