#include "core/circuit.hpp"

#include "core/rng.hpp"
#include "doctest.h"

using namespace rdtlgn;

namespace {

CellConfig small_config(int P, int S, int K, int L, int width, std::uint64_t seed) {
  CellConfig cc;
  cc.P = P;
  cc.S = S;
  cc.K = K;
  cc.L = L;
  cc.widths.assign(L, width);
  cc.widths.back() = S + K;
  cc.seed = seed;
  return cc;
}

// Random circuit with gates drawn from one vocabulary.
HardCircuit random_circuit(const CellConfig& cc, VocabularyKind kind, std::uint64_t seed) {
  HardCircuit c;
  c.config = cc;
  c.connectivity = build_connectivity(cc);
  auto vocab = enumerate_vocabulary(kind);
  Rng rng(seed);
  c.gates.resize(cc.L);
  for (int l = 0; l < cc.L; ++l) {
    c.gates[l].resize(cc.widths[l]);
    for (int j = 0; j < cc.widths[l]; ++j) c.gates[l][j] = vocab[rng.index(vocab.size())];
  }
  c.rebuild_tables();
  return c;
}

// h_t = NOT(h_prev); output mirrors the state.
HardCircuit not_recurrence_circuit() {
  CellConfig cc = small_config(1, 1, 1, 1, 2, 0);
  HardCircuit c;
  c.config = cc;
  c.connectivity.parents = {{{1, 1}, {1, 1}}};
  c.gates = {{encode_gate(kleene_not_first()), encode_gate(projection_first())}};
  c.rebuild_tables();
  return c;
}

std::vector<Trit> state_update(const HardCircuit& c, const std::vector<Trit>& p,
                               const std::vector<Trit>& h) {
  MonitorState st;
  st.h = h;
  std::vector<Trit> v(c.config.K);
  circuit_step(c, p.data(), st, v.data());
  return st.h;
}

bool info_leq_vec(const std::vector<Trit>& a, const std::vector<Trit>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!leq_information(a[i], b[i])) return false;
  return true;
}

void enumerate_trits(int n, std::vector<std::vector<Trit>>& out) {
  out.clear();
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    std::vector<Trit> v(n);
    long rest = code;
    for (int i = 0; i < n; ++i) {
      v[i] = trit_from_ord(rest % 3);
      rest /= 3;
    }
    out.push_back(std::move(v));
  }
}

}  // namespace

TEST_CASE("hand-built Always circuit from the all-unknown start") {
  // h_t = AND(p_t, h_prev); with h0 = 0 the first verdicts are AND(+1, 0) = 0
  CellConfig cc = small_config(1, 1, 1, 1, 2, 0);
  HardCircuit c;
  c.config = cc;
  c.connectivity.parents = {{{0, 1}, {0, 1}}};
  c.gates = {{encode_gate(kleene_and()), encode_gate(kleene_and())}};
  c.rebuild_tables();

  TritSignals in(1, 3);
  in.at(0, 0) = +1;
  in.at(0, 1) = +1;
  in.at(0, 2) = -1;
  TritSignals v = run_circuit(c, in);
  CHECK(v.at(0, 0) == 0);  // Kleene-faithful bottom start
  CHECK(v.at(0, 1) == 0);
  CHECK(v.at(0, 2) == -1);  // false is absorbing
}

TEST_CASE("verdict closure: outputs are always trits") {
  CellConfig cc = small_config(2, 3, 1, 3, 6, 4);
  HardCircuit c = random_circuit(cc, {VocabularyTag::Full, false}, 12);
  Rng rng(9);
  TritSignals in(2, 8);
  for (auto& v : in.values) v = trit_from_ord(static_cast<int>(rng.index(3)));
  TritSignals out = run_circuit(c, in);
  for (Trit v : out.values) CHECK(is_trit(v));
}

TEST_CASE("all-IM circuit: unknown in, unknown out (per-timestep abstention)") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CellConfig cc = small_config(2, 3, 1, 3, 6, seed);
    HardCircuit c = random_circuit(cc, {VocabularyTag::IM, true}, seed + 100);
    std::vector<Trit> p(cc.P, 0), h(cc.S, 0);
    MonitorState st;
    st.h = h;
    std::vector<Trit> v(cc.K);
    circuit_step(c, p.data(), st, v.data());
    for (Trit x : st.h) CHECK(x == 0);
    for (Trit x : v) CHECK(x == 0);
  }
}

TEST_CASE("all-IM circuit under full mask abstains at every timestep") {
  CellConfig cc = small_config(2, 3, 1, 3, 6, 3);
  HardCircuit c = random_circuit(cc, {VocabularyTag::IM, true}, 77);
  Rng rng(5);
  TritSignals in(2, 10);
  for (auto& v : in.values) v = trit_from_ord(static_cast<int>(rng.index(3)));
  TritSignals out = run_circuit(c, in, InputMask::of(2, {0, 1}));
  for (Trit v : out.values) CHECK(v == 0);
}

TEST_CASE("IM circuits are monotone in inputs, exhaustively") {
  CellConfig cc = small_config(2, 2, 1, 2, 4, 8);
  HardCircuit c = random_circuit(cc, {VocabularyTag::IM, true}, 31);
  std::vector<std::vector<Trit>> all_p, all_h;
  enumerate_trits(cc.P, all_p);
  enumerate_trits(cc.S, all_h);
  for (const auto& p : all_p)
    for (const auto& q : all_p) {
      if (!info_leq_vec(p, q)) continue;
      for (const auto& h : all_h) {
        std::vector<Trit> fp = state_update(c, p, h);
        std::vector<Trit> fq = state_update(c, q, h);
        CHECK(info_leq_vec(fp, fq));
      }
    }
}

TEST_CASE("masked runs of IM circuits stay below unmasked runs at every t") {
  CellConfig cc = small_config(3, 3, 1, 3, 6, 13);
  HardCircuit c = random_circuit(cc, {VocabularyTag::IM, true}, 41);
  Rng rng(21);
  TritSignals in(3, 12);
  for (auto& v : in.values) v = trit_from_ord(static_cast<int>(rng.index(3)));
  TritSignals base = run_circuit(c, in);
  for (int i = 0; i < 3; ++i) {
    TritSignals masked = run_circuit(c, in, InputMask::of(3, {i}));
    for (int t = 0; t < in.T; ++t)
      CHECK(leq_information(masked.at(0, t), base.at(0, t)));
  }
}

TEST_CASE("gate census counts and sums") {
  CellConfig cc = small_config(2, 2, 1, 2, 4, 2);
  HardCircuit c = random_circuit(cc, {VocabularyTag::Full, false}, 15);
  GateId and_id = encode_gate(kleene_and());
  for (auto& layer : c.gates)
    for (auto& g : layer) g = and_id;
  c.rebuild_tables();
  GateCensus census = gate_census(c);
  CHECK(census.total == 4 + 3);
  CHECK(census.nm_and_im == census.total);
  CHECK(census.fraction_nm_and_im == 1.0);

  c.gates[0][0] = encode_gate(kleene_not_first());
  c.rebuild_tables();
  census = gate_census(c);
  CHECK(census.nm == census.total - 1);
  CHECK(census.im == census.total);
  CHECK(census.nm_and_im == census.total - 1);
}

TEST_CASE("circuit JSON round-trip and validation") {
  CellConfig cc = small_config(2, 3, 2, 3, 5, 6);
  HardCircuit c = random_circuit(cc, {VocabularyTag::NM, true}, 19);
  std::string blob = save_circuit(c);
  HardCircuit back = load_circuit(blob);
  CHECK(back.gates == c.gates);
  CHECK(back.connectivity.parents == c.connectivity.parents);

  TritSignals in(2, 4);
  Rng rng(3);
  for (auto& v : in.values) v = trit_from_ord(static_cast<int>(rng.index(3)));
  CHECK(run_circuit(back, in).values == run_circuit(c, in).values);

  CHECK_THROWS(load_circuit(blob.substr(0, blob.size() / 3)));
  CHECK_THROWS(load_circuit("{\"format\":\"rdtlgn-circuit\",\"version\":9}"));
}

TEST_CASE("soft interpolant of a hard circuit reproduces it on trit inputs") {
  CellConfig cc = small_config(2, 3, 1, 3, 6, 9);
  HardCircuit c = random_circuit(cc, {VocabularyTag::Full, false}, 23);
  SoftCell soft = cell_from_circuit(c);
  Rng rng(7);
  TritSignals in(2, 6);
  for (auto& v : in.values) v = trit_from_ord(static_cast<int>(rng.index(3)));
  Signals in_real(2, 6);
  for (std::size_t i = 0; i < in.values.size(); ++i)
    in_real.values[i] = static_cast<double>(in.values[i]);
  TritSignals hard_v = run_circuit(c, in);
  UnrollResult soft_v = unroll(soft, in_real);
  for (int t = 0; t < 6; ++t)
    for (int k = 0; k < cc.K; ++k)
      CHECK(std::abs(static_cast<double>(hard_v.at(k, t)) - soft_v.verdicts[t][k]) < 1e-9);
}

TEST_CASE("NOT-recurrence: bottom is a fixed point, determined states cycle") {
  HardCircuit c = not_recurrence_circuit();
  std::vector<Trit> p{0};
  std::vector<Trit> h0{0};
  CHECK(state_update(c, p, h0) == h0);  // NOT(0) = 0
  std::vector<Trit> h1{+1};
  std::vector<Trit> h2 = state_update(c, p, h1);
  CHECK(h2 == std::vector<Trit>{-1});
  CHECK(state_update(c, p, h2) == h1);  // period 2
}
