#include "core/eval.hpp"

#include <cmath>

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

std::vector<TritSignals> random_trit_inputs(int n, int P, int T, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TritSignals> out;
  for (int i = 0; i < n; ++i) {
    TritSignals s(P, T);
    for (auto& v : s.values) v = trit_from_ord(static_cast<int>(rng.index(3)));
    out.push_back(std::move(s));
  }
  return out;
}

// Independent nested-loop recount of preservation, no shortcuts.
double preservation_naive(const HardCircuit& c, const std::vector<TritSignals>& inputs) {
  long flips = 0, total = 0;
  for (const auto& in : inputs) {
    TritSignals base = run_circuit(c, in);
    for (int p = 0; p < c.config.P; ++p) {
      TritSignals masked = run_circuit(c, in, InputMask::of(c.config.P, {p}));
      for (int t = 0; t < in.T; ++t)
        for (int k = 0; k < c.config.K; ++k) {
          Trit b = base.at(k, t), m = masked.at(k, t);
          if ((b == +1 && m == -1) || (b == -1 && m == +1)) ++flips;
          ++total;
        }
    }
  }
  return 1.0 - static_cast<double>(flips) / total;
}

// Independent lattice recount: enumerate subsets as explicit index vectors.
double lattice_naive(const HardCircuit& c, const std::vector<TritSignals>& inputs) {
  int P = c.config.P;
  long ok = 0, total = 0;
  for (const auto& in : inputs) {
    std::vector<TritSignals> runs(1 << P);
    for (int u = 0; u < (1 << P); ++u) {
      std::vector<int> masked;
      for (int p = 0; p < P; ++p)
        if (!(u & (1 << p))) masked.push_back(p);
      runs[u] = run_circuit(c, in, InputMask::of(P, masked));
    }
    for (int a = 0; a < (1 << P); ++a)
      for (int b = 0; b < (1 << P); ++b) {
        if (a == b || (a & b) != a) continue;  // need a proper subset of b
        for (int t = 0; t < in.T; ++t)
          for (int k = 0; k < c.config.K; ++k) {
            Trit va = runs[a].at(k, t), vb = runs[b].at(k, t);
            if (va == 0 || va == vb) ++ok;
            ++total;
          }
      }
  }
  return static_cast<double>(ok) / total;
}

}  // namespace

TEST_CASE("accuracy basics") {
  TritSignals v(1, 4);
  v.at(0, 0) = +1;
  v.at(0, 1) = 0;
  v.at(0, 2) = -1;
  v.at(0, 3) = +1;
  CHECK(accuracy(v, {+1, 0, -1, +1}) == 1.0);
  CHECK(accuracy(v, {-1, +1, +1, -1}) == 0.0);
  CHECK(accuracy(v, {+1, 0, +1, -1}) == 0.5);
  CHECK_THROWS(accuracy(v, {+1}));
}

TEST_CASE("preservation on special circuits") {
  // all-IM circuits never flip
  CellConfig cc = small_config(3, 3, 1, 3, 6, 1);
  HardCircuit im = random_circuit(cc, {VocabularyTag::IM, true}, 5);
  auto inputs = random_trit_inputs(6, 3, 8, 9);
  std::vector<TritSignals> base;
  for (const auto& in : inputs) base.push_back(run_circuit(im, in));
  CHECK(preservation(im, inputs, base) == 1.0);

  // constant +1 output never flips either
  HardCircuit cst = im;
  for (auto& layer : cst.gates)
    for (auto& g : layer) g = encode_gate(constant_gate(+1));
  cst.rebuild_tables();
  std::vector<TritSignals> cbase;
  for (const auto& in : inputs) cbase.push_back(run_circuit(cst, in));
  CHECK(preservation(cst, inputs, cbase) == 1.0);
}

TEST_CASE("preservation matches the naive recount on mixed circuits") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    CellConfig cc = small_config(2, 2, 1, 2, 4, seed);
    HardCircuit c = random_circuit(cc, {VocabularyTag::Full, false}, seed + 50);
    auto inputs = random_trit_inputs(5, 2, 6, seed + 70);
    std::vector<TritSignals> base;
    for (const auto& in : inputs) base.push_back(run_circuit(c, in));
    CHECK(preservation(c, inputs, base) == doctest::Approx(preservation_naive(c, inputs)));
  }
}

TEST_CASE("lattice compliance: all-IM gives 1.0, matches naive recount otherwise") {
  CellConfig cc = small_config(2, 2, 1, 2, 4, 3);
  HardCircuit im = random_circuit(cc, {VocabularyTag::IM, true}, 11);
  auto inputs = random_trit_inputs(4, 2, 5, 13);
  CHECK(lattice_compliance(im, inputs) == 1.0);
  CHECK(lattice_compliance_covering(im, inputs) == 1.0);

  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    HardCircuit c = random_circuit(cc, {VocabularyTag::Full, false}, seed + 90);
    CHECK(lattice_compliance(c, inputs) == doctest::Approx(lattice_naive(c, inputs)));
  }
}

TEST_CASE("covering-pair compliance 1.0 implies full-pair compliance 1.0") {
  CellConfig cc = small_config(3, 2, 1, 2, 4, 5);
  auto inputs = random_trit_inputs(4, 3, 5, 17);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    HardCircuit c = random_circuit(cc, {VocabularyTag::Full, false}, seed + 200);
    if (lattice_compliance_covering(c, inputs) == 1.0)
      CHECK(lattice_compliance(c, inputs) == 1.0);
  }
}

TEST_CASE("P=1 lattice is the single dropout pair") {
  CellConfig cc = small_config(1, 2, 1, 2, 4, 6);
  HardCircuit c = random_circuit(cc, {VocabularyTag::Full, false}, 33);
  auto inputs = random_trit_inputs(3, 1, 6, 35);
  double lat = lattice_compliance(c, inputs);
  // recount by hand: pair (masked, unmasked) only
  long ok = 0, total = 0;
  for (const auto& in : inputs) {
    TritSignals full = run_circuit(c, in);
    TritSignals none = run_circuit(c, in, InputMask::of(1, {0}));
    for (int t = 0; t < in.T; ++t) {
      if (none.at(0, t) == 0 || none.at(0, t) == full.at(0, t)) ++ok;
      ++total;
    }
  }
  CHECK(lat == doctest::Approx(static_cast<double>(ok) / total));
}

TEST_CASE("abstention profile: level 0 and blackout behave as expected") {
  CellConfig cc = small_config(3, 3, 1, 3, 6, 7);
  HardCircuit im = random_circuit(cc, {VocabularyTag::IM, true}, 21);
  auto inputs = random_trit_inputs(5, 3, 8, 23);
  auto curve = abstention_profile(im, inputs, {0, 1, 2, 3});
  CHECK(curve.at(3) == 1.0);  // full blackout of an all-IM circuit abstains
  // monotone for IM circuits
  CHECK(curve.at(0) <= curve.at(1) + 1e-12);
  CHECK(curve.at(1) <= curve.at(2) + 1e-12);
  CHECK(curve.at(2) <= curve.at(3) + 1e-12);

  // constant +1 circuit never abstains at level 0
  HardCircuit cst = im;
  for (auto& layer : cst.gates)
    for (auto& g : layer) g = encode_gate(constant_gate(+1));
  cst.rebuild_tables();
  auto cc2 = abstention_profile(cst, inputs, {0});
  CHECK(cc2.at(0) == 0.0);
}

TEST_CASE("fixed-point probe: IM circuits converge within S steps from bottom") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    CellConfig cc = small_config(2, 3, 1, 2, 4, seed);
    HardCircuit c = random_circuit(cc, {VocabularyTag::IM, true}, seed + 300);
    std::vector<std::vector<Trit>> all_p;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        all_p.push_back({static_cast<Trit>(a), static_cast<Trit>(b)});
    for (const auto& p : all_p) {
      FixedPointProbe probe = fixed_point_probe(c, p, 20);
      CHECK(probe.converged);
      CHECK(probe.steps <= cc.S);
    }
  }
}

TEST_CASE("fixed-point probe detects the NOT period-2 cycle") {
  CellConfig cc = small_config(1, 1, 1, 1, 2, 0);
  HardCircuit c;
  c.config = cc;
  c.connectivity.parents = {{{1, 1}, {1, 1}}};
  c.gates = {{encode_gate(kleene_not_first()), encode_gate(projection_first())}};
  c.rebuild_tables();

  std::vector<Trit> p{0};
  FixedPointProbe from_bottom = fixed_point_probe(c, p, 10);
  CHECK(from_bottom.converged);
  CHECK(from_bottom.steps == 0);  // bottom is already the fixed point

  FixedPointProbe from_true = fixed_point_probe_from(c, p, {+1}, 10);
  CHECK_FALSE(from_true.converged);
  CHECK(from_true.cycle_period == 2);
}

TEST_CASE("elman gradient matches finite differences") {
  Rng rng(41);
  ElmanBaseline m = make_elman(2, 3, 7);
  Signals x(2, 2);  // 2-step unroll
  for (double& v : x.values) v = rng.uniform(-1.0, 1.0);
  std::vector<Trit> labels{+1, -1};
  std::array<double, 3> cw{1.0, 1.3, 0.9};
  ElmanGrad g = elman_loss_and_grad(m, x, labels, cw);
  const double h = 1e-6;
  auto check_block = [&](std::vector<double>& w, const std::vector<double>& grad) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      double keep = w[i];
      w[i] = keep + h;
      double fp = elman_loss(m, x, labels, cw);
      w[i] = keep - h;
      double fm = elman_loss(m, x, labels, cw);
      w[i] = keep;
      double fd = (fp - fm) / (2 * h);
      CHECK(std::abs(fd - grad[i]) < 1e-4 * std::max({1.0, std::abs(fd), std::abs(grad[i])}));
    }
  };
  check_block(m.w_ih, g.g.w_ih);
  check_block(m.w_hh, g.g.w_hh);
  check_block(m.b_h, g.g.b_h);
  check_block(m.w_ho, g.g.w_ho);
  check_block(m.b_o, g.g.b_o);
}

TEST_CASE("elman learns a constant-label toy task") {
  Rng rng(43);
  std::vector<Signals> inputs;
  std::vector<std::vector<Trit>> labels;
  for (int n = 0; n < 8; ++n) {
    Signals x(2, 6);
    for (double& v : x.values) v = rng.uniform(-1.0, 1.0);
    inputs.push_back(x);
    labels.push_back(std::vector<Trit>(6, +1));
  }
  ElmanBaseline m = make_elman(2, 4, 3);
  TrainConfig tc;
  tc.epochs = 25;
  tc.batch_size = 4;
  tc.auto_class_weights = false;
  tc.seed = 11;
  TrainHistory hist = train_elman(m, inputs, labels, tc);
  CHECK(hist.epochs.back().soft_accuracy == doctest::Approx(1.0));
}

TEST_CASE("elman preservation is measurable") {
  ElmanBaseline m = make_elman(2, 3, 19);
  Rng rng(47);
  std::vector<Signals> inputs;
  for (int n = 0; n < 4; ++n) {
    Signals x(2, 5);
    for (double& v : x.values) v = rng.uniform(-1.0, 1.0);
    inputs.push_back(x);
  }
  double p = elman_preservation(m, inputs);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
}
