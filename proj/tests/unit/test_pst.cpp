#include "core/pst.hpp"

#include <cmath>

#include "core/rng.hpp"
#include "doctest.h"

using namespace rdtlgn;

TEST_CASE("vandermonde inverse is exact") {
  const auto& m = vandermonde();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      double s = 0.0;
      for (int k = 0; k < 9; ++k) s += m.V[i][k] * m.V_inv[k][j];
      CHECK(s == (i == j ? 1.0 : 0.0));  // exact: entries are quarters
      // entries are integer multiples of 1/4
      CHECK(m.V_inv[i][j] * 4.0 == std::round(m.V_inv[i][j] * 4.0));
    }
  // row for grid point (0,0) is the monomial vector at the origin
  int row_00 = 3 * 1 + 1;
  CHECK(m.V[row_00][0] == 1.0);
  for (int j = 1; j < 9; ++j) CHECK(m.V[row_00][j] == 0.0);
}

TEST_CASE("coeffs_from_table reproduces simple gates") {
  PolyCoeffs c1 = coeffs_from_table(constant_gate(+1));
  CHECK(c1.w[0] == doctest::Approx(1.0));
  for (int i = 1; i < 9; ++i) CHECK(c1.w[i] == doctest::Approx(0.0));

  PolyCoeffs cp = coeffs_from_table(projection_first());
  CHECK(cp.w[1] == doctest::Approx(1.0));
  for (int i = 0; i < 9; ++i)
    if (i != 1) CHECK(cp.w[i] == doctest::Approx(0.0));
}

TEST_CASE("table -> coeffs -> grid evaluation round-trips every gate") {
  for (int id = 0; id < GATE_COUNT; ++id) {
    GateTable g = decode_gate(static_cast<GateId>(id));
    PolyCoeffs w = coeffs_from_table(g);
    for (int ia = 0; ia < 3; ++ia)
      for (int ib = 0; ib < 3; ++ib) {
        double v = eval_poly(w, ia - 1, ib - 1);
        CHECK(std::abs(v - g.entries[3 * ia + ib]) < 1e-9);
      }
  }
}

TEST_CASE("kleene AND interpolant behaves like min on the grid and off-grid rows") {
  PolyCoeffs w = coeffs_from_table(kleene_and());
  CHECK(eval_poly(w, 0.3, -0.9) != doctest::Approx(0.3));  // not a projection
  // constant row at a = -1 extends off-grid
  CHECK(eval_poly(w, -1.0, 0.37) == doctest::Approx(-1.0));
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    double b = rng.uniform(-1.0, 1.0);
    CHECK(std::abs(eval_poly(w, -1.0, b) - (-1.0)) < 1e-9);
  }
}

TEST_CASE("clip and its subgradient") {
  CHECK(clip(0.5) == 0.5);
  CHECK(clip(1.7) == 1.0);
  CHECK(clip(-3.0) == -1.0);
  for (double x : {-1.0, 0.0, 1.0}) CHECK(clip(x) == x);
  CHECK(clip_subgrad(-1.0) == 1.0);
  CHECK(clip_subgrad(1.0) == 1.0);
  CHECK(clip_subgrad(0.2) == 1.0);
  CHECK(clip_subgrad(1.0001) == 0.0);
}

TEST_CASE("round_trit thresholds at +-0.5 with boundary toward 0") {
  CHECK(round_trit(0.7) == 1);
  CHECK(round_trit(0.5) == 0);
  CHECK(round_trit(-0.5) == 0);
  CHECK(round_trit(-0.51) == -1);
  CHECK(round_trit(0.4) == 0);
}

TEST_CASE("commitment penalty is zero exactly on ternary tables") {
  PolyCoeffs w = coeffs_from_table(kleene_or());
  PenaltyResult p = commitment_penalty(w);
  CHECK(p.value == doctest::Approx(0.0));
  for (double g : p.grad) CHECK(g == doctest::Approx(0.0));

  // one grid entry at 0.4, rest exact: value (0.4 - 0)^2
  std::array<double, 9> target{};
  GateTable g = kleene_or();
  for (int i = 0; i < 9; ++i) target[i] = g.entries[i];
  target[4] = 0.4;
  // build coefficients whose soft table equals `target`
  const auto& m = vandermonde();
  PolyCoeffs w2;
  for (int i = 0; i < 9; ++i) {
    double s = 0.0;
    for (int j = 0; j < 9; ++j) s += m.V_inv[i][j] * target[j];
    w2.w[i] = s;
  }
  // entry 4 of kleene_or grid is 0 -> soft value 0.4 rounds to 0
  PenaltyResult p2 = commitment_penalty(w2);
  CHECK(p2.value == doctest::Approx(0.16));
}

TEST_CASE("commitment penalty gradient matches central differences") {
  Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    PolyCoeffs w;
    for (int i = 0; i < 9; ++i) w.w[i] = rng.uniform(-0.6, 0.6);
    // keep grid values away from the rounding thresholds
    std::array<double, 9> t = table_values(w);
    bool near_boundary = false;
    for (double v : t)
      if (std::abs(std::abs(v) - 0.5) < 1e-3) near_boundary = true;
    if (near_boundary) continue;
    PenaltyResult p = commitment_penalty(w);
    const double h = 1e-6;
    for (int i = 0; i < 9; ++i) {
      PolyCoeffs wp = w, wm = w;
      wp.w[i] += h;
      wm.w[i] -= h;
      double fd = (commitment_penalty(wp).value - commitment_penalty(wm).value) / (2 * h);
      CHECK(std::abs(fd - p.grad[i]) < 1e-5 * std::max({1.0, std::abs(fd), std::abs(p.grad[i])}));
    }
  }
}

TEST_CASE("anneal schedule: warmup then linear") {
  AnnealSchedule sched{0.3, 100, 0.1};
  CHECK(anneal_lambda(sched, 0) == doctest::Approx(0.0));
  CHECK(anneal_lambda(sched, 5) == doctest::Approx(0.0));     // inside warmup
  CHECK(anneal_lambda(sched, 50) == doctest::Approx(0.15));   // midpoint of the ramp
  CHECK(anneal_lambda(sched, 100) == doctest::Approx(0.3));
  for (int s = 1; s <= 100; ++s)
    CHECK(anneal_lambda(sched, s) >= anneal_lambda(sched, s - 1));
  CHECK_THROWS(anneal_lambda(sched, 101));
  CHECK_THROWS(anneal_lambda(sched, -1));
}

TEST_CASE("short-circuit property across the whole library") {
  // every constant row/column of a gate extends to the off-grid interpolant
  Rng rng(3);
  int checked = 0;
  for (int id = 0; id < GATE_COUNT; id += 97) {  // sampled here; exhaustive in acceptance
    GateTable g = decode_gate(static_cast<GateId>(id));
    PolyCoeffs w = coeffs_from_table(g);
    for (int ia = 0; ia < 3; ++ia) {
      Trit c = g.entries[3 * ia];
      if (g.entries[3 * ia + 1] == c && g.entries[3 * ia + 2] == c) {
        for (int r = 0; r < 5; ++r) {
          double b = rng.uniform(-1.0, 1.0);
          CHECK(std::abs(eval_poly(w, ia - 1.0, b) - c) < 1e-9);
        }
        ++checked;
      }
    }
    for (int ib = 0; ib < 3; ++ib) {
      Trit c = g.entries[ib];
      if (g.entries[3 + ib] == c && g.entries[6 + ib] == c) {
        for (int r = 0; r < 5; ++r) {
          double a = rng.uniform(-1.0, 1.0);
          CHECK(std::abs(eval_poly(w, a, ib - 1.0) - c) < 1e-9);
        }
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}
