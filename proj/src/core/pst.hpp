#pragma once

#include <array>
#include <cstdint>

#include "core/ternary.hpp"

namespace rdtlgn {

// Coefficients of a degree-(2,2) polynomial neuron in the monomial basis
// [1, a, b, ab, a^2, b^2, a^2 b, a b^2, a^2 b^2].
struct PolyCoeffs {
  std::array<double, 9> w{};
};

// 9x9 matrix evaluating the monomial basis at the grid T^2, grid points
// ordered like GateTable entries (a outer, b inner, -1 < 0 < +1).
// Both V and V_inv are exact: V has integer entries, V_inv entries are
// integer multiples of 1/4, computed once in rational arithmetic.
struct VandermondeMatrix {
  std::array<std::array<double, 9>, 9> V{};
  std::array<std::array<double, 9>, 9> V_inv{};
};

const VandermondeMatrix& vandermonde();

std::array<double, 9> monomials(double a, double b);

double eval_poly(const PolyCoeffs& w, double a, double b);
// d/da and d/db of the polynomial at (a, b).
void eval_poly_partials(const PolyCoeffs& w, double a, double b, double& dp_da, double& dp_db);

// w = V_inv * t, reading trits as reals. Evaluating the polynomial on the
// grid reproduces the table exactly.
PolyCoeffs coeffs_from_table(const GateTable& t);

// V * w: the soft truth table (grid evaluations) of the neuron.
std::array<double, 9> table_values(const PolyCoeffs& w);

double clip(double x);
// 1 on the closed interval [-1, 1], 0 outside.
double clip_subgrad(double x);

// Nearest trit; thresholds at +-0.5 with the boundary mapping to the
// smaller-magnitude trit (0.5 -> 0, -0.5 -> 0).
Trit round_trit(double v);

struct PenaltyResult {
  double value = 0.0;
  std::array<double, 9> grad{};
};

// Squared distance from the soft truth table V*w to the nearest ternary
// table, with gradient 2 * V^T * (t - round(t)) (rounding held constant).
PenaltyResult commitment_penalty(const PolyCoeffs& w);

// Same shape of penalty against an explicit target table (used to pull
// state neurons toward a monotone vocabulary).
PenaltyResult table_distance_penalty(const PolyCoeffs& w, const std::array<double, 9>& target);

struct AnnealSchedule {
  double lambda_max = 0.3;
  int total_steps = 1;
  double warmup_frac = 0.1;  // fraction of steps held at lambda = 0
};

// 0 during warmup, then lambda_max * step / total_steps.
double anneal_lambda(const AnnealSchedule& sched, int step);

}  // namespace rdtlgn
