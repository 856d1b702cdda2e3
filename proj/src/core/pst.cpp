#include "core/pst.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace rdtlgn {

namespace {

// Minimal exact rational on int64, enough to invert the 9x9 grid matrix.
struct Rat {
  long long num = 0;
  long long den = 1;

  static long long gcd(long long a, long long b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b) {
      long long t = a % b;
      a = b;
      b = t;
    }
    return a ? a : 1;
  }

  static Rat make(long long n, long long d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    long long g = gcd(n, d);
    return Rat{n / g, d / g};
  }

  Rat operator+(const Rat& o) const { return make(num * o.den + o.num * den, den * o.den); }
  Rat operator-(const Rat& o) const { return make(num * o.den - o.num * den, den * o.den); }
  Rat operator*(const Rat& o) const { return make(num * o.num, den * o.den); }
  Rat operator/(const Rat& o) const { return make(num * o.den, den * o.num); }
  bool is_zero() const { return num == 0; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

VandermondeMatrix build_vandermonde() {
  VandermondeMatrix m;
  // Row i: monomials at grid point i = 3*ord(a) + ord(b).
  for (int ia = 0; ia < 3; ++ia) {
    for (int ib = 0; ib < 3; ++ib) {
      double a = ia - 1, b = ib - 1;
      m.V[3 * ia + ib] = monomials(a, b);
    }
  }

  // Exact Gauss-Jordan on [V | I].
  std::array<std::array<Rat, 18>, 9> aug{};
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j)
      aug[i][j] = Rat{static_cast<long long>(m.V[i][j]), 1};
    aug[i][9 + i] = Rat{1, 1};
  }
  for (int col = 0; col < 9; ++col) {
    int pivot = -1;
    for (int r = col; r < 9; ++r)
      if (!aug[r][col].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) throw std::logic_error("grid matrix is singular");
    std::swap(aug[col], aug[pivot]);
    Rat p = aug[col][col];
    for (int j = 0; j < 18; ++j) aug[col][j] = aug[col][j] / p;
    for (int r = 0; r < 9; ++r) {
      if (r == col || aug[r][col].is_zero()) continue;
      Rat f = aug[r][col];
      for (int j = 0; j < 18; ++j) aug[r][j] = aug[r][j] - f * aug[col][j];
    }
  }
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const Rat& r = aug[i][9 + j];
      if (4 % r.den != 0) throw std::logic_error("inverse entry is not a multiple of 1/4");
      m.V_inv[i][j] = r.to_double();
    }
  }
  return m;
}

}  // namespace

const VandermondeMatrix& vandermonde() {
  static const VandermondeMatrix m = build_vandermonde();
  return m;
}

std::array<double, 9> monomials(double a, double b) {
  return {1.0, a, b, a * b, a * a, b * b, a * a * b, a * b * b, a * a * b * b};
}

double eval_poly(const PolyCoeffs& w, double a, double b) {
  std::array<double, 9> m = monomials(a, b);
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += w.w[i] * m[i];
  return s;
}

void eval_poly_partials(const PolyCoeffs& w, double a, double b, double& dp_da, double& dp_db) {
  const auto& c = w.w;
  dp_da = c[1] + c[3] * b + 2.0 * a * c[4] + 2.0 * a * b * c[6] + c[7] * b * b +
          2.0 * a * b * b * c[8];
  dp_db = c[2] + c[3] * a + 2.0 * b * c[5] + c[6] * a * a + 2.0 * a * b * c[7] +
          2.0 * a * a * b * c[8];
}

PolyCoeffs coeffs_from_table(const GateTable& t) {
  const auto& m = vandermonde();
  PolyCoeffs w;
  for (int i = 0; i < 9; ++i) {
    double s = 0.0;
    for (int j = 0; j < 9; ++j) s += m.V_inv[i][j] * static_cast<double>(t.entries[j]);
    w.w[i] = s;
  }
  return w;
}

std::array<double, 9> table_values(const PolyCoeffs& w) {
  const auto& m = vandermonde();
  std::array<double, 9> t{};
  for (int i = 0; i < 9; ++i) {
    double s = 0.0;
    for (int j = 0; j < 9; ++j) s += m.V[i][j] * w.w[j];
    t[i] = s;
  }
  return t;
}

double clip(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

double clip_subgrad(double x) { return (x >= -1.0 && x <= 1.0) ? 1.0 : 0.0; }

Trit round_trit(double v) {
  if (v > 0.5) return +1;
  if (v < -0.5) return -1;
  return 0;
}

PenaltyResult commitment_penalty(const PolyCoeffs& w) {
  std::array<double, 9> t = table_values(w);
  std::array<double, 9> target{};
  for (int i = 0; i < 9; ++i) target[i] = static_cast<double>(round_trit(t[i]));
  return table_distance_penalty(w, target);
}

PenaltyResult table_distance_penalty(const PolyCoeffs& w, const std::array<double, 9>& target) {
  const auto& m = vandermonde();
  std::array<double, 9> t = table_values(w);
  PenaltyResult out;
  std::array<double, 9> resid{};
  for (int i = 0; i < 9; ++i) {
    resid[i] = t[i] - target[i];
    out.value += resid[i] * resid[i];
  }
  // grad = 2 V^T resid
  for (int j = 0; j < 9; ++j) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) s += m.V[i][j] * resid[i];
    out.grad[j] = 2.0 * s;
  }
  return out;
}

double anneal_lambda(const AnnealSchedule& sched, int step) {
  if (step < 0 || step > sched.total_steps)
    throw std::out_of_range("anneal step outside [0, total_steps]");
  if (sched.total_steps == 0) return sched.lambda_max;
  double frac = static_cast<double>(step) / static_cast<double>(sched.total_steps);
  if (frac <= sched.warmup_frac && step != sched.total_steps) return 0.0;
  return sched.lambda_max * frac;
}

}  // namespace rdtlgn
