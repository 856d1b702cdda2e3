#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/ternary.hpp"

namespace rdtlgn {

// Discrete-time interval [a, b] in timesteps, a <= b.
struct Interval {
  int a = 0;
  int b = 0;
  int width() const { return b - a + 1; }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Bounded STL AST. Unary nodes use `left`.
struct Formula {
  enum class Kind { Predicate, Not, And, Or, Always, Eventually, Until };

  Kind kind = Kind::Predicate;
  int pred = -1;          // Predicate only
  Interval interval{};    // temporal operators only
  FormulaPtr left, right;
};

FormulaPtr make_pred(int index);
FormulaPtr make_not(FormulaPtr child);
FormulaPtr make_and(FormulaPtr l, FormulaPtr r);
FormulaPtr make_or(FormulaPtr l, FormulaPtr r);
FormulaPtr make_always(Interval iv, FormulaPtr child);
FormulaPtr make_eventually(Interval iv, FormulaPtr child);
FormulaPtr make_until(Interval iv, FormulaPtr l, FormulaPtr r);

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), pos_(pos) {}
  std::size_t position() const { return pos_; }

private:
  std::size_t pos_;
};

// Grammar: predicates p<k>; '!' NOT; '&' AND; '|' OR; G[a,b] / F[a,b] prefix;
// U[a,b] infix; parentheses; whitespace insignificant.
// Precedence NOT > AND > OR > UNTIL; Until is right-associative.
FormulaPtr parse_formula(const std::string& text);

std::string format_formula(const Formula& f);

bool formula_equal(const Formula& a, const Formula& b);

// Largest predicate index occurring in the formula (-1 if none).
int max_pred_index(const Formula& f);
void collect_pred_indices(const Formula& f, std::vector<int>& out);

// Max future reach in timesteps: how far past t the oracle may look.
int horizon(const Formula& f);

// State complexity B(phi): 0 for predicates, additive over And/Or,
// w + B(child) for Always/Eventually, 2w + B(l) + B(r) for Until.
int state_complexity(const Formula& f);

// d * ceil(log2 k_max) with d the temporal nesting depth and k_max the
// maximum interval width; 0 if the formula has no temporal operator.
int depth_bound(const Formula& f);

// Dense row-major P x T matrix of real-valued predicate signals.
struct Signals {
  int P = 0;
  int T = 0;
  std::vector<double> values;  // values[p * T + t]

  Signals() = default;
  Signals(int p, int t) : P(p), T(t), values(static_cast<std::size_t>(p) * t, 0.0) {}
  double at(int p, int t) const { return values[static_cast<std::size_t>(p) * T + t]; }
  double& at(int p, int t) { return values[static_cast<std::size_t>(p) * T + t]; }
};

// P x T matrix of trits (also used for K x T verdict traces).
struct TritSignals {
  int P = 0;
  int T = 0;
  std::vector<Trit> values;

  TritSignals() = default;
  TritSignals(int p, int t) : P(p), T(t), values(static_cast<std::size_t>(p) * t, 0) {}
  Trit at(int p, int t) const { return values[static_cast<std::size_t>(p) * T + t]; }
  Trit& at(int p, int t) { return values[static_cast<std::size_t>(p) * T + t]; }
};

// Quantitative robustness per the standard min/max semantics, windows
// clamped to [0, T-1] (if t+a > T-1 the window is the singleton {T-1}).
// Until: max over tau in the window of min(rho2(tau), min_{s in [t,tau]} rho1(s)).
double robustness_oracle(const Formula& f, const Signals& x, int t);

// Same recursion over trit signals; min/max/negation restricted to T yield
// exactly the Kleene verdict.
Trit robustness_qtc(const Formula& f, const TritSignals& x, int t);

struct RobustnessInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Causal evaluation at t = prefix.T - 1 given samples 0..t of a trajectory
// of total length total_T: returns [lo, hi] containing the oracle
// robustness of every completion (predicates assumed normalized to [-1,1]).
RobustnessInterval robustness_causal(const Formula& f, const Signals& prefix, int total_T);

// +1 if lo > delta, -1 if hi < -delta, else 0.
Trit causal_verdict(const RobustnessInterval& iv, double delta);

// Sign-preserving quantization: +1 if v > delta, -1 if v < -delta, else 0.
TritSignals quantize_signal(const Signals& x, double delta);
Trit quantize_value(double v, double delta);

enum class LabelPipeline { CtQ, QtC };

struct LabelConfig {
  LabelPipeline pipeline = LabelPipeline::CtQ;
  double delta = 0.2;
};

// CtQ: threshold the oracle robustness at +-delta.
// QtC: ternary robustness over quantize_signal(x, delta).
std::vector<Trit> make_labels(const Formula& f, const Signals& x, const LabelConfig& cfg);

}  // namespace rdtlgn
