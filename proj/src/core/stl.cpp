#include "core/stl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace rdtlgn {

FormulaPtr make_pred(int index) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Predicate;
  f->pred = index;
  return f;
}

FormulaPtr make_not(FormulaPtr child) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Not;
  f->left = std::move(child);
  return f;
}

static FormulaPtr make_binary(Formula::Kind k, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->left = std::move(l);
  f->right = std::move(r);
  return f;
}

FormulaPtr make_and(FormulaPtr l, FormulaPtr r) {
  return make_binary(Formula::Kind::And, std::move(l), std::move(r));
}

FormulaPtr make_or(FormulaPtr l, FormulaPtr r) {
  return make_binary(Formula::Kind::Or, std::move(l), std::move(r));
}

static FormulaPtr make_temporal(Formula::Kind k, Interval iv, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->interval = iv;
  f->left = std::move(l);
  f->right = std::move(r);
  return f;
}

FormulaPtr make_always(Interval iv, FormulaPtr child) {
  return make_temporal(Formula::Kind::Always, iv, std::move(child), nullptr);
}

FormulaPtr make_eventually(Interval iv, FormulaPtr child) {
  return make_temporal(Formula::Kind::Eventually, iv, std::move(child), nullptr);
}

FormulaPtr make_until(Interval iv, FormulaPtr l, FormulaPtr r) {
  return make_temporal(Formula::Kind::Until, iv, std::move(l), std::move(r));
}

namespace {

class Parser {
public:
  explicit Parser(const std::string& text) : s_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_until();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

private:
  const std::string& s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  int parse_int() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected integer", pos_);
    return std::stoi(s_.substr(start, pos_ - start));
  }

  Interval parse_interval() {
    std::size_t at = pos_;
    if (!eat('[')) throw ParseError("expected '['", pos_);
    Interval iv;
    iv.a = parse_int();
    if (!eat(',')) throw ParseError("expected ','", pos_);
    iv.b = parse_int();
    if (!eat(']')) throw ParseError("expected ']'", pos_);
    if (iv.a > iv.b) throw ParseError("interval bound a > b", at);
    return iv;
  }

  // until := or ('U[a,b]' until)?   (right-associative, loosest binding)
  FormulaPtr parse_until() {
    FormulaPtr left = parse_or();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == 'U') {
      ++pos_;
      Interval iv = parse_interval();
      FormulaPtr right = parse_until();
      return make_until(iv, std::move(left), std::move(right));
    }
    return left;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (eat('|')) f = make_or(std::move(f), parse_and());
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_unary();
    while (eat('&')) f = make_and(std::move(f), parse_unary());
    return f;
  }

  FormulaPtr parse_unary() {
    char c = peek();
    if (c == '!') {
      ++pos_;
      return make_not(parse_unary());
    }
    if (c == 'G') {
      ++pos_;
      Interval iv = parse_interval();
      return make_always(iv, parse_unary());
    }
    if (c == 'F') {
      ++pos_;
      Interval iv = parse_interval();
      return make_eventually(iv, parse_unary());
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      FormulaPtr f = parse_until();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return f;
    }
    if (c == 'p') {
      ++pos_;
      return make_pred(parse_int());
    }
    throw ParseError("expected formula", pos_);
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) { return Parser(text).parse(); }

std::string format_formula(const Formula& f) {
  using K = Formula::Kind;
  auto iv = [&] {
    return "[" + std::to_string(f.interval.a) + "," + std::to_string(f.interval.b) + "]";
  };
  switch (f.kind) {
    case K::Predicate: return "p" + std::to_string(f.pred);
    case K::Not: return "!" + format_formula(*f.left);
    case K::And: return "(" + format_formula(*f.left) + " & " + format_formula(*f.right) + ")";
    case K::Or: return "(" + format_formula(*f.left) + " | " + format_formula(*f.right) + ")";
    case K::Always: return "G" + iv() + " " + format_formula(*f.left);
    case K::Eventually: return "F" + iv() + " " + format_formula(*f.left);
    case K::Until:
      return "(" + format_formula(*f.left) + " U" + iv() + " " + format_formula(*f.right) + ")";
  }
  return "";
}

bool formula_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Formula::Kind::Predicate: return a.pred == b.pred;
    case Formula::Kind::Not: return formula_equal(*a.left, *b.left);
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return formula_equal(*a.left, *b.left) && formula_equal(*a.right, *b.right);
    case Formula::Kind::Always:
    case Formula::Kind::Eventually:
      return a.interval.a == b.interval.a && a.interval.b == b.interval.b &&
             formula_equal(*a.left, *b.left);
    case Formula::Kind::Until:
      return a.interval.a == b.interval.a && a.interval.b == b.interval.b &&
             formula_equal(*a.left, *b.left) && formula_equal(*a.right, *b.right);
  }
  return false;
}

int max_pred_index(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Predicate: return f.pred;
    case Formula::Kind::Not:
    case Formula::Kind::Always:
    case Formula::Kind::Eventually: return max_pred_index(*f.left);
    default: return std::max(max_pred_index(*f.left), max_pred_index(*f.right));
  }
}

void collect_pred_indices(const Formula& f, std::vector<int>& out) {
  switch (f.kind) {
    case Formula::Kind::Predicate: out.push_back(f.pred); return;
    case Formula::Kind::Not:
    case Formula::Kind::Always:
    case Formula::Kind::Eventually: collect_pred_indices(*f.left, out); return;
    default:
      collect_pred_indices(*f.left, out);
      collect_pred_indices(*f.right, out);
  }
}

int horizon(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Predicate: return 0;
    case Formula::Kind::Not: return horizon(*f.left);
    case Formula::Kind::And:
    case Formula::Kind::Or: return std::max(horizon(*f.left), horizon(*f.right));
    case Formula::Kind::Always:
    case Formula::Kind::Eventually: return f.interval.b + horizon(*f.left);
    case Formula::Kind::Until:
      return f.interval.b + std::max(horizon(*f.left), horizon(*f.right));
  }
  return 0;
}

int state_complexity(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Predicate: return 0;
    case Formula::Kind::Not: return state_complexity(*f.left);
    case Formula::Kind::And:
    case Formula::Kind::Or: return state_complexity(*f.left) + state_complexity(*f.right);
    case Formula::Kind::Always:
    case Formula::Kind::Eventually: return f.interval.width() + state_complexity(*f.left);
    case Formula::Kind::Until:
      return 2 * f.interval.width() + state_complexity(*f.left) + state_complexity(*f.right);
  }
  return 0;
}

namespace {

// Temporal operators only, along root-to-leaf paths.
int temporal_depth(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Predicate: return 0;
    case Formula::Kind::Not: return temporal_depth(*f.left);
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return std::max(temporal_depth(*f.left), temporal_depth(*f.right));
    case Formula::Kind::Always:
    case Formula::Kind::Eventually: return 1 + temporal_depth(*f.left);
    case Formula::Kind::Until:
      return 1 + std::max(temporal_depth(*f.left), temporal_depth(*f.right));
  }
  return 0;
}

int max_interval_width(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Predicate: return 0;
    case Formula::Kind::Not: return max_interval_width(*f.left);
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return std::max(max_interval_width(*f.left), max_interval_width(*f.right));
    case Formula::Kind::Always:
    case Formula::Kind::Eventually:
      return std::max(f.interval.width(), max_interval_width(*f.left));
    case Formula::Kind::Until:
      return std::max(f.interval.width(),
                      std::max(max_interval_width(*f.left), max_interval_width(*f.right)));
  }
  return 0;
}

}  // namespace

int depth_bound(const Formula& f) {
  int d = temporal_depth(f);
  if (d == 0) return 0;
  int k_max = max_interval_width(f);
  int log2_k = 0;
  while ((1 << log2_k) < k_max) ++log2_k;  // ceil(log2 k_max)
  return d * log2_k;
}

namespace {

// Clamp a temporal window at evaluation time t to [0, T-1]; if the whole
// window lies past the end it collapses to the singleton {T-1}.
void clamp_window(int t, Interval iv, int T, int& lo, int& hi) {
  lo = t + iv.a;
  hi = std::min(t + iv.b, T - 1);
  if (lo > T - 1) lo = hi = T - 1;
}

template <class Scalar, class Leaf>
Scalar eval_recursive(const Formula& f, const Leaf& leaf, int t, int T) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Predicate: return leaf(f.pred, t);
    case K::Not: return -eval_recursive<Scalar>(*f.left, leaf, t, T);
    case K::And:
      return std::min(eval_recursive<Scalar>(*f.left, leaf, t, T),
                      eval_recursive<Scalar>(*f.right, leaf, t, T));
    case K::Or:
      return std::max(eval_recursive<Scalar>(*f.left, leaf, t, T),
                      eval_recursive<Scalar>(*f.right, leaf, t, T));
    case K::Always: {
      int lo, hi;
      clamp_window(t, f.interval, T, lo, hi);
      Scalar v = eval_recursive<Scalar>(*f.left, leaf, lo, T);
      for (int tau = lo + 1; tau <= hi; ++tau)
        v = std::min(v, eval_recursive<Scalar>(*f.left, leaf, tau, T));
      return v;
    }
    case K::Eventually: {
      int lo, hi;
      clamp_window(t, f.interval, T, lo, hi);
      Scalar v = eval_recursive<Scalar>(*f.left, leaf, lo, T);
      for (int tau = lo + 1; tau <= hi; ++tau)
        v = std::max(v, eval_recursive<Scalar>(*f.left, leaf, tau, T));
      return v;
    }
    case K::Until: {
      // max over tau of min(rho2(tau), min_{s in [t, tau]} rho1(s));
      // the prefix minimum starts at t (closed prefix).
      int lo, hi;
      clamp_window(t, f.interval, T, lo, hi);
      Scalar prefix_min = eval_recursive<Scalar>(*f.left, leaf, t, T);
      for (int s = t + 1; s < lo; ++s)
        prefix_min = std::min(prefix_min, eval_recursive<Scalar>(*f.left, leaf, s, T));
      Scalar best{};
      bool first = true;
      for (int tau = lo; tau <= hi; ++tau) {
        if (tau > t) {
          Scalar l = eval_recursive<Scalar>(*f.left, leaf, tau, T);
          prefix_min = std::min(prefix_min, l);
        }
        Scalar cand = std::min(eval_recursive<Scalar>(*f.right, leaf, tau, T), prefix_min);
        if (first || cand > best) best = cand;
        first = false;
      }
      return best;
    }
  }
  return Scalar{};
}

}  // namespace

double robustness_oracle(const Formula& f, const Signals& x, int t) {
  auto leaf = [&](int p, int tau) { return x.at(p, tau); };
  return eval_recursive<double>(f, leaf, t, x.T);
}

Trit robustness_qtc(const Formula& f, const TritSignals& x, int t) {
  auto leaf = [&](int p, int tau) { return static_cast<int>(x.at(p, tau)); };
  return static_cast<Trit>(eval_recursive<int>(f, leaf, t, x.T));
}

namespace {

RobustnessInterval iv_neg(RobustnessInterval v) { return {-v.hi, -v.lo}; }
RobustnessInterval iv_min(RobustnessInterval a, RobustnessInterval b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}
RobustnessInterval iv_max(RobustnessInterval a, RobustnessInterval b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// Interval evaluation: observed leaves are degenerate, unobserved leaves
// span the normalized predicate range [-1, +1].
RobustnessInterval eval_causal(const Formula& f, const Signals& prefix, int t, int T) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Predicate: {
      if (t < prefix.T) {
        double v = prefix.at(f.pred, t);
        return {v, v};
      }
      return {-1.0, +1.0};
    }
    case K::Not: return iv_neg(eval_causal(*f.left, prefix, t, T));
    case K::And:
      return iv_min(eval_causal(*f.left, prefix, t, T), eval_causal(*f.right, prefix, t, T));
    case K::Or:
      return iv_max(eval_causal(*f.left, prefix, t, T), eval_causal(*f.right, prefix, t, T));
    case K::Always: {
      int lo, hi;
      clamp_window(t, f.interval, T, lo, hi);
      RobustnessInterval v = eval_causal(*f.left, prefix, lo, T);
      for (int tau = lo + 1; tau <= hi; ++tau)
        v = iv_min(v, eval_causal(*f.left, prefix, tau, T));
      return v;
    }
    case K::Eventually: {
      int lo, hi;
      clamp_window(t, f.interval, T, lo, hi);
      RobustnessInterval v = eval_causal(*f.left, prefix, lo, T);
      for (int tau = lo + 1; tau <= hi; ++tau)
        v = iv_max(v, eval_causal(*f.left, prefix, tau, T));
      return v;
    }
    case K::Until: {
      int lo, hi;
      clamp_window(t, f.interval, T, lo, hi);
      RobustnessInterval prefix_min = eval_causal(*f.left, prefix, t, T);
      for (int s = t + 1; s < lo; ++s)
        prefix_min = iv_min(prefix_min, eval_causal(*f.left, prefix, s, T));
      RobustnessInterval best;
      bool first = true;
      for (int tau = lo; tau <= hi; ++tau) {
        if (tau > t) prefix_min = iv_min(prefix_min, eval_causal(*f.left, prefix, tau, T));
        RobustnessInterval cand = iv_min(eval_causal(*f.right, prefix, tau, T), prefix_min);
        best = first ? cand : iv_max(best, cand);
        first = false;
      }
      return best;
    }
  }
  return {};
}

}  // namespace

RobustnessInterval robustness_causal(const Formula& f, const Signals& prefix, int total_T) {
  int t = prefix.T - 1;
  return eval_causal(f, prefix, t, total_T);
}

Trit causal_verdict(const RobustnessInterval& iv, double delta) {
  if (iv.lo > delta) return +1;
  if (iv.hi < -delta) return -1;
  return 0;
}

Trit quantize_value(double v, double delta) {
  if (v > delta) return +1;
  if (v < -delta) return -1;
  return 0;
}

TritSignals quantize_signal(const Signals& x, double delta) {
  TritSignals out(x.P, x.T);
  for (std::size_t i = 0; i < x.values.size(); ++i)
    out.values[i] = quantize_value(x.values[i], delta);
  return out;
}

std::vector<Trit> make_labels(const Formula& f, const Signals& x, const LabelConfig& cfg) {
  std::vector<Trit> labels(x.T, 0);
  if (cfg.pipeline == LabelPipeline::CtQ) {
    for (int t = 0; t < x.T; ++t)
      labels[t] = quantize_value(robustness_oracle(f, x, t), cfg.delta);
  } else {
    TritSignals q = quantize_signal(x, cfg.delta);
    for (int t = 0; t < x.T; ++t) labels[t] = robustness_qtc(f, q, t);
  }
  return labels;
}

}  // namespace rdtlgn
