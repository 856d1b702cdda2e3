#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "core/rng.hpp"

namespace rdtlgn {

double accuracy(const TritSignals& verdicts, const std::vector<Trit>& labels) {
  if (verdicts.T != static_cast<int>(labels.size()))
    throw std::invalid_argument("accuracy: length mismatch");
  if (verdicts.T == 0) return 0.0;
  long correct = 0;
  for (int t = 0; t < verdicts.T; ++t)
    if (verdicts.at(0, t) == labels[t]) ++correct;
  return static_cast<double>(correct) / verdicts.T;
}

double pooled_accuracy(const std::vector<TritSignals>& verdicts,
                       const std::vector<std::vector<Trit>>& labels) {
  long correct = 0, total = 0;
  for (std::size_t n = 0; n < verdicts.size(); ++n) {
    if (verdicts[n].T != static_cast<int>(labels[n].size()))
      throw std::invalid_argument("accuracy: length mismatch");
    for (int t = 0; t < verdicts[n].T; ++t) {
      if (verdicts[n].at(0, t) == labels[n][t]) ++correct;
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / total : 0.0;
}

double pooled_accuracy_rows(const std::vector<std::vector<Trit>>& verdicts,
                            const std::vector<std::vector<Trit>>& labels) {
  long correct = 0, total = 0;
  for (std::size_t n = 0; n < verdicts.size(); ++n) {
    if (verdicts[n].size() != labels[n].size())
      throw std::invalid_argument("accuracy: length mismatch");
    for (std::size_t t = 0; t < verdicts[n].size(); ++t) {
      if (verdicts[n][t] == labels[n][t]) ++correct;
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / total : 0.0;
}

double preservation(const HardCircuit& c, const std::vector<TritSignals>& inputs,
                    const std::vector<TritSignals>& baseline_verdicts) {
  long flips = 0, total = 0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    for (int p = 0; p < c.config.P; ++p) {
      TritSignals masked = run_circuit(c, inputs[n], InputMask::of(c.config.P, {p}));
      for (int t = 0; t < masked.T; ++t) {
        for (int k = 0; k < c.config.K; ++k) {
          Trit base = baseline_verdicts[n].at(k, t);
          Trit got = masked.at(k, t);
          if (base != 0 && got == static_cast<Trit>(-base)) ++flips;
          ++total;
        }
      }
    }
  }
  return total ? 1.0 - static_cast<double>(flips) / total : 1.0;
}

namespace {

// Verdict traces for every subset of unmasked predicates; subset bit i set
// means predicate i is observed.
std::vector<TritSignals> all_subset_runs(const HardCircuit& c, const TritSignals& input) {
  int P = c.config.P;
  int n_subsets = 1 << P;
  std::vector<TritSignals> runs(n_subsets);
  for (int u = 0; u < n_subsets; ++u) {
    std::vector<int> mask_idx;
    for (int p = 0; p < P; ++p)
      if (!(u & (1 << p))) mask_idx.push_back(p);
    runs[u] = run_circuit(c, input, InputMask::of(P, mask_idx));
  }
  return runs;
}

double lattice_compliance_impl(const HardCircuit& c, const std::vector<TritSignals>& inputs,
                               bool covering_only) {
  int P = c.config.P;
  if (P > 12) throw std::invalid_argument("lattice_compliance: P too large for 2^P enumeration");
  long compliant = 0, total = 0;
  for (const TritSignals& input : inputs) {
    std::vector<TritSignals> runs = all_subset_runs(c, input);
    int n_subsets = 1 << P;
    for (int b = 1; b < n_subsets; ++b) {
      // proper subsets a of b
      for (int a = (b - 1) & b;; a = (a - 1) & b) {
        bool is_covering = __builtin_popcount(b & ~a) == 1;
        if (!covering_only || is_covering) {
          for (int t = 0; t < input.T; ++t) {
            for (int k = 0; k < c.config.K; ++k) {
              Trit va = runs[a].at(k, t);
              Trit vb = runs[b].at(k, t);
              if (leq_information(va, vb)) ++compliant;
              ++total;
            }
          }
        }
        if (a == 0) break;
      }
    }
  }
  return total ? static_cast<double>(compliant) / total : 1.0;
}

}  // namespace

double lattice_compliance(const HardCircuit& c, const std::vector<TritSignals>& inputs) {
  return lattice_compliance_impl(c, inputs, false);
}

double lattice_compliance_covering(const HardCircuit& c,
                                   const std::vector<TritSignals>& inputs) {
  return lattice_compliance_impl(c, inputs, true);
}

namespace {

void enumerate_masks(int P, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < P; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

std::map<int, double> abstention_profile(const HardCircuit& c,
                                         const std::vector<TritSignals>& inputs,
                                         const std::vector<int>& levels, std::uint64_t seed) {
  int P = c.config.P;
  std::map<int, double> curve;
  for (int k : levels) {
    if (k < 0 || k > P) throw std::invalid_argument("abstention_profile: bad dropout level");
    std::vector<std::vector<int>> masks;
    if (binomial(P, k) <= 64.0) {
      enumerate_masks(P, k, masks);
    } else {
      Rng rng(mix_seed(seed, k));
      for (int s = 0; s < 64; ++s) {
        std::vector<int> all(P);
        for (int i = 0; i < P; ++i) all[i] = i;
        rng.shuffle(all);
        all.resize(k);
        std::sort(all.begin(), all.end());
        masks.push_back(all);
      }
    }
    long zeros = 0, total = 0;
    for (const auto& m : masks) {
      InputMask im = InputMask::of(P, m);
      for (const TritSignals& input : inputs) {
        TritSignals v = run_circuit(c, input, im);
        for (int t = 0; t < v.T; ++t)
          for (int kk = 0; kk < c.config.K; ++kk) {
            if (v.at(kk, t) == 0) ++zeros;
            ++total;
          }
      }
    }
    curve[k] = total ? static_cast<double>(zeros) / total : 0.0;
  }
  return curve;
}

FixedPointProbe fixed_point_probe_from(const HardCircuit& c, const std::vector<Trit>& p,
                                       const std::vector<Trit>& start, int max_steps) {
  if (static_cast<int>(p.size()) != c.config.P)
    throw std::invalid_argument("fixed_point_probe: input size mismatch");
  if (static_cast<int>(start.size()) != c.config.S)
    throw std::invalid_argument("fixed_point_probe: start size mismatch");
  std::vector<std::vector<Trit>> history;
  history.push_back(start);
  MonitorState st;
  st.h = start;
  std::vector<Trit> verdict(c.config.K);
  FixedPointProbe probe;
  for (int step = 1; step <= max_steps; ++step) {
    circuit_step(c, p.data(), st, verdict.data());
    // fixed point?
    if (st.h == history.back()) {
      probe.converged = true;
      probe.steps = step - 1;  // state stopped changing after step-1 applications
      return probe;
    }
    // cycle?
    for (std::size_t i = 0; i + 1 < history.size(); ++i) {
      if (history[i] == st.h) {
        probe.converged = false;
        probe.cycle_period = static_cast<int>(history.size() - i);
        probe.steps = step;
        return probe;
      }
    }
    history.push_back(st.h);
  }
  probe.converged = false;
  probe.steps = max_steps;
  return probe;
}

FixedPointProbe fixed_point_probe(const HardCircuit& c, const std::vector<Trit>& p,
                                  int max_steps) {
  return fixed_point_probe_from(c, p, std::vector<Trit>(c.config.S, 0), max_steps);
}

// ---------------------------------------------------------------------------
// Elman baseline

ElmanBaseline make_elman(int P, int S, std::uint64_t seed) {
  ElmanBaseline m;
  m.P = P;
  m.S = S;
  Rng rng(mix_seed(seed, 0x656c6d61ULL));
  double s_in = 1.0 / std::sqrt(static_cast<double>(P));
  double s_hh = 1.0 / std::sqrt(static_cast<double>(S));
  m.w_ih.resize(static_cast<std::size_t>(S) * P);
  for (double& v : m.w_ih) v = rng.uniform(-s_in, s_in);
  m.w_hh.resize(static_cast<std::size_t>(S) * S);
  for (double& v : m.w_hh) v = rng.uniform(-s_hh, s_hh);
  m.b_h.assign(S, 0.0);
  m.w_ho.resize(static_cast<std::size_t>(3) * S);
  for (double& v : m.w_ho) v = rng.uniform(-s_hh, s_hh);
  m.b_o.assign(3, 0.0);
  return m;
}

namespace {

struct ElmanTape {
  std::vector<std::vector<double>> h;       // [t][S], post-tanh
  std::vector<std::array<double, 3>> prob;  // softmax outputs
};

void elman_forward(const ElmanBaseline& m, const Signals& x, const InputMask& mask,
                   ElmanTape& tape) {
  int T = x.T;
  tape.h.assign(T, std::vector<double>(m.S, 0.0));
  tape.prob.assign(T, {});
  std::vector<double> h_prev(m.S, 0.0);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < m.S; ++s) {
      double a = m.b_h[s];
      for (int p = 0; p < m.P; ++p) {
        double xv = mask.is_masked(p) ? 0.0 : x.at(p, t);
        a += m.w_ih[static_cast<std::size_t>(s) * m.P + p] * xv;
      }
      for (int q = 0; q < m.S; ++q)
        a += m.w_hh[static_cast<std::size_t>(s) * m.S + q] * h_prev[q];
      tape.h[t][s] = std::tanh(a);
    }
    std::array<double, 3> logits{};
    for (int c = 0; c < 3; ++c) {
      logits[c] = m.b_o[c];
      for (int s = 0; s < m.S; ++s)
        logits[c] += m.w_ho[static_cast<std::size_t>(c) * m.S + s] * tape.h[t][s];
    }
    double mx = std::max({logits[0], logits[1], logits[2]});
    double z = 0.0;
    for (int c = 0; c < 3; ++c) {
      tape.prob[t][c] = std::exp(logits[c] - mx);
      z += tape.prob[t][c];
    }
    for (int c = 0; c < 3; ++c) tape.prob[t][c] /= z;
    h_prev = tape.h[t];
  }
}

}  // namespace

double elman_loss(const ElmanBaseline& m, const Signals& x, const std::vector<Trit>& labels,
                  const std::array<double, 3>& class_weights) {
  ElmanTape tape;
  elman_forward(m, x, InputMask::none(), tape);
  double loss = 0.0, wsum = 0.0;
  for (int t = 0; t < x.T; ++t) {
    int cls = trit_ord(labels[t]);
    double w = class_weights[cls];
    loss += -w * std::log(std::max(tape.prob[t][cls], 1e-300));
    wsum += w;
  }
  return wsum > 0.0 ? loss / wsum : 0.0;
}

ElmanGrad elman_loss_and_grad(const ElmanBaseline& m, const Signals& x,
                              const std::vector<Trit>& labels,
                              const std::array<double, 3>& class_weights) {
  int T = x.T;
  ElmanTape tape;
  elman_forward(m, x, InputMask::none(), tape);

  ElmanGrad out;
  out.g = m;
  std::fill(out.g.w_ih.begin(), out.g.w_ih.end(), 0.0);
  std::fill(out.g.w_hh.begin(), out.g.w_hh.end(), 0.0);
  std::fill(out.g.b_h.begin(), out.g.b_h.end(), 0.0);
  std::fill(out.g.w_ho.begin(), out.g.w_ho.end(), 0.0);
  std::fill(out.g.b_o.begin(), out.g.b_o.end(), 0.0);

  double wsum = 0.0;
  for (int t = 0; t < T; ++t) wsum += class_weights[trit_ord(labels[t])];
  if (wsum <= 0.0) wsum = 1.0;

  std::vector<double> dh_next(m.S, 0.0);
  for (int t = T - 1; t >= 0; --t) {
    int cls = trit_ord(labels[t]);
    double w = class_weights[cls];
    out.loss += -w * std::log(std::max(tape.prob[t][cls], 1e-300)) / wsum;

    // dlogits = w * (prob - onehot) / wsum
    std::array<double, 3> dlogit{};
    for (int c = 0; c < 3; ++c)
      dlogit[c] = w * (tape.prob[t][c] - (c == cls ? 1.0 : 0.0)) / wsum;

    std::vector<double> dh(m.S, 0.0);
    for (int c = 0; c < 3; ++c) {
      out.g.b_o[c] += dlogit[c];
      for (int s = 0; s < m.S; ++s) {
        out.g.w_ho[static_cast<std::size_t>(c) * m.S + s] += dlogit[c] * tape.h[t][s];
        dh[s] += dlogit[c] * m.w_ho[static_cast<std::size_t>(c) * m.S + s];
      }
    }
    for (int s = 0; s < m.S; ++s) dh[s] += dh_next[s];

    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    std::vector<double> zeros;
    const std::vector<double>* hp;
    if (t > 0) {
      hp = &tape.h[t - 1];
    } else {
      zeros.assign(m.S, 0.0);
      hp = &zeros;
    }
    for (int s = 0; s < m.S; ++s) {
      double da = dh[s] * (1.0 - tape.h[t][s] * tape.h[t][s]);  // tanh'
      out.g.b_h[s] += da;
      for (int p = 0; p < m.P; ++p)
        out.g.w_ih[static_cast<std::size_t>(s) * m.P + p] += da * x.at(p, t);
      for (int q = 0; q < m.S; ++q) {
        out.g.w_hh[static_cast<std::size_t>(s) * m.S + q] += da * (*hp)[q];
        dh_next[q] += da * m.w_hh[static_cast<std::size_t>(s) * m.S + q];
      }
    }
  }
  return out;
}

namespace {

struct ElmanAdam {
  ElmanBaseline m1, m2;
  int step = 0;
};

void elman_adam_init(ElmanAdam& st, const ElmanBaseline& m) {
  st.m1 = m;
  st.m2 = m;
  auto zero = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
  zero(st.m1.w_ih); zero(st.m1.w_hh); zero(st.m1.b_h); zero(st.m1.w_ho); zero(st.m1.b_o);
  zero(st.m2.w_ih); zero(st.m2.w_hh); zero(st.m2.b_h); zero(st.m2.w_ho); zero(st.m2.b_o);
}

void elman_adam_step(ElmanBaseline& m, ElmanAdam& st, const ElmanBaseline& g, double lr) {
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++st.step;
  double c1 = 1.0 - std::pow(b1, st.step);
  double c2 = 1.0 - std::pow(b2, st.step);
  auto upd = [&](std::vector<double>& w, std::vector<double>& m1, std::vector<double>& m2,
                 const std::vector<double>& gr) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      m1[i] = b1 * m1[i] + (1.0 - b1) * gr[i];
      m2[i] = b2 * m2[i] + (1.0 - b2) * gr[i] * gr[i];
      w[i] -= lr * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + eps);
    }
  };
  upd(m.w_ih, st.m1.w_ih, st.m2.w_ih, g.w_ih);
  upd(m.w_hh, st.m1.w_hh, st.m2.w_hh, g.w_hh);
  upd(m.b_h, st.m1.b_h, st.m2.b_h, g.b_h);
  upd(m.w_ho, st.m1.w_ho, st.m2.w_ho, g.w_ho);
  upd(m.b_o, st.m1.b_o, st.m2.b_o, g.b_o);
}

void elman_axpy(ElmanBaseline& acc, const ElmanBaseline& g, double scale) {
  auto add = [&](std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
  };
  add(acc.w_ih, g.w_ih);
  add(acc.w_hh, g.w_hh);
  add(acc.b_h, g.b_h);
  add(acc.w_ho, g.w_ho);
  add(acc.b_o, g.b_o);
}

}  // namespace

TrainHistory train_elman(ElmanBaseline& m, const std::vector<Signals>& inputs,
                         const std::vector<std::vector<Trit>>& labels_ctq,
                         const TrainConfig& tc) {
  if (inputs.empty() || inputs.size() != labels_ctq.size())
    throw std::invalid_argument("train_elman: bad dataset");

  TrainHistory hist;
  std::array<double, 3> cw = tc.class_weights;
  if (tc.auto_class_weights) {
    std::array<long, 3> counts{0, 0, 0};
    long total = 0;
    for (const auto& tr : labels_ctq)
      for (Trit l : tr) {
        ++counts[trit_ord(l)];
        ++total;
      }
    for (int c = 0; c < 3; ++c)
      cw[c] = counts[c] > 0 ? static_cast<double>(total) / (3.0 * counts[c]) : 1.0;
  }
  hist.class_weights = cw;

  int n = static_cast<int>(inputs.size());
  ElmanAdam adam;
  elman_adam_init(adam, m);
  Rng rng(mix_seed(tc.seed, 0x726e6e21ULL));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    long cnt = 0;
    for (int lo = 0; lo < n; lo += tc.batch_size) {
      int hi = std::min(n, lo + tc.batch_size);
      ElmanBaseline grad = m;
      auto zero = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
      zero(grad.w_ih); zero(grad.w_hh); zero(grad.b_h); zero(grad.w_ho); zero(grad.b_o);
      double batch_loss = 0.0;
      for (int idx = lo; idx < hi; ++idx) {
        ElmanGrad g = elman_loss_and_grad(m, inputs[order[idx]], labels_ctq[order[idx]], cw);
        batch_loss += g.loss;
        elman_axpy(grad, g.g, 1.0 / (hi - lo));
      }
      elman_adam_step(m, adam, grad, tc.learning_rate);
      epoch_loss += batch_loss;
      cnt += (hi - lo);
    }
    EpochRecord rec;
    rec.task_loss = epoch_loss / cnt;
    long correct = 0, total = 0;
    for (int i = 0; i < n; ++i) {
      std::vector<Trit> v = eval_elman(m, inputs[i]);
      for (int t = 0; t < inputs[i].T; ++t) {
        if (v[t] == labels_ctq[i][t]) ++correct;
        ++total;
      }
    }
    rec.soft_accuracy = total ? static_cast<double>(correct) / total : 0.0;
    hist.epochs.push_back(rec);
  }
  return hist;
}

std::vector<Trit> eval_elman(const ElmanBaseline& m, const Signals& x, const InputMask& mask) {
  ElmanTape tape;
  elman_forward(m, x, mask, tape);
  std::vector<Trit> out(x.T, 0);
  for (int t = 0; t < x.T; ++t) {
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if (tape.prob[t][c] > tape.prob[t][best]) best = c;
    out[t] = trit_from_ord(best);
  }
  return out;
}

double elman_preservation(const ElmanBaseline& m, const std::vector<Signals>& inputs) {
  long flips = 0, total = 0;
  for (const Signals& x : inputs) {
    std::vector<Trit> base = eval_elman(m, x);
    for (int p = 0; p < m.P; ++p) {
      std::vector<Trit> masked = eval_elman(m, x, InputMask::of(m.P, {p}));
      for (int t = 0; t < x.T; ++t) {
        if (base[t] != 0 && masked[t] == static_cast<Trit>(-base[t])) ++flips;
        ++total;
      }
    }
  }
  return total ? 1.0 - static_cast<double>(flips) / total : 1.0;
}

}  // namespace rdtlgn
