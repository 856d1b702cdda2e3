#include "core/harden.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rdtlgn {

GateId round_neuron(const PolyCoeffs& w) {
  std::array<double, 9> t = table_values(w);
  GateTable g;
  for (int i = 0; i < 9; ++i) g.entries[i] = round_trit(t[i]);
  return encode_gate(g);
}

std::vector<TritSignals> teacher_verdicts(const SoftCell& cell,
                                          const std::vector<Signals>& calib_inputs,
                                          double threshold) {
  std::vector<TritSignals> out;
  out.reserve(calib_inputs.size());
  for (const Signals& x : calib_inputs) {
    UnrollResult fw = unroll(cell, x);
    TritSignals v(cell.config.K, x.T);
    for (int t = 0; t < x.T; ++t)
      for (int k = 0; k < cell.config.K; ++k)
        v.at(k, t) = soft_verdict(fw.verdicts[t][k], threshold);
    out.push_back(std::move(v));
  }
  return out;
}

long count_disagreement(const HardCircuit& c, const std::vector<TritSignals>& inputs,
                        const std::vector<TritSignals>& teacher) {
  long dis = 0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    TritSignals v = run_circuit(c, inputs[n]);
    for (int t = 0; t < v.T; ++t)
      for (int k = 0; k < v.P; ++k)
        if (v.at(k, t) != teacher[n].at(k, t)) ++dis;
  }
  return dis;
}

namespace {

constexpr long UNBOUNDED = std::numeric_limits<long>::max();

// Scores candidate gates against the teacher. Two shortcuts keep the sweep
// affordable: per-timestep reuse of the current circuit's cached activations
// while the candidate run's recurrent state still matches the baseline, and
// early abort once a candidate cannot beat the best count so far. Results
// must agree exactly with count_disagreement (covered by tests).
class DistillScorer {
public:
  DistillScorer(HardCircuit& circuit, const std::vector<TritSignals>& inputs,
                const std::vector<TritSignals>& teacher)
      : circuit_(circuit), inputs_(inputs), teacher_(teacher) {
    rebuild_baseline();
  }

  long baseline_disagreement() const { return baseline_dis_; }

  long total_verdicts() const {
    long v = 0;
    for (const auto& in : inputs_) v += static_cast<long>(in.T) * circuit_.config.K;
    return v;
  }

  // Disagreement if neuron (layer, j) used `table` instead of its current
  // gate. Aborts once the count reaches `bound` (returned value is then
  // >= bound but not exact).
  long score(int layer, int j, const std::array<Trit, 9>& table, long bound) {
    const auto& cfg = circuit_.config;
    long dis = 0;
    std::vector<Trit>& cur = scratch_a_;
    std::vector<Trit>& nxt = scratch_b_;
    std::vector<Trit> state(cfg.S);
    for (std::size_t n = 0; n < inputs_.size(); ++n) {
      const TritSignals& in = inputs_[n];
      const Baseline& base = baselines_[n];
      std::fill(state.begin(), state.end(), 0);
      bool on_baseline = true;
      for (int t = 0; t < in.T; ++t) {
        if (!on_baseline && state == base.state_in[t]) on_baseline = true;
        int first_layer;
        if (on_baseline) {
          first_layer = layer;
          if (layer == 0) {
            for (int i = 0; i < cfg.P; ++i) cur[i] = in.at(i, t);
            std::copy(base.state_in[t].begin(), base.state_in[t].end(), cur.begin() + cfg.P);
          } else {
            const auto& cached = base.post[t][layer - 1];
            std::copy(cached.begin(), cached.end(), cur.begin());
          }
        } else {
          first_layer = 0;
          for (int i = 0; i < cfg.P; ++i) cur[i] = in.at(i, t);
          std::copy(state.begin(), state.end(), cur.begin() + cfg.P);
        }
        for (int l = first_layer; l < cfg.L; ++l) {
          int width = cfg.widths[l];
          const auto& parents = circuit_.connectivity.parents[l];
          const auto& tabs = circuit_.tables[l];
          if (on_baseline && l == layer) {
            // Everything but the candidate neuron matches the cached run.
            const auto& cached = base.post[t][l];
            std::copy(cached.begin(), cached.end(), nxt.begin());
            const auto& par = parents[j];
            nxt[j] = table[3 * trit_ord(cur[par[0]]) + trit_ord(cur[par[1]])];
          } else {
            for (int q = 0; q < width; ++q) {
              const auto& par = parents[q];
              const Trit* tab = (l == layer && q == j) ? table.data() : tabs[q].data();
              nxt[q] = tab[3 * trit_ord(cur[par[0]]) + trit_ord(cur[par[1]])];
            }
          }
          cur.swap(nxt);
        }
        std::copy(cur.begin(), cur.begin() + cfg.S, state.begin());
        for (int k = 0; k < cfg.K; ++k)
          if (cur[cfg.S + k] != teacher_[n].at(k, t)) ++dis;
        if (dis >= bound) return dis;
        if (on_baseline && t + 1 < in.T && state != base.state_in[t + 1]) on_baseline = false;
      }
    }
    return dis;
  }

  // Re-run the current circuit and refresh the caches (call after a swap).
  void rebuild_baseline() {
    const auto& cfg = circuit_.config;
    int max_width = cfg.P + cfg.S;
    for (int w : cfg.widths) max_width = std::max(max_width, w);
    scratch_a_.assign(max_width, 0);
    scratch_b_.assign(max_width, 0);
    baselines_.assign(inputs_.size(), Baseline{});
    baseline_dis_ = 0;
    std::vector<Trit> cur(max_width), nxt(max_width);
    for (std::size_t n = 0; n < inputs_.size(); ++n) {
      const TritSignals& in = inputs_[n];
      Baseline& base = baselines_[n];
      base.state_in.assign(in.T, std::vector<Trit>(cfg.S, 0));
      base.post.assign(in.T, std::vector<std::vector<Trit>>(cfg.L));
      std::vector<Trit> state(cfg.S, 0);
      for (int t = 0; t < in.T; ++t) {
        base.state_in[t] = state;
        for (int i = 0; i < cfg.P; ++i) cur[i] = in.at(i, t);
        std::copy(state.begin(), state.end(), cur.begin() + cfg.P);
        for (int l = 0; l < cfg.L; ++l) {
          int width = cfg.widths[l];
          const auto& parents = circuit_.connectivity.parents[l];
          const auto& tabs = circuit_.tables[l];
          for (int q = 0; q < width; ++q) {
            const auto& par = parents[q];
            nxt[q] = tabs[q][3 * trit_ord(cur[par[0]]) + trit_ord(cur[par[1]])];
          }
          base.post[t][l].assign(nxt.begin(), nxt.begin() + width);
          cur.swap(nxt);
        }
        std::copy(cur.begin(), cur.begin() + cfg.S, state.begin());
        for (int k = 0; k < cfg.K; ++k)
          if (cur[cfg.S + k] != teacher_[n].at(k, t)) ++baseline_dis_;
      }
    }
  }

private:
  struct Baseline {
    std::vector<std::vector<Trit>> state_in;           // [t][S], state entering step t
    std::vector<std::vector<std::vector<Trit>>> post;  // [t][layer][neuron]
  };

  HardCircuit& circuit_;
  const std::vector<TritSignals>& inputs_;
  const std::vector<TritSignals>& teacher_;
  std::vector<Baseline> baselines_;
  std::vector<Trit> scratch_a_, scratch_b_;
  long baseline_dis_ = 0;
};

std::vector<std::array<Trit, 9>> decode_all(const std::vector<GateId>& ids) {
  std::vector<std::array<Trit, 9>> out;
  out.reserve(ids.size());
  for (GateId id : ids) out.push_back(decode_gate(id).entries);
  return out;
}

template <class T>
std::vector<T> take_first(const std::vector<T>& v, int n) {
  if (n <= 0 || n >= static_cast<int>(v.size())) return v;
  return std::vector<T>(v.begin(), v.begin() + n);
}

}  // namespace

std::pair<HardCircuit, DistillReport> distill(const SoftCell& cell,
                                              const std::vector<Signals>& calib_soft_inputs,
                                              const std::vector<TritSignals>& calib_trit_inputs,
                                              const DistillConfig& dc) {
  if (calib_soft_inputs.empty() || calib_trit_inputs.empty())
    throw std::invalid_argument("distill: empty calibration set");
  if (calib_soft_inputs.size() != calib_trit_inputs.size())
    throw std::invalid_argument("distill: calibration input size mismatch");

  std::vector<Signals> soft_in = take_first(calib_soft_inputs, dc.calib_count);
  std::vector<TritSignals> trit_in = take_first(calib_trit_inputs, dc.calib_count);

  // (i) teacher verdicts from the soft network
  std::vector<TritSignals> teacher = teacher_verdicts(cell, soft_in, dc.teacher_threshold);

  // (ii) warm start: per-neuron rounding against the full library
  HardCircuit circuit = circuit_from_cell_rounded(cell);

  const std::vector<GateId> vocab_ids = enumerate_vocabulary(dc.vocabulary);
  if (vocab_ids.empty()) throw std::invalid_argument("distill: empty vocabulary");
  const std::vector<std::array<Trit, 9>> vocab_tables = decode_all(vocab_ids);
  std::vector<bool> in_vocab(GATE_COUNT, false);
  for (GateId id : vocab_ids) in_vocab[id] = true;

  DistillScorer scorer(circuit, trit_in, teacher);

  DistillReport report;
  report.phase = "phase1";
  report.total_verdicts = scorer.total_verdicts();
  report.warmstart_disagreement = scorer.baseline_disagreement();

  // (iii)/(iv) sweeps, output-to-input, until a sweep changes nothing.
  long current = report.warmstart_disagreement;
  const auto& cfg = circuit.config;
  for (int sweep = 0; sweep < dc.max_sweeps; ++sweep) {
    bool changed = false;
    for (int l = cfg.L - 1; l >= 0; --l) {
      for (int j = cfg.widths[l] - 1; j >= 0; --j) {
        GateId incumbent = circuit.gates[l][j];
        bool incumbent_ok = in_vocab[incumbent];
        long best = incumbent_ok ? current : UNBOUNDED;
        int best_idx = -1;
        for (std::size_t c = 0; c < vocab_ids.size(); ++c) {
          if (vocab_ids[c] == incumbent) continue;
          long d = scorer.score(l, j, vocab_tables[c], best);
          if (d < best) {  // strict: ties keep the incumbent, then lower id
            best = d;
            best_idx = static_cast<int>(c);
          }
        }
        if (best_idx >= 0) {
          SwapRecord rec;
          rec.layer = l;
          rec.neuron = j;
          rec.from = incumbent;
          rec.to = vocab_ids[best_idx];
          rec.forced = !incumbent_ok;
          rec.accuracy_delta = static_cast<double>(current - best) / report.total_verdicts;
          circuit.gates[l][j] = vocab_ids[best_idx];
          circuit.tables[l][j] = vocab_tables[best_idx];
          scorer.rebuild_baseline();
          current = scorer.baseline_disagreement();
          report.swaps.push_back(rec);
          changed = true;
        }
      }
    }
    report.sweep_disagreement.push_back(current);
    ++report.sweeps_run;
    if (!changed) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged && current == 0) report.converged = true;
  report.census = gate_census(circuit);
  return {std::move(circuit), std::move(report)};
}

std::pair<HardCircuit, DistillReport> refine_to_intersection(
    const HardCircuit& circuit_in, const std::vector<TritSignals>& calib_trit_inputs,
    const std::vector<TritSignals>& teacher, const DistillConfig& dc) {
  if (calib_trit_inputs.empty()) throw std::invalid_argument("refine: empty calibration set");

  std::vector<TritSignals> trit_in = take_first(calib_trit_inputs, dc.calib_count);
  std::vector<TritSignals> teach = take_first(teacher, dc.calib_count);
  if (trit_in.size() != teach.size())
    throw std::invalid_argument("refine: teacher size mismatch");

  HardCircuit circuit = circuit_in;
  circuit.rebuild_tables();

  const std::vector<GateId> inter_ids = enumerate_vocabulary({VocabularyTag::NMAndIM, true});
  const std::vector<std::array<Trit, 9>> inter_tables = decode_all(inter_ids);
  std::vector<bool> in_inter(GATE_COUNT, false);
  for (GateId id : inter_ids) in_inter[id] = true;

  DistillScorer scorer(circuit, trit_in, teach);

  DistillReport report;
  report.phase = "phase2";
  report.total_verdicts = scorer.total_verdicts();
  report.warmstart_disagreement = scorer.baseline_disagreement();

  long current = report.warmstart_disagreement;
  const double budget = dc.eta * static_cast<double>(report.total_verdicts);
  const long bound_slack = static_cast<long>(budget) + 2;
  const auto& cfg = circuit.config;
  for (int l = cfg.L - 1; l >= 0; --l) {
    for (int j = cfg.widths[l] - 1; j >= 0; --j) {
      GateId incumbent = circuit.gates[l][j];
      if (in_inter[incumbent]) continue;
      GateTable inc_table = decode_gate(incumbent);
      std::vector<int> order(inter_ids.size());
      for (std::size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
      std::vector<int> dist(inter_ids.size());
      for (std::size_t c = 0; c < inter_ids.size(); ++c)
        dist[c] = hamming_distance(inc_table, decode_gate(inter_ids[c]));
      // nearest by Hamming distance; ties toward lower id (inter_ids ascend)
      std::stable_sort(order.begin(), order.end(),
                       [&](int x, int y) { return dist[x] < dist[y]; });
      for (int c : order) {
        long d = scorer.score(l, j, inter_tables[c], current + bound_slack);
        if (static_cast<double>(d - current) < budget) {  // accuracy drop below eta
          SwapRecord rec;
          rec.layer = l;
          rec.neuron = j;
          rec.from = incumbent;
          rec.to = inter_ids[c];
          rec.accuracy_delta = static_cast<double>(current - d) / report.total_verdicts;
          circuit.gates[l][j] = inter_ids[c];
          circuit.tables[l][j] = inter_tables[c];
          scorer.rebuild_baseline();
          current = scorer.baseline_disagreement();
          report.swaps.push_back(rec);
          break;
        }
      }
    }
  }
  report.sweep_disagreement.push_back(current);
  report.sweeps_run = 1;
  report.converged = true;
  report.census = gate_census(circuit);
  return {std::move(circuit), std::move(report)};
}

}  // namespace rdtlgn
