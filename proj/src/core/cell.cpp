#include "core/cell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "core/rng.hpp"
#include "json.hpp"

namespace rdtlgn {

void CellConfig::validate() const {
  if (P < 1 || S < 0 || K < 1 || L < 1)
    throw std::invalid_argument("cell config: P >= 1, S >= 0, K >= 1, L >= 1 required");
  if (static_cast<int>(widths.size()) != L)
    throw std::invalid_argument("cell config: widths.size() must equal L");
  if (widths.back() != S + K)
    throw std::invalid_argument("cell config: last layer width must equal S + K");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("cell config: layer widths must be positive");
}

ConnectivityMap build_connectivity(const CellConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, 0x636f6e6eULL));
  ConnectivityMap map;
  map.parents.resize(cfg.L);
  for (int l = 0; l < cfg.L; ++l) {
    int prev = (l == 0) ? cfg.P + cfg.S : cfg.widths[l - 1];
    int width = cfg.widths[l];
    auto& layer = map.parents[l];
    layer.resize(width);
    for (int j = 0; j < width; ++j) {
      layer[j][0] = static_cast<int>(rng.index(prev));
      layer[j][1] = static_cast<int>(rng.index(prev));
    }
    // Repair: every previous-layer node gets at least one child where the
    // 2 * width parent slots permit.
    std::vector<int> fanout(prev, 0);
    for (int j = 0; j < width; ++j) {
      ++fanout[layer[j][0]];
      ++fanout[layer[j][1]];
    }
    for (int node = 0; node < prev; ++node) {
      if (fanout[node] > 0) continue;
      bool placed = false;
      for (int j = 0; j < width && !placed; ++j) {
        for (int s = 0; s < 2 && !placed; ++s) {
          if (fanout[layer[j][s]] >= 2) {
            --fanout[layer[j][s]];
            layer[j][s] = node;
            ++fanout[node];
            placed = true;
          }
        }
      }
      // If nothing was stealable the layer is too narrow; leave best effort.
    }
  }
  return map;
}

SoftCell build_cell(const CellConfig& cfg) {
  cfg.validate();
  SoftCell cell;
  cell.config = cfg;
  cell.connectivity = build_connectivity(cfg);
  Rng rng(mix_seed(cfg.seed, 0x696e6974ULL));
  static const PolyCoeffs proj_a = coeffs_from_table(projection_first());
  static const PolyCoeffs proj_b = coeffs_from_table(projection_second());
  cell.coeffs.resize(cfg.L);
  for (int l = 0; l < cfg.L; ++l) {
    cell.coeffs[l].resize(cfg.widths[l]);
    for (auto& w : cell.coeffs[l]) {
      const PolyCoeffs& proj = rng.index(2) == 0 ? proj_a : proj_b;
      for (int i = 0; i < 9; ++i)
        w.w[i] = 0.7 * proj.w[i] + 0.3 * rng.uniform(-0.3, 0.3);
    }
  }
  return cell;
}

namespace {

void forward_layers(const SoftCell& cell, const std::vector<double>& z,
                    std::vector<std::vector<double>>* pre_out,
                    std::vector<std::vector<double>>* post_out, std::vector<double>& final_out) {
  const auto& cfg = cell.config;
  std::vector<double> cur = z;
  std::vector<double> next;
  for (int l = 0; l < cfg.L; ++l) {
    int width = cfg.widths[l];
    next.assign(width, 0.0);
    std::vector<double> pre(width);
    for (int j = 0; j < width; ++j) {
      const auto& par = cell.connectivity.parents[l][j];
      double v = eval_poly(cell.coeffs[l][j], cur[par[0]], cur[par[1]]);
      pre[j] = v;
      next[j] = clip(v);
    }
    if (pre_out) (*pre_out)[l] = std::move(pre);
    if (post_out) (*post_out)[l] = next;
    cur = next;
  }
  final_out = cur;
}

}  // namespace

StepResult cell_step(const SoftCell& cell, const std::vector<double>& p,
                     const std::vector<double>& h_prev) {
  const auto& cfg = cell.config;
  if (static_cast<int>(p.size()) != cfg.P || static_cast<int>(h_prev.size()) != cfg.S)
    throw std::invalid_argument("cell_step: input sizes do not match config");
  std::vector<double> z;
  z.reserve(cfg.P + cfg.S);
  z.insert(z.end(), p.begin(), p.end());
  z.insert(z.end(), h_prev.begin(), h_prev.end());
  std::vector<double> out;
  forward_layers(cell, z, nullptr, nullptr, out);
  StepResult r;
  r.h.assign(out.begin(), out.begin() + cfg.S);
  r.y.assign(out.begin() + cfg.S, out.end());
  return r;
}

UnrollResult unroll(const SoftCell& cell, const Signals& preds) {
  const auto& cfg = cell.config;
  if (preds.P != cfg.P) throw std::invalid_argument("unroll: predicate count mismatch");
  int T = preds.T;
  UnrollResult res;
  res.verdicts.resize(T);
  res.tape.z.resize(T);
  res.tape.pre.assign(T, std::vector<std::vector<double>>(cfg.L));
  res.tape.post.assign(T, std::vector<std::vector<double>>(cfg.L));
  std::vector<double> h(cfg.S, 0.0);  // all-unknown start
  std::vector<double> out;
  for (int t = 0; t < T; ++t) {
    std::vector<double>& z = res.tape.z[t];
    z.resize(cfg.P + cfg.S);
    for (int p = 0; p < cfg.P; ++p) z[p] = preds.at(p, t);
    std::copy(h.begin(), h.end(), z.begin() + cfg.P);
    forward_layers(cell, z, &res.tape.pre[t], &res.tape.post[t], out);
    h.assign(out.begin(), out.begin() + cfg.S);
    res.verdicts[t].assign(out.begin() + cfg.S, out.end());
  }
  return res;
}

Trit soft_verdict(double y, double threshold) {
  if (y > threshold) return +1;
  if (y < -threshold) return -1;
  return 0;
}

namespace {

GradSlab zero_grad(const CellConfig& cfg) {
  GradSlab g(cfg.L);
  for (int l = 0; l < cfg.L; ++l) g[l].assign(cfg.widths[l], std::array<double, 9>{});
  return g;
}

void axpy_grad(GradSlab& acc, const GradSlab& g, double scale) {
  for (std::size_t l = 0; l < acc.size(); ++l)
    for (std::size_t j = 0; j < acc[l].size(); ++j)
      for (int i = 0; i < 9; ++i) acc[l][j][i] += scale * g[l][j][i];
}

}  // namespace

TrajectoryGrad task_loss_and_grad(const SoftCell& cell, const Signals& preds,
                                  const std::vector<Trit>& labels,
                                  const std::array<double, 3>& class_weights) {
  const auto& cfg = cell.config;
  int T = preds.T;
  if (static_cast<int>(labels.size()) != T)
    throw std::invalid_argument("labels length must equal trajectory length");

  UnrollResult fw = unroll(cell, preds);

  TrajectoryGrad out;
  out.grad = zero_grad(cfg);
  if (T == 0) return out;

  double weight_sum = 0.0;
  for (int t = 0; t < T; ++t) weight_sum += class_weights[trit_ord(labels[t])];
  if (weight_sum <= 0.0) weight_sum = 1.0;

  // dL/dy for every output; L = sum_t w_t * sum_k (y_tk - l_t)^2 / sum_t w_t
  std::vector<std::vector<double>> dY(T, std::vector<double>(cfg.K, 0.0));
  for (int t = 0; t < T; ++t) {
    double w = class_weights[trit_ord(labels[t])];
    for (int k = 0; k < cfg.K; ++k) {
      double diff = fw.verdicts[t][k] - static_cast<double>(labels[t]);
      out.task_loss += w * diff * diff;
      dY[t][k] = 2.0 * w * diff / weight_sum;
    }
  }
  out.task_loss /= weight_sum;

  std::vector<double> dnext_h(cfg.S, 0.0);
  std::vector<double> dout, din;
  for (int t = T - 1; t >= 0; --t) {
    dout.assign(cfg.widths[cfg.L - 1], 0.0);
    for (int k = 0; k < cfg.K; ++k) dout[cfg.S + k] = dY[t][k];
    for (int s = 0; s < cfg.S; ++s) dout[s] += dnext_h[s];

    for (int l = cfg.L - 1; l >= 0; --l) {
      int prev_width = (l == 0) ? cfg.P + cfg.S : cfg.widths[l - 1];
      const std::vector<double>& inputs = (l == 0) ? fw.tape.z[t] : fw.tape.post[t][l - 1];
      din.assign(prev_width, 0.0);
      for (int j = 0; j < cfg.widths[l]; ++j) {
        double g = dout[j] * clip_subgrad(fw.tape.pre[t][l][j]);
        if (g == 0.0) continue;
        const auto& par = cell.connectivity.parents[l][j];
        double a = inputs[par[0]], b = inputs[par[1]];
        std::array<double, 9> m = monomials(a, b);
        for (int i = 0; i < 9; ++i) out.grad[l][j][i] += g * m[i];
        double dp_da, dp_db;
        eval_poly_partials(cell.coeffs[l][j], a, b, dp_da, dp_db);
        din[par[0]] += g * dp_da;
        din[par[1]] += g * dp_db;
      }
      dout = din;
    }
    // dout now covers z_t = [p_t; h_{t-1}]
    for (int s = 0; s < cfg.S; ++s) dnext_h[s] = dout[cfg.P + s];
  }
  return out;
}

namespace {

const std::vector<std::array<double, 9>>& nm_target_tables() {
  static const std::vector<std::array<double, 9>> tables = [] {
    std::vector<std::array<double, 9>> out;
    for (GateId id : enumerate_vocabulary({VocabularyTag::NM, false})) {
      GateTable g = decode_gate(id);
      std::array<double, 9> t{};
      for (int i = 0; i < 9; ++i) t[i] = static_cast<double>(g.entries[i]);
      out.push_back(t);
    }
    return out;
  }();
  return tables;
}

// Squared distance from the soft table to the nearest NM truth table.
PenaltyResult nearest_nm_penalty(const PolyCoeffs& w) {
  std::array<double, 9> soft = table_values(w);
  const auto& targets = nm_target_tables();
  double best = 1e300;
  const std::array<double, 9>* best_t = nullptr;
  for (const auto& t : targets) {
    double d = 0.0;
    for (int i = 0; i < 9; ++i) {
      double r = soft[i] - t[i];
      d += r * r;
    }
    if (d < best) {
      best = d;
      best_t = &t;
    }
  }
  return table_distance_penalty(w, *best_t);
}

}  // namespace

RegularizerGrad regularizer_and_grad(const SoftCell& cell, bool nm_enforce) {
  const auto& cfg = cell.config;
  RegularizerGrad out;
  out.grad = zero_grad(cfg);
  int n_neurons = 0;
  for (int l = 0; l < cfg.L; ++l) n_neurons += cfg.widths[l];
  double inv = 1.0 / static_cast<double>(n_neurons);
  for (int l = 0; l < cfg.L; ++l) {
    for (int j = 0; j < cfg.widths[l]; ++j) {
      PenaltyResult p = commitment_penalty(cell.coeffs[l][j]);
      out.value += inv * p.value;
      for (int i = 0; i < 9; ++i) out.grad[l][j][i] += inv * p.grad[i];
      bool feeds_state = (l == cfg.L - 1) && (j < cfg.S);
      if (nm_enforce && feeds_state) {
        PenaltyResult nm = nearest_nm_penalty(cell.coeffs[l][j]);
        out.value += inv * nm.value;
        for (int i = 0; i < 9; ++i) out.grad[l][j][i] += inv * nm.grad[i];
      }
    }
  }
  return out;
}

double total_loss(const SoftCell& cell, const Signals& preds, const std::vector<Trit>& labels,
                  const std::array<double, 3>& class_weights, double lambda, bool nm_enforce) {
  TrajectoryGrad t = task_loss_and_grad(cell, preds, labels, class_weights);
  RegularizerGrad r = regularizer_and_grad(cell, nm_enforce);
  return t.task_loss + lambda * r.value;
}

namespace {

struct AdamState {
  GradSlab m, v;
  int step = 0;
};

void adam_update(SoftCell& cell, AdamState& st, const GradSlab& grad, double lr) {
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++st.step;
  double c1 = 1.0 - std::pow(b1, st.step);
  double c2 = 1.0 - std::pow(b2, st.step);
  for (std::size_t l = 0; l < grad.size(); ++l) {
    for (std::size_t j = 0; j < grad[l].size(); ++j) {
      for (int i = 0; i < 9; ++i) {
        double g = grad[l][j][i];
        st.m[l][j][i] = b1 * st.m[l][j][i] + (1.0 - b1) * g;
        st.v[l][j][i] = b2 * st.v[l][j][i] + (1.0 - b2) * g * g;
        double mhat = st.m[l][j][i] / c1;
        double vhat = st.v[l][j][i] / c2;
        cell.coeffs[l][j].w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
    }
  }
}

}  // namespace

TrainHistory train(SoftCell& cell, const std::vector<Signals>& inputs,
                   const std::vector<std::vector<Trit>>& labels, const TrainConfig& tc) {
  if (inputs.size() != labels.size())
    throw std::invalid_argument("train: inputs/labels count mismatch");
  if (inputs.empty()) throw std::invalid_argument("train: empty dataset");
  if (tc.epochs < 1 || tc.batch_size < 1 || tc.learning_rate <= 0.0)
    throw std::invalid_argument("train: epochs, batch_size, learning_rate must be positive");

  TrainHistory hist;
  std::array<double, 3> cw = tc.class_weights;
  if (tc.auto_class_weights) {
    std::array<long, 3> counts{0, 0, 0};
    long total = 0;
    for (const auto& tr : labels)
      for (Trit l : tr) {
        ++counts[trit_ord(l)];
        ++total;
      }
    for (int c = 0; c < 3; ++c)
      cw[c] = counts[c] > 0 ? static_cast<double>(total) / (3.0 * counts[c]) : 1.0;
  }
  hist.class_weights = cw;

  int n = static_cast<int>(inputs.size());
  int batches_per_epoch = (n + tc.batch_size - 1) / tc.batch_size;
  AnnealSchedule sched = tc.anneal;
  if (sched.total_steps <= 0) sched.total_steps = tc.epochs * batches_per_epoch;

  AdamState adam;
  adam.m = zero_grad(cell.config);
  adam.v = zero_grad(cell.config);

  Rng rng(mix_seed(tc.seed, 0x74726e21ULL));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  int step = 0;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_task = 0.0;
    long epoch_count = 0;
    double lambda = 0.0;
    for (int b = 0; b < batches_per_epoch; ++b) {
      int lo = b * tc.batch_size;
      int hi = std::min(n, lo + tc.batch_size);
      if (lo >= hi) break;
      lambda = anneal_lambda(sched, std::min(step, sched.total_steps));
      GradSlab grad = zero_grad(cell.config);
      double batch_task = 0.0;
      for (int idx = lo; idx < hi; ++idx) {
        TrajectoryGrad tg = task_loss_and_grad(cell, inputs[order[idx]], labels[order[idx]], cw);
        batch_task += tg.task_loss;
        axpy_grad(grad, tg.grad, 1.0 / (hi - lo));
      }
      batch_task /= (hi - lo);
      if (lambda > 0.0) {
        RegularizerGrad rg = regularizer_and_grad(cell, tc.nm_enforce);
        axpy_grad(grad, rg.grad, lambda);
      }
      adam_update(cell, adam, grad, tc.learning_rate);
      epoch_task += batch_task * (hi - lo);
      epoch_count += (hi - lo);
      ++step;
    }

    EpochRecord rec;
    rec.task_loss = epoch_task / epoch_count;
    rec.lambda = lambda;
    rec.commit_penalty = regularizer_and_grad(cell, tc.nm_enforce).value;
    long correct = 0, total = 0;
    for (int i = 0; i < n; ++i) {
      UnrollResult fw = unroll(cell, inputs[i]);
      for (int t = 0; t < inputs[i].T; ++t) {
        if (soft_verdict(fw.verdicts[t][0], tc.verdict_threshold) == labels[i][t]) ++correct;
        ++total;
      }
    }
    rec.soft_accuracy = total ? static_cast<double>(correct) / total : 0.0;
    hist.epochs.push_back(rec);
  }
  return hist;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization

namespace {

std::string double_to_string(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string save_checkpoint(const SoftCell& cell) {
  nlohmann::json j;
  j["format"] = "rdtlgn-cell";
  j["version"] = 1;
  j["pipeline"] = cell.pipeline;
  j["config"] = {{"P", cell.config.P}, {"S", cell.config.S}, {"K", cell.config.K},
                 {"L", cell.config.L}, {"widths", cell.config.widths},
                 {"seed", cell.config.seed}};
  nlohmann::json conn = nlohmann::json::array();
  for (const auto& layer : cell.connectivity.parents) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& p : layer) jl.push_back({p[0], p[1]});
    conn.push_back(jl);
  }
  j["connectivity"] = conn;
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& layer : cell.coeffs) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& w : layer) {
      nlohmann::json jw = nlohmann::json::array();
      for (double v : w.w) jw.push_back(double_to_string(v));
      jl.push_back(jw);
    }
    coeffs.push_back(jl);
  }
  j["coeffs"] = coeffs;
  return j.dump(2);
}

SoftCell load_checkpoint(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.value("format", "") != "rdtlgn-cell")
    throw std::runtime_error("checkpoint: unexpected format tag");
  if (j.value("version", 0) != 1) throw std::runtime_error("checkpoint: unsupported version");
  SoftCell cell;
  const auto& jc = j.at("config");
  cell.config.P = jc.at("P").get<int>();
  cell.config.S = jc.at("S").get<int>();
  cell.config.K = jc.at("K").get<int>();
  cell.config.L = jc.at("L").get<int>();
  cell.config.widths = jc.at("widths").get<std::vector<int>>();
  cell.config.seed = jc.at("seed").get<std::uint64_t>();
  cell.config.validate();
  cell.pipeline = j.value("pipeline", "ctq");
  const auto& conn = j.at("connectivity");
  if (static_cast<int>(conn.size()) != cell.config.L)
    throw std::runtime_error("checkpoint: connectivity shape mismatch");
  cell.connectivity.parents.resize(cell.config.L);
  for (int l = 0; l < cell.config.L; ++l) {
    if (static_cast<int>(conn[l].size()) != cell.config.widths[l])
      throw std::runtime_error("checkpoint: connectivity shape mismatch");
    cell.connectivity.parents[l].resize(cell.config.widths[l]);
    int prev = (l == 0) ? cell.config.P + cell.config.S : cell.config.widths[l - 1];
    for (int n = 0; n < cell.config.widths[l]; ++n) {
      int a = conn[l][n][0].get<int>();
      int b = conn[l][n][1].get<int>();
      if (a < 0 || a >= prev || b < 0 || b >= prev)
        throw std::runtime_error("checkpoint: parent index out of range");
      cell.connectivity.parents[l][n] = {a, b};
    }
  }
  const auto& coeffs = j.at("coeffs");
  if (static_cast<int>(coeffs.size()) != cell.config.L)
    throw std::runtime_error("checkpoint: coefficient shape mismatch");
  cell.coeffs.resize(cell.config.L);
  for (int l = 0; l < cell.config.L; ++l) {
    if (static_cast<int>(coeffs[l].size()) != cell.config.widths[l])
      throw std::runtime_error("checkpoint: coefficient shape mismatch");
    cell.coeffs[l].resize(cell.config.widths[l]);
    for (int n = 0; n < cell.config.widths[l]; ++n) {
      const auto& jw = coeffs[l][n];
      if (jw.size() != 9) throw std::runtime_error("checkpoint: coefficient shape mismatch");
      for (int i = 0; i < 9; ++i)
        cell.coeffs[l][n].w[i] = std::stod(jw[i].get<std::string>());
    }
  }
  return cell;
}

}  // namespace rdtlgn
