#include "core/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "core/rng.hpp"
#include "json.hpp"

namespace rdtlgn {

namespace {

using nlohmann::json;

WorldConfig world_from_config_json(const json& j, std::uint64_t seed) {
  WorldConfig w;
  w.seed = seed;
  if (j.contains("goal")) w.goal = j["goal"].get<std::array<double, 2>>();
  if (j.contains("goal_radius")) w.goal_radius = j["goal_radius"].get<double>();
  if (j.contains("obstacles")) {
    w.obstacles.clear();
    for (const auto& o : j["obstacles"])
      w.obstacles.push_back(
          {o[0].get<double>(), o[1].get<double>(), o[2].get<double>(), o[3].get<double>()});
  }
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    w.bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  }
  if (j.contains("noise_scale")) w.noise_scale = j["noise_scale"].get<double>();
  if (j.contains("scale_goal")) w.scale_goal = j["scale_goal"].get<double>();
  if (j.contains("scale_safe")) w.scale_safe = j["scale_safe"].get<double>();
  if (j.contains("scale_move")) w.scale_move = j["scale_move"].get<double>();
  if (j.contains("scale_approach")) w.scale_approach = j["scale_approach"].get<double>();
  if (j.contains("speed_threshold")) w.speed_threshold = j["speed_threshold"].get<double>();
  if (j.contains("mode_probs")) w.mode_probs = j["mode_probs"].get<std::array<double, 4>>();
  if (j.contains("base_speed")) w.base_speed = j["base_speed"].get<double>();
  if (j.contains("max_speed")) w.max_speed = j["max_speed"].get<double>();
  return w;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.formula_text = j.value("formula", cfg.formula_text);
  cfg.pipeline = j.value("pipeline", cfg.pipeline);
  if (cfg.pipeline != "ctq" && cfg.pipeline != "qtc")
    throw std::invalid_argument("config: pipeline must be ctq or qtc");
  cfg.delta = j.value("delta", cfg.delta);
  if (cfg.delta < 0.0 || cfg.delta >= 1.0)
    throw std::invalid_argument("config: delta must satisfy 0 <= delta < 1");
  cfg.sizing = j.value("sizing", cfg.sizing);
  if (cfg.sizing != "auto_from_formula" && cfg.sizing != "explicit")
    throw std::invalid_argument("config: sizing must be auto_from_formula or explicit");
  cfg.min_layers = j.value("min_layers", cfg.min_layers);
  cfg.seed = j.value("seed", cfg.seed);

  if (j.contains("cell")) {
    const auto& c = j["cell"];
    cfg.hidden_width = c.value("width", 0);
    if (cfg.sizing == "explicit") {
      cfg.explicit_cell.P = c.value("P", 0);
      cfg.explicit_cell.S = c.value("S", 0);
      cfg.explicit_cell.K = c.value("K", 1);
      cfg.explicit_cell.L = c.value("L", cfg.min_layers);
      if (c.contains("widths")) cfg.explicit_cell.widths = c["widths"].get<std::vector<int>>();
    }
  }

  if (j.contains("data")) {
    const auto& d = j["data"];
    cfg.pool_count = d.value("pool_count", cfg.pool_count);
    cfg.count = d.value("count", cfg.count);
    cfg.T = d.value("T", cfg.T);
    cfg.train_frac = d.value("train_frac", cfg.train_frac);
    if (d.contains("world")) cfg.world = world_from_config_json(d["world"], cfg.seed);
  }
  cfg.world.seed = cfg.seed;

  if (j.contains("train")) {
    const auto& t = j["train"];
    cfg.epochs = t.value("epochs", cfg.epochs);
    cfg.batch_size = t.value("batch_size", cfg.batch_size);
    cfg.learning_rate = t.value("learning_rate", cfg.learning_rate);
    cfg.lambda_max = t.value("lambda_max", cfg.lambda_max);
    cfg.warmup_frac = t.value("warmup_frac", cfg.warmup_frac);
    cfg.nm_enforce = t.value("nm_enforce", cfg.nm_enforce);
  }

  if (j.contains("distill")) {
    const auto& d = j["distill"];
    cfg.distill.max_sweeps = d.value("max_sweeps", cfg.distill.max_sweeps);
    cfg.distill.eta = d.value("eta", cfg.distill.eta);
    cfg.distill.calib_count = d.value("calib_count", cfg.distill.calib_count);
    cfg.distill.teacher_threshold =
        d.value("teacher_threshold", cfg.distill.teacher_threshold);
  }

  // validate the formula early so bad configs fail with a parse error
  parse_formula(cfg.formula_text);

  cfg.canonical_json = j.dump();
  return cfg;
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  // FNV-1a 64
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : cfg.canonical_json) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

FormulaPtr reindex(const Formula& f, const std::vector<int>& map) {
  switch (f.kind) {
    case Formula::Kind::Predicate: {
      auto it = std::lower_bound(map.begin(), map.end(), f.pred);
      return make_pred(static_cast<int>(it - map.begin()));
    }
    case Formula::Kind::Not: return make_not(reindex(*f.left, map));
    case Formula::Kind::And: return make_and(reindex(*f.left, map), reindex(*f.right, map));
    case Formula::Kind::Or: return make_or(reindex(*f.left, map), reindex(*f.right, map));
    case Formula::Kind::Always: return make_always(f.interval, reindex(*f.left, map));
    case Formula::Kind::Eventually: return make_eventually(f.interval, reindex(*f.left, map));
    case Formula::Kind::Until:
      return make_until(f.interval, reindex(*f.left, map), reindex(*f.right, map));
  }
  return nullptr;
}

}  // namespace

ProjectedTask project_task(const Formula& f, int total_predicates) {
  std::vector<int> idx;
  collect_pred_indices(f, idx);
  std::set<int> uniq(idx.begin(), idx.end());
  for (int i : uniq)
    if (i < 0 || i >= total_predicates)
      throw std::invalid_argument("formula predicate index out of range for this dataset");
  ProjectedTask out;
  out.used.assign(uniq.begin(), uniq.end());
  out.formula = reindex(f, out.used);
  return out;
}

Signals project_signals(const Signals& s, const std::vector<int>& used) {
  Signals out(static_cast<int>(used.size()), s.T);
  for (std::size_t p = 0; p < used.size(); ++p)
    for (int t = 0; t < s.T; ++t) out.at(static_cast<int>(p), t) = s.at(used[p], t);
  return out;
}

CellConfig auto_cell_config(const Formula& projected, int P_used, const ExperimentConfig& cfg) {
  CellConfig cc;
  cc.P = P_used;
  cc.S = state_complexity(projected);
  cc.K = 1;
  cc.L = std::max(depth_bound(projected), cfg.min_layers);
  int width = cfg.hidden_width > 0 ? cfg.hidden_width : std::max(2 * (cc.S + cc.K), 16);
  cc.widths.assign(cc.L, width);
  cc.widths.back() = cc.S + cc.K;
  cc.seed = mix_seed(cfg.seed, 0x63656c6cULL);
  return cc;
}

ModelInputs model_inputs(const Dataset& ds, const std::vector<int>& idx,
                         const std::vector<int>& used, LabelPipeline pipeline, double delta) {
  ModelInputs mi;
  for (int i : idx) {
    Signals proj = project_signals(ds.predicates[i], used);
    TritSignals q = quantize_signal(proj, delta);
    if (pipeline == LabelPipeline::CtQ) {
      mi.soft.push_back(proj);
      mi.labels.push_back(ds.labels_ctq[i]);
    } else {
      Signals soft(q.P, q.T);
      for (std::size_t v = 0; v < q.values.size(); ++v)
        soft.values[v] = static_cast<double>(q.values[v]);
      mi.soft.push_back(std::move(soft));
      mi.labels.push_back(ds.labels_qtc[i]);
    }
    mi.trit.push_back(std::move(q));
  }
  return mi;
}

TrainedModel train_model(const ExperimentConfig& cfg, const Dataset& ds,
                         LabelPipeline pipeline) {
  FormulaPtr phi = parse_formula(ds.formula_text);
  ProjectedTask task = project_task(*phi, PREDICATE_COUNT);

  CellConfig cc;
  if (cfg.sizing == "explicit") {
    cc = cfg.explicit_cell;
    cc.P = static_cast<int>(task.used.size());
    if (cc.widths.empty()) {
      int width = cfg.hidden_width > 0 ? cfg.hidden_width : std::max(2 * (cc.S + cc.K), 16);
      cc.widths.assign(cc.L, width);
      cc.widths.back() = cc.S + cc.K;
    }
    cc.seed = mix_seed(cfg.seed, 0x63656c6cULL);
    int need = state_complexity(*task.formula);
    if (cc.S < need)
      std::fprintf(stderr,
                   "warning: S=%d is below the realizability bound B(phi)=%d; "
                   "the cell cannot represent the full monitoring state\n",
                   cc.S, need);
  } else {
    cc = auto_cell_config(*task.formula, static_cast<int>(task.used.size()), cfg);
  }

  ModelInputs mi = model_inputs(ds, ds.train_idx, task.used, pipeline, ds.delta);

  TrainedModel out;
  out.cell = build_cell(cc);
  out.cell.pipeline = pipeline == LabelPipeline::CtQ ? "ctq" : "qtc";
  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.anneal.lambda_max = cfg.lambda_max;
  tc.anneal.warmup_frac = cfg.warmup_frac;
  tc.anneal.total_steps = 0;  // filled by train()
  tc.nm_enforce = cfg.nm_enforce;
  tc.seed = mix_seed(cfg.seed, pipeline == LabelPipeline::CtQ ? 0x74637174ULL : 0x74717463ULL);
  out.history = train(out.cell, mi.soft, mi.labels, tc);
  return out;
}

HardenedModel harden_model(const ExperimentConfig& cfg, const Dataset& ds,
                           const SoftCell& cell, LabelPipeline pipeline) {
  FormulaPtr phi = parse_formula(ds.formula_text);
  ProjectedTask task = project_task(*phi, PREDICATE_COUNT);
  if (cell.config.P != static_cast<int>(task.used.size()))
    throw std::invalid_argument("harden: cell P does not match the dataset formula");

  ModelInputs mi = model_inputs(ds, ds.train_idx, task.used, pipeline, ds.delta);

  HardenedModel out;
  DistillConfig dc = cfg.distill;
  dc.vocabulary = {VocabularyTag::NM, true};
  auto [circuit1, rep1] = distill(cell, mi.soft, mi.trit, dc);
  out.phase1 = std::move(rep1);

  std::vector<Signals> soft_cal = mi.soft;
  if (dc.calib_count > 0 && dc.calib_count < static_cast<int>(soft_cal.size()))
    soft_cal.resize(dc.calib_count);
  std::vector<TritSignals> teacher = teacher_verdicts(cell, soft_cal, dc.teacher_threshold);
  auto [circuit2, rep2] = refine_to_intersection(circuit1, mi.trit, teacher, dc);
  out.circuit = std::move(circuit2);
  out.phase2 = std::move(rep2);
  return out;
}

std::vector<Trit> causal_verdict_trace(const Formula& f, const Signals& x, double delta) {
  std::vector<Trit> out(x.T, 0);
  for (int t = 0; t < x.T; ++t) {
    Signals prefix(x.P, t + 1);
    for (int p = 0; p < x.P; ++p)
      for (int tau = 0; tau <= t; ++tau) prefix.at(p, tau) = x.at(p, tau);
    out[t] = causal_verdict(robustness_causal(f, prefix, x.T), delta);
  }
  return out;
}

CircuitMetrics evaluate_circuit(const ExperimentConfig& cfg, const Dataset& ds,
                                const HardCircuit& circuit) {
  FormulaPtr phi = parse_formula(ds.formula_text);
  ProjectedTask task = project_task(*phi, PREDICATE_COUNT);
  if (circuit.config.P != static_cast<int>(task.used.size()))
    throw std::invalid_argument("evaluate: circuit P does not match the dataset formula");

  std::vector<TritSignals> inputs;
  std::vector<std::vector<Trit>> labels;
  for (int i : ds.eval_idx) {
    inputs.push_back(quantize_signal(project_signals(ds.predicates[i], task.used), ds.delta));
    labels.push_back(ds.labels_ctq[i]);
  }

  CircuitMetrics m;
  std::vector<TritSignals> baseline;
  baseline.reserve(inputs.size());
  for (const auto& in : inputs) baseline.push_back(run_circuit(circuit, in));
  m.accuracy = pooled_accuracy(baseline, labels);
  m.preservation = preservation(circuit, inputs, baseline);
  m.lattice = lattice_compliance(circuit, inputs);
  m.lattice_covering = lattice_compliance_covering(circuit, inputs);
  std::vector<int> levels(circuit.config.P + 1);
  for (int k = 0; k <= circuit.config.P; ++k) levels[k] = k;
  m.abstention = abstention_profile(circuit, inputs, levels, mix_seed(cfg.seed, 0xab57ULL));
  m.census = gate_census(circuit);
  return m;
}

namespace {

json census_to_json(const GateCensus& c) {
  return {{"total", c.total},         {"nm", c.nm},
          {"im", c.im},               {"nm_and_im", c.nm_and_im},
          {"constant", c.constant},   {"fraction_nm_and_im", c.fraction_nm_and_im}};
}

json metrics_to_json(const CircuitMetrics& m) {
  json abst = json::object();
  for (const auto& [k, v] : m.abstention) abst[std::to_string(k)] = v;
  return {{"soft_accuracy", m.soft_accuracy},
          {"accuracy", m.accuracy},
          {"preservation", m.preservation},
          {"lattice", m.lattice},
          {"lattice_covering", m.lattice_covering},
          {"abstention", abst},
          {"census", census_to_json(m.census)}};
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  json j;
  j["format"] = "rdtlgn-eval-report";
  j["version"] = 1;
  j["config_hash"] = r.config_hash;
  j["formula"] = r.formula;
  j["P"] = r.P;
  j["S"] = r.S;
  j["K"] = r.K;
  j["L"] = r.L;
  j["T"] = r.T;
  j["n_train"] = r.n_train;
  j["n_eval"] = r.n_eval;
  j["causal"] = {{"accuracy", r.causal_accuracy}};
  j["rnn"] = {{"accuracy", r.rnn_accuracy}, {"preservation", r.rnn_preservation}};
  j["ctq"] = metrics_to_json(r.ctq);
  j["qtc"] = metrics_to_json(r.qtc);
  return j.dump(2);
}

std::string render_table(const EvalReport& r) {
  char buf[512];
  std::string out;
  out += "Specification: " + r.formula + "\n";
  std::snprintf(buf, sizeof(buf), "P=%d  S=%d  L=%d  T=%d  (train %d / eval %d)\n\n", r.P, r.S,
                r.L, r.T, r.n_train, r.n_eval);
  out += buf;
  out += "              Prediction (%)              Preservation (%)        Lattice (%)\n";
  out += "          Causal   CtQ        QtC        RNN    CtQ   QtC   RNN    CtQ   QtC\n";
  std::snprintf(buf, sizeof(buf),
                "          %5.1f  %5.1f(%4.1f) %5.1f(%4.1f) %5.1f  %5.1f %5.1f %5.1f  %5.1f %5.1f\n",
                100 * r.causal_accuracy, 100 * r.ctq.accuracy, 100 * r.ctq.soft_accuracy,
                100 * r.qtc.accuracy, 100 * r.qtc.soft_accuracy, 100 * r.rnn_accuracy,
                100 * r.ctq.preservation, 100 * r.qtc.preservation, 100 * r.rnn_preservation,
                100 * r.ctq.lattice, 100 * r.qtc.lattice);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "\nNM+IM gate compliance: CtQ %.1f%%  QtC %.1f%%   (lattice N/A for the RNN)\n",
                100 * r.ctq.census.fraction_nm_and_im, 100 * r.qtc.census.fraction_nm_and_im);
  out += buf;
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!content.empty() && content.back() != '\n') f << '\n';
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

json distill_report_to_json(const DistillReport& r) {
  json swaps = json::array();
  for (const auto& s : r.swaps)
    swaps.push_back({{"layer", s.layer},
                     {"neuron", s.neuron},
                     {"from", static_cast<int>(s.from)},
                     {"to", static_cast<int>(s.to)},
                     {"accuracy_delta", s.accuracy_delta},
                     {"forced", s.forced}});
  return {{"phase", r.phase},
          {"total_verdicts", r.total_verdicts},
          {"warmstart_disagreement", r.warmstart_disagreement},
          {"sweep_disagreement", r.sweep_disagreement},
          {"sweeps_run", r.sweeps_run},
          {"converged", r.converged},
          {"census", census_to_json(r.census)},
          {"swaps", swaps}};
}

json history_to_json(const TrainHistory& h) {
  json epochs = json::array();
  for (const auto& e : h.epochs)
    epochs.push_back({{"task_loss", e.task_loss},
                      {"commit_penalty", e.commit_penalty},
                      {"lambda", e.lambda},
                      {"soft_accuracy", e.soft_accuracy}});
  return {{"epochs", epochs}, {"class_weights", h.class_weights}};
}

void write_traces_csv(const std::string& path, const Dataset& ds,
                      const std::vector<int>& idx,
                      const std::vector<std::vector<Trit>>& verdicts) {
  std::string out = "traj_id,t,label,verdict,background\n";
  auto bg = [](Trit l) { return l > 0 ? "SAT" : (l < 0 ? "VIOL" : "UNK"); };
  for (std::size_t n = 0; n < idx.size(); ++n) {
    int i = idx[n];
    for (int t = 0; t < ds.T; ++t) {
      out += std::to_string(i) + "," + std::to_string(t) + "," +
             std::to_string(static_cast<int>(ds.labels_ctq[i][t])) + "," +
             std::to_string(static_cast<int>(verdicts[n][t])) + "," + bg(ds.labels_ctq[i][t]) +
             "\n";
    }
  }
  write_text_file(path, out);
}

double soft_eval_accuracy(const SoftCell& cell, const Dataset& ds,
                          const std::vector<int>& used, LabelPipeline pipeline,
                          double threshold) {
  ModelInputs mi = model_inputs(ds, ds.eval_idx, used, pipeline, ds.delta);
  long correct = 0, total = 0;
  for (std::size_t n = 0; n < mi.soft.size(); ++n) {
    UnrollResult fw = unroll(cell, mi.soft[n]);
    const auto& ctq = ds.labels_ctq[ds.eval_idx[n]];
    for (int t = 0; t < mi.soft[n].T; ++t) {
      if (soft_verdict(fw.verdicts[t][0], threshold) == ctq[t]) ++correct;
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / total : 0.0;
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& cfg, const std::string& outdir) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);

  FormulaPtr phi = parse_formula(cfg.formula_text);
  ProjectedTask task = project_task(*phi, PREDICATE_COUNT);

  // stage: data
  Dataset ds;
  try {
    ds = build_dataset(cfg.world, cfg.formula_text, cfg.delta, cfg.pool_count, cfg.count, cfg.T,
                       cfg.seed, cfg.train_frac);
    save_dataset(ds, outdir + "/dataset");
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage gen-data: ") + e.what());
  }

  EvalReport report;
  report.formula = cfg.formula_text;
  report.T = cfg.T;
  report.P = static_cast<int>(task.used.size());
  report.n_train = static_cast<int>(ds.train_idx.size());
  report.n_eval = static_cast<int>(ds.eval_idx.size());
  report.config_hash = config_fingerprint(cfg);

  // stage: causal baseline (scored against CtQ labels on the eval split)
  try {
    std::vector<std::vector<Trit>> causal, labels;
    for (int i : ds.eval_idx) {
      Signals proj = project_signals(ds.predicates[i], task.used);
      causal.push_back(causal_verdict_trace(*task.formula, proj, cfg.delta));
      labels.push_back(ds.labels_ctq[i]);
    }
    write_traces_csv(outdir + "/traces_causal.csv", ds, ds.eval_idx, causal);
    report.causal_accuracy = pooled_accuracy_rows(causal, labels);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage causal: ") + e.what());
  }

  // stage: train + harden + eval, both pipelines
  for (LabelPipeline pipeline : {LabelPipeline::CtQ, LabelPipeline::QtC}) {
    const std::string tag = pipeline == LabelPipeline::CtQ ? "ctq" : "qtc";
    try {
      TrainedModel tm = train_model(cfg, ds, pipeline);
      write_text_file(outdir + "/cell_" + tag + ".json", save_checkpoint(tm.cell));
      write_text_file(outdir + "/history_" + tag + ".json", history_to_json(tm.history).dump(2));

      HardenedModel hm = harden_model(cfg, ds, tm.cell, pipeline);
      write_text_file(outdir + "/circuit_" + tag + ".json", save_circuit(hm.circuit));
      json dist = {{"phase1", distill_report_to_json(hm.phase1)},
                   {"phase2", distill_report_to_json(hm.phase2)}};
      write_text_file(outdir + "/distill_" + tag + ".json", dist.dump(2));

      CircuitMetrics m = evaluate_circuit(cfg, ds, hm.circuit);
      m.soft_accuracy =
          soft_eval_accuracy(tm.cell, ds, task.used, pipeline, cfg.distill.teacher_threshold);

      std::vector<std::vector<Trit>> verdicts;
      for (int i : ds.eval_idx) {
        TritSignals in = quantize_signal(project_signals(ds.predicates[i], task.used), ds.delta);
        TritSignals v = run_circuit(hm.circuit, in);
        std::vector<Trit> row(v.T);
        for (int t = 0; t < v.T; ++t) row[t] = v.at(0, t);
        verdicts.push_back(std::move(row));
      }
      write_traces_csv(outdir + "/traces_" + tag + ".csv", ds, ds.eval_idx, verdicts);

      if (pipeline == LabelPipeline::CtQ) {
        report.ctq = m;
        report.S = hm.circuit.config.S;
        report.K = hm.circuit.config.K;
        report.L = hm.circuit.config.L;
      } else {
        report.qtc = m;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("stage " + tag + ": " + e.what());
    }
  }

  // stage: Elman baseline on CtQ labels, matched hidden dimension
  try {
    CellConfig cc = auto_cell_config(*task.formula, report.P, cfg);
    ElmanBaseline rnn = make_elman(report.P, cc.S, mix_seed(cfg.seed, 0x726e6eULL));
    std::vector<Signals> train_in, eval_in;
    std::vector<std::vector<Trit>> train_lab, eval_lab;
    for (int i : ds.train_idx) {
      train_in.push_back(project_signals(ds.predicates[i], task.used));
      train_lab.push_back(ds.labels_ctq[i]);
    }
    for (int i : ds.eval_idx) {
      eval_in.push_back(project_signals(ds.predicates[i], task.used));
      eval_lab.push_back(ds.labels_ctq[i]);
    }
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.learning_rate = cfg.learning_rate;
    tc.seed = mix_seed(cfg.seed, 0x726e6e32ULL);
    train_elman(rnn, train_in, train_lab, tc);
    std::vector<std::vector<Trit>> verdicts;
    for (const auto& x : eval_in) verdicts.push_back(eval_elman(rnn, x));
    report.rnn_accuracy = pooled_accuracy_rows(verdicts, eval_lab);
    report.rnn_preservation = elman_preservation(rnn, eval_in);
    write_traces_csv(outdir + "/traces_rnn.csv", ds, ds.eval_idx, verdicts);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage rnn: ") + e.what());
  }

  write_text_file(outdir + "/eval_report.json", report_to_json(report));
  write_text_file(outdir + "/summary.txt", render_table(report));
  return report;
}

}  // namespace rdtlgn
