#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/cell.hpp"
#include "core/circuit.hpp"
#include "core/data.hpp"
#include "core/eval.hpp"
#include "core/harden.hpp"
#include "core/stl.hpp"

namespace rdtlgn {

// Everything a reproducible experiment needs, parsed from one JSON config
// with defaults for all unset fields.
struct ExperimentConfig {
  std::string formula_text = "G[0,3](p3 U[0,3] p0)";
  std::string pipeline = "ctq";  // pipeline for the single-model subcommands
  double delta = 0.2;
  std::string sizing = "auto_from_formula";  // or "explicit"
  int min_layers = 6;
  int hidden_width = 0;   // 0 = derived from S+K
  CellConfig explicit_cell;  // used when sizing == "explicit"
  std::uint64_t seed = 7;

  // data
  WorldConfig world;
  int pool_count = 816;
  int count = 400;
  int T = 20;
  double train_frac = 0.8;

  // training
  int epochs = 60;
  int batch_size = 16;
  double learning_rate = 0.01;
  double lambda_max = 0.3;
  double warmup_frac = 0.1;
  bool nm_enforce = true;

  // distillation
  DistillConfig distill;

  std::string canonical_json;  // the parsed config re-serialized
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string config_fingerprint(const ExperimentConfig& cfg);  // FNV-1a of canonical JSON

// Predicate projection: cells ingest only the predicates the formula uses.
struct ProjectedTask {
  FormulaPtr formula;      // reindexed over the used predicates
  std::vector<int> used;   // original indices, ascending
};
ProjectedTask project_task(const Formula& f, int total_predicates);
Signals project_signals(const Signals& s, const std::vector<int>& used);

// Cell sizing: S = B(phi), L = max(depth bound, min_layers), K = 1,
// intermediate widths max(2*(S+K), 16) unless hidden_width overrides.
CellConfig auto_cell_config(const Formula& projected, int P_used, const ExperimentConfig& cfg);

// Inputs for the soft cell / hard circuit under one pipeline: CtQ trains on
// the continuous predicates, QtC on the quantized trits cast to reals; the
// hardened circuit always consumes the quantized trits.
struct ModelInputs {
  std::vector<Signals> soft;      // projected, per trajectory
  std::vector<TritSignals> trit;  // projected + quantized
  std::vector<std::vector<Trit>> labels;  // pipeline labels
};
ModelInputs model_inputs(const Dataset& ds, const std::vector<int>& idx,
                         const std::vector<int>& used, LabelPipeline pipeline, double delta);

struct TrainedModel {
  SoftCell cell;
  TrainHistory history;
};
TrainedModel train_model(const ExperimentConfig& cfg, const Dataset& ds,
                         LabelPipeline pipeline);

struct HardenedModel {
  HardCircuit circuit;
  DistillReport phase1;
  DistillReport phase2;
};
HardenedModel harden_model(const ExperimentConfig& cfg, const Dataset& ds,
                           const SoftCell& cell, LabelPipeline pipeline);

struct CircuitMetrics {
  double soft_accuracy = 0.0;  // filled by run_experiment
  double accuracy = 0.0;       // hard circuit vs CtQ labels on the eval split
  double preservation = 0.0;
  double lattice = 0.0;
  double lattice_covering = 0.0;
  std::map<int, double> abstention;
  GateCensus census;
};
CircuitMetrics evaluate_circuit(const ExperimentConfig& cfg, const Dataset& ds,
                                const HardCircuit& circuit);

struct EvalReport {
  std::string formula;
  int P = 0, S = 0, K = 0, L = 0, T = 0;
  int n_train = 0, n_eval = 0;
  double causal_accuracy = 0.0;
  double rnn_accuracy = 0.0;
  double rnn_preservation = 0.0;
  CircuitMetrics ctq;
  CircuitMetrics qtc;
  std::string config_hash;
};

std::string report_to_json(const EvalReport& r);
std::string render_table(const EvalReport& r);

// Full pipeline: gen -> label -> train -> harden (both pipelines) -> eval,
// plus the causal and Elman baselines; artifacts written under outdir.
EvalReport run_experiment(const ExperimentConfig& cfg, const std::string& outdir);

// Causal baseline verdict trace for one trajectory (prefix grows with t).
std::vector<Trit> causal_verdict_trace(const Formula& f, const Signals& x, double delta);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rdtlgn
