#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/pst.hpp"
#include "core/stl.hpp"
#include "core/ternary.hpp"

namespace rdtlgn {

struct CellConfig {
  int P = 0;  // input predicates
  int S = 0;  // hidden-state trits
  int K = 1;  // output trits
  int L = 0;  // layer count
  std::vector<int> widths;  // size L, widths[L-1] == S + K
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument on inconsistency
};

// Two parent indices per neuron into the previous layer; layer 0 parents
// index the concatenated input [p_t; h_{t-1}] of size P + S.
struct ConnectivityMap {
  std::vector<std::vector<std::array<int, 2>>> parents;  // [layer][neuron]
};

// Deterministic from the seed: uniform random parents, then a repair pass
// that gives every previous-layer node at least one child where width permits.
ConnectivityMap build_connectivity(const CellConfig& cfg);

struct SoftCell {
  CellConfig config;
  ConnectivityMap connectivity;
  std::vector<std::vector<PolyCoeffs>> coeffs;  // [layer][neuron]
  std::string pipeline = "ctq";                 // recorded in checkpoints
};

// Pass-through-leaning initialization: 0.7 * random projection + 0.3 * noise.
SoftCell build_cell(const CellConfig& cfg);

struct StepResult {
  std::vector<double> h;
  std::vector<double> y;
};

StepResult cell_step(const SoftCell& cell, const std::vector<double>& p,
                     const std::vector<double>& h_prev);

// Activation cache for BPTT: per timestep the concatenated input and the
// pre-/post-clip values of every layer.
struct UnrollTape {
  std::vector<std::vector<double>> z;                     // [t][P+S]
  std::vector<std::vector<std::vector<double>>> pre;      // [t][layer][neuron]
  std::vector<std::vector<std::vector<double>>> post;     // [t][layer][neuron]
};

struct UnrollResult {
  std::vector<std::vector<double>> verdicts;  // [t][k]
  UnrollTape tape;
};

// h_0 = 0 (all-unknown); sequential cell_step over t = 0..T-1.
UnrollResult unroll(const SoftCell& cell, const Signals& preds);

struct TrainConfig {
  int epochs = 60;
  int batch_size = 16;
  double learning_rate = 0.01;
  AnnealSchedule anneal{0.3, 0, 0.1};  // total_steps filled in by train()
  std::array<double, 3> class_weights{1.0, 1.0, 1.0};  // for labels -1, 0, +1
  bool auto_class_weights = true;
  bool nm_enforce = true;  // pull state-feeding neurons toward NM tables
  double verdict_threshold = 1.0 / 3.0;
  std::uint64_t seed = 1;
};

using GradSlab = std::vector<std::vector<std::array<double, 9>>>;  // [layer][neuron][coeff]

struct TrajectoryGrad {
  double task_loss = 0.0;
  GradSlab grad;
};

// Task loss and gradient (BPTT through the full unroll) for one trajectory.
// Weighted MSE on the soft outputs against the ternary labels.
TrajectoryGrad task_loss_and_grad(const SoftCell& cell, const Signals& preds,
                                  const std::vector<Trit>& labels,
                                  const std::array<double, 3>& class_weights);

// Mean commitment penalty over all neurons, plus the nearest-NM distance for
// state-feeding neurons when nm_enforce is set. Gradient has the same shape
// as the coefficients.
struct RegularizerGrad {
  double value = 0.0;
  GradSlab grad;
};
RegularizerGrad regularizer_and_grad(const SoftCell& cell, bool nm_enforce);

// task + lambda * regularizer, as a scalar (finite-difference oracle hook).
double total_loss(const SoftCell& cell, const Signals& preds, const std::vector<Trit>& labels,
                  const std::array<double, 3>& class_weights, double lambda, bool nm_enforce);

struct EpochRecord {
  double task_loss = 0.0;
  double commit_penalty = 0.0;  // regularizer value at epoch end
  double lambda = 0.0;
  double soft_accuracy = 0.0;  // thresholded verdicts vs labels on the training data
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::array<double, 3> class_weights{1.0, 1.0, 1.0};
};

// Minibatch Adam with full-unroll BPTT; deterministic for a fixed seed in
// fixed-order execution.
TrainHistory train(SoftCell& cell, const std::vector<Signals>& inputs,
                   const std::vector<std::vector<Trit>>& labels, const TrainConfig& tc);

// Soft ternary verdict: threshold each output at +-threshold.
Trit soft_verdict(double y, double threshold);

// Versioned JSON round-trip of config, connectivity and coefficients
// (coefficients as decimal strings, lossless for doubles).
std::string save_checkpoint(const SoftCell& cell);
SoftCell load_checkpoint(const std::string& json_text);

}  // namespace rdtlgn
