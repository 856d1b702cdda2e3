#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/cell.hpp"
#include "core/circuit.hpp"
#include "core/stl.hpp"
#include "core/ternary.hpp"

namespace rdtlgn {

// Evaluate V*w on the grid, round each entry to the nearest trit, encode.
GateId round_neuron(const PolyCoeffs& w);

// Threshold the soft network's outputs on each calibration trajectory.
// Inputs must match the cell's training pipeline (continuous for CtQ,
// quantized-as-real for QtC). K x T per trajectory, flattened as TritSignals.
std::vector<TritSignals> teacher_verdicts(const SoftCell& cell,
                                          const std::vector<Signals>& calib_inputs,
                                          double threshold);

struct DistillConfig {
  VocabularyKind vocabulary{VocabularyTag::NM, true};  // Phase 1 default
  int max_sweeps = 10;
  double eta = 0.001;  // Phase 2 acceptance: accuracy loss below 0.1 pp
  int calib_count = 0;  // 0 = use the full calibration set
  double teacher_threshold = 1.0 / 3.0;
};

struct SwapRecord {
  int layer = 0;
  int neuron = 0;
  GateId from = 0;
  GateId to = 0;
  double accuracy_delta = 0.0;  // new accuracy minus old accuracy
  bool forced = false;          // sweep-1 replacement of an out-of-vocabulary gate
};

struct DistillReport {
  std::string phase;
  long total_verdicts = 0;          // calibration timesteps * K
  long warmstart_disagreement = 0;  // before any sweep (gates may be outside V)
  std::vector<long> sweep_disagreement;  // after each completed sweep
  int sweeps_run = 0;
  bool converged = false;
  GateCensus census;
  std::vector<SwapRecord> swaps;
};

// Greedy trajectory distillation (Phase 1): warm-start by per-neuron
// rounding against the full library, then sweep neurons output-to-input,
// keeping for each neuron the vocabulary gate minimizing verdict
// disagreement with the teacher on the calibration set. Sweeps repeat until
// none improves or max_sweeps is hit.
std::pair<HardCircuit, DistillReport> distill(const SoftCell& cell,
                                              const std::vector<Signals>& calib_soft_inputs,
                                              const std::vector<TritSignals>& calib_trit_inputs,
                                              const DistillConfig& dc);

// Phase 2: for every gate outside NM-and-IM, try the non-constant
// intersection gates nearest by Hamming distance (ties toward lower id) and
// accept the first whose calibration accuracy drop stays below eta.
std::pair<HardCircuit, DistillReport> refine_to_intersection(
    const HardCircuit& circuit, const std::vector<TritSignals>& calib_trit_inputs,
    const std::vector<TritSignals>& teacher, const DistillConfig& dc);

// Disagreement of a circuit against teacher verdicts (exposed for tests; the
// naive counterpart of the cached scorer used inside the sweeps).
long count_disagreement(const HardCircuit& c, const std::vector<TritSignals>& inputs,
                        const std::vector<TritSignals>& teacher);

}  // namespace rdtlgn
