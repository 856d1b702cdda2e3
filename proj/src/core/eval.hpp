#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "core/cell.hpp"
#include "core/circuit.hpp"
#include "core/stl.hpp"

namespace rdtlgn {

// Fraction of timesteps with exact trit equality (first output row).
double accuracy(const TritSignals& verdicts, const std::vector<Trit>& labels);
double pooled_accuracy(const std::vector<TritSignals>& verdicts,
                       const std::vector<std::vector<Trit>>& labels);
double pooled_accuracy_rows(const std::vector<std::vector<Trit>>& verdicts,
                            const std::vector<std::vector<Trit>>& labels);

// Fraction of (predicate, timestep, trajectory) triples where masking that
// single predicate to 0 does not flip the verdict sign (+1 <-> -1);
// abstention counts as preserved.
double preservation(const HardCircuit& c, const std::vector<TritSignals>& inputs,
                    const std::vector<TritSignals>& baseline_verdicts);

// Compliance with input-certainty monotonicity over subsets of unmasked
// predicates: for every pair A ⊂ B and timestep, the A-verdict must abstain
// or agree with the B-verdict. Pools over all comparable pairs.
double lattice_compliance(const HardCircuit& c, const std::vector<TritSignals>& inputs);
// Restriction to covering pairs |B \ A| = 1 (used for the transitivity check).
double lattice_compliance_covering(const HardCircuit& c, const std::vector<TritSignals>& inputs);

// For each dropout level k: mean fraction of 0-verdicts over all size-k
// masks, or over 64 seeded samples when C(P,k) > 64.
std::map<int, double> abstention_profile(const HardCircuit& c,
                                         const std::vector<TritSignals>& inputs,
                                         const std::vector<int>& levels,
                                         std::uint64_t seed = 0x6d61736bULL);

struct FixedPointProbe {
  bool converged = false;
  int steps = 0;        // applications until the state repeats its predecessor
  int cycle_period = 0; // 0 = none detected
};

// Iterate the state update under constant input p from the all-unknown
// state (or an explicit start), detecting fixed points and cycles.
FixedPointProbe fixed_point_probe(const HardCircuit& c, const std::vector<Trit>& p,
                                  int max_steps);
FixedPointProbe fixed_point_probe_from(const HardCircuit& c, const std::vector<Trit>& p,
                                       const std::vector<Trit>& start, int max_steps);

// ---------------------------------------------------------------------------
// Elman RNN baseline: tanh recurrence, 3-way output head, trained on CtQ
// labels with the same optimizer defaults as the ternary cell.

struct ElmanBaseline {
  int P = 0;
  int S = 0;  // hidden dim, matched to the paired cell
  std::vector<double> w_ih;  // S x P
  std::vector<double> w_hh;  // S x S
  std::vector<double> b_h;   // S
  std::vector<double> w_ho;  // 3 x S
  std::vector<double> b_o;   // 3
};

ElmanBaseline make_elman(int P, int S, std::uint64_t seed);

// Weighted softmax cross-entropy over the 3 classes (-1, 0, +1).
double elman_loss(const ElmanBaseline& m, const Signals& x, const std::vector<Trit>& labels,
                  const std::array<double, 3>& class_weights);

struct ElmanGrad {
  double loss = 0.0;
  ElmanBaseline g;  // same shapes, gradient values
};
ElmanGrad elman_loss_and_grad(const ElmanBaseline& m, const Signals& x,
                              const std::vector<Trit>& labels,
                              const std::array<double, 3>& class_weights);

TrainHistory train_elman(ElmanBaseline& m, const std::vector<Signals>& inputs,
                         const std::vector<std::vector<Trit>>& labels_ctq,
                         const TrainConfig& tc);

// argmax class per timestep mapped to {-1, 0, +1}; masked inputs read 0.
std::vector<Trit> eval_elman(const ElmanBaseline& m, const Signals& x,
                             const InputMask& mask = InputMask::none());

double elman_preservation(const ElmanBaseline& m, const std::vector<Signals>& inputs);

}  // namespace rdtlgn
