#pragma once

#include <string>
#include <vector>

#include "core/cell.hpp"
#include "core/stl.hpp"
#include "core/ternary.hpp"

namespace rdtlgn {

// Pure ternary logic circuit sharing the soft cell's connectivity.
struct HardCircuit {
  CellConfig config;
  ConnectivityMap connectivity;
  std::vector<std::vector<GateId>> gates;  // [layer][neuron]

  // Decoded 9-entry lookup tables, kept alongside the ids for the hot loop.
  std::vector<std::vector<std::array<Trit, 9>>> tables;

  void rebuild_tables();
  void validate() const;
};

struct MonitorState {
  std::vector<Trit> h;  // all-zero ("all-unknown") at start
  int t = 0;
};

MonitorState initial_state(const HardCircuit& c);

// Predicate indices forced to 0 (unknown).
struct InputMask {
  std::vector<std::uint8_t> masked;  // size P, 1 = masked; empty = no mask

  bool is_masked(int p) const {
    return !masked.empty() && masked[static_cast<std::size_t>(p)] != 0;
  }
  static InputMask none() { return {}; }
  static InputMask of(int P, const std::vector<int>& indices);
};

// One table-lookup step; writes K verdict trits and advances the state.
void circuit_step(const HardCircuit& c, const Trit* p, MonitorState& st, Trit* verdict_out);

// Stream from the all-unknown state; masked predicates read as 0 at every t.
// Returns a K x T verdict trace.
TritSignals run_circuit(const HardCircuit& c, const TritSignals& inputs,
                        const InputMask& mask = InputMask::none());

struct GateCensus {
  int total = 0;
  int nm = 0;
  int im = 0;
  int nm_and_im = 0;
  int constant = 0;
  double fraction_nm_and_im = 0.0;
};

GateCensus gate_census(const HardCircuit& c);

// Versioned JSON round-trip (config, connectivity, gate ids).
std::string save_circuit(const HardCircuit& c);
HardCircuit load_circuit(const std::string& json_text);

// The hardened counterpart of per-neuron rounding: replace every neuron of
// the soft cell by its rounded gate (full library).
HardCircuit circuit_from_cell_rounded(const SoftCell& cell);

// Soft interpolant of a hard circuit: every neuron gets the exact
// polynomial coefficients of its gate table.
SoftCell cell_from_circuit(const HardCircuit& c);

}  // namespace rdtlgn
