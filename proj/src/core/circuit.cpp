#include "core/circuit.hpp"

#include <stdexcept>

#include "core/harden.hpp"
#include "json.hpp"

namespace rdtlgn {

void HardCircuit::rebuild_tables() {
  tables.resize(gates.size());
  for (std::size_t l = 0; l < gates.size(); ++l) {
    tables[l].resize(gates[l].size());
    for (std::size_t j = 0; j < gates[l].size(); ++j)
      tables[l][j] = decode_gate(gates[l][j]).entries;
  }
}

void HardCircuit::validate() const {
  config.validate();
  if (static_cast<int>(gates.size()) != config.L ||
      static_cast<int>(connectivity.parents.size()) != config.L)
    throw std::invalid_argument("circuit: layer count mismatch");
  for (int l = 0; l < config.L; ++l) {
    if (static_cast<int>(gates[l].size()) != config.widths[l] ||
        static_cast<int>(connectivity.parents[l].size()) != config.widths[l])
      throw std::invalid_argument("circuit: layer width mismatch");
    for (GateId id : gates[l])
      if (id >= GATE_COUNT) throw std::invalid_argument("circuit: gate id out of range");
  }
}

MonitorState initial_state(const HardCircuit& c) {
  MonitorState st;
  st.h.assign(c.config.S, 0);
  st.t = 0;
  return st;
}

InputMask InputMask::of(int P, const std::vector<int>& indices) {
  InputMask m;
  m.masked.assign(P, 0);
  for (int i : indices) {
    if (i < 0 || i >= P) throw std::invalid_argument("mask index out of range");
    m.masked[i] = 1;
  }
  return m;
}

void circuit_step(const HardCircuit& c, const Trit* p, MonitorState& st, Trit* verdict_out) {
  const auto& cfg = c.config;
  thread_local std::vector<Trit> cur, next;
  cur.assign(cfg.P + cfg.S, 0);
  for (int i = 0; i < cfg.P; ++i) cur[i] = p[i];
  for (int s = 0; s < cfg.S; ++s) cur[cfg.P + s] = st.h[s];
  for (int l = 0; l < cfg.L; ++l) {
    int width = cfg.widths[l];
    next.assign(width, 0);
    const auto& layer_parents = c.connectivity.parents[l];
    const auto& layer_tables = c.tables[l];
    for (int j = 0; j < width; ++j) {
      const auto& par = layer_parents[j];
      next[j] = layer_tables[j][3 * trit_ord(cur[par[0]]) + trit_ord(cur[par[1]])];
    }
    cur.swap(next);
  }
  for (int s = 0; s < cfg.S; ++s) st.h[s] = cur[s];
  for (int k = 0; k < cfg.K; ++k) verdict_out[k] = cur[cfg.S + k];
  ++st.t;
}

TritSignals run_circuit(const HardCircuit& c, const TritSignals& inputs, const InputMask& mask) {
  const auto& cfg = c.config;
  if (inputs.P != cfg.P) throw std::invalid_argument("run_circuit: predicate count mismatch");
  TritSignals verdicts(cfg.K, inputs.T);
  MonitorState st = initial_state(c);
  std::vector<Trit> p(cfg.P);
  std::vector<Trit> v(cfg.K);
  for (int t = 0; t < inputs.T; ++t) {
    for (int i = 0; i < cfg.P; ++i) p[i] = mask.is_masked(i) ? Trit{0} : inputs.at(i, t);
    circuit_step(c, p.data(), st, v.data());
    for (int k = 0; k < cfg.K; ++k) verdicts.at(k, t) = v[k];
  }
  return verdicts;
}

GateCensus gate_census(const HardCircuit& c) {
  GateCensus census;
  for (const auto& layer : c.gates) {
    for (GateId id : layer) {
      GateClass cl = classify_gate(decode_gate(id));
      ++census.total;
      if (cl.is_nm) ++census.nm;
      if (cl.is_im) ++census.im;
      if (cl.is_nm && cl.is_im) ++census.nm_and_im;
      if (cl.is_constant) ++census.constant;
    }
  }
  census.fraction_nm_and_im =
      census.total ? static_cast<double>(census.nm_and_im) / census.total : 0.0;
  return census;
}

std::string save_circuit(const HardCircuit& c) {
  nlohmann::json j;
  j["format"] = "rdtlgn-circuit";
  j["version"] = 1;
  j["config"] = {{"P", c.config.P}, {"S", c.config.S}, {"K", c.config.K},
                 {"L", c.config.L}, {"widths", c.config.widths}, {"seed", c.config.seed}};
  nlohmann::json conn = nlohmann::json::array();
  for (const auto& layer : c.connectivity.parents) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& p : layer) jl.push_back({p[0], p[1]});
    conn.push_back(jl);
  }
  j["connectivity"] = conn;
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& layer : c.gates) {
    nlohmann::json jl = nlohmann::json::array();
    for (GateId id : layer) jl.push_back(static_cast<int>(id));
    gates.push_back(jl);
  }
  j["gates"] = gates;
  return j.dump(2);
}

HardCircuit load_circuit(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.value("format", "") != "rdtlgn-circuit")
    throw std::runtime_error("circuit: unexpected format tag");
  if (j.value("version", 0) != 1) throw std::runtime_error("circuit: unsupported version");
  HardCircuit c;
  const auto& jc = j.at("config");
  c.config.P = jc.at("P").get<int>();
  c.config.S = jc.at("S").get<int>();
  c.config.K = jc.at("K").get<int>();
  c.config.L = jc.at("L").get<int>();
  c.config.widths = jc.at("widths").get<std::vector<int>>();
  c.config.seed = jc.at("seed").get<std::uint64_t>();
  const auto& conn = j.at("connectivity");
  c.connectivity.parents.resize(conn.size());
  for (std::size_t l = 0; l < conn.size(); ++l) {
    c.connectivity.parents[l].resize(conn[l].size());
    for (std::size_t n = 0; n < conn[l].size(); ++n)
      c.connectivity.parents[l][n] = {conn[l][n][0].get<int>(), conn[l][n][1].get<int>()};
  }
  const auto& gates = j.at("gates");
  c.gates.resize(gates.size());
  for (std::size_t l = 0; l < gates.size(); ++l) {
    c.gates[l].resize(gates[l].size());
    for (std::size_t n = 0; n < gates[l].size(); ++n) {
      int id = gates[l][n].get<int>();
      if (id < 0 || id >= GATE_COUNT) throw std::runtime_error("circuit: gate id out of range");
      c.gates[l][n] = static_cast<GateId>(id);
    }
  }
  c.validate();
  c.rebuild_tables();
  return c;
}

HardCircuit circuit_from_cell_rounded(const SoftCell& cell) {
  HardCircuit c;
  c.config = cell.config;
  c.connectivity = cell.connectivity;
  c.gates.resize(cell.coeffs.size());
  for (std::size_t l = 0; l < cell.coeffs.size(); ++l) {
    c.gates[l].resize(cell.coeffs[l].size());
    for (std::size_t j = 0; j < cell.coeffs[l].size(); ++j)
      c.gates[l][j] = round_neuron(cell.coeffs[l][j]);
  }
  c.rebuild_tables();
  return c;
}

SoftCell cell_from_circuit(const HardCircuit& c) {
  SoftCell cell;
  cell.config = c.config;
  cell.connectivity = c.connectivity;
  cell.coeffs.resize(c.gates.size());
  for (std::size_t l = 0; l < c.gates.size(); ++l) {
    cell.coeffs[l].resize(c.gates[l].size());
    for (std::size_t j = 0; j < c.gates[l].size(); ++j)
      cell.coeffs[l][j] = coeffs_from_table(decode_gate(c.gates[l][j]));
  }
  return cell;
}

}  // namespace rdtlgn
