// Command-line front end for the rdtlgn shared library. Talks to the core
// exclusively through the C API in rdtlgn.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rdtlgn.h"

namespace {

constexpr int EXIT_OK = 0;
constexpr int EXIT_CONFIG = 2;   // config / parse errors
constexpr int EXIT_RUNTIME = 3;  // runtime failures

int status_to_exit(rdtlgn_status s) {
  switch (s) {
    case RDTLGN_OK: return EXIT_OK;
    case RDTLGN_ERR_PARSE:
    case RDTLGN_ERR_INVALID_ARG: return EXIT_CONFIG;
    default: return EXIT_RUNTIME;
  }
}

int report_failure(rdtlgn_status s, const char* stage) {
  std::fprintf(stderr, "error [%s]: %s\n", stage, rdtlgn_last_error());
  return status_to_exit(s);
}

std::string read_file(const std::string& path, bool* ok) {
  std::ifstream f(path);
  if (!f) {
    *ok = false;
    return "";
  }
  std::stringstream ss;
  ss << f.rdbuf();
  *ok = true;
  return ss.str();
}

std::string load_config(const std::string& path, int* exit_code) {
  if (path.empty()) return "{}";
  bool ok = false;
  std::string text = read_file(path, &ok);
  if (!ok) {
    std::fprintf(stderr, "error: cannot read config file %s\n", path.c_str());
    *exit_code = EXIT_CONFIG;
  }
  return text;
}

bool write_file(const std::string& path, const char* content) {
  std::ofstream f(path);
  if (!f) return false;
  f << content;
  return static_cast<bool>(f);
}

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { rdtlgn_string_free(s); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdtlgn: recurrent ternary logic gate network monitor"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_dir, cell_path, circuit_path, formula_text;
  std::string report_path;
  std::int64_t seed_override = -1;
  bool exclude_constants = false, include_ids = false;

  auto* gen = app.add_subcommand("gen-data", "generate a labeled synthetic dataset");
  gen->add_option("--config", config_path, "experiment config JSON");
  gen->add_option("--out", out_path, "output directory")->required();
  gen->add_option("--seed", seed_override, "seed override");

  auto* bound = app.add_subcommand("bound", "print B(phi), depth bound and horizon");
  bound->add_option("formula", formula_text, "STL formula text")->required();

  auto* audit = app.add_subcommand("audit-gates", "gate vocabulary census");
  audit->add_flag("--exclude-constants", exclude_constants, "drop the 3 constant gates");
  audit->add_flag("--lists", include_ids, "include gate-id arrays");
  audit->add_option("--out", out_path, "write the JSON to a file instead of stdout");

  auto* train = app.add_subcommand("train", "train a soft cell on a dataset");
  train->add_option("--config", config_path, "experiment config JSON");
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_path, "checkpoint output path")->required();
  train->add_option("--history", report_path, "write per-epoch history JSON here");
  train->add_option("--seed", seed_override, "seed override");

  auto* harden = app.add_subcommand("harden", "distill a trained cell to a ternary circuit");
  harden->add_option("--config", config_path, "experiment config JSON");
  harden->add_option("--data", data_dir, "dataset directory")->required();
  harden->add_option("--cell", cell_path, "checkpoint path")->required();
  harden->add_option("--out", out_path, "circuit output path")->required();
  harden->add_option("--report", report_path, "write the distillation report JSON here");

  auto* eval = app.add_subcommand("eval", "evaluate a hardened circuit on a dataset");
  eval->add_option("--config", config_path, "experiment config JSON");
  eval->add_option("--data", data_dir, "dataset directory")->required();
  eval->add_option("--circuit", circuit_path, "circuit path")->required();
  eval->add_option("--out", out_path, "write the metrics JSON here (default stdout)");

  auto* monitor = app.add_subcommand(
      "monitor", "stream: one line of P trits per timestep on stdin, verdicts on stdout");
  monitor->add_option("--circuit", circuit_path, "circuit path")->required();

  auto* run = app.add_subcommand("run", "full pipeline: gen, train, harden, eval");
  run->add_option("--config", config_path, "experiment config JSON");
  run->add_option("--out", out_path, "output directory")->required();
  run->add_option("--seed", seed_override, "seed override");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    int ec = EXIT_OK;
    std::string cfg = load_config(config_path, &ec);
    if (ec) return ec;
    rdtlgn_dataset* ds = nullptr;
    rdtlgn_status s = rdtlgn_dataset_generate(cfg.c_str(), seed_override, &ds);
    if (s) return report_failure(s, "gen-data");
    s = rdtlgn_dataset_save(ds, out_path.c_str());
    if (s) {
      rdtlgn_dataset_free(ds);
      return report_failure(s, "gen-data");
    }
    StringGuard info;
    if (rdtlgn_dataset_info_json(ds, &info.s) == RDTLGN_OK) std::puts(info.s);
    rdtlgn_dataset_free(ds);
    return EXIT_OK;
  }

  if (bound->parsed()) {
    rdtlgn_formula* f = nullptr;
    rdtlgn_status s = rdtlgn_formula_parse(formula_text.c_str(), &f);
    if (s) return report_failure(s, "bound");
    StringGuard json;
    s = rdtlgn_formula_bounds_json(f, &json.s);
    rdtlgn_formula_free(f);
    if (s) return report_failure(s, "bound");
    std::puts(json.s);
    return EXIT_OK;
  }

  if (audit->parsed()) {
    StringGuard json;
    rdtlgn_status s =
        rdtlgn_gate_audit_json(exclude_constants ? 1 : 0, include_ids ? 1 : 0, &json.s);
    if (s) return report_failure(s, "audit-gates");
    if (!out_path.empty()) {
      if (!write_file(out_path, json.s)) {
        std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
        return EXIT_RUNTIME;
      }
    } else {
      std::puts(json.s);
    }
    return EXIT_OK;
  }

  if (train->parsed()) {
    int ec = EXIT_OK;
    std::string cfg = load_config(config_path, &ec);
    if (ec) return ec;
    rdtlgn_dataset* ds = nullptr;
    rdtlgn_status s = rdtlgn_dataset_load(data_dir.c_str(), &ds);
    if (s) return report_failure(s, "train");
    rdtlgn_cell* cell = nullptr;
    StringGuard hist;
    s = rdtlgn_train(cfg.c_str(), ds, seed_override, &cell, &hist.s);
    rdtlgn_dataset_free(ds);
    if (s) return report_failure(s, "train");
    s = rdtlgn_cell_save(cell, out_path.c_str());
    rdtlgn_cell_free(cell);
    if (s) return report_failure(s, "train");
    if (!report_path.empty() && hist.s) write_file(report_path, hist.s);
    return EXIT_OK;
  }

  if (harden->parsed()) {
    int ec = EXIT_OK;
    std::string cfg = load_config(config_path, &ec);
    if (ec) return ec;
    rdtlgn_dataset* ds = nullptr;
    rdtlgn_status s = rdtlgn_dataset_load(data_dir.c_str(), &ds);
    if (s) return report_failure(s, "harden");
    rdtlgn_cell* cell = nullptr;
    s = rdtlgn_cell_load(cell_path.c_str(), &cell);
    if (s) {
      rdtlgn_dataset_free(ds);
      return report_failure(s, "harden");
    }
    rdtlgn_circuit* circuit = nullptr;
    StringGuard rep;
    s = rdtlgn_harden(cfg.c_str(), ds, cell, &circuit, &rep.s);
    rdtlgn_cell_free(cell);
    rdtlgn_dataset_free(ds);
    if (s) return report_failure(s, "harden");
    s = rdtlgn_circuit_save(circuit, out_path.c_str());
    rdtlgn_circuit_free(circuit);
    if (s) return report_failure(s, "harden");
    if (!report_path.empty() && rep.s) write_file(report_path, rep.s);
    return EXIT_OK;
  }

  if (eval->parsed()) {
    int ec = EXIT_OK;
    std::string cfg = load_config(config_path, &ec);
    if (ec) return ec;
    rdtlgn_dataset* ds = nullptr;
    rdtlgn_status s = rdtlgn_dataset_load(data_dir.c_str(), &ds);
    if (s) return report_failure(s, "eval");
    rdtlgn_circuit* circuit = nullptr;
    s = rdtlgn_circuit_load(circuit_path.c_str(), &circuit);
    if (s) {
      rdtlgn_dataset_free(ds);
      return report_failure(s, "eval");
    }
    StringGuard json;
    s = rdtlgn_evaluate(cfg.c_str(), ds, circuit, &json.s);
    rdtlgn_circuit_free(circuit);
    rdtlgn_dataset_free(ds);
    if (s) return report_failure(s, "eval");
    if (!out_path.empty()) {
      if (!write_file(out_path, json.s)) {
        std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
        return EXIT_RUNTIME;
      }
    } else {
      std::puts(json.s);
    }
    return EXIT_OK;
  }

  if (monitor->parsed()) {
    rdtlgn_circuit* circuit = nullptr;
    rdtlgn_status s = rdtlgn_circuit_load(circuit_path.c_str(), &circuit);
    if (s) return report_failure(s, "monitor");
    int P = 0, K = 0;
    rdtlgn_circuit_shape(circuit, &P, nullptr, &K, nullptr);
    rdtlgn_monitor* mon = nullptr;
    s = rdtlgn_monitor_create(circuit, &mon);
    if (s) {
      rdtlgn_circuit_free(circuit);
      return report_failure(s, "monitor");
    }
    std::string line;
    std::vector<int8_t> p(P), verdict(K);
    int rc = EXIT_OK;
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      int v = 0;
      bool bad = false;
      for (int i = 0; i < P; ++i) {
        if (!(ss >> v) || v < -1 || v > 1) {
          bad = true;
          break;
        }
        p[i] = static_cast<int8_t>(v);
      }
      if (bad) {
        std::fprintf(stderr, "error [monitor]: expected %d trits per line\n", P);
        rc = EXIT_CONFIG;
        break;
      }
      s = rdtlgn_monitor_step(mon, p.data(), p.size(), verdict.data(), verdict.size());
      if (s) {
        rc = report_failure(s, "monitor");
        break;
      }
      for (int k = 0; k < K; ++k)
        std::printf("%d%c", static_cast<int>(verdict[k]), k + 1 == K ? '\n' : ' ');
      std::fflush(stdout);
    }
    rdtlgn_monitor_free(mon);
    rdtlgn_circuit_free(circuit);
    return rc;
  }

  if (run->parsed()) {
    int ec = EXIT_OK;
    std::string cfg = load_config(config_path, &ec);
    if (ec) return ec;
    StringGuard summary;
    rdtlgn_status s =
        rdtlgn_run_experiment(cfg.c_str(), out_path.c_str(), seed_override, &summary.s);
    if (s) return report_failure(s, "run");
    if (summary.s) std::fputs(summary.s, stdout);
    return EXIT_OK;
  }

  return EXIT_CONFIG;
}
