#include "rdtlgn.h"

#include <cstring>
#include <string>

#include "core/experiment.hpp"
#include "json.hpp"

using namespace rdtlgn;

struct rdtlgn_formula {
  FormulaPtr f;
};
struct rdtlgn_dataset {
  Dataset ds;
};
struct rdtlgn_cell {
  SoftCell cell;
};
struct rdtlgn_circuit {
  HardCircuit c;
};
struct rdtlgn_monitor {
  const HardCircuit* c;
  MonitorState st;
};

namespace {

thread_local std::string g_last_error = "";

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rdtlgn_status fail(rdtlgn_status code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
rdtlgn_status guarded(Fn&& fn) {
  try {
    fn();
    return RDTLGN_OK;
  } catch (const ParseError& e) {
    return fail(RDTLGN_ERR_PARSE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(RDTLGN_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(RDTLGN_ERR_PARSE, e.what());
  } catch (const std::exception& e) {
    return fail(RDTLGN_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(RDTLGN_ERR_RUNTIME, "unknown error");
  }
}

ExperimentConfig config_with_seed(const char* config_json, int64_t seed_override) {
  ExperimentConfig cfg = parse_experiment_config(config_json ? config_json : "{}");
  if (seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.world.seed = cfg.seed;
  }
  return cfg;
}

}  // namespace

extern "C" {

const char* rdtlgn_version(void) { return "1.0.0"; }

const char* rdtlgn_last_error(void) { return g_last_error.c_str(); }

void rdtlgn_string_free(char* s) { delete[] s; }

/* ------------------------------------------------------------------ */

rdtlgn_status rdtlgn_formula_parse(const char* text, rdtlgn_formula** out) {
  if (!text || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = new rdtlgn_formula{parse_formula(text)}; });
}

void rdtlgn_formula_free(rdtlgn_formula* f) { delete f; }

rdtlgn_status rdtlgn_formula_format(const rdtlgn_formula* f, char** out) {
  if (!f || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = dup_string(format_formula(*f->f)); });
}

rdtlgn_status rdtlgn_formula_bounds_json(const rdtlgn_formula* f, char** out) {
  if (!f || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    nlohmann::json j = {{"B", state_complexity(*f->f)},
                        {"depth", depth_bound(*f->f)},
                        {"horizon", horizon(*f->f)}};
    *out = dup_string(j.dump());
  });
}

/* ------------------------------------------------------------------ */

rdtlgn_status rdtlgn_gate_audit_json(int exclude_constants, int include_ids, char** out) {
  if (!out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    bool ex = exclude_constants != 0;
    auto full = enumerate_vocabulary({VocabularyTag::Full, ex});
    auto nm = enumerate_vocabulary({VocabularyTag::NM, ex});
    auto im = enumerate_vocabulary({VocabularyTag::IM, ex});
    auto both = enumerate_vocabulary({VocabularyTag::NMAndIM, ex});
    nlohmann::json j;
    j["exclude_constants"] = ex;
    j["FULL"] = full.size();
    j["NM"] = nm.size();
    j["IM"] = im.size();
    j["NM_AND_IM"] = both.size();
    if (!ex) j["NM_AND_IM_nonconst"] = enumerate_vocabulary({VocabularyTag::NMAndIM, true}).size();
    if (include_ids) {
      j["ids"] = {{"NM", nm}, {"IM", im}, {"NM_AND_IM", both}};
    }
    *out = dup_string(j.dump(2));
  });
}

/* ------------------------------------------------------------------ */

rdtlgn_status rdtlgn_dataset_generate(const char* config_json, int64_t seed_override,
                                      rdtlgn_dataset** out) {
  if (!out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    ExperimentConfig cfg = config_with_seed(config_json, seed_override);
    Dataset ds = build_dataset(cfg.world, cfg.formula_text, cfg.delta, cfg.pool_count,
                               cfg.count, cfg.T, cfg.seed, cfg.train_frac);
    *out = new rdtlgn_dataset{std::move(ds)};
  });
}

rdtlgn_status rdtlgn_dataset_save(const rdtlgn_dataset* ds, const char* dir) {
  if (!ds || !dir) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { save_dataset(ds->ds, dir); });
}

rdtlgn_status rdtlgn_dataset_load(const char* dir, rdtlgn_dataset** out) {
  if (!dir || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = new rdtlgn_dataset{load_dataset(dir)}; });
}

rdtlgn_status rdtlgn_dataset_info_json(const rdtlgn_dataset* ds, char** out) {
  if (!ds || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    std::array<long, 3> freq{0, 0, 0};
    long total = 0;
    for (const auto& tr : ds->ds.labels_ctq)
      for (Trit l : tr) {
        ++freq[trit_ord(l)];
        ++total;
      }
    nlohmann::json j;
    j["formula"] = ds->ds.formula_text;
    j["delta"] = ds->ds.delta;
    j["T"] = ds->ds.T;
    j["count"] = ds->ds.count();
    j["n_train"] = ds->ds.train_idx.size();
    j["n_eval"] = ds->ds.eval_idx.size();
    j["ctq_label_fractions"] = {total ? double(freq[0]) / total : 0.0,
                                total ? double(freq[1]) / total : 0.0,
                                total ? double(freq[2]) / total : 0.0};
    *out = dup_string(j.dump(2));
  });
}

void rdtlgn_dataset_free(rdtlgn_dataset* ds) { delete ds; }

/* ------------------------------------------------------------------ */

rdtlgn_status rdtlgn_train(const char* config_json, const rdtlgn_dataset* ds,
                           int64_t seed_override, rdtlgn_cell** out, char** history_json_out) {
  if (!ds || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    ExperimentConfig cfg = config_with_seed(config_json, seed_override);
    LabelPipeline pipeline =
        cfg.pipeline == "qtc" ? LabelPipeline::QtC : LabelPipeline::CtQ;
    TrainedModel tm = train_model(cfg, ds->ds, pipeline);
    if (history_json_out) {
      nlohmann::json epochs = nlohmann::json::array();
      for (const auto& e : tm.history.epochs)
        epochs.push_back({{"task_loss", e.task_loss},
                          {"commit_penalty", e.commit_penalty},
                          {"lambda", e.lambda},
                          {"soft_accuracy", e.soft_accuracy}});
      nlohmann::json j = {{"epochs", epochs}, {"class_weights", tm.history.class_weights}};
      *history_json_out = dup_string(j.dump(2));
    }
    *out = new rdtlgn_cell{std::move(tm.cell)};
  });
}

rdtlgn_status rdtlgn_cell_save(const rdtlgn_cell* cell, const char* path) {
  if (!cell || !path) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { write_text_file(path, save_checkpoint(cell->cell)); });
}

rdtlgn_status rdtlgn_cell_load(const char* path, rdtlgn_cell** out) {
  if (!path || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = new rdtlgn_cell{load_checkpoint(read_text_file(path))}; });
}

void rdtlgn_cell_free(rdtlgn_cell* cell) { delete cell; }

rdtlgn_status rdtlgn_harden(const char* config_json, const rdtlgn_dataset* ds,
                            const rdtlgn_cell* cell, rdtlgn_circuit** out,
                            char** report_json_out) {
  if (!ds || !cell || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    ExperimentConfig cfg = config_with_seed(config_json, -1);
    LabelPipeline pipeline =
        cell->cell.pipeline == "qtc" ? LabelPipeline::QtC : LabelPipeline::CtQ;
    HardenedModel hm = harden_model(cfg, ds->ds, cell->cell, pipeline);
    if (report_json_out) {
      // reuse the experiment module's JSON by serializing through the report
      nlohmann::json j;
      auto rep = [](const DistillReport& r) {
        nlohmann::json swaps = nlohmann::json::array();
        for (const auto& s : r.swaps)
          swaps.push_back({{"layer", s.layer},
                           {"neuron", s.neuron},
                           {"from", static_cast<int>(s.from)},
                           {"to", static_cast<int>(s.to)},
                           {"accuracy_delta", s.accuracy_delta},
                           {"forced", s.forced}});
        return nlohmann::json{{"phase", r.phase},
                              {"total_verdicts", r.total_verdicts},
                              {"warmstart_disagreement", r.warmstart_disagreement},
                              {"sweep_disagreement", r.sweep_disagreement},
                              {"sweeps_run", r.sweeps_run},
                              {"converged", r.converged},
                              {"swaps", swaps}};
      };
      j["phase1"] = rep(hm.phase1);
      j["phase2"] = rep(hm.phase2);
      *report_json_out = dup_string(j.dump(2));
    }
    *out = new rdtlgn_circuit{std::move(hm.circuit)};
  });
}

rdtlgn_status rdtlgn_circuit_save(const rdtlgn_circuit* c, const char* path) {
  if (!c || !path) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { write_text_file(path, save_circuit(c->c)); });
}

rdtlgn_status rdtlgn_circuit_load(const char* path, rdtlgn_circuit** out) {
  if (!path || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = new rdtlgn_circuit{load_circuit(read_text_file(path))}; });
}

rdtlgn_status rdtlgn_circuit_census_json(const rdtlgn_circuit* c, char** out) {
  if (!c || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    GateCensus g = gate_census(c->c);
    nlohmann::json j = {{"total", g.total},
                        {"nm", g.nm},
                        {"im", g.im},
                        {"nm_and_im", g.nm_and_im},
                        {"constant", g.constant},
                        {"fraction_nm_and_im", g.fraction_nm_and_im}};
    *out = dup_string(j.dump(2));
  });
}

rdtlgn_status rdtlgn_circuit_shape(const rdtlgn_circuit* c, int* P, int* S, int* K, int* L) {
  if (!c) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  if (P) *P = c->c.config.P;
  if (S) *S = c->c.config.S;
  if (K) *K = c->c.config.K;
  if (L) *L = c->c.config.L;
  return RDTLGN_OK;
}

void rdtlgn_circuit_free(rdtlgn_circuit* c) { delete c; }

/* ------------------------------------------------------------------ */

rdtlgn_status rdtlgn_evaluate(const char* config_json, const rdtlgn_dataset* ds,
                              const rdtlgn_circuit* c, char** report_json_out) {
  if (!ds || !c || !report_json_out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    ExperimentConfig cfg = config_with_seed(config_json, -1);
    CircuitMetrics m = evaluate_circuit(cfg, ds->ds, c->c);
    nlohmann::json abst = nlohmann::json::object();
    for (const auto& [k, v] : m.abstention) abst[std::to_string(k)] = v;
    nlohmann::json j = {
        {"accuracy", m.accuracy},
        {"preservation", m.preservation},
        {"lattice", m.lattice},
        {"lattice_covering", m.lattice_covering},
        {"abstention", abst},
        {"census",
         {{"total", m.census.total},
          {"nm", m.census.nm},
          {"im", m.census.im},
          {"nm_and_im", m.census.nm_and_im},
          {"constant", m.census.constant},
          {"fraction_nm_and_im", m.census.fraction_nm_and_im}}}};
    *report_json_out = dup_string(j.dump(2));
  });
}

rdtlgn_status rdtlgn_run_experiment(const char* config_json, const char* outdir,
                                    int64_t seed_override, char** summary_out) {
  if (!outdir) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    ExperimentConfig cfg = config_with_seed(config_json, seed_override);
    EvalReport rep = run_experiment(cfg, outdir);
    if (summary_out) *summary_out = dup_string(render_table(rep));
  });
}

/* ------------------------------------------------------------------ */

rdtlgn_status rdtlgn_monitor_create(const rdtlgn_circuit* c, rdtlgn_monitor** out) {
  if (!c || !out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = new rdtlgn_monitor{&c->c, initial_state(c->c)}; });
}

rdtlgn_status rdtlgn_monitor_step(rdtlgn_monitor* m, const int8_t* p, size_t p_len,
                                  int8_t* verdict_out, size_t verdict_len) {
  if (!m || !p || !verdict_out) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  if (static_cast<int>(p_len) != m->c->config.P)
    return fail(RDTLGN_ERR_INVALID_ARG, "monitor_step: wrong input length");
  if (static_cast<int>(verdict_len) < m->c->config.K)
    return fail(RDTLGN_ERR_INVALID_ARG, "monitor_step: verdict buffer too small");
  for (size_t i = 0; i < p_len; ++i)
    if (!is_trit(p[i])) return fail(RDTLGN_ERR_INVALID_ARG, "monitor_step: input not a trit");
  return guarded([&] { circuit_step(*m->c, p, m->st, verdict_out); });
}

rdtlgn_status rdtlgn_monitor_reset(rdtlgn_monitor* m) {
  if (!m) return fail(RDTLGN_ERR_INVALID_ARG, "null argument");
  m->st = initial_state(*m->c);
  return RDTLGN_OK;
}

void rdtlgn_monitor_free(rdtlgn_monitor* m) { delete m; }

} /* extern "C" */
