// Exercises the shared-library surface end to end through rdtlgn.h only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "rdtlgn.h"

namespace {

struct Str {
  char* s = nullptr;
  ~Str() { rdtlgn_string_free(s); }
};

std::string tmp_dir(const char* name) {
  namespace fs = std::filesystem;
  std::string dir = (fs::temp_directory_path() / name).string();
  fs::remove_all(dir);
  return dir;
}

const char* SMOKE_CONFIG =
    R"json({"formula":"G[0,1](p3 U[0,1] p0)","seed":5,
        "data":{"pool_count":40,"count":20,"T":8},
        "train":{"epochs":2,"batch_size":8},
        "distill":{"max_sweeps":2,"calib_count":8}})json";

}  // namespace

TEST_CASE("formula parse, format, bounds") {
  rdtlgn_formula* f = nullptr;
  REQUIRE(rdtlgn_formula_parse("p1 U[0,5] p0", &f) == RDTLGN_OK);
  Str text, bounds;
  CHECK(rdtlgn_formula_format(f, &text.s) == RDTLGN_OK);
  CHECK(std::string(text.s) == "(p1 U[0,5] p0)");
  CHECK(rdtlgn_formula_bounds_json(f, &bounds.s) == RDTLGN_OK);
  CHECK(std::string(bounds.s) == R"({"B":12,"depth":3,"horizon":5})");
  rdtlgn_formula_free(f);

  rdtlgn_formula* bad = nullptr;
  CHECK(rdtlgn_formula_parse("G[3,1] p0", &bad) == RDTLGN_ERR_PARSE);
  CHECK(std::strlen(rdtlgn_last_error()) > 0);
  CHECK(rdtlgn_formula_parse(nullptr, &bad) == RDTLGN_ERR_INVALID_ARG);
}

TEST_CASE("gate audit census") {
  Str json;
  REQUIRE(rdtlgn_gate_audit_json(0, 0, &json.s) == RDTLGN_OK);
  std::string s = json.s;
  CHECK(s.find("\"NM\": 175") != std::string::npos);
  CHECK(s.find("\"IM\": 197") != std::string::npos);
  CHECK(s.find("\"NM_AND_IM\": 20") != std::string::npos);
  CHECK(s.find("\"NM_AND_IM_nonconst\": 17") != std::string::npos);

  Str excl;
  REQUIRE(rdtlgn_gate_audit_json(1, 0, &excl.s) == RDTLGN_OK);
  std::string e = excl.s;
  CHECK(e.find("\"NM\": 172") != std::string::npos);
  CHECK(e.find("\"IM\": 194") != std::string::npos);
  CHECK(e.find("\"NM_AND_IM\": 17") != std::string::npos);

  // byte-identical on repeat
  Str again;
  REQUIRE(rdtlgn_gate_audit_json(0, 0, &again.s) == RDTLGN_OK);
  CHECK(std::string(again.s) == s);

  Str with_ids;
  REQUIRE(rdtlgn_gate_audit_json(0, 1, &with_ids.s) == RDTLGN_OK);
  CHECK(std::string(with_ids.s).find("15633") != std::string::npos);  // Kleene AND id
}

TEST_CASE("dataset generate, save, load, info") {
  rdtlgn_dataset* ds = nullptr;
  REQUIRE(rdtlgn_dataset_generate(SMOKE_CONFIG, -1, &ds) == RDTLGN_OK);
  Str info;
  REQUIRE(rdtlgn_dataset_info_json(ds, &info.s) == RDTLGN_OK);
  CHECK(std::string(info.s).find("\"count\": 20") != std::string::npos);

  std::string dir = tmp_dir("rdtlgn_capi_ds");
  REQUIRE(rdtlgn_dataset_save(ds, dir.c_str()) == RDTLGN_OK);
  rdtlgn_dataset* back = nullptr;
  REQUIRE(rdtlgn_dataset_load(dir.c_str(), &back) == RDTLGN_OK);
  Str info2;
  REQUIRE(rdtlgn_dataset_info_json(back, &info2.s) == RDTLGN_OK);
  CHECK(std::string(info2.s) == std::string(info.s));
  rdtlgn_dataset_free(back);
  rdtlgn_dataset_free(ds);
  std::filesystem::remove_all(dir);

  rdtlgn_dataset* missing = nullptr;
  CHECK(rdtlgn_dataset_load("/nonexistent/dir", &missing) != RDTLGN_OK);
}

TEST_CASE("train, harden, evaluate, monitor through the C surface") {
  rdtlgn_dataset* ds = nullptr;
  REQUIRE(rdtlgn_dataset_generate(SMOKE_CONFIG, -1, &ds) == RDTLGN_OK);

  rdtlgn_cell* cell = nullptr;
  Str history;
  REQUIRE(rdtlgn_train(SMOKE_CONFIG, ds, -1, &cell, &history.s) == RDTLGN_OK);
  CHECK(std::string(history.s).find("task_loss") != std::string::npos);

  std::string cell_path = tmp_dir("rdtlgn_capi_cell") + ".json";
  REQUIRE(rdtlgn_cell_save(cell, cell_path.c_str()) == RDTLGN_OK);
  rdtlgn_cell* cell2 = nullptr;
  REQUIRE(rdtlgn_cell_load(cell_path.c_str(), &cell2) == RDTLGN_OK);
  rdtlgn_cell_free(cell2);

  rdtlgn_circuit* circuit = nullptr;
  Str distill_report;
  REQUIRE(rdtlgn_harden(SMOKE_CONFIG, ds, cell, &circuit, &distill_report.s) == RDTLGN_OK);
  CHECK(std::string(distill_report.s).find("phase1") != std::string::npos);
  rdtlgn_cell_free(cell);

  int P = 0, S = 0, K = 0, L = 0;
  REQUIRE(rdtlgn_circuit_shape(circuit, &P, &S, &K, &L) == RDTLGN_OK);
  CHECK(P == 2);
  CHECK(K == 1);

  Str census;
  REQUIRE(rdtlgn_circuit_census_json(circuit, &census.s) == RDTLGN_OK);
  CHECK(std::string(census.s).find("fraction_nm_and_im") != std::string::npos);

  Str eval_json;
  REQUIRE(rdtlgn_evaluate(SMOKE_CONFIG, ds, circuit, &eval_json.s) == RDTLGN_OK);
  CHECK(std::string(eval_json.s).find("\"lattice\"") != std::string::npos);

  std::string circ_path = tmp_dir("rdtlgn_capi_circ") + ".json";
  REQUIRE(rdtlgn_circuit_save(circuit, circ_path.c_str()) == RDTLGN_OK);
  rdtlgn_circuit* circuit2 = nullptr;
  REQUIRE(rdtlgn_circuit_load(circ_path.c_str(), &circuit2) == RDTLGN_OK);

  // streaming monitor over the loaded circuit
  rdtlgn_monitor* mon = nullptr;
  REQUIRE(rdtlgn_monitor_create(circuit2, &mon) == RDTLGN_OK);
  int8_t p_in[2] = {1, -1};
  int8_t verdict = 99;
  REQUIRE(rdtlgn_monitor_step(mon, p_in, 2, &verdict, 1) == RDTLGN_OK);
  CHECK(verdict >= -1);
  CHECK(verdict <= 1);
  // wrong arity and non-trit inputs are rejected
  CHECK(rdtlgn_monitor_step(mon, p_in, 1, &verdict, 1) == RDTLGN_ERR_INVALID_ARG);
  int8_t bad_in[2] = {2, 0};
  CHECK(rdtlgn_monitor_step(mon, bad_in, 2, &verdict, 1) == RDTLGN_ERR_INVALID_ARG);
  CHECK(rdtlgn_monitor_reset(mon) == RDTLGN_OK);
  rdtlgn_monitor_free(mon);

  rdtlgn_circuit_free(circuit2);
  rdtlgn_circuit_free(circuit);
  rdtlgn_dataset_free(ds);
  std::filesystem::remove(cell_path);
  std::filesystem::remove(circ_path);
}

TEST_CASE("checkpoint from a different formula errors at the use site") {
  rdtlgn_dataset* ds = nullptr;
  REQUIRE(rdtlgn_dataset_generate(SMOKE_CONFIG, -1, &ds) == RDTLGN_OK);
  // 3-predicate formula -> P=3 cell, dataset formula uses 2
  const char* other_cfg =
      R"json({"formula":"G[0,1]((p3|p4) U[0,1] p0)","seed":5,
          "data":{"pool_count":30,"count":16,"T":8},
          "train":{"epochs":1,"batch_size":8}})json";
  rdtlgn_dataset* other_ds = nullptr;
  REQUIRE(rdtlgn_dataset_generate(other_cfg, -1, &other_ds) == RDTLGN_OK);
  rdtlgn_cell* cell = nullptr;
  REQUIRE(rdtlgn_train(other_cfg, other_ds, -1, &cell, nullptr) == RDTLGN_OK);
  rdtlgn_circuit* circuit = nullptr;
  CHECK(rdtlgn_harden(SMOKE_CONFIG, ds, cell, &circuit, nullptr) != RDTLGN_OK);
  rdtlgn_cell_free(cell);
  rdtlgn_dataset_free(other_ds);
  rdtlgn_dataset_free(ds);
}

TEST_CASE("run_experiment writes artifacts and reports a summary") {
  std::string outdir = tmp_dir("rdtlgn_capi_run");
  Str summary;
  REQUIRE(rdtlgn_run_experiment(SMOKE_CONFIG, outdir.c_str(), -1, &summary.s) == RDTLGN_OK);
  CHECK(std::string(summary.s).find("Prediction") != std::string::npos);
  CHECK(std::filesystem::exists(outdir + "/eval_report.json"));
  CHECK(std::filesystem::exists(outdir + "/summary.txt"));
  std::filesystem::remove_all(outdir);
}

TEST_CASE("bad config surfaces as a parse error") {
  rdtlgn_dataset* ds = nullptr;
  CHECK(rdtlgn_dataset_generate("{not json", -1, &ds) == RDTLGN_ERR_PARSE);
  CHECK(rdtlgn_dataset_generate(R"({"pipeline":"nope"})", -1, &ds) == RDTLGN_ERR_PARSE);
}
