#include "core/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "core/rng.hpp"
#include "json.hpp"

namespace rdtlgn {

double Box::signed_distance(double x, double y) const {
  double dx = std::max({x0 - x, 0.0, x - x1});
  double dy = std::max({y0 - y, 0.0, y - y1});
  if (dx > 0.0 || dy > 0.0) return std::sqrt(dx * dx + dy * dy);
  // inside: negative distance to the nearest edge
  double inner = std::min({x - x0, x1 - x, y - y0, y1 - y});
  return -inner;
}

namespace {

enum class Mode { Seeker, Wanderer, Dawdler, Escaper };

Mode sample_mode(const WorldConfig& w, Rng& rng) {
  double u = rng.uniform01();
  double acc = 0.0;
  for (int m = 0; m < 4; ++m) {
    acc += w.mode_probs[m];
    if (u < acc) return static_cast<Mode>(m);
  }
  return Mode::Seeker;
}

bool inside_any_obstacle(const WorldConfig& w, double x, double y) {
  for (const Box& b : w.obstacles)
    if (b.contains(x, y)) return true;
  return false;
}

Trajectory gen_one(const WorldConfig& w, int T, std::uint64_t seed) {
  Rng rng(seed);
  Mode mode = sample_mode(w, rng);

  double px, py;
  do {
    px = rng.uniform(w.bounds.x0 + 0.2, w.bounds.x1 - 0.2);
    py = rng.uniform(w.bounds.y0 + 0.2, w.bounds.y1 - 0.2);
  } while (inside_any_obstacle(w, px, py));

  double heading = rng.uniform(0.0, 6.283185307179586);
  double noise = w.noise_scale;

  Trajectory traj;
  traj.states.reserve(T);
  double vx = 0.0, vy = 0.0;
  for (int t = 0; t < T; ++t) {
    double to_goal = std::atan2(w.goal[1] - py, w.goal[0] - px);
    double speed;
    switch (mode) {
      case Mode::Seeker:
        heading = to_goal + noise * rng.normal(0.0, 0.25);
        speed = w.base_speed + noise * rng.normal(0.0, 0.1);
        break;
      case Mode::Wanderer:
        heading += noise * rng.normal(0.0, 0.8);
        speed = 0.5 * w.base_speed + noise * rng.normal(0.0, 0.15);
        break;
      case Mode::Dawdler:
        heading = to_goal + noise * rng.normal(0.0, 0.6);
        speed = 0.2 * w.base_speed + noise * rng.normal(0.0, 0.05);
        break;
      case Mode::Escaper:
      default:
        heading = to_goal + 3.141592653589793 + noise * rng.normal(0.0, 0.3);
        speed = 0.6 * w.base_speed + noise * rng.normal(0.0, 0.1);
        break;
    }
    speed = std::clamp(speed, 0.0, w.max_speed);
    vx = speed * std::cos(heading);
    vy = speed * std::sin(heading);

    // steer off obstacles: if the step would land inside one, rotate away
    double nx = px + vx, ny = py + vy;
    for (int attempt = 0; attempt < 4 && inside_any_obstacle(w, nx, ny); ++attempt) {
      heading += 1.5707963267948966;  // quarter turn
      vx = speed * std::cos(heading);
      vy = speed * std::sin(heading);
      nx = px + vx;
      ny = py + vy;
    }

    traj.states.push_back({px, py, vx, vy});

    px = std::clamp(nx, w.bounds.x0, w.bounds.x1);
    py = std::clamp(ny, w.bounds.y0, w.bounds.y1);
  }
  return traj;
}

}  // namespace

std::vector<Trajectory> gen_trajectories(const WorldConfig& world, int count, int T,
                                         std::uint64_t seed) {
  if (count < 1 || T < 1) throw std::invalid_argument("gen_trajectories: count and T >= 1");
  std::vector<Trajectory> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(gen_one(world, T, mix_seed(seed, i)));
  return out;
}

Signals compute_predicates(const Trajectory& traj, const WorldConfig& w) {
  int T = traj.length();
  Signals s(PREDICATE_COUNT, T);
  for (int t = 0; t < T; ++t) {
    double px = traj.states[t][0], py = traj.states[t][1];
    double vx = traj.states[t][2], vy = traj.states[t][3];
    double dx = w.goal[0] - px, dy = w.goal[1] - py;
    double dist = std::sqrt(dx * dx + dy * dy);
    double speed = std::sqrt(vx * vx + vy * vy);

    // mu_g: at goal
    s.at(0, t) = std::tanh((w.goal_radius - dist) / w.scale_goal);

    // mu_s: signed distance to the nearest obstacle
    double min_sd = 1e9;
    for (const Box& b : w.obstacles) min_sd = std::min(min_sd, b.signed_distance(px, py));
    if (w.obstacles.empty()) min_sd = 1e9;
    s.at(1, t) = std::tanh(min_sd / w.scale_safe);

    // mu_m: moving
    s.at(2, t) = std::tanh((speed - w.speed_threshold) / w.scale_move);

    // mu_h: heading toward goal (cosine); zero velocity or at-goal center -> 0
    if (speed > 1e-9 && dist > 1e-9)
      s.at(3, t) = (vx * dx + vy * dy) / (speed * dist);
    else
      s.at(3, t) = 0.0;

    // mu_p: approach rate (positive when closing in)
    double radial_vel = dist > 1e-9 ? (vx * -dx + vy * -dy) / dist : 0.0;  // d(dist)/dt
    s.at(4, t) = std::tanh(-radial_vel / w.scale_approach);
  }
  for (double& v : s.values) v = std::clamp(v, -1.0, 1.0);
  return s;
}

std::vector<int> balance_select_indices(const std::vector<std::vector<Trit>>& labels_ctq, int N,
                                        bool* warned) {
  int pool = static_cast<int>(labels_ctq.size());
  if (N > pool) throw std::invalid_argument("balance_select: N exceeds pool size");
  if (warned) *warned = false;

  // per-trajectory class counts
  std::vector<std::array<long, 3>> counts(pool, {0, 0, 0});
  std::array<long, 3> pool_counts{0, 0, 0};
  for (int i = 0; i < pool; ++i)
    for (Trit l : labels_ctq[i]) {
      ++counts[i][trit_ord(l)];
      ++pool_counts[trit_ord(l)];
    }
  if (warned && (pool_counts[0] == 0 || pool_counts[1] == 0 || pool_counts[2] == 0))
    *warned = true;

  std::vector<int> selected;
  std::vector<bool> used(pool, false);
  std::array<long, 3> acc{0, 0, 0};
  for (int step = 0; step < N; ++step) {
    int best = -1;
    std::array<long, 3> best_sorted{-1, -1, -1};
    for (int i = 0; i < pool; ++i) {
      if (used[i]) continue;
      // lexicographic on the sorted class counts: raise the minimum first,
      // then the second smallest, then the largest
      std::array<long, 3> cand{acc[0] + counts[i][0], acc[1] + counts[i][1],
                               acc[2] + counts[i][2]};
      std::sort(cand.begin(), cand.end());
      if (cand > best_sorted) {
        best = i;
        best_sorted = cand;
      }
    }
    used[best] = true;
    selected.push_back(best);
    for (int c = 0; c < 3; ++c) acc[c] += counts[best][c];
  }
  return selected;
}

Dataset build_dataset(const WorldConfig& world, const std::string& formula_text, double delta,
                      int pool_count, int select_count, int T, std::uint64_t seed,
                      double train_frac) {
  if (select_count > pool_count)
    throw std::invalid_argument("build_dataset: select_count exceeds pool_count");
  FormulaPtr phi = parse_formula(formula_text);
  if (max_pred_index(*phi) >= PREDICATE_COUNT)
    throw std::invalid_argument("build_dataset: formula references unknown predicate");

  std::vector<Trajectory> pool = gen_trajectories(world, pool_count, T, seed);
  std::vector<Signals> preds;
  preds.reserve(pool.size());
  for (const auto& tr : pool) preds.push_back(compute_predicates(tr, world));

  std::vector<std::vector<Trit>> pool_ctq(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    pool_ctq[i] = make_labels(*phi, preds[i], {LabelPipeline::CtQ, delta});

  bool warned = false;
  std::vector<int> sel = balance_select_indices(pool_ctq, select_count, &warned);
  std::sort(sel.begin(), sel.end());

  Dataset ds;
  ds.world = world;
  ds.formula_text = formula_text;
  ds.delta = delta;
  ds.T = T;
  ds.seed = seed;
  for (int i : sel) {
    ds.trajectories.push_back(pool[i]);
    ds.predicates.push_back(preds[i]);
    ds.labels_ctq.push_back(pool_ctq[i]);
    ds.labels_qtc.push_back(make_labels(*phi, preds[i], {LabelPipeline::QtC, delta}));
  }

  // seeded 80/20 split
  std::vector<int> order(ds.count());
  for (int i = 0; i < ds.count(); ++i) order[i] = i;
  Rng rng(mix_seed(seed, 0x73706c69ULL));
  rng.shuffle(order);
  int n_train = static_cast<int>(std::lround(train_frac * ds.count()));
  n_train = std::clamp(n_train, 1, ds.count() - 1);
  ds.train_idx.assign(order.begin(), order.begin() + n_train);
  ds.eval_idx.assign(order.begin() + n_train, order.end());
  std::sort(ds.train_idx.begin(), ds.train_idx.end());
  std::sort(ds.eval_idx.begin(), ds.eval_idx.end());
  return ds;
}

namespace {

void write_split_csv(const Dataset& ds, const std::vector<int>& idx, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "traj_id,t,px,py,vx,vy,mu_g,mu_s,mu_m,mu_h,mu_p\n";
  char buf[64];
  for (int i : idx) {
    const Trajectory& tr = ds.trajectories[i];
    const Signals& s = ds.predicates[i];
    for (int t = 0; t < tr.length(); ++t) {
      f << i << ',' << t;
      for (int c = 0; c < 4; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", tr.states[t][c]);
        f << ',' << buf;
      }
      for (int p = 0; p < PREDICATE_COUNT; ++p) {
        std::snprintf(buf, sizeof(buf), "%.17g", s.at(p, t));
        f << ',' << buf;
      }
      f << '\n';
    }
  }
}

nlohmann::json world_to_json(const WorldConfig& w) {
  nlohmann::json j;
  j["goal"] = w.goal;
  j["goal_radius"] = w.goal_radius;
  nlohmann::json obs = nlohmann::json::array();
  for (const Box& b : w.obstacles) obs.push_back({b.x0, b.y0, b.x1, b.y1});
  j["obstacles"] = obs;
  j["bounds"] = {w.bounds.x0, w.bounds.y0, w.bounds.x1, w.bounds.y1};
  j["noise_scale"] = w.noise_scale;
  j["seed"] = w.seed;
  j["scale_goal"] = w.scale_goal;
  j["scale_safe"] = w.scale_safe;
  j["scale_move"] = w.scale_move;
  j["scale_approach"] = w.scale_approach;
  j["speed_threshold"] = w.speed_threshold;
  j["mode_probs"] = w.mode_probs;
  j["base_speed"] = w.base_speed;
  j["max_speed"] = w.max_speed;
  return j;
}

WorldConfig world_from_json(const nlohmann::json& j) {
  WorldConfig w;
  if (j.contains("goal")) w.goal = j["goal"].get<std::array<double, 2>>();
  if (j.contains("goal_radius")) w.goal_radius = j["goal_radius"].get<double>();
  if (j.contains("obstacles")) {
    w.obstacles.clear();
    for (const auto& o : j["obstacles"])
      w.obstacles.push_back({o[0].get<double>(), o[1].get<double>(), o[2].get<double>(),
                             o[3].get<double>()});
  }
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    w.bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  }
  if (j.contains("noise_scale")) w.noise_scale = j["noise_scale"].get<double>();
  if (j.contains("seed")) w.seed = j["seed"].get<std::uint64_t>();
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

nlohmann::json labels_to_json(const std::vector<std::vector<Trit>>& labels) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& tr : labels) {
    nlohmann::json row = nlohmann::json::array();
    for (Trit l : tr) row.push_back(static_cast<int>(l));
    out.push_back(row);
  }
  return out;
}

std::vector<std::vector<Trit>> labels_from_json(const nlohmann::json& j) {
  std::vector<std::vector<Trit>> out;
  for (const auto& row : j) {
    std::vector<Trit> tr;
    for (const auto& v : row) {
      int x = v.get<int>();
      if (!is_trit(x)) throw std::runtime_error("dataset: label outside {-1,0,+1}");
      tr.push_back(static_cast<Trit>(x));
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_split_csv(ds, ds.train_idx, dir + "/train.csv");
  write_split_csv(ds, ds.eval_idx, dir + "/eval.csv");

  nlohmann::json j;
  j["format"] = "rdtlgn-dataset";
  j["version"] = 1;
  j["world"] = world_to_json(ds.world);
  j["formula"] = ds.formula_text;
  j["delta"] = ds.delta;
  j["T"] = ds.T;
  j["seed"] = ds.seed;
  j["count"] = ds.count();
  j["train_idx"] = ds.train_idx;
  j["eval_idx"] = ds.eval_idx;
  j["labels_ctq"] = labels_to_json(ds.labels_ctq);
  j["labels_qtc"] = labels_to_json(ds.labels_qtc);
  std::ofstream f(dir + "/dataset.json");
  if (!f) throw std::runtime_error("cannot write " + dir + "/dataset.json");
  f << j.dump(2) << '\n';
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream jf(dir + "/dataset.json");
  if (!jf) throw std::runtime_error("cannot read " + dir + "/dataset.json");
  nlohmann::json j = nlohmann::json::parse(jf);
  if (j.value("format", "") != "rdtlgn-dataset")
    throw std::runtime_error("dataset: unexpected format tag");
  if (j.value("version", 0) != 1) throw std::runtime_error("dataset: unsupported version");

  Dataset ds;
  ds.world = world_from_json(j.at("world"));
  ds.formula_text = j.at("formula").get<std::string>();
  ds.delta = j.at("delta").get<double>();
  ds.T = j.at("T").get<int>();
  ds.seed = j.at("seed").get<std::uint64_t>();
  int count = j.at("count").get<int>();
  ds.train_idx = j.at("train_idx").get<std::vector<int>>();
  ds.eval_idx = j.at("eval_idx").get<std::vector<int>>();
  ds.labels_ctq = labels_from_json(j.at("labels_ctq"));
  ds.labels_qtc = labels_from_json(j.at("labels_qtc"));

  ds.trajectories.assign(count, {});
  ds.predicates.assign(count, {});
  for (const char* split : {"train.csv", "eval.csv"}) {
    std::ifstream cf(dir + "/" + split);
    if (!cf) throw std::runtime_error(std::string("cannot read dataset csv ") + split);
    std::string line;
    std::getline(cf, line);  // header
    while (std::getline(cf, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string cellv;
      std::vector<double> vals;
      while (std::getline(ss, cellv, ',')) vals.push_back(std::stod(cellv));
      if (vals.size() != 2 + 4 + PREDICATE_COUNT)
        throw std::runtime_error("dataset: malformed csv row");
      int id = static_cast<int>(vals[0]);
      int t = static_cast<int>(vals[1]);
      if (id < 0 || id >= count || t < 0 || t >= ds.T)
        throw std::runtime_error("dataset: csv row out of range");
      auto& tr = ds.trajectories[id];
      if (tr.states.empty()) tr.states.assign(ds.T, {});
      tr.states[t] = {vals[2], vals[3], vals[4], vals[5]};
      auto& s = ds.predicates[id];
      if (s.values.empty()) s = Signals(PREDICATE_COUNT, ds.T);
      for (int p = 0; p < PREDICATE_COUNT; ++p) s.at(p, t) = vals[6 + p];
    }
  }
  return ds;
}

}  // namespace rdtlgn
