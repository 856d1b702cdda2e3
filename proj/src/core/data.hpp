#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/stl.hpp"
#include "core/ternary.hpp"

namespace rdtlgn {

struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  // Negative inside, positive outside.
  double signed_distance(double x, double y) const;
};

// Obstacle-box world with a point-mass kinematic model; stand-in for the
// physics-based navigation data.
struct WorldConfig {
  std::array<double, 2> goal{8.5, 8.5};
  double goal_radius = 1.0;
  std::vector<Box> obstacles{{3.0, 2.5, 4.5, 6.5}, {6.0, 5.0, 7.5, 9.0}};
  Box bounds{0.0, 0.0, 10.0, 10.0};
  double noise_scale = 1.0;
  std::uint64_t seed = 1;

  // predicate shaping (tanh scales and thresholds)
  double scale_goal = 1.5;
  double scale_safe = 1.0;
  double scale_move = 0.3;
  double scale_approach = 0.5;
  double speed_threshold = 0.3;

  // behavior mixture: seeker, wanderer, dawdler, escaper
  std::array<double, 4> mode_probs{0.45, 0.25, 0.15, 0.15};
  double base_speed = 0.7;
  double max_speed = 1.2;
};

// (px, py, vx, vy) per timestep.
struct Trajectory {
  std::vector<std::array<double, 4>> states;
  int length() const { return static_cast<int>(states.size()); }
};

inline constexpr int PREDICATE_COUNT = 5;  // mu_g, mu_s, mu_m, mu_h, mu_p

std::vector<Trajectory> gen_trajectories(const WorldConfig& world, int count, int T,
                                         std::uint64_t seed);

// 5 x T matrix: at-goal, safe, moving, heading-toward-goal, approach-rate,
// each squashed into [-1, +1].
Signals compute_predicates(const Trajectory& traj, const WorldConfig& world);

struct Dataset {
  WorldConfig world;
  std::string formula_text;
  double delta = 0.2;
  int T = 20;
  std::uint64_t seed = 0;
  std::vector<Trajectory> trajectories;
  std::vector<Signals> predicates;              // one 5 x T matrix per trajectory
  std::vector<std::vector<Trit>> labels_ctq;
  std::vector<std::vector<Trit>> labels_qtc;
  std::vector<int> train_idx, eval_idx;

  int count() const { return static_cast<int>(trajectories.size()); }
};

// Greedy subset selection maximizing the minimum per-class CtQ label
// frequency. Returns the selected indices in selection order; sets *warned
// if some class is unrepresentable in the pool.
std::vector<int> balance_select_indices(const std::vector<std::vector<Trit>>& labels_ctq, int N,
                                        bool* warned);

// gen -> predicates -> labels -> balance-select -> seeded 80/20 split.
Dataset build_dataset(const WorldConfig& world, const std::string& formula_text, double delta,
                      int pool_count, int select_count, int T, std::uint64_t seed,
                      double train_frac = 0.8);

// One CSV per split (traj_id, t, px, py, vx, vy, mu_g, mu_s, mu_m, mu_h, mu_p)
// plus a JSON sidecar with the world, formula, delta and label arrays.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace rdtlgn
