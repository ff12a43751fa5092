#pragma once

#include <utility>
#include <vector>

#include "mccb/core.hpp"

namespace mccb {

// Finite-horizon backward induction over a cascading session. Indexing is
// 1-based at the interface: q(h-1, k-1) is the value of showing arm k with
// steps h..H remaining, v(h-1) the optimal value, v(H) = 0.
struct PlanResult {
  Mat q;                      // H x K
  Vec v;                      // length H+1
  std::vector<int> best_arm;  // length H, 1-based, lowest-index tie-break
};

// probabilities inside [0,1] are clamped to this interior before planning
inline constexpr double kProbClamp = 1e-9;

inline double clamp_prob(double f) {
  if (f < kProbClamp) return kProbClamp;
  if (f > 1.0 - kProbClamp) return 1.0 - kProbClamp;
  return f;
}

// q[h][k] = f_k e_k + (1 - f_k) v[h+1], v[h] = max_k q[h][k], from h = H down to 1.
// Inputs must be finite with f in [0,1] (error otherwise) and are clamped to
// [1e-9, 1-1e-9] so saturated estimates stay inside the open interval.
PlanResult backward_plan(const Vec& probs, const Vec& rewards, int H);

// Expected session value of a fixed arm sequence:
// sum_h prod_{j<h}(1 - f_{k_j}) * f_{k_h} * e_{k_h}.
double oracle_policy_value(const std::vector<int>& arm_sequence, const Vec& probs,
                           const Vec& rewards);

// Independent check of backward_plan by enumerating all K^H sequences
// (guarded at 1e6); returns the best value and the first sequence attaining it.
std::pair<double, std::vector<int>> brute_force_value(const Vec& probs, const Vec& rewards,
                                                      int H);

}  // namespace mccb
