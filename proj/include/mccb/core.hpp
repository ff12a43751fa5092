#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mccb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// d-dimensional user feature vector
using Context = Vec;

enum class ExecMode { serial, parallel };

// arm id 0 marks the skip action (consumes a step, no draw); real arms are 1..K
inline constexpr int kSkipArm = 0;

struct ArmCatalog {
  Vec rewards;  // rewards[k-1] = e_k > 0

  int K() const { return static_cast<int>(rewards.size()); }
  double e(int k) const { return rewards(k - 1); }
  double e_max() const { return rewards.maxCoeff(); }

  void validate() const {
    if (rewards.size() == 0) throw std::invalid_argument("ArmCatalog: K must be >= 1");
    for (int k = 0; k < rewards.size(); ++k)
      if (!(rewards(k) > 0.0) || !std::isfinite(rewards(k)))
        throw std::invalid_argument("ArmCatalog: rewards must be strictly positive and finite");
  }
};

struct TrueModel {
  int d = 0;
  int K = 0;
  Vec theta;  // length d+K

  void validate() const {
    if (d < 1 || K < 1) throw std::invalid_argument("TrueModel: d and K must be >= 1");
    if (theta.size() != d + K)
      throw std::invalid_argument("TrueModel: theta must have length d+K");
  }
};

// overflow-safe logistic function, symmetric in u -> -u
inline double sigmoid(double u) {
  if (u >= 0.0) {
    return 1.0 / (1.0 + std::exp(-u));
  }
  const double eu = std::exp(u);
  return eu / (1.0 + eu);
}

// [x; one-hot(k)], the model feature of showing arm k in context x
inline Vec joint_feature(const Context& x, int k, int K) {
  if (k < 1 || k > K) throw std::invalid_argument("joint_feature: arm id out of range");
  Vec z = Vec::Zero(x.size() + K);
  z.head(x.size()) = x;
  z(x.size() + k - 1) = 1.0;
  return z;
}

inline double click_probability(const TrueModel& m, const Vec& z) {
  if (z.size() != m.theta.size())
    throw std::invalid_argument("click_probability: feature length must be d+K");
  return sigmoid(z.dot(m.theta));
}

// click probabilities of all K arms in context x, without materializing each z
inline Vec click_probs(const TrueModel& m, const Context& x) {
  if (x.size() != m.d) throw std::invalid_argument("click_probs: context length must be d");
  const double base = m.theta.head(m.d).dot(x);
  Vec p(m.K);
  for (int k = 0; k < m.K; ++k) p(k) = sigmoid(base + m.theta(m.d + k));
  return p;
}

struct SessionState {
  int user = 1;   // 1..N
  int step = 1;   // next step to play, 1..H+1
  bool absorbed = false;
  int absorbing_step = 0;  // h* in 1..H once absorbed

  // steps the session actually consumed once the episode is over
  int steps_taken(int H) const { return absorbed ? absorbing_step : std::min(step - 1, H); }
};

struct Observation {
  long long episode = 0;
  int user = 0;
  int step = 0;
  int arm = kSkipArm;   // 0 = skip
  double reward = 0.0;  // 0 or e_arm exactly
  Vec z;                // joint feature; zero-length for skip
};

enum class PlanMode : std::uint8_t { warmup = 0, ucb = 1, greedy = 2, random_explore = 3 };

// The full counterfactual arm schedule of one episode: the arm every user
// would be shown at every step if never absorbed, fixed before any feedback.
// All implemented policies are deterministic functions of the episode-start
// model snapshot (epsilon-greedy's coins are counter-keyed draws), which is
// what makes exact plan scoring valid.
struct EpisodePlan {
  int N = 0;
  int H = 0;
  std::vector<std::int32_t> arm;     // slot (n,h) at (h-1)*N + (n-1)
  std::vector<std::uint8_t> mode;
  int M_t = 0;  // AUCBBP exploration budget this episode; 0 for other policies

  void resize(int n_users, int horizon) {
    N = n_users;
    H = horizon;
    arm.assign(static_cast<size_t>(N) * H, kSkipArm);
    mode.assign(static_cast<size_t>(N) * H, 0);
  }
  size_t slot(int n, int h) const { return static_cast<size_t>(h - 1) * N + (n - 1); }
  std::int32_t arm_at(int n, int h) const { return arm[slot(n, h)]; }
  PlanMode mode_at(int n, int h) const { return static_cast<PlanMode>(mode[slot(n, h)]); }
  void set(int n, int h, std::int32_t k, PlanMode m) {
    arm[slot(n, h)] = k;
    mode[slot(n, h)] = static_cast<std::uint8_t>(m);
  }
};

}  // namespace mccb
