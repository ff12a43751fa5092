#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mccb/core.hpp"
#include "mccb/estimator.hpp"
#include "mccb/planner.hpp"

namespace mccb {

enum class Algorithm { ucbbp, aucbbp, epsilon_greedy, greedy, oracle };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct PolicyDecision {
  int user = 0;
  int step = 0;
  int arm = 0;
  PlanMode mode = PlanMode::greedy;
};

// run-global round-robin state; advances once per (user, step) slot
struct WarmupCounter {
  long long next = 0;
};

int select_warmup(WarmupCounter& counter, int K);

// Everything a policy needs to decide for one user under one model snapshot:
// the backward plan under the estimated click probabilities plus per-arm
// uncertainty widths (step-independent, since z depends only on (x, k)).
struct UserEval {
  PlanResult plan;
  Vec width;     // per arm, sqrt(z^T A^{-1} z)
  Vec score_sq;  // per arm, z^T A^{-1} z
};

UserEval evaluate_user(const Context& x, const ModelState& model, const ModelFactor& factor,
                       const ArmCatalog& catalog, int H);

// q[h][.] + beta * width, the optimism-adjusted index row at step h
Vec ucb_index_row(const UserEval& eval, int h, double beta);

int argmax_lowest(const Vec& values);

PolicyDecision select_ucbbp(const Context& x, int h, const ModelState& model, double beta,
                            const ArmCatalog& catalog, int H);

// max(1, floor(N e^{-t / ln T}))
int compute_Mt(long long t, int N, long long T);

// One AUCBBP step: every user gets k_ucb and k_greedy; the M_t users with the
// largest predictive variance z^T A^{-1} z at their k_ucb (ties to the lower
// user index) play k_ucb, the rest play k_greedy.
std::vector<PolicyDecision> select_aucbbp(const std::vector<Context>& contexts, int h,
                                          const ModelState& model, double beta,
                                          const ArmCatalog& catalog, int H, int M_t);

PolicyDecision select_epsilon_greedy(const Context& x, int h, const ModelState& model,
                                     const ArmCatalog& catalog, int H, double epsilon,
                                     std::uint64_t seed, long long t, int n);

struct PlanInputs {
  Algorithm algorithm = Algorithm::ucbbp;
  long long t = 1;
  int H = 1;
  long long T0 = 0;
  long long T = 2;
  double epsilon = 0.1;
  double beta = 0.0;
  const std::vector<Context>* contexts = nullptr;
  const ModelState* model = nullptr;
  const TrueModel* truth = nullptr;  // oracle only
  const ArmCatalog* catalog = nullptr;
  std::uint64_t seed = 0;
  WarmupCounter* warmup = nullptr;  // required when t <= T0 and algorithm != oracle
  ExecMode exec = ExecMode::serial;
};

// Builds the full feedback-independent N x H plan for one episode from the
// episode-start snapshot. Warm-up episodes fill every slot round-robin in
// slot order (h-major, then user), advancing the counter on absorbed users'
// slots too, so the schedule never depends on realized clicks.
EpisodePlan build_episode_plan(const PlanInputs& in);

}  // namespace mccb
