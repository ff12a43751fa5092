#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mccb/core.hpp"
#include "mccb/env.hpp"
#include "mccb/estimator.hpp"
#include "mccb/policies.hpp"

namespace mccb {

enum class EstimatorMode { streaming_irls, mle_refit };
enum class BetaMode { fixed, theory };

std::string estimator_mode_name(EstimatorMode m);
EstimatorMode estimator_mode_from_name(const std::string& name);

struct RewardSpec {
  bool sampled = true;   // e_k ~ Uniform[low, high] per seed
  double low = 0.5;
  double high = 2.0;
  std::vector<double> values;  // explicit mode
};

struct ThetaSpec {
  bool sampled = true;   // standard Gaussian scaled to the given norm, per seed
  double norm = 1.0;
  std::vector<double> values;  // explicit mode, length d+K
};

struct BetaSpec {
  BetaMode mode = BetaMode::fixed;
  double c = 1.5;      // fixed mode: beta_t = c * sqrt(log(1 + t))
  double scale = 1.0;  // theory mode: multiplier on the theoretical radius
};

struct ExperimentConfig {
  int d = 5;
  int K = 10;
  int N = 50;
  int H = 5;
  long long T = 2000;
  long long T0 = 20;
  double lambda = 1.0;
  double delta = 0.1;
  double epsilon = 0.1;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  Algorithm algorithm = Algorithm::ucbbp;
  EstimatorMode estimator = EstimatorMode::streaming_irls;
  RewardSpec rewards;
  ThetaSpec theta;
  ClipConfig clip;
  BetaSpec beta;
  bool check_invariants = true;
  ExecMode exec = ExecMode::serial;
  std::string out;  // output directory; empty = no files written

  void validate() const;
};

// strict parse: unknown keys anywhere are rejected
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct RegretRecord {
  long long t = 0;
  double oracle_value = 0.0;     // V* summed over the N users
  double policy_value = 0.0;     // V^pi summed over the N users
  double episode_regret = 0.0;
  double cum_regret = 0.0;
  double time_avg_regret = 0.0;  // cum / t
  double ctx_avg_regret = 0.0;   // cum / N
  int M_t = 0;                   // AUCBBP budget; 0 when not applicable
  double theta_err = 0.0;        // ||theta_hat - theta||_2 after the episode's update
};

// Exact expected regret of one episode plan: every user's full counterfactual
// sequence is scored against the optimal plan under the true parameter, both
// through the same evaluation path, with no Monte Carlo.
RegretRecord compute_episode_regret(const EpisodePlan& plan,
                                    const std::vector<Context>& contexts,
                                    const TrueModel& truth, const ArmCatalog& catalog,
                                    ExecMode exec = ExecMode::serial);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<RegretRecord> records;
};

struct ResultSet {
  ExperimentConfig config;
  std::vector<SeedResult> per_seed;
};

// instance derived from (config, seed): the sampled rewards and true parameter
struct SeedInstance {
  ArmCatalog catalog;
  TrueModel truth;
};
SeedInstance make_instance(const ExperimentConfig& cfg, std::uint64_t seed);

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed);
ResultSet run_experiment(const ExperimentConfig& cfg);

void write_result_files(const ResultSet& results, const std::string& dir);

struct SweepPoint {
  std::string label;  // e.g. "N=50" or "algorithm=ucbbp"
  ResultSet results;
};

// axis is "N" (integer list) or "algorithm" (name list); each point runs the
// base config with that field replaced and, when an output dir is set, writes
// under <out>/<label>/
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& axis,
                                  const std::vector<std::string>& values);

// seed-mean of a record field across a result set at a given episode
double seed_mean(const ResultSet& rs, long long t, double RegretRecord::*field);

std::string format_sig12(double v);

}  // namespace mccb
