#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mccb/core.hpp"

namespace mccb {

struct ClipConfig {
  bool enabled = false;
  double c_x = 0.0;  // <= 0 means the default sqrt(d) + 3

  double bound(int d) const;          // effective c_x
  double feature_bound(int d) const;  // c_z = sqrt(c_x^2 + 1)
};

// N i.i.d. standard-Gaussian contexts for episode t, optionally norm-clipped.
// Fully determined by (seed, t); policies cannot perturb the draws.
std::vector<Context> sample_contexts(std::uint64_t seed, long long t, int N, int d,
                                     const ClipConfig& clip = {});

// One cascading step for one user: a real arm draws Bernoulli(sigma(z.theta))
// keyed by (seed, t, user, step); a click pays e_k and absorbs the session,
// otherwise the step advances. Skip consumes the step with no draw.
std::pair<Observation, SessionState> step_session(const SessionState& state, int arm,
                                                  const TrueModel& model, const Context& x,
                                                  const ArmCatalog& catalog, std::uint64_t seed,
                                                  long long t);

struct EpisodeLog {
  std::vector<Observation> observations;  // step-major: all users at h=1, then h=2, ...
  std::vector<SessionState> sessions;     // final states, user n at index n-1
};

// Plays a fixed episode plan for all N users over steps 1..H, skipping
// absorbed users; observation count per user is min(h*, H).
EpisodeLog run_episode(const EpisodePlan& plan, const std::vector<Context>& contexts,
                       const TrueModel& model, const ArmCatalog& catalog, std::uint64_t seed,
                       long long t);

}  // namespace mccb
