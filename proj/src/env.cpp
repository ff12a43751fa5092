#include "mccb/env.hpp"

#include <cmath>
#include <stdexcept>

#include "mccb/rng.hpp"

namespace mccb {

double ClipConfig::bound(int d) const {
  return c_x > 0.0 ? c_x : std::sqrt(static_cast<double>(d)) + 3.0;
}

double ClipConfig::feature_bound(int d) const {
  const double cx = bound(d);
  return std::sqrt(cx * cx + 1.0);
}

std::vector<Context> sample_contexts(std::uint64_t seed, long long t, int N, int d,
                                     const ClipConfig& clip) {
  if (N < 1 || d < 1) throw std::invalid_argument("sample_contexts: N and d must be >= 1");
  std::vector<Context> xs(N);
  for (int n = 1; n <= N; ++n) {
    Context x(d);
    for (int i = 0; i < d; ++i)
      x(i) = normal(seed, Stream::context, static_cast<std::uint64_t>(t), n, i);
    if (clip.enabled) {
      const double cx = clip.bound(d);
      const double norm = x.norm();
      if (norm > cx) x *= cx / norm;
    }
    xs[n - 1] = std::move(x);
  }
  return xs;
}

std::pair<Observation, SessionState> step_session(const SessionState& state, int arm,
                                                  const TrueModel& model, const Context& x,
                                                  const ArmCatalog& catalog, std::uint64_t seed,
                                                  long long t) {
  if (state.absorbed)
    throw std::logic_error("step_session: called on an absorbed session");

  Observation obs;
  obs.episode = t;
  obs.user = state.user;
  obs.step = state.step;
  obs.arm = arm;

  SessionState next = state;
  if (arm == kSkipArm) {
    next.step += 1;
    return {std::move(obs), next};
  }
  if (arm < 1 || arm > catalog.K())
    throw std::invalid_argument("step_session: unknown arm id");

  obs.z = joint_feature(x, arm, catalog.K());
  const double p = click_probability(model, obs.z);
  const double u = uniform01(seed, Stream::click, static_cast<std::uint64_t>(t), state.user,
                             state.step);
  if (u < p) {
    obs.reward = catalog.e(arm);
    next.absorbed = true;
    next.absorbing_step = state.step;
  } else {
    next.step += 1;
  }
  return {std::move(obs), next};
}

EpisodeLog run_episode(const EpisodePlan& plan, const std::vector<Context>& contexts,
                       const TrueModel& model, const ArmCatalog& catalog, std::uint64_t seed,
                       long long t) {
  const int N = plan.N;
  const int H = plan.H;
  if (static_cast<int>(contexts.size()) != N)
    throw std::invalid_argument("run_episode: plan and context batch disagree on N");

  EpisodeLog log;
  log.sessions.resize(N);
  for (int n = 1; n <= N; ++n) log.sessions[n - 1].user = n;
  log.observations.reserve(static_cast<size_t>(N) * H);

  for (int h = 1; h <= H; ++h) {
    for (int n = 1; n <= N; ++n) {
      SessionState& s = log.sessions[n - 1];
      if (s.absorbed) continue;
      auto [obs, next] = step_session(s, plan.arm_at(n, h), model, contexts[n - 1], catalog,
                                      seed, t);
      log.observations.push_back(std::move(obs));
      s = next;
    }
  }
  return log;
}

}  // namespace mccb
