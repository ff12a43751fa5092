#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mccb/env.hpp"
#include "mccb/policies.hpp"

using namespace mccb;

namespace {

TrueModel forced_model(double logit) {
  // d = 1, K = 1, zero context: every click draw sees sigma(logit)
  TrueModel m;
  m.d = 1;
  m.K = 1;
  m.theta = Vec(2);
  m.theta << 0.0, logit;
  return m;
}

ArmCatalog single_arm(double e) {
  ArmCatalog cat;
  cat.rewards = Vec(1);
  cat.rewards << e;
  return cat;
}

EpisodePlan constant_plan(int N, int H, int arm) {
  EpisodePlan plan;
  plan.resize(N, H);
  for (int n = 1; n <= N; ++n)
    for (int h = 1; h <= H; ++h) plan.set(n, h, arm, PlanMode::greedy);
  return plan;
}

}  // namespace

TEST_CASE("context sampling is deterministic with the right shape") {
  const auto a = sample_contexts(99, 7, 4, 3);
  const auto b = sample_contexts(99, 7, 4, 3);
  REQUIRE(a.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(a[i].size() == 3);
    CHECK(a[i] == b[i]);
  }
  // different episodes decorrelate
  CHECK(sample_contexts(99, 8, 4, 3)[0] != a[0]);

  for (const Context& x : sample_contexts(5, 1, 2, 5)) CHECK(x.size() == 5);

  CHECK_THROWS_AS(sample_contexts(1, 1, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(sample_contexts(1, 1, 3, 0), std::invalid_argument);
}

TEST_CASE("context moments match a standard gaussian") {
  const auto xs = sample_contexts(424242, 1, 10000, 4);
  for (int j = 0; j < 4; ++j) {
    double sum = 0.0, sumsq = 0.0;
    for (const Context& x : xs) {
      sum += x(j);
      sumsq += x(j) * x(j);
    }
    const double mean = sum / 10000.0;
    const double var = sumsq / 10000.0 - mean * mean;
    CHECK(mean > -0.05);
    CHECK(mean < 0.05);
    CHECK(var > 0.94);
    CHECK(var < 1.06);
  }
}

TEST_CASE("norm clipping rescales only oversized contexts") {
  ClipConfig clip;
  clip.enabled = true;
  clip.c_x = 1.5;
  CHECK(clip.bound(4) == 1.5);
  CHECK(clip.feature_bound(4) == doctest::Approx(std::sqrt(1.5 * 1.5 + 1.0)).epsilon(1e-12));

  const auto raw = sample_contexts(7, 3, 200, 4);
  const auto clipped = sample_contexts(7, 3, 200, 4, clip);
  for (size_t i = 0; i < raw.size(); ++i) {
    CHECK(clipped[i].norm() <= 1.5 + 1e-12);
    if (raw[i].norm() <= 1.5) {
      CHECK(clipped[i] == raw[i]);
    } else {
      CHECK(clipped[i].norm() == doctest::Approx(1.5).epsilon(1e-12));
    }
  }

  ClipConfig dflt;
  dflt.enabled = true;
  CHECK(dflt.bound(4) == doctest::Approx(5.0).epsilon(1e-12));  // sqrt(d) + 3
}

TEST_CASE("near-certain click absorbs with the exact reward") {
  const TrueModel m = forced_model(40.0);
  const ArmCatalog cat = single_arm(2.5);
  SessionState s;
  s.user = 1;
  const Context x = Vec::Zero(1);

  const auto [obs, next] = step_session(s, 1, m, x, cat, 123, 1);
  CHECK(obs.reward == 2.5);  // paid bit-exactly from the catalog
  CHECK(obs.arm == 1);
  CHECK(next.absorbed);
  CHECK(next.absorbing_step == 1);
}

TEST_CASE("skip consumes the step without a draw") {
  const TrueModel m = forced_model(40.0);  // any real arm would click
  const ArmCatalog cat = single_arm(1.0);
  SessionState s;
  s.user = 2;
  s.step = 2;

  const auto [obs, next] = step_session(s, kSkipArm, m, Vec::Zero(1), cat, 123, 1);
  CHECK(obs.reward == 0.0);
  CHECK(obs.arm == kSkipArm);
  CHECK(obs.z.size() == 0);
  CHECK_FALSE(next.absorbed);
  CHECK(next.step == 3);
}

TEST_CASE("absorbed sessions and unknown arms are contract violations") {
  const TrueModel m = forced_model(0.0);
  const ArmCatalog cat = single_arm(1.0);
  SessionState absorbed;
  absorbed.absorbed = true;
  absorbed.absorbing_step = 1;
  CHECK_THROWS_AS(step_session(absorbed, 1, m, Vec::Zero(1), cat, 1, 1), std::logic_error);

  SessionState fresh;
  CHECK_THROWS_AS(step_session(fresh, 2, m, Vec::Zero(1), cat, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(step_session(fresh, -1, m, Vec::Zero(1), cat, 1, 1), std::invalid_argument);
}

TEST_CASE("click draws replay bit-for-bit") {
  const TrueModel m = forced_model(0.3);
  const ArmCatalog cat = single_arm(1.3);
  SessionState s;
  s.user = 5;
  s.step = 2;
  const auto [o1, n1] = step_session(s, 1, m, Vec::Zero(1), cat, 321, 9);
  const auto [o2, n2] = step_session(s, 1, m, Vec::Zero(1), cat, 321, 9);
  CHECK(o1.reward == o2.reward);
  CHECK(n1.absorbed == n2.absorbed);
}

TEST_CASE("no-click episodes yield H observations per user") {
  const TrueModel m = forced_model(-40.0);
  const ArmCatalog cat = single_arm(1.0);
  const auto xs = sample_contexts(1, 1, 3, 1);
  const EpisodeLog log = run_episode(constant_plan(3, 4, 1), xs, m, cat, 1, 1);
  CHECK(log.observations.size() == 12);
  for (const SessionState& s : log.sessions) {
    CHECK_FALSE(s.absorbed);
    CHECK(s.steps_taken(4) == 4);
  }
  for (const Observation& o : log.observations) CHECK(o.reward == 0.0);
}

TEST_CASE("instant-click episodes yield one observation per user") {
  const TrueModel m = forced_model(40.0);
  const ArmCatalog cat = single_arm(0.75);
  const auto xs = sample_contexts(1, 1, 5, 1);
  const EpisodeLog log = run_episode(constant_plan(5, 4, 1), xs, m, cat, 1, 1);
  CHECK(log.observations.size() == 5);
  for (const Observation& o : log.observations) {
    CHECK(o.step == 1);
    CHECK(o.reward == 0.75);
  }
  for (const SessionState& s : log.sessions) {
    CHECK(s.absorbed);
    CHECK(s.absorbing_step == 1);
  }
}

TEST_CASE("mixed episodes account every step and stay step-major") {
  TrueModel m;
  m.d = 2;
  m.K = 3;
  m.theta = Vec(5);
  m.theta << 0.4, -0.3, 0.5, -0.2, 0.1;
  ArmCatalog cat;
  cat.rewards = Vec(3);
  cat.rewards << 0.5, 1.0, 2.0;
  const int N = 20, H = 5;
  const auto xs = sample_contexts(31, 2, N, 2);
  EpisodePlan plan;
  plan.resize(N, H);
  for (int n = 1; n <= N; ++n)
    for (int h = 1; h <= H; ++h) plan.set(n, h, 1 + (n + h) % 3, PlanMode::greedy);

  const EpisodeLog log = run_episode(plan, xs, m, cat, 77, 2);

  size_t expected = 0;
  for (const SessionState& s : log.sessions) expected += s.steps_taken(H);
  CHECK(log.observations.size() == expected);

  // step-major, user-ascending within a step, arms straight off the plan
  int prev_step = 1, prev_user = 0;
  for (const Observation& o : log.observations) {
    if (o.step == prev_step) {
      CHECK(o.user > prev_user);
    } else {
      CHECK(o.step > prev_step);
    }
    prev_step = o.step;
    prev_user = o.user;
    CHECK(o.arm == plan.arm_at(o.user, o.step));
    const bool miss = o.reward == 0.0;
    const bool hit = o.reward == cat.e(o.arm);
    CHECK((miss || hit));
  }

  // absorbed users produce nothing beyond their absorbing step
  for (const SessionState& s : log.sessions) {
    if (!s.absorbed) continue;
    for (const Observation& o : log.observations)
      if (o.user == s.user) CHECK(o.step <= s.absorbing_step);
  }

  // bitwise replay
  const EpisodeLog again = run_episode(plan, xs, m, cat, 77, 2);
  REQUIRE(again.observations.size() == log.observations.size());
  for (size_t i = 0; i < log.observations.size(); ++i) {
    CHECK(again.observations[i].user == log.observations[i].user);
    CHECK(again.observations[i].reward == log.observations[i].reward);
  }
}
