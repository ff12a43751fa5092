#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mccb/planner.hpp"

using namespace mccb;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("one-step plan is f*e with argmax") {
  const PlanResult pr = backward_plan(vec2(0.9, 0.5), vec2(1.0, 2.0), 1);
  REQUIRE(pr.q.rows() == 1);
  CHECK(pr.q(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(pr.q(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pr.v(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pr.v(1) == 0.0);
  CHECK(pr.best_arm == std::vector<int>{2});
}

TEST_CASE("two-step recursion feeds the continuation value") {
  const PlanResult pr = backward_plan(vec2(0.9, 0.5), vec2(1.0, 2.0), 2);
  CHECK(pr.v(2) == 0.0);
  CHECK(pr.v(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pr.q(0, 0) == doctest::Approx(0.9 * 1.0 + 0.1 * 1.0).epsilon(1e-12));
  CHECK(pr.q(0, 1) == doctest::Approx(0.5 * 2.0 + 0.5 * 1.0).epsilon(1e-12));
  CHECK(pr.v(0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("high-reward arm is shown first, high-probability arm last") {
  const PlanResult pr = backward_plan(vec2(0.9, 0.2), vec2(1.0, 3.0), 2);
  CHECK(pr.q(1, 0) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(pr.q(1, 1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(pr.q(0, 0) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(pr.q(0, 1) == doctest::Approx(1.32).epsilon(1e-12));
  CHECK(pr.best_arm == std::vector<int>{2, 1});
}

TEST_CASE("single arm value is the geometric absorption formula") {
  Vec f(1), e(1);
  f << 0.3;
  e << 1.7;
  for (int H = 1; H <= 6; ++H) {
    const PlanResult pr = backward_plan(f, e, H);
    CHECK(pr.v(0) == doctest::Approx(1.7 * (1.0 - std::pow(0.7, H))).epsilon(1e-12));
    const auto bf = brute_force_value(f, e, H);
    CHECK(bf.first == doctest::Approx(pr.v(0)).epsilon(1e-12));
  }
}

TEST_CASE("argmax ties break to the lowest index") {
  const PlanResult pr = backward_plan(vec2(0.5, 0.5), vec2(2.0, 2.0), 3);
  for (int h = 0; h < 3; ++h) CHECK(pr.best_arm[h] == 1);
}

TEST_CASE("extra display opportunities never hurt") {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> fd(0.05, 0.95), ed(0.1, 3.0);
  for (int it = 0; it < 200; ++it) {
    const int K = 1 + static_cast<int>(gen() % 5);
    Vec f(K), e(K);
    for (int k = 0; k < K; ++k) {
      f(k) = fd(gen);
      e(k) = ed(gen);
    }
    const PlanResult pr = backward_plan(f, e, 6);
    for (int h = 0; h < 6; ++h) CHECK(pr.v(h) >= pr.v(h + 1) - 1e-12);
  }
}

TEST_CASE("plan agrees with exhaustive enumeration") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> fd(0.05, 0.95), ed(0.1, 3.0);
  for (int it = 0; it < 300; ++it) {
    const int K = 1 + static_cast<int>(gen() % 4);
    const int H = 1 + static_cast<int>(gen() % 6);
    Vec f(K), e(K);
    for (int k = 0; k < K; ++k) {
      f(k) = fd(gen);
      e(k) = ed(gen);
    }
    const PlanResult pr = backward_plan(f, e, H);
    const auto bf = brute_force_value(f, e, H);
    CHECK(pr.v(0) == doctest::Approx(bf.first).epsilon(1e-10));
    CHECK(oracle_policy_value(pr.best_arm, f, e) == doctest::Approx(bf.first).epsilon(1e-10));
  }
}

TEST_CASE("one-shot brute force is max f*e") {
  Vec f(3), e(3);
  f << 0.2, 0.8, 0.5;
  e << 2.0, 0.3, 1.0;
  const auto bf = brute_force_value(f, e, 1);
  CHECK(bf.first == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bf.second == std::vector<int>{3});
}

TEST_CASE("fixed-sequence value matches its closed forms") {
  CHECK(oracle_policy_value({1, 2}, vec2(0.5, 0.5), vec2(1.0, 1.0)) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK(oracle_policy_value({2, 1}, vec2(0.5, 0.5), vec2(1.0, 1.0)) ==
        doctest::Approx(0.75).epsilon(1e-12));

  // near-certain click pays the first arm's reward
  Vec f = vec2(1.0 - 1e-12, 1.0 - 1e-12), e = vec2(1.4, 0.9);
  CHECK(oracle_policy_value({1, 2}, f, e) == doctest::Approx(1.4).epsilon(1e-9));
  CHECK(oracle_policy_value({2, 1}, f, e) == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("saturated probabilities are clamped to the open interval") {
  const PlanResult pr = backward_plan(vec2(0.0, 1.0), vec2(1.0, 2.0), 1);
  CHECK(pr.q(0, 0) == doctest::Approx(kProbClamp).epsilon(1e-6));
  CHECK(pr.q(0, 1) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(pr.best_arm[0] == 2);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(backward_plan(vec2(-0.1, 0.5), vec2(1.0, 1.0), 1), std::invalid_argument);
  CHECK_THROWS_AS(backward_plan(vec2(1.1, 0.5), vec2(1.0, 1.0), 1), std::invalid_argument);
  CHECK_THROWS_AS(backward_plan(vec2(std::nan(""), 0.5), vec2(1.0, 1.0), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(backward_plan(vec2(0.5, 0.5), vec2(0.0, 1.0), 1), std::invalid_argument);
  CHECK_THROWS_AS(backward_plan(vec2(0.5, 0.5), vec2(1.0, 1.0), 0), std::invalid_argument);
  CHECK_THROWS_AS(backward_plan(Vec(0), Vec(0), 1), std::invalid_argument);

  // enumeration guard: 10^7 sequences is past the 10^6 cap
  Vec f(10), e(10);
  f.setConstant(0.5);
  e.setConstant(1.0);
  CHECK_THROWS_AS(brute_force_value(f, e, 7), std::invalid_argument);
}

TEST_CASE("opposite-ordered rows are not always unimodal") {
  // decreasing probabilities with increasing rewards can still dip and recover:
  // the terminal row is elementwise f*e = (0.090, 0.055, 1.200)
  Vec f(3), e(3);
  f << 0.9, 0.5, 0.4;
  e << 0.1, 0.11, 3.0;
  const PlanResult pr = backward_plan(f, e, 1);
  CHECK(pr.q(0, 0) == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(pr.q(0, 1) == doctest::Approx(0.055).epsilon(1e-12));
  CHECK(pr.q(0, 2) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(pr.q(0, 1) < pr.q(0, 0) - 1e-12);
  CHECK(pr.q(0, 1) < pr.q(0, 2) - 1e-12);
}
