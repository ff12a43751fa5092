#include "mccb/planner.hpp"

#include <cmath>
#include <stdexcept>

namespace mccb {

namespace {

Vec checked_clamped_probs(const Vec& probs) {
  Vec f(probs.size());
  for (int k = 0; k < probs.size(); ++k) {
    const double fk = probs(k);
    if (!std::isfinite(fk) || fk < 0.0 || fk > 1.0)
      throw std::invalid_argument("backward_plan: click probabilities must lie in [0,1]");
    f(k) = clamp_prob(fk);
  }
  return f;
}

}  // namespace

PlanResult backward_plan(const Vec& probs, const Vec& rewards, int H) {
  const int K = static_cast<int>(probs.size());
  if (K < 1 || rewards.size() != K)
    throw std::invalid_argument("backward_plan: need K >= 1 probabilities and matching rewards");
  if (H < 1) throw std::invalid_argument("backward_plan: H must be >= 1");
  for (int k = 0; k < K; ++k)
    if (!(rewards(k) > 0.0) || !std::isfinite(rewards(k)))
      throw std::invalid_argument("backward_plan: rewards must be strictly positive");

  const Vec f = checked_clamped_probs(probs);

  PlanResult res;
  res.q.resize(H, K);
  res.v = Vec::Zero(H + 1);
  res.best_arm.assign(H, 1);

  for (int h = H; h >= 1; --h) {
    const double cont = res.v(h);  // value with steps h+1..H remaining
    double best = -1.0;
    int best_k = 1;
    for (int k = 0; k < K; ++k) {
      const double qv = f(k) * rewards(k) + (1.0 - f(k)) * cont;
      res.q(h - 1, k) = qv;
      if (qv > best) {
        best = qv;
        best_k = k + 1;
      }
    }
    res.v(h - 1) = best;
    res.best_arm[h - 1] = best_k;
  }
  return res;
}

double oracle_policy_value(const std::vector<int>& arm_sequence, const Vec& probs,
                           const Vec& rewards) {
  const int K = static_cast<int>(probs.size());
  double value = 0.0;
  double reach = 1.0;  // probability the session is still live at this step
  for (int k1 : arm_sequence) {
    if (k1 < 1 || k1 > K) throw std::invalid_argument("oracle_policy_value: arm id out of range");
    const double f = probs(k1 - 1);
    value += reach * f * rewards(k1 - 1);
    reach *= 1.0 - f;
  }
  return value;
}

std::pair<double, std::vector<int>> brute_force_value(const Vec& probs, const Vec& rewards,
                                                      int H) {
  const int K = static_cast<int>(probs.size());
  if (K < 1 || rewards.size() != K)
    throw std::invalid_argument("brute_force_value: need K >= 1 probabilities and rewards");
  if (H < 1) throw std::invalid_argument("brute_force_value: H must be >= 1");

  long long total = 1;
  for (int h = 0; h < H; ++h) {
    total *= K;
    if (total > 1000000)
      throw std::invalid_argument("brute_force_value: K^H exceeds 1e6, use a smaller instance");
  }

  std::vector<int> seq(H, 1), best_seq(H, 1);
  double best = -1.0;
  for (long long it = 0; it < total; ++it) {
    const double val = oracle_policy_value(seq, probs, rewards);
    if (val > best) {
      best = val;
      best_seq = seq;
    }
    for (int h = H - 1; h >= 0; --h) {  // odometer increment
      if (++seq[h] <= K) break;
      seq[h] = 1;
    }
  }
  return {best, best_seq};
}

}  // namespace mccb
