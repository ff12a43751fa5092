#include "mccb/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mccb/rng.hpp"

namespace mccb {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::ucbbp: return "ucbbp";
    case Algorithm::aucbbp: return "aucbbp";
    case Algorithm::epsilon_greedy: return "epsilon-greedy";
    case Algorithm::greedy: return "greedy";
    case Algorithm::oracle: return "oracle";
  }
  throw std::logic_error("algorithm_name: unreachable");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ucbbp") return Algorithm::ucbbp;
  if (name == "aucbbp") return Algorithm::aucbbp;
  if (name == "epsilon-greedy") return Algorithm::epsilon_greedy;
  if (name == "greedy") return Algorithm::greedy;
  if (name == "oracle") return Algorithm::oracle;
  throw std::invalid_argument("unknown algorithm name: " + name);
}

int select_warmup(WarmupCounter& counter, int K) {
  if (K < 1) throw std::invalid_argument("select_warmup: K must be >= 1");
  return static_cast<int>(counter.next++ % K) + 1;
}

namespace {

// sigma(theta . z_k) for all arms without materializing each z
Vec probs_under(const Vec& theta, const Context& x, int K) {
  const int d = static_cast<int>(x.size());
  const double base = theta.head(d).dot(x);
  Vec p(K);
  for (int k = 0; k < K; ++k) p(k) = sigmoid(base + theta(d + k));
  return p;
}

}  // namespace

UserEval evaluate_user(const Context& x, const ModelState& model, const ModelFactor& factor,
                       const ArmCatalog& catalog, int H) {
  const int K = catalog.K();
  UserEval ev;
  ev.plan = backward_plan(probs_under(model.theta_hat, x, K), catalog.rewards, H);
  ev.width.resize(K);
  ev.score_sq.resize(K);
  for (int k = 1; k <= K; ++k) {
    const double s = factor.score(joint_feature(x, k, K));
    ev.score_sq(k - 1) = s;
    ev.width(k - 1) = std::sqrt(s);
  }
  return ev;
}

Vec ucb_index_row(const UserEval& eval, int h, double beta) {
  return eval.plan.q.row(h - 1).transpose() + beta * eval.width;
}

int argmax_lowest(const Vec& values) {
  int best = 1;
  double bv = values(0);
  for (int k = 1; k < values.size(); ++k) {
    if (values(k) > bv) {
      bv = values(k);
      best = k + 1;
    }
  }
  return best;
}

PolicyDecision select_ucbbp(const Context& x, int h, const ModelState& model, double beta,
                            const ArmCatalog& catalog, int H) {
  if (h < 1 || h > H) throw std::invalid_argument("select_ucbbp: step out of range");
  const ModelFactor factor(model);
  const UserEval ev = evaluate_user(x, model, factor, catalog, H);
  return {0, h, argmax_lowest(ucb_index_row(ev, h, beta)), PlanMode::ucb};
}

int compute_Mt(long long t, int N, long long T) {
  if (t < 1 || N < 1) throw std::invalid_argument("compute_Mt: t and N must be >= 1");
  if (T < 2) throw std::invalid_argument("compute_Mt: T must be >= 2 (ln T > 0)");
  const double m =
      std::floor(N * std::exp(-static_cast<double>(t) / std::log(static_cast<double>(T))));
  return std::max(1, static_cast<int>(m));
}

namespace {

// indices of the M largest scores, ties to the lower user index (1-based)
std::vector<int> top_m_users(const Vec& scores, int M) {
  const int N = static_cast<int>(scores.size());
  std::vector<int> order(N);
  for (int n = 0; n < N; ++n) order[n] = n + 1;
  std::partial_sort(order.begin(), order.begin() + M, order.end(), [&](int a, int b) {
    if (scores(a - 1) != scores(b - 1)) return scores(a - 1) > scores(b - 1);
    return a < b;
  });
  order.resize(M);
  return order;
}

}  // namespace

std::vector<PolicyDecision> select_aucbbp(const std::vector<Context>& contexts, int h,
                                          const ModelState& model, double beta,
                                          const ArmCatalog& catalog, int H, int M_t) {
  const int N = static_cast<int>(contexts.size());
  if (M_t < 1) throw std::invalid_argument("select_aucbbp: M_t must be >= 1");
  if (M_t > N) M_t = N;  // clamp; schedule values never exceed N

  const ModelFactor factor(model);
  Vec s(N);
  std::vector<int> k_ucb(N), k_greedy(N);
  for (int n = 1; n <= N; ++n) {
    const UserEval ev = evaluate_user(contexts[n - 1], model, factor, catalog, H);
    const int ku = argmax_lowest(ucb_index_row(ev, h, beta));
    k_ucb[n - 1] = ku;
    k_greedy[n - 1] = argmax_lowest(ev.plan.q.row(h - 1).transpose());
    s(n - 1) = ev.score_sq(ku - 1);
  }

  std::vector<bool> explore(N, false);
  for (int n : top_m_users(s, M_t)) explore[n - 1] = true;

  std::vector<PolicyDecision> out(N);
  for (int n = 1; n <= N; ++n) {
    out[n - 1] = explore[n - 1] ? PolicyDecision{n, h, k_ucb[n - 1], PlanMode::ucb}
                                : PolicyDecision{n, h, k_greedy[n - 1], PlanMode::greedy};
  }
  return out;
}

PolicyDecision select_epsilon_greedy(const Context& x, int h, const ModelState& model,
                                     const ArmCatalog& catalog, int H, double epsilon,
                                     std::uint64_t seed, long long t, int n) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("select_epsilon_greedy: epsilon must lie in [0,1]");
  const double coin =
      uniform01(seed, Stream::eps_explore, static_cast<std::uint64_t>(t), n, h);
  if (coin < epsilon) {
    const double u = uniform01(seed, Stream::eps_arm, static_cast<std::uint64_t>(t), n, h);
    const int arm = 1 + static_cast<int>(u * catalog.K());
    return {n, h, arm, PlanMode::random_explore};
  }
  const ModelFactor factor(model);
  const UserEval ev = evaluate_user(x, model, factor, catalog, H);
  return {n, h, argmax_lowest(ev.plan.q.row(h - 1).transpose()), PlanMode::greedy};
}

EpisodePlan build_episode_plan(const PlanInputs& in) {
  const std::vector<Context>& xs = *in.contexts;
  const ArmCatalog& cat = *in.catalog;
  const int N = static_cast<int>(xs.size());
  const int H = in.H;
  const int K = cat.K();

  EpisodePlan plan;
  plan.resize(N, H);

  // epsilon-greedy explores through its own coin from episode 1 and skips the
  // warm-up phase; the oracle needs no estimate at all
  const bool warms_up =
      in.algorithm != Algorithm::oracle && in.algorithm != Algorithm::epsilon_greedy;
  if (warms_up && in.t <= in.T0) {
    // counter advances in slot order for every user, absorbed or not
    for (int h = 1; h <= H; ++h)
      for (int n = 1; n <= N; ++n)
        plan.set(n, h, select_warmup(*in.warmup, K), PlanMode::warmup);
    return plan;
  }

  if (in.algorithm == Algorithm::oracle) {
    // dimension checks stay outside the parallel region; a throw inside an
    // OpenMP loop would terminate instead of propagating
    for (const Context& x : xs)
      if (x.size() != in.truth->d || !x.allFinite())
        throw std::invalid_argument("build_episode_plan: bad context");
#pragma omp parallel for schedule(static) if (in.exec == ExecMode::parallel)
    for (int n = 1; n <= N; ++n) {
      const PlanResult pr = backward_plan(click_probs(*in.truth, xs[n - 1]), cat.rewards, H);
      for (int h = 1; h <= H; ++h) plan.set(n, h, pr.best_arm[h - 1], PlanMode::greedy);
    }
    return plan;
  }

  for (const Context& x : xs)
    if (x.size() + K != in.model->theta_hat.size() || !x.allFinite())
      throw std::invalid_argument("build_episode_plan: bad context");
  const ModelFactor factor(*in.model);
  std::vector<UserEval> evals(N);
#pragma omp parallel for schedule(static) if (in.exec == ExecMode::parallel)
  for (int n = 1; n <= N; ++n)
    evals[n - 1] = evaluate_user(xs[n - 1], *in.model, factor, cat, H);

  switch (in.algorithm) {
    case Algorithm::ucbbp:
      for (int n = 1; n <= N; ++n)
        for (int h = 1; h <= H; ++h)
          plan.set(n, h, argmax_lowest(ucb_index_row(evals[n - 1], h, in.beta)), PlanMode::ucb);
      break;

    case Algorithm::greedy:
      for (int n = 1; n <= N; ++n)
        for (int h = 1; h <= H; ++h)
          plan.set(n, h, argmax_lowest(evals[n - 1].plan.q.row(h - 1).transpose()),
                   PlanMode::greedy);
      break;

    case Algorithm::epsilon_greedy:
      for (int n = 1; n <= N; ++n) {
        for (int h = 1; h <= H; ++h) {
          const double coin = uniform01(in.seed, Stream::eps_explore,
                                        static_cast<std::uint64_t>(in.t), n, h);
          if (coin < in.epsilon) {
            const double u =
                uniform01(in.seed, Stream::eps_arm, static_cast<std::uint64_t>(in.t), n, h);
            plan.set(n, h, 1 + static_cast<int>(u * K), PlanMode::random_explore);
          } else {
            plan.set(n, h, argmax_lowest(evals[n - 1].plan.q.row(h - 1).transpose()),
                     PlanMode::greedy);
          }
        }
      }
      break;

    case Algorithm::aucbbp: {
      plan.M_t = std::min(compute_Mt(in.t, N, in.T), N);
      Vec s(N);
      std::vector<int> k_ucb(N);
      for (int h = 1; h <= H; ++h) {
        for (int n = 1; n <= N; ++n) {
          const int ku = argmax_lowest(ucb_index_row(evals[n - 1], h, in.beta));
          k_ucb[n - 1] = ku;
          s(n - 1) = evals[n - 1].score_sq(ku - 1);
        }
        std::vector<bool> explore(N, false);
        for (int n : top_m_users(s, plan.M_t)) explore[n - 1] = true;
        for (int n = 1; n <= N; ++n) {
          if (explore[n - 1]) {
            plan.set(n, h, k_ucb[n - 1], PlanMode::ucb);
          } else {
            plan.set(n, h, argmax_lowest(evals[n - 1].plan.q.row(h - 1).transpose()),
                     PlanMode::greedy);
          }
        }
      }
      break;
    }

    default:
      throw std::logic_error("build_episode_plan: unreachable");
  }
  return plan;
}

}  // namespace mccb
