#pragma once

#include <Eigen/Cholesky>
#include <string>
#include <vector>

#include "mccb/core.hpp"

namespace mccb {

// Shared-parameter logistic model estimate. A is ridge-initialized and only
// ever gains PSD rank-one terms, so its eigenvalues are non-decreasing over
// the run; theta_hat always solves A x = b.
struct ModelState {
  Mat A;
  Vec b;
  Vec theta_hat;
  long long pulls = 0;  // total observations consumed

  int dim() const { return static_cast<int>(A.rows()); }

  static ModelState init(int p, double lambda);
};

// one estimator observation: joint feature, realized reward, arm reward value
struct BatchItem {
  Vec z;
  double r;
  double e;
};

// One reweighted-least-squares step on an episode batch. p_hat for every item
// is evaluated at the estimate entering the call (so items commute within a
// batch): y = r/e, w = p_hat(1-p_hat) floored at 1e-12, A += w z z^T,
// b += z (y - p_hat), then theta_hat = solve(A, b).
ModelState irls_update(const ModelState& state, const std::vector<BatchItem>& batch);

// sqrt(z^T A^{-1} z), via a fresh symmetric factorization
double ucb_width(const Vec& z, const ModelState& state);

// Episode-start snapshot of A's Cholesky factor, reused across the many
// width/score queries of one episode.
class ModelFactor {
 public:
  explicit ModelFactor(const ModelState& state);
  double score(const Vec& z) const;  // z^T A^{-1} z
  double width(const Vec& z) const;  // sqrt(score)

 private:
  Eigen::LLT<Mat> llt_;
};

struct ConfidenceConfig {
  double lambda = 1.0;
  double delta = 0.1;
  double c_z = 1.0;
  double e_max = 1.0;
  double scale = 1.0;

  void validate() const;
};

// kappa = sqrt(3 + 2 log(1 + c_z^2 / (8 lambda)))
double kappa(double c_z, double lambda);

// beta = scale * kappa * e_max * c_z * sqrt(2 (d+K) log(pulls) log((d+K)/delta))
double confidence_radius(long long pulls, int d, int K, const ConfidenceConfig& cfg);

struct RefitResult {
  ModelState state;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

// Full ridge-regularized logistic MLE of the history (y = r/e), damped Newton
// from zero until the gradient norm drops below 1e-8 or 100 iterations.
// The returned state's A is the Hessian at the final estimate (lambda I +
// Z^T W Z) and b = A theta_hat, so solve-consistency holds by construction.
RefitResult refit_mle(const std::vector<BatchItem>& history, double lambda, int p);

// Tracker of the same MLE objective for the per-episode run loop, where a
// full refit every episode would cost one history pass per episode and make
// the loop quadratic in T. Each append takes one Newton-style step: the new
// batch's gradient at the entering estimate against the accumulated
// curvature C = lambda I + sum w z z^T (weights taken at each item's
// arrival), which is valid because the full gradient vanishes at the
// previous optimum. refit() re-anchors to the exact MLE by warm-started
// damped Newton on the whole history, on a fixed schedule (every
// anchor_every batches, and always while the history is small), so the
// estimate coincides with refit_mle at anchors and stays a short step chain
// away in between.
class MleTracker {
 public:
  MleTracker(int p, double lambda, long long anchor_every = 100);

  void append(const std::vector<BatchItem>& batch);
  const Vec& refit();  // anchors if scheduled, then returns the estimate
  long long count() const { return n_; }

 private:
  int p_;
  double lambda_;
  long long anchor_every_;
  Mat zt_;  // p x capacity, observations as columns
  Vec y_;
  long long n_ = 0;
  Mat c_;  // lambda I + sum of w z z^T at arrival weights
  Vec theta_;
  long long batches_ = 0;
  long long anchored_batches_ = -1;
};

// JSON snapshot (schema in README): {"A": rows, "b", "theta_hat", "pulls"}
std::string model_to_json(const ModelState& state);
ModelState model_from_json(const std::string& text);

}  // namespace mccb
