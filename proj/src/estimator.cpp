#include "mccb/estimator.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace mccb {

namespace {

constexpr double kWeightFloor = 1e-12;

void check_item(const BatchItem& it, int p) {
  if (it.z.size() != p) throw std::invalid_argument("estimator: feature length must be d+K");
  if (!it.z.allFinite() || !std::isfinite(it.r) || !std::isfinite(it.e) || !(it.e > 0.0))
    throw std::invalid_argument("estimator: non-finite observation");
}

// theta = A^{-1} b with one iterative refinement pass
Vec solve_spd(const Mat& A, const Vec& b) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("estimator: SPD factorization failed (internal fault)");
  Vec x = llt.solve(b);
  x += llt.solve(b - A * x);
  return x;
}

// log(1 + e^u) without overflow
double softplus(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

struct NewtonOut {
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

// Damped Newton on the ridge logistic objective, warm-started at theta.
// Z holds observations as columns (p x n); y are normalized rewards in [0,1].
NewtonOut newton_fit(const Eigen::Ref<const Mat>& Z, const Eigen::Ref<const Vec>& y,
                     double lambda, double tol, int max_iters, Vec& theta) {
  const long long n = Z.cols();
  const int p = static_cast<int>(Z.rows());

  const auto obj = [&](const Vec& th) {
    const Vec eta = Z.transpose() * th;
    double s = 0.5 * lambda * th.squaredNorm();
    for (long long i = 0; i < n; ++i) s += softplus(eta(i)) - y(i) * eta(i);
    return s;
  };

  NewtonOut out;
  double f = obj(theta);
  // near the optimum the true decrease per step sinks below the objective's
  // floating point resolution, so acceptance must tolerate that much noise
  // or the search stalls rejecting every step
  const auto slack = [&] { return 1e-12 * (1.0 + std::abs(f)); };
  Mat H(p, p);
  for (out.iterations = 0; out.iterations < max_iters; ++out.iterations) {
    const Vec eta = Z.transpose() * theta;
    Vec prob(n), w(n);
    for (long long i = 0; i < n; ++i) {
      prob(i) = sigmoid(eta(i));
      w(i) = std::max(prob(i) * (1.0 - prob(i)), kWeightFloor);
    }
    const Vec grad = Z * (prob - y) + lambda * theta;
    out.grad_norm = grad.norm();
    if (out.grad_norm < tol) {
      out.converged = true;
      break;
    }
    H = Z * w.asDiagonal() * Z.transpose();
    H.diagonal().array() += lambda;
    const Vec step = Eigen::LLT<Mat>(H).solve(grad);
    double alpha = 1.0;
    bool accepted = false;
    for (int back = 0; back < 40; ++back) {  // damping: halve until the objective drops
      const Vec cand = theta - alpha * step;
      const double fc = obj(cand);
      if (fc <= f + slack()) {
        theta = cand;
        f = fc;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no representable progress left
  }
  return out;
}

}  // namespace

ModelState ModelState::init(int p, double lambda) {
  if (p < 1) throw std::invalid_argument("ModelState: dimension must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("ModelState: lambda must be > 0");
  ModelState s;
  s.A = Mat::Identity(p, p) * lambda;
  s.b = Vec::Zero(p);
  s.theta_hat = Vec::Zero(p);
  s.pulls = 0;
  return s;
}

ModelState irls_update(const ModelState& state, const std::vector<BatchItem>& batch) {
  const int p = state.dim();
  ModelState out = state;
  for (const BatchItem& it : batch) {
    check_item(it, p);
    const double y = it.r / it.e;
    const double p_hat = sigmoid(it.z.dot(state.theta_hat));  // estimate entering the call
    const double w = std::max(p_hat * (1.0 - p_hat), kWeightFloor);
    out.A.selfadjointView<Eigen::Lower>().rankUpdate(it.z, w);
    out.b += it.z * (y - p_hat);
  }
  out.A.triangularView<Eigen::StrictlyUpper>() = out.A.transpose();  // keep A exactly symmetric
  out.pulls += static_cast<long long>(batch.size());
  out.theta_hat = solve_spd(out.A, out.b);
  return out;
}

double ucb_width(const Vec& z, const ModelState& state) {
  return ModelFactor(state).width(z);
}

ModelFactor::ModelFactor(const ModelState& state) : llt_(state.A) {
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("ModelFactor: SPD factorization failed (internal fault)");
}

double ModelFactor::score(const Vec& z) const {
  if (z.size() != llt_.matrixL().rows())
    throw std::invalid_argument("ModelFactor: feature length must be d+K");
  // z^T A^{-1} z = ||L^{-1} z||^2
  const Vec u = llt_.matrixL().solve(z);
  return u.squaredNorm();
}

double ModelFactor::width(const Vec& z) const { return std::sqrt(score(z)); }

void ConfidenceConfig::validate() const {
  if (!(lambda > 0.0) || !(c_z > 0.0) || !(e_max > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("ConfidenceConfig: lambda, c_z, e_max, scale must be > 0");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("ConfidenceConfig: delta must lie in (0,1)");
}

double kappa(double c_z, double lambda) {
  return std::sqrt(3.0 + 2.0 * std::log(1.0 + c_z * c_z / (8.0 * lambda)));
}

double confidence_radius(long long pulls, int d, int K, const ConfidenceConfig& cfg) {
  cfg.validate();
  if (pulls < 1) throw std::invalid_argument("confidence_radius: pulls must be >= 1");
  const int p = d + K;
  const double k = kappa(cfg.c_z, cfg.lambda);
  return cfg.scale * k * cfg.e_max * cfg.c_z *
         std::sqrt(2.0 * p * std::log(static_cast<double>(pulls)) * std::log(p / cfg.delta));
}

RefitResult refit_mle(const std::vector<BatchItem>& history, double lambda, int p) {
  if (history.empty()) throw std::invalid_argument("refit_mle: history must be non-empty");
  if (!(lambda > 0.0)) throw std::invalid_argument("refit_mle: lambda must be > 0");
  const long long n = static_cast<long long>(history.size());

  Mat Z(p, n);
  Vec y(n);
  for (long long i = 0; i < n; ++i) {
    check_item(history[i], p);
    Z.col(i) = history[i].z;
    y(i) = history[i].r / history[i].e;
  }

  RefitResult res;
  Vec theta = Vec::Zero(p);
  const NewtonOut o = newton_fit(Z, y, lambda, 1e-8, 100, theta);
  res.converged = o.converged;
  res.iterations = o.iterations;
  res.grad_norm = o.grad_norm;

  // A at the final estimate
  const Vec eta = Z.transpose() * theta;
  Vec w(n);
  for (long long i = 0; i < n; ++i) {
    const double pr = sigmoid(eta(i));
    w(i) = std::max(pr * (1.0 - pr), kWeightFloor);
  }
  ModelState st;
  st.A = Z * w.asDiagonal() * Z.transpose();
  st.A.diagonal().array() += lambda;
  st.A = ((st.A + st.A.transpose()) * 0.5).eval();
  st.theta_hat = theta;
  st.b = st.A * theta;
  st.pulls = n;
  res.state = std::move(st);
  return res;
}

MleTracker::MleTracker(int p, double lambda, long long anchor_every)
    : p_(p), lambda_(lambda), anchor_every_(anchor_every) {
  if (p < 1 || !(lambda > 0.0) || anchor_every < 1)
    throw std::invalid_argument("MleTracker: bad dimensions");
  zt_.resize(p, 256);
  y_.resize(256);
  c_ = Mat::Identity(p, p) * lambda;
  theta_ = Vec::Zero(p);
}

void MleTracker::append(const std::vector<BatchItem>& batch) {
  if (batch.empty()) return;
  const long long need = n_ + static_cast<long long>(batch.size());
  if (need > zt_.cols()) {
    long long cap = zt_.cols();
    while (cap < need) cap *= 2;
    zt_.conservativeResize(Eigen::NoChange, cap);
    y_.conservativeResize(cap);
  }
  // batch gradient and curvature at the estimate entering the call
  Vec grad = Vec::Zero(p_);
  for (const BatchItem& it : batch) {
    check_item(it, p_);
    const double y = it.r / it.e;
    const double p_hat = sigmoid(it.z.dot(theta_));
    const double w = std::max(p_hat * (1.0 - p_hat), kWeightFloor);
    zt_.col(n_) = it.z;
    y_(n_) = y;
    c_.selfadjointView<Eigen::Lower>().rankUpdate(it.z, w);
    grad += it.z * (p_hat - y);
    ++n_;
  }
  c_.triangularView<Eigen::StrictlyUpper>() = c_.transpose();
  ++batches_;

  // one tracking step; the history terms of the gradient vanish at the
  // previous optimum, so only the fresh batch contributes
  Vec step = Eigen::LLT<Mat>(c_).solve(grad);
  const double len = step.norm();
  if (len > 1.0) step *= 1.0 / len;  // trust cap; the next anchor removes any residue
  theta_ -= step;
}

const Vec& MleTracker::refit() {
  if (n_ == 0) return theta_;
  const bool due = n_ <= 1000 || batches_ % anchor_every_ == 0;
  if (due && batches_ != anchored_batches_) {
    const double tol = 1e-8 * (1.0 + std::sqrt(static_cast<double>(n_)));
    newton_fit(zt_.leftCols(n_), y_.head(n_), lambda_, tol, 100, theta_);
    anchored_batches_ = batches_;
  }
  return theta_;
}

std::string model_to_json(const ModelState& state) {
  nlohmann::json j;
  const int p = state.dim();
  std::vector<std::vector<double>> rows(p, std::vector<double>(p));
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < p; ++k) rows[i][k] = state.A(i, k);
  j["A"] = rows;
  j["b"] = std::vector<double>(state.b.data(), state.b.data() + p);
  j["theta_hat"] = std::vector<double>(state.theta_hat.data(), state.theta_hat.data() + p);
  j["pulls"] = state.pulls;
  return j.dump();
}

ModelState model_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto rows = j.at("A").get<std::vector<std::vector<double>>>();
  const int p = static_cast<int>(rows.size());
  if (p < 1) throw std::invalid_argument("model_from_json: A must be at least 1x1");
  ModelState s;
  s.A.resize(p, p);
  for (int i = 0; i < p; ++i) {
    if (static_cast<int>(rows[i].size()) != p)
      throw std::invalid_argument("model_from_json: A must be square");
    for (int k = 0; k < p; ++k) s.A(i, k) = rows[i][k];
  }
  const auto bv = j.at("b").get<std::vector<double>>();
  const auto tv = j.at("theta_hat").get<std::vector<double>>();
  if (static_cast<int>(bv.size()) != p || static_cast<int>(tv.size()) != p)
    throw std::invalid_argument("model_from_json: b and theta_hat must have length d+K");
  s.b = Eigen::Map<const Vec>(bv.data(), p);
  s.theta_hat = Eigen::Map<const Vec>(tv.data(), p);
  s.pulls = j.at("pulls").get<long long>();
  return s;
}

}  // namespace mccb
