#include "mccb/harness.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "mccb/rng.hpp"

namespace mccb {

std::string format_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

RegretRecord compute_episode_regret(const EpisodePlan& plan,
                                    const std::vector<Context>& contexts,
                                    const TrueModel& truth, const ArmCatalog& catalog,
                                    ExecMode exec) {
  const int N = plan.N;
  const int H = plan.H;
  if (static_cast<int>(contexts.size()) != N)
    throw std::invalid_argument("compute_episode_regret: plan and contexts disagree on N");
  // all validation happens before the parallel region; a throw inside an
  // OpenMP loop would terminate instead of propagating
  for (int n = 1; n <= N; ++n) {
    if (contexts[n - 1].size() != truth.d || !contexts[n - 1].allFinite())
      throw std::invalid_argument("compute_episode_regret: bad context for user " +
                                  std::to_string(n));
    for (int h = 1; h <= H; ++h) {
      const int arm = plan.arm_at(n, h);
      if (arm < 1 || arm > catalog.K())
        throw std::invalid_argument("compute_episode_regret: plan slot (" + std::to_string(n) +
                                    "," + std::to_string(h) + ") holds no playable arm");
    }
  }

  Vec vstar(N), vpi(N);
#pragma omp parallel for schedule(static) if (exec == ExecMode::parallel)
  for (int n = 1; n <= N; ++n) {
    // one clamped probability vector feeds both evaluations, so the oracle
    // policy's plan scores identically to the optimum
    Vec f = click_probs(truth, contexts[n - 1]);
    for (int k = 0; k < f.size(); ++k) f(k) = clamp_prob(f(k));

    const PlanResult opt = backward_plan(f, catalog.rewards, H);
    vstar(n - 1) = oracle_policy_value(opt.best_arm, f, catalog.rewards);

    std::vector<int> seq(H);
    for (int h = 1; h <= H; ++h) seq[h - 1] = plan.arm_at(n, h);
    vpi(n - 1) = oracle_policy_value(seq, f, catalog.rewards);
  }

  RegretRecord rec;
  for (int n = 0; n < N; ++n) {  // serial sum in user order keeps results mode-independent
    rec.oracle_value += vstar(n);
    rec.policy_value += vpi(n);
    rec.episode_regret += vstar(n) - vpi(n);
  }
  rec.M_t = plan.M_t;
  return rec;
}

SeedInstance make_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedInstance inst;
  inst.catalog.rewards.resize(cfg.K);
  if (cfg.rewards.sampled) {
    for (int k = 1; k <= cfg.K; ++k)
      inst.catalog.rewards(k - 1) =
          cfg.rewards.low +
          (cfg.rewards.high - cfg.rewards.low) * uniform01(seed, Stream::reward_init, k);
  } else {
    for (int k = 0; k < cfg.K; ++k) inst.catalog.rewards(k) = cfg.rewards.values[k];
  }
  inst.catalog.validate();

  const int p = cfg.d + cfg.K;
  inst.truth.d = cfg.d;
  inst.truth.K = cfg.K;
  inst.truth.theta.resize(p);
  if (cfg.theta.sampled) {
    for (int i = 0; i < p; ++i)
      inst.truth.theta(i) = normal(seed, Stream::theta_init, 0, 0, i);
    const double norm = inst.truth.theta.norm();
    if (norm > 0.0) inst.truth.theta *= cfg.theta.norm / norm;
  } else {
    for (int i = 0; i < p; ++i) inst.truth.theta(i) = cfg.theta.values[i];
  }
  inst.truth.validate();
  return inst;
}

namespace {

// Aborts the run on any breach of the estimator/regret invariants, carrying
// enough context to locate the episode.
class InvariantMonitor {
 public:
  InvariantMonitor(int p, double lambda, std::uint64_t seed)
      : lambda_(lambda), seed_(seed), prev_eigs_(Vec::Constant(p, lambda)) {}

  void check(const ModelState& m, const RegretRecord& rec, double prev_cum) {
    const double asym = (m.A - m.A.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * std::max(1.0, m.A.cwiseAbs().maxCoeff()))
      fail(rec.t, "A lost symmetry", asym);

    Eigen::SelfAdjointEigenSolver<Mat> es(m.A, Eigen::EigenvaluesOnly);
    const Vec eigs = es.eigenvalues();
    if (eigs(0) < lambda_ - 1e-9 * std::max(1.0, lambda_))
      fail(rec.t, "eigenvalue fell below lambda", eigs(0));
    for (int i = 0; i < eigs.size(); ++i)
      if (eigs(i) < prev_eigs_(i) - 1e-8 * (1.0 + std::abs(prev_eigs_(i))))
        fail(rec.t, "sorted eigenvalue decreased", eigs(i) - prev_eigs_(i));
    prev_eigs_ = eigs;

    const double resid = (m.A * m.theta_hat - m.b).cwiseAbs().maxCoeff();
    if (resid >= 1e-8 * (1.0 + m.b.cwiseAbs().maxCoeff()))
      fail(rec.t, "solve consistency ||A theta - b|| too large", resid);

    if (rec.episode_regret < -1e-9) fail(rec.t, "negative episode regret", rec.episode_regret);
    const double drift = std::abs(rec.cum_regret - (prev_cum + rec.episode_regret));
    if (drift > 1e-9) fail(rec.t, "cumulative regret prefix drift", drift);
  }

 private:
  [[noreturn]] void fail(long long t, const char* what, double value) const {
    throw std::runtime_error("invariant breach at seed " + std::to_string(seed_) +
                             ", episode " + std::to_string(t) + ": " + what +
                             " (value " + format_sig12(value) + ")");
  }

  double lambda_;
  std::uint64_t seed_;
  Vec prev_eigs_;
};

double beta_for_episode(const ExperimentConfig& cfg, long long t, long long pulls,
                        double e_max) {
  if (cfg.algorithm != Algorithm::ucbbp && cfg.algorithm != Algorithm::aucbbp) return 0.0;
  if (cfg.beta.mode == BetaMode::fixed)
    return cfg.beta.c * std::sqrt(std::log(1.0 + static_cast<double>(t)));
  ConfidenceConfig cc;
  cc.lambda = cfg.lambda;
  cc.delta = cfg.delta;
  cc.c_z = cfg.clip.feature_bound(cfg.d);
  cc.e_max = e_max;
  cc.scale = cfg.beta.scale;
  return confidence_radius(std::max<long long>(pulls, 1), cfg.d, cfg.K, cc);
}

}  // namespace

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const SeedInstance inst = make_instance(cfg, seed);
  const int p = cfg.d + cfg.K;

  ModelState model = ModelState::init(p, cfg.lambda);
  MleTracker tracker(p, cfg.lambda);
  WarmupCounter warmup;
  InvariantMonitor monitor(p, cfg.lambda, seed);

  SeedResult result;
  result.seed = seed;
  result.records.reserve(cfg.T);

  double cum = 0.0;
  std::vector<BatchItem> batch;
  batch.reserve(static_cast<size_t>(cfg.N) * cfg.H);

  for (long long t = 1; t <= cfg.T; ++t) {
    const std::vector<Context> xs = sample_contexts(seed, t, cfg.N, cfg.d, cfg.clip);

    PlanInputs in;
    in.algorithm = cfg.algorithm;
    in.t = t;
    in.H = cfg.H;
    in.T0 = cfg.T0;
    in.T = cfg.T;
    in.epsilon = cfg.epsilon;
    in.beta = (t > cfg.T0) ? beta_for_episode(cfg, t, model.pulls, inst.catalog.e_max()) : 0.0;
    in.contexts = &xs;
    in.model = &model;
    in.truth = &inst.truth;
    in.catalog = &inst.catalog;
    in.seed = seed;
    in.warmup = &warmup;
    in.exec = cfg.exec;
    const EpisodePlan plan = build_episode_plan(in);

    RegretRecord rec = compute_episode_regret(plan, xs, inst.truth, inst.catalog, cfg.exec);
    rec.t = t;

    const EpisodeLog log = run_episode(plan, xs, inst.truth, inst.catalog, seed, t);
    batch.clear();
    for (const Observation& o : log.observations)
      batch.push_back({o.z, o.reward, inst.catalog.e(o.arm)});

    model = irls_update(model, batch);
    if (cfg.estimator == EstimatorMode::mle_refit) {
      tracker.append(batch);
      model.theta_hat = tracker.refit();
      model.b = model.A * model.theta_hat;  // keep theta_hat the solution of A x = b
    }

    const double prev_cum = cum;
    cum += rec.episode_regret;
    rec.cum_regret = cum;
    rec.time_avg_regret = cum / static_cast<double>(t);
    rec.ctx_avg_regret = cum / static_cast<double>(cfg.N);
    rec.theta_err = (model.theta_hat - inst.truth.theta).norm();

    if (cfg.check_invariants) monitor.check(model, rec, prev_cum);
    result.records.push_back(rec);
  }
  return result;
}

ResultSet run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultSet rs;
  rs.config = cfg;
  const int S = static_cast<int>(cfg.seeds.size());
  rs.per_seed.resize(S);

  if (cfg.exec == ExecMode::parallel) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < S; ++i) {
      try {
        rs.per_seed[i] = run_seed(cfg, cfg.seeds[i]);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else {
    for (int i = 0; i < S; ++i) rs.per_seed[i] = run_seed(cfg, cfg.seeds[i]);
  }

  if (!cfg.out.empty()) write_result_files(rs, cfg.out);
  return rs;
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd across_seeds(const ResultSet& rs, size_t idx, double RegretRecord::*field) {
  const int S = static_cast<int>(rs.per_seed.size());
  MeanStd ms;
  for (const SeedResult& sr : rs.per_seed) ms.mean += sr.records[idx].*field;
  ms.mean /= S;
  if (S > 1) {
    double ss = 0.0;
    for (const SeedResult& sr : rs.per_seed) {
      const double dlt = sr.records[idx].*field - ms.mean;
      ss += dlt * dlt;
    }
    ms.std = std::sqrt(ss / (S - 1));
  }
  return ms;
}

}  // namespace

void write_result_files(const ResultSet& rs, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());

  const std::string alg = algorithm_name(rs.config.algorithm);
  for (const SeedResult& sr : rs.per_seed) {
    const std::string path = dir + "/" + alg + "_seed" + std::to_string(sr.seed) + ".csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << "t,episode_regret,cum_regret,time_avg_regret,ctx_avg_regret,M_t,theta_err\n";
    for (const RegretRecord& r : sr.records) {
      out << r.t << ',' << format_sig12(r.episode_regret) << ',' << format_sig12(r.cum_regret)
          << ',' << format_sig12(r.time_avg_regret) << ',' << format_sig12(r.ctx_avg_regret)
          << ',' << r.M_t << ',' << format_sig12(r.theta_err) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path);
  }

  const std::string apath = dir + "/" + alg + "_aggregate.csv";
  std::ofstream out(apath);
  if (!out) throw std::runtime_error("cannot open output file " + apath);
  out << "t,episode_regret_mean,episode_regret_std,cum_regret_mean,cum_regret_std,"
         "time_avg_regret_mean,time_avg_regret_std,ctx_avg_regret_mean,ctx_avg_regret_std,"
         "M_t,theta_err_mean,theta_err_std\n";
  const size_t T = rs.per_seed.empty() ? 0 : rs.per_seed.front().records.size();
  for (size_t i = 0; i < T; ++i) {
    const MeanStd ep = across_seeds(rs, i, &RegretRecord::episode_regret);
    const MeanStd cu = across_seeds(rs, i, &RegretRecord::cum_regret);
    const MeanStd ta = across_seeds(rs, i, &RegretRecord::time_avg_regret);
    const MeanStd ca = across_seeds(rs, i, &RegretRecord::ctx_avg_regret);
    const MeanStd te = across_seeds(rs, i, &RegretRecord::theta_err);
    out << rs.per_seed.front().records[i].t << ',' << format_sig12(ep.mean) << ','
        << format_sig12(ep.std) << ',' << format_sig12(cu.mean) << ',' << format_sig12(cu.std)
        << ',' << format_sig12(ta.mean) << ',' << format_sig12(ta.std) << ','
        << format_sig12(ca.mean) << ',' << format_sig12(ca.std) << ','
        << rs.per_seed.front().records[i].M_t << ',' << format_sig12(te.mean) << ','
        << format_sig12(te.std) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + apath);
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& axis,
                                  const std::vector<std::string>& values) {
  if (values.empty()) throw std::invalid_argument("run_sweep: axis values must be non-empty");

  std::vector<SweepPoint> points;
  for (const std::string& v : values) {
    ExperimentConfig cfg = base;
    std::string label;
    if (axis == "N") {
      size_t pos = 0;
      const int n = std::stoi(v, &pos);
      if (pos != v.size() || n < 1)
        throw std::invalid_argument("run_sweep: bad N value \"" + v + "\"");
      cfg.N = n;
      label = "N=" + std::to_string(n);
    } else if (axis == "algorithm") {
      cfg.algorithm = algorithm_from_name(v);
      label = "algorithm=" + v;
    } else {
      throw std::invalid_argument("run_sweep: unknown axis \"" + axis +
                                  "\" (use N or algorithm)");
    }
    if (!base.out.empty()) cfg.out = base.out + "/" + label;
    points.push_back({label, run_experiment(cfg)});
  }
  return points;
}

double seed_mean(const ResultSet& rs, long long t, double RegretRecord::*field) {
  const size_t idx = static_cast<size_t>(t - 1);
  double m = 0.0;
  for (const SeedResult& sr : rs.per_seed) m += sr.records.at(idx).*field;
  return m / static_cast<double>(rs.per_seed.size());
}

}  // namespace mccb
