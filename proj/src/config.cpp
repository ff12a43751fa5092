#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mccb/harness.hpp"

namespace mccb {

std::string estimator_mode_name(EstimatorMode m) {
  return m == EstimatorMode::streaming_irls ? "streaming-irls" : "mle-refit";
}

EstimatorMode estimator_mode_from_name(const std::string& name) {
  if (name == "streaming-irls") return EstimatorMode::streaming_irls;
  if (name == "mle-refit") return EstimatorMode::mle_refit;
  throw std::invalid_argument("unknown estimator mode: " + name);
}

void ExperimentConfig::validate() const {
  if (d < 1 || K < 1 || N < 1 || H < 1)
    throw std::invalid_argument("config: d, K, N, H must all be >= 1");
  if (T0 < 1 || T0 >= T) throw std::invalid_argument("config: need 1 <= T0 < T");
  if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("config: delta must be in (0,1)");
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("config: epsilon must be in [0,1]");
  if (seeds.empty()) throw std::invalid_argument("config: seed list must be non-empty");
  if (!rewards.sampled) {
    if (static_cast<int>(rewards.values.size()) != K)
      throw std::invalid_argument("config: explicit rewards must have length K");
    for (double e : rewards.values)
      if (!(e > 0.0)) throw std::invalid_argument("config: rewards must be > 0");
  } else if (!(rewards.low > 0.0) || !(rewards.high >= rewards.low)) {
    throw std::invalid_argument("config: sampled reward range must satisfy 0 < low <= high");
  }
  if (!theta.sampled && static_cast<int>(theta.values.size()) != d + K)
    throw std::invalid_argument("config: explicit theta must have length d+K");
  if (theta.sampled && !(theta.norm > 0.0))
    throw std::invalid_argument("config: theta norm must be > 0");
  if (!(beta.c >= 0.0)) throw std::invalid_argument("config: beta c must be >= 0");
  if (!(beta.scale > 0.0)) throw std::invalid_argument("config: beta scale must be > 0");
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown key \"" + key + "\" in " + where);
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  reject_unknown(j,
                 {"d", "K", "N", "H", "T", "T0", "lambda", "delta", "epsilon", "seeds",
                  "algorithm", "estimator", "rewards", "theta", "clip", "beta",
                  "check_invariants", "exec", "out"},
                 "top level");

  ExperimentConfig c;
  if (j.contains("d")) c.d = j.at("d").get<int>();
  if (j.contains("K")) c.K = j.at("K").get<int>();
  if (j.contains("N")) c.N = j.at("N").get<int>();
  if (j.contains("H")) c.H = j.at("H").get<int>();
  if (j.contains("T")) c.T = j.at("T").get<long long>();
  if (j.contains("T0")) c.T0 = j.at("T0").get<long long>();
  if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
  if (j.contains("delta")) c.delta = j.at("delta").get<double>();
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("algorithm")) c.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  if (j.contains("estimator"))
    c.estimator = estimator_mode_from_name(j.at("estimator").get<std::string>());

  if (j.contains("rewards")) {
    const json& r = j.at("rewards");
    reject_unknown(r, {"mode", "low", "high", "values"}, "rewards");
    const std::string mode = r.value("mode", "sampled");
    if (mode == "sampled") {
      c.rewards.sampled = true;
      if (r.contains("low")) c.rewards.low = r.at("low").get<double>();
      if (r.contains("high")) c.rewards.high = r.at("high").get<double>();
      if (r.contains("values"))
        throw std::invalid_argument("config: rewards.values requires mode \"explicit\"");
    } else if (mode == "explicit") {
      c.rewards.sampled = false;
      c.rewards.values = r.at("values").get<std::vector<double>>();
    } else {
      throw std::invalid_argument("config: rewards.mode must be \"sampled\" or \"explicit\"");
    }
  }

  if (j.contains("theta")) {
    const json& th = j.at("theta");
    reject_unknown(th, {"mode", "norm", "values"}, "theta");
    const std::string mode = th.value("mode", "sampled");
    if (mode == "sampled") {
      c.theta.sampled = true;
      if (th.contains("norm")) c.theta.norm = th.at("norm").get<double>();
      if (th.contains("values"))
        throw std::invalid_argument("config: theta.values requires mode \"explicit\"");
    } else if (mode == "explicit") {
      c.theta.sampled = false;
      c.theta.values = th.at("values").get<std::vector<double>>();
    } else {
      throw std::invalid_argument("config: theta.mode must be \"sampled\" or \"explicit\"");
    }
  }

  if (j.contains("clip")) {
    const json& cl = j.at("clip");
    reject_unknown(cl, {"enabled", "c_x"}, "clip");
    if (cl.contains("enabled")) c.clip.enabled = cl.at("enabled").get<bool>();
    if (cl.contains("c_x")) c.clip.c_x = cl.at("c_x").get<double>();
  }

  if (j.contains("beta")) {
    const json& b = j.at("beta");
    reject_unknown(b, {"mode", "c", "scale"}, "beta");
    const std::string mode = b.value("mode", "fixed");
    if (mode == "fixed") {
      c.beta.mode = BetaMode::fixed;
    } else if (mode == "theory") {
      c.beta.mode = BetaMode::theory;
    } else {
      throw std::invalid_argument("config: beta.mode must be \"fixed\" or \"theory\"");
    }
    if (b.contains("c")) c.beta.c = b.at("c").get<double>();
    if (b.contains("scale")) c.beta.scale = b.at("scale").get<double>();
  }

  if (j.contains("check_invariants")) c.check_invariants = j.at("check_invariants").get<bool>();
  if (j.contains("exec")) {
    const std::string e = j.at("exec").get<std::string>();
    if (e == "serial") {
      c.exec = ExecMode::serial;
    } else if (e == "parallel") {
      c.exec = ExecMode::parallel;
    } else {
      throw std::invalid_argument("config: exec must be \"serial\" or \"parallel\"");
    }
  }
  if (j.contains("out")) c.out = j.at("out").get<std::string>();

  c.validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace mccb
