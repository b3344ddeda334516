#include "bellcompat/sim_config.hpp"

#include <cmath>
#include <fstream>

namespace bellcompat {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InvalidInput("config " + path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

std::uint64_t unsigned_integer(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> degrees(const json& v, const std::string& path) {
  auto out = numbers(v, path);
  for (auto& d : out) d = deg_to_rad(d);
  return out;
}

std::pair<double, double> setting_pair(const json& v, const std::string& path) {
  const auto angles = degrees(v, path);
  if (angles.size() != 2) fail(path, "expected [theta_a_deg, theta_b_deg]");
  return {angles[0], angles[1]};
}

Distribution law(const json& v, const std::string& path) {
  const std::string type = text(require(v, "type", path), path + ".type");
  Distribution out;
  if (type == "discrete") {
    DiscreteDistribution d;
    const json& points = require(v, "points", path);
    if (!points.is_array()) fail(path + ".points", "expected an array");
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string p = path + ".points[" + std::to_string(i) + "]";
      if (points[i].is_number()) {
        d.points.push_back({number(points[i], p)});
      } else {
        d.points.push_back(numbers(points[i], p));
      }
    }
    d.weights = numbers(require(v, "weights", path), path + ".weights");
    out = std::move(d);
  } else if (type == "uniform") {
    out = UniformBox{numbers(require(v, "low", path), path + ".low"),
                     numbers(require(v, "high", path), path + ".high")};
  } else {
    fail(path + ".type", "unknown law '" + type + "' (expected discrete or uniform)");
  }
  try {
    validate_distribution(out);
  } catch (const InvalidInput& e) {
    fail(path, e.what());
  }
  return out;
}

OutcomeRule rule(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "polarization") return polarization_rule();
    if (name == "shared_sign") return shared_sign_rule();
    fail(path, "unknown rule '" + name + "'");
  }
  const std::string type = text(require(v, "type", path), path + ".type");
  if (type == "coordinate") {
    return coordinate_rule(degrees(require(v, "settings", path), path + ".settings"));
  }
  if (type == "polarization") return polarization_rule();
  if (type == "shared_sign") return shared_sign_rule();
  fail(path + ".type", "unknown rule '" + type + "'");
}

DetectionHook detection(const json& v, const std::string& path) {
  const std::string type = text(require(v, "type", path), path + ".type");
  if (type == "constant") {
    const double p = number(require(v, "probability", path), path + ".probability");
    if (!(p >= 0.0 && p <= 1.0)) fail(path + ".probability", "must lie in [0, 1]");
    return [p](double, const HiddenState&, const HiddenState&) { return p; };
  }
  if (type == "aligned") {
    const double eta = number(require(v, "efficiency", path), path + ".efficiency");
    if (!(eta >= 0.0 && eta <= 1.0)) fail(path + ".efficiency", "must lie in [0, 1]");
    return [eta](double theta, const HiddenState& lambda, const HiddenState&) {
      return eta * std::abs(std::cos(2.0 * (theta - lambda.at(0))));
    };
  }
  fail(path + ".type", "unknown detection '" + type + "' (expected constant or aligned)");
}

NoiseLaw noise(const json& v, const std::string& path) {
  const std::string type = text(require(v, "type", path), path + ".type");
  if (type == "zero") return ZeroNoise{};
  if (type == "uniform") {
    return UniformNoise{number(require(v, "half_width", path), path + ".half_width")};
  }
  if (type == "aligned") {
    AlignedNoise a;
    a.amplitude = number(require(v, "amplitude", path), path + ".amplitude");
    if (v.contains("jitter")) a.jitter = number(v["jitter"], path + ".jitter");
    return a;
  }
  fail(path + ".type", "unknown noise '" + type + "' (expected zero, uniform or aligned)");
}

ContextSpec context(const json& v, const std::string& path) {
  ContextSpec spec;
  std::tie(spec.theta_a, spec.theta_b) =
      setting_pair(require(v, "settings", path), path + ".settings");
  spec.system = law(require(v, "hidden", path), path + ".hidden");
  if (v.contains("instrument_a")) spec.instrument_a = law(v["instrument_a"], path + ".instrument_a");
  if (v.contains("instrument_b")) spec.instrument_b = law(v["instrument_b"], path + ".instrument_b");
  spec.rule = rule(require(v, "rule", path), path + ".rule");
  if (v.contains("detection")) spec.detection = detection(v["detection"], path + ".detection");
  try {
    validate_context(spec);
  } catch (const InvalidInput& e) {
    fail(path, e.what());
  }
  return spec;
}

DriftRule drift_rule(const json& v, const std::string& path) {
  const std::string type = text(require(v, "type", path), path + ".type");
  try {
    if (type == "none") return no_drift();
    if (type == "jitter") {
      return jitter_drift(number(require(v, "amplitude", path), path + ".amplitude"));
    }
    if (type == "alternating") {
      const json& laws = require(v, "laws", path);
      if (!laws.is_array()) fail(path + ".laws", "expected an array");
      std::vector<Distribution> out;
      for (std::size_t i = 0; i < laws.size(); ++i) {
        out.push_back(law(laws[i], path + ".laws[" + std::to_string(i) + "]"));
      }
      return alternating_drift(std::move(out));
    }
  } catch (const InvalidInput& e) {
    const std::string what = e.what();
    if (what.rfind("config ", 0) == 0) throw;
    fail(path, what);
  }
  fail(path + ".type", "unknown drift rule '" + type + "' (expected none, alternating or jitter)");
}

}  // namespace

SimulationConfig parse_simulation_config(const json& doc) {
  if (!doc.is_object()) fail("$", "expected an object at the top level");
  SimulationConfig cfg;
  cfg.source = doc;
  const std::string model = text(require(doc, "model", "$"), "$.model");
  if (model == "contexts") {
    cfg.model = SimulationConfig::Model::Contexts;
  } else if (model == "threshold") {
    cfg.model = SimulationConfig::Model::Threshold;
  } else if (model == "drift") {
    cfg.model = SimulationConfig::Model::Drift;
  } else {
    fail("$.model", "unknown model '" + model + "' (expected contexts, threshold or drift)");
  }
  if (doc.contains("seed")) cfg.seed = unsigned_integer(doc["seed"], "$.seed");
  if (doc.contains("trials")) cfg.trials = unsigned_integer(doc["trials"], "$.trials");
  if (cfg.trials == 0) fail("$.trials", "must be at least 1");
  if (doc.contains("workers")) {
    const auto w = unsigned_integer(doc["workers"], "$.workers");
    if (w == 0 || w > 1024) fail("$.workers", "must be between 1 and 1024");
    cfg.workers = static_cast<unsigned>(w);
  }

  if (cfg.model == SimulationConfig::Model::Threshold) {
    const json& t = require(doc, "threshold", "$");
    const std::string p = "$.threshold";
    if (t.contains("pulse_energy")) cfg.threshold.pulse_energy = number(t["pulse_energy"], p + ".pulse_energy");
    if (t.contains("threshold")) cfg.threshold.threshold = number(t["threshold"], p + ".threshold");
    if (t.contains("noise")) cfg.threshold.noise = noise(t["noise"], p + ".noise");
    try {
      validate_threshold(cfg.threshold);
    } catch (const InvalidInput& e) {
      fail(p, e.what());
    }
    const json& settings = require(t, "settings", p);
    if (!settings.is_array() || settings.empty()) fail(p + ".settings", "expected a nonempty array");
    for (std::size_t i = 0; i < settings.size(); ++i) {
      cfg.threshold_settings.push_back(
          setting_pair(settings[i], p + ".settings[" + std::to_string(i) + "]"));
    }
  } else {
    const json& contexts = require(doc, "contexts", "$");
    if (!contexts.is_array() || contexts.empty()) fail("$.contexts", "expected a nonempty array");
    for (std::size_t i = 0; i < contexts.size(); ++i) {
      cfg.contexts.push_back(context(contexts[i], "$.contexts[" + std::to_string(i) + "]"));
    }
  }

  if (cfg.model == SimulationConfig::Model::Drift) {
    const json& d = require(doc, "drift", "$");
    cfg.runs = unsigned_integer(require(d, "runs", "$.drift"), "$.drift.runs");
    if (cfg.runs == 0) fail("$.drift.runs", "must be at least 1");
    cfg.drift = drift_rule(require(d, "rule", "$.drift"), "$.drift.rule");
  }

  if (doc.contains("evaluate")) {
    const json& e = doc["evaluate"];
    EvaluateSpec spec;
    try {
      spec.inequality = parse_cross_inequality(text(require(e, "inequality", "$.evaluate"),
                                                    "$.evaluate.inequality"));
    } catch (const InvalidInput& err) {
      const std::string what = err.what();
      if (what.rfind("config ", 0) == 0) throw;
      fail("$.evaluate.inequality", what);
    }
    if (e.contains("settings")) {
      spec.settings = degrees(e["settings"], "$.evaluate.settings");
      if (spec.settings.size() != setting_count(spec.inequality)) {
        fail("$.evaluate.settings", "expected " + std::to_string(setting_count(spec.inequality)) +
                                        " angles for " + to_string(spec.inequality));
      }
    }
    cfg.evaluate = std::move(spec);
  }
  return cfg;
}

SimulationConfig load_simulation_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config " + path.string() + ": " + e.what());
  }
  return parse_simulation_config(doc);
}

std::uint64_t context_seed(std::uint64_t seed, std::size_t k) {
  return mix64(seed ^ mix64(0xa0761d6478bd642fULL + k));
}

SimulationResult run_simulation(const SimulationConfig& config, double sigma_k) {
  SimulationResult result;
  const SamplerOptions options{config.workers};
  auto record = [&](std::size_t k, std::optional<std::size_t> run, const EventStream& stream) {
    SimulatedContext c;
    c.context = k;
    c.run = run;
    c.theta_a = stream.theta_a;
    c.theta_b = stream.theta_b;
    c.selection = post_select(stream);
    c.raw = tally(stream);
    result.contexts.push_back(c);
    return c.selection.record;
  };

  switch (config.model) {
    case SimulationConfig::Model::Contexts:
      for (std::size_t k = 0; k < config.contexts.size(); ++k) {
        const auto stream =
            sample_context(config.contexts[k], config.trials, context_seed(config.seed, k), options);
        result.pooled.push_back(record(k, std::nullopt, stream));
      }
      break;
    case SimulationConfig::Model::Threshold:
      for (std::size_t k = 0; k < config.threshold_settings.size(); ++k) {
        const auto [ta, tb] = config.threshold_settings[k];
        const auto stream = sample_threshold(config.threshold, ta, tb, config.trials,
                                             context_seed(config.seed, k), options);
        result.pooled.push_back(record(k, std::nullopt, stream));
      }
      break;
    case SimulationConfig::Model::Drift:
      for (std::size_t k = 0; k < config.contexts.size(); ++k) {
        RunDriftSpec spec{config.runs, config.drift, config.contexts[k]};
        const auto runs = run_with_drift(spec, config.trials, context_seed(config.seed, k), options);
        CoincidenceRecord pooled;
        pooled.theta1 = config.contexts[k].theta_a;
        pooled.theta2 = config.contexts[k].theta_b;
        for (std::size_t r = 0; r < runs.size(); ++r) {
          const auto rec = record(k, r, runs[r]);
          pooled.n_pp += rec.n_pp;
          pooled.n_pm += rec.n_pm;
          pooled.n_mp += rec.n_mp;
          pooled.n_mm += rec.n_mm;
        }
        result.pooled.push_back(pooled);
      }
      break;
  }

  if (config.evaluate) {
    result.evaluation =
        config.evaluate->settings.empty()
            ? evaluate_cross_context(result.pooled, config.evaluate->inequality, sigma_k)
            : evaluate_cross_context(result.pooled, config.evaluate->inequality,
                                     config.evaluate->settings, sigma_k);
  }
  return result;
}

}  // namespace bellcompat
