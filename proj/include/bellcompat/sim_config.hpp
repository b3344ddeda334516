#pragma once

// Declarative simulation specs (JSON key-value tree) and the runner that
// turns one into post-selected coincidence records.
//
// Top-level keys:
//   model      "contexts" | "threshold" | "drift"            (required)
//   seed       unsigned integer, default 0
//   trials     trials per context (per run for drift), default 10000
//   workers    sampler threads, default 1
//   contexts   [context...]            for "contexts" and "drift"
//   threshold  {pulse_energy, threshold, noise, settings}   for "threshold"
//   drift      {runs, rule}            for "drift"
//   evaluate   {inequality: "bell"|"wigner"|"chsh", settings: [deg...]}  optional
//
// context:  {settings: [deg_a, deg_b], hidden: law, instrument_a: law,
//            instrument_b: law, rule: rule, detection: detection}
// law:      {type: "discrete", points: [[x...]...] or [x...], weights: [w...]}
//           {type: "uniform", low: [x...], high: [x...]}
// rule:     "polarization" | "shared_sign" | {type: "coordinate", settings: [deg...]}
// detection {type: "constant", probability: p}
//           {type: "aligned", efficiency: eta}   click prob eta*|cos 2(theta - lambda0)|
// noise:    {type: "zero"} | {type: "uniform", half_width: h}
//           {type: "aligned", amplitude: A, jitter: J}
// threshold.settings: [[deg_a, deg_b]...]
// drift.rule: {type: "none"} | {type: "alternating", laws: [law...]}
//             | {type: "jitter", amplitude: a}

#include "bellcompat/analysis.hpp"
#include "bellcompat/simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace bellcompat {

struct EvaluateSpec {
  CrossInequality inequality = CrossInequality::Bell;
  std::vector<double> settings;  // radians; empty: records taken in order
};

struct SimulationConfig {
  enum class Model { Contexts, Threshold, Drift };
  Model model = Model::Contexts;
  std::uint64_t seed = 0;
  std::size_t trials = 10000;
  unsigned workers = 1;
  std::vector<ContextSpec> contexts;
  ThresholdDetectionSpec threshold;
  std::vector<std::pair<double, double>> threshold_settings;  // radians
  std::size_t runs = 1;
  DriftRule drift;
  std::optional<EvaluateSpec> evaluate;
  nlohmann::json source;  // the document as read
};

/// Throws InvalidInput naming the offending key.
SimulationConfig parse_simulation_config(const nlohmann::json& doc);
SimulationConfig load_simulation_config(const std::filesystem::path& path);

struct SimulatedContext {
  std::size_t context = 0;
  std::optional<std::size_t> run;  // drift model only
  double theta_a = 0.0;
  double theta_b = 0.0;
  PostSelection selection;
  RawTally raw;
};

struct SimulationResult {
  std::vector<SimulatedContext> contexts;
  /// One record per context; drift runs are pooled per context.
  std::vector<CoincidenceRecord> pooled;
  std::optional<CrossContextEvaluation> evaluation;
};

/// Seed used for context `k` of a run seeded with `seed`.
std::uint64_t context_seed(std::uint64_t seed, std::size_t k);

SimulationResult run_simulation(const SimulationConfig& config, double sigma_k = kDefaultSigmaK);

}  // namespace bellcompat
