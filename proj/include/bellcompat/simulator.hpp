#pragma once

// Monte Carlo event streams for EPR-Bohm contexts.
//
// Each context (a pair of settings) carries its own hidden-variable law and
// instrument laws. Station outcomes are computed by a rule that only sees
// that station's setting, the shared hidden state and that station's
// instrument state. Every random draw is keyed by (seed, trial, role), so a
// stream is a pure function of its inputs regardless of worker count.

#include "bellcompat/random.hpp"
#include "bellcompat/types.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace bellcompat {

using HiddenState = std::vector<double>;

struct DiscreteDistribution {
  std::vector<HiddenState> points;
  std::vector<double> weights;
};

/// Independent uniform coordinates on [low_k, high_k).
struct UniformBox {
  HiddenState low;
  HiddenState high;
};

using Distribution = std::variant<DiscreteDistribution, UniformBox>;

void validate_distribution(const Distribution& dist, double tolerance = kNormTolerance);
HiddenState sample(const Distribution& dist, CounterRng& rng);

/// Outcome of one station: (its setting, shared hidden state, its instrument state).
using OutcomeRule =
    std::function<Outcome(double theta, const HiddenState& lambda, const HiddenState& instrument)>;

/// Click probability of one station; absent means every trial registers.
using DetectionHook =
    std::function<double(double theta, const HiddenState& lambda, const HiddenState& instrument)>;

struct ContextSpec {
  double theta_a = 0.0;
  double theta_b = 0.0;
  Distribution system;
  std::optional<Distribution> instrument_a;
  std::optional<Distribution> instrument_b;
  OutcomeRule rule;
  DetectionHook detection;
};

void validate_context(const ContextSpec& spec);

struct Event {
  std::uint64_t trial = 0;
  Outcome a = Outcome::NoClick;
  Outcome b = Outcome::NoClick;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventStream {
  double theta_a = 0.0;
  double theta_b = 0.0;
  std::vector<Event> events;

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

struct SamplerOptions {
  unsigned workers = 1;
};

/// I.i.d. draws of (a, b) from the table's four cells.
EventStream sample_from_table(const PairwiseTable& table, std::size_t n, std::uint64_t seed,
                              double theta_a = 0.0, double theta_b = 0.0,
                              const SamplerOptions& options = {});

EventStream sample_context(const ContextSpec& spec, std::size_t n, std::uint64_t seed,
                           const SamplerOptions& options = {});

// ---- threshold detection -------------------------------------------------

struct ZeroNoise {};
/// xi uniform on the open interval (-half_width, half_width); half_width <= 1.
struct UniformNoise {
  double half_width = 0.5;
};
/// xi = amplitude * |cos 2(theta - lambda)| + jitter * u with u uniform on
/// (-1, 1); amplitude + jitter < 1. Larger portions reach well-aligned arms.
struct AlignedNoise {
  double amplitude = 0.5;
  double jitter = 0.0;
};
using NoiseLaw = std::variant<ZeroNoise, UniformNoise, AlignedNoise>;

enum class PairingRule {
  /// Two arms pair iff they belong to the same emitted pulse.
  SameTrial,
};

/// Energies in units of one quantum (h nu = 1). The source emits a shared
/// polarization lambda uniform on [0, pi). Arm energy is E_n + xi; the arm
/// clicks iff that energy reaches `threshold`, and then reports
/// sign cos 2(theta - lambda).
struct ThresholdDetectionSpec {
  double pulse_energy = 1.0;
  NoiseLaw noise = ZeroNoise{};
  double threshold = 0.5;
  PairingRule pairing = PairingRule::SameTrial;
};

void validate_threshold(const ThresholdDetectionSpec& spec);
double sample_noise(const NoiseLaw& law, double theta, double lambda, CounterRng& rng);

EventStream sample_threshold(const ThresholdDetectionSpec& spec, double theta_a, double theta_b,
                             std::size_t n, std::uint64_t seed, const SamplerOptions& options = {});

// ---- run drift -----------------------------------------------------------

/// Hidden law used for run `run`, derived from the base law.
using DriftRule =
    std::function<Distribution(std::size_t run, const Distribution& base, CounterRng& rng)>;

struct RunDriftSpec {
  std::size_t runs = 1;
  DriftRule perturbation;  // empty: no drift
  ContextSpec base;
};

DriftRule no_drift();
/// Cycles through `laws` run by run.
DriftRule alternating_drift(std::vector<Distribution> laws);
/// Multiplies each discrete weight by (1 + amplitude * u), u uniform on
/// (-1, 1), then renormalizes. Requires a discrete base and amplitude < 1.
DriftRule jitter_drift(double amplitude);

/// Seed used for run `run`; run 0 uses `seed` itself.
std::uint64_t run_seed(std::uint64_t seed, std::size_t run);

std::vector<EventStream> run_with_drift(const RunDriftSpec& spec, std::size_t n_per_run,
                                        std::uint64_t seed, const SamplerOptions& options = {});

// ---- post-selection ------------------------------------------------------

struct PostSelection {
  CoincidenceRecord record;
  std::uint64_t discarded = 0;
};

/// Keeps the trials where both stations registered.
PostSelection post_select(const EventStream& stream);

/// Tallies of every event by raw outcome pair; NO_CLICK rows included.
struct RawTally {
  std::array<std::array<std::uint64_t, 3>, 3> counts{};  // [a+1][b+1] over {-1, 0, +1}
  std::uint64_t total = 0;
};
RawTally tally(const EventStream& stream);

// ---- stock outcome rules -------------------------------------------------

/// sign cos 2(theta - lambda[0]) with the instrument's first coordinate
/// (if any) added to the setting.
OutcomeRule polarization_rule();
/// sign of lambda[0]; ignores the setting.
OutcomeRule shared_sign_rule();
/// sign of lambda[k] where k is the position of theta in `settings`.
OutcomeRule coordinate_rule(std::vector<double> settings);

}  // namespace bellcompat
