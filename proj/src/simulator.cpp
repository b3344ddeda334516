#include "bellcompat/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

namespace bellcompat {

namespace {

template <class Fn>
void for_each_trial(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1U, workers);
  if (workers == 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([begin, end, &fn, &error = errors[w]] {
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          error = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t state_dimension(const Distribution& dist) {
  if (const auto* d = std::get_if<DiscreteDistribution>(&dist)) {
    return d->points.empty() ? 0 : d->points.front().size();
  }
  return std::get<UniformBox>(dist).low.size();
}

Outcome checked(Outcome o) {
  if (o == Outcome::NoClick) {
    throw InvalidInput("outcome rules return +1 or -1; use a detection hook for no-clicks");
  }
  return o;
}

bool draws_click(const DetectionHook& hook, double theta, const HiddenState& lambda,
                 const HiddenState& instrument, CounterRng& rng) {
  if (!hook) return true;
  const double p = hook(theta, lambda, instrument);
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("detection probability outside [0,1]");
  return rng.uniform() < p;
}

}  // namespace

void validate_distribution(const Distribution& dist, double tolerance) {
  if (const auto* d = std::get_if<DiscreteDistribution>(&dist)) {
    if (d->points.empty() || d->points.size() != d->weights.size()) {
      throw InvalidInput("discrete distribution needs one weight per point");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < d->points.size(); ++i) {
      if (d->points[i].size() != d->points.front().size()) {
        throw InvalidInput("discrete distribution points differ in dimension");
      }
      if (!(d->weights[i] >= 0.0)) throw InvalidInput("negative weight in discrete distribution");
      sum += d->weights[i];
    }
    if (std::abs(sum - 1.0) > tolerance) {
      std::ostringstream os;
      os << "discrete distribution weights sum to " << sum;
      throw InvalidInput(os.str());
    }
    return;
  }
  const auto& box = std::get<UniformBox>(dist);
  if (box.low.size() != box.high.size()) throw InvalidInput("uniform box bounds differ in size");
  for (std::size_t k = 0; k < box.low.size(); ++k) {
    if (!(box.low[k] < box.high[k]) || !std::isfinite(box.high[k] - box.low[k])) {
      throw InvalidInput("uniform box needs finite low < high in every coordinate");
    }
  }
}

HiddenState sample(const Distribution& dist, CounterRng& rng) {
  if (const auto* d = std::get_if<DiscreteDistribution>(&dist)) {
    double u = rng.uniform();
    for (std::size_t i = 0; i + 1 < d->points.size(); ++i) {
      if (u < d->weights[i]) return d->points[i];
      u -= d->weights[i];
    }
    // Rounding leftovers land on the last point with positive weight.
    for (std::size_t i = d->points.size(); i-- > 0;) {
      if (d->weights[i] > 0.0) return d->points[i];
    }
    return d->points.back();
  }
  const auto& box = std::get<UniformBox>(dist);
  HiddenState out(box.low.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = box.low[k] + (box.high[k] - box.low[k]) * rng.uniform();
  }
  return out;
}

void validate_context(const ContextSpec& spec) {
  if (!spec.rule) throw InvalidInput("context has no outcome rule");
  if (!std::isfinite(spec.theta_a) || !std::isfinite(spec.theta_b)) {
    throw InvalidInput("context settings must be finite");
  }
  validate_distribution(spec.system);
  if (spec.instrument_a) validate_distribution(*spec.instrument_a);
  if (spec.instrument_b) validate_distribution(*spec.instrument_b);
  if (state_dimension(spec.system) == 0) throw InvalidInput("hidden state has no coordinates");
}

EventStream sample_from_table(const PairwiseTable& table, std::size_t n, std::uint64_t seed,
                              double theta_a, double theta_b, const SamplerOptions& options) {
  if (!validate_table(table).empty()) throw InvalidInput("sample_from_table: invalid table");
  if (n == 0) throw InvalidInput("sample_from_table: n must be positive");
  const auto p = table.as_double();
  EventStream stream{theta_a, theta_b, std::vector<Event>(n)};
  for_each_trial(n, options.workers, [&](std::size_t i) {
    CounterRng rng(seed, i, StreamRole::Table);
    double u = rng.uniform();
    std::size_t cell = 3;
    for (std::size_t c = 0; c < 3; ++c) {
      if (u < p[c]) {
        cell = c;
        break;
      }
      u -= p[c];
    }
    // Guard against rounding into an empty trailing cell.
    while (p[cell] <= 0.0 && cell > 0) --cell;
    stream.events[i] = {i, outcome_from_sign(cell < 2), outcome_from_sign(cell % 2 == 0)};
  });
  return stream;
}

EventStream sample_context(const ContextSpec& spec, std::size_t n, std::uint64_t seed,
                           const SamplerOptions& options) {
  validate_context(spec);
  if (n == 0) throw InvalidInput("sample_context: n must be positive");
  EventStream stream{spec.theta_a, spec.theta_b, std::vector<Event>(n)};
  for_each_trial(n, options.workers, [&](std::size_t i) {
    CounterRng hidden_rng(seed, i, StreamRole::Hidden);
    const HiddenState lambda = sample(spec.system, hidden_rng);
    HiddenState inst_a, inst_b;
    if (spec.instrument_a) {
      CounterRng r(seed, i, StreamRole::InstrumentA);
      inst_a = sample(*spec.instrument_a, r);
    }
    if (spec.instrument_b) {
      CounterRng r(seed, i, StreamRole::InstrumentB);
      inst_b = sample(*spec.instrument_b, r);
    }
    CounterRng det_a(seed, i, StreamRole::DetectA);
    CounterRng det_b(seed, i, StreamRole::DetectB);
    const Outcome a = checked(spec.rule(spec.theta_a, lambda, inst_a));
    const Outcome b = checked(spec.rule(spec.theta_b, lambda, inst_b));
    const bool click_a = draws_click(spec.detection, spec.theta_a, lambda, inst_a, det_a);
    const bool click_b = draws_click(spec.detection, spec.theta_b, lambda, inst_b, det_b);
    stream.events[i] = {i, click_a ? a : Outcome::NoClick, click_b ? b : Outcome::NoClick};
  });
  return stream;
}

void validate_threshold(const ThresholdDetectionSpec& spec) {
  if (!(spec.threshold > 0.0) || !std::isfinite(spec.threshold)) {
    throw InvalidInput("threshold must be a positive finite energy");
  }
  if (!(spec.pulse_energy >= 0.0) || !std::isfinite(spec.pulse_energy)) {
    throw InvalidInput("pulse energy must be nonnegative");
  }
  if (const auto* u = std::get_if<UniformNoise>(&spec.noise)) {
    if (!(u->half_width >= 0.0 && u->half_width <= 1.0)) {
      throw InvalidInput("uniform noise half-width must lie in [0, 1]");
    }
  } else if (const auto* a = std::get_if<AlignedNoise>(&spec.noise)) {
    if (!(a->amplitude >= 0.0 && a->jitter >= 0.0 && a->amplitude + a->jitter < 1.0)) {
      throw InvalidInput("aligned noise needs amplitude, jitter >= 0 with sum < 1");
    }
  }
}

double sample_noise(const NoiseLaw& law, double theta, double lambda, CounterRng& rng) {
  if (std::holds_alternative<ZeroNoise>(law)) return 0.0;
  if (const auto* u = std::get_if<UniformNoise>(&law)) {
    return u->half_width == 0.0 ? 0.0 : rng.open_uniform(-u->half_width, u->half_width);
  }
  const auto& a = std::get<AlignedNoise>(law);
  const double jitter = a.jitter == 0.0 ? 0.0 : a.jitter * rng.open_uniform(-1.0, 1.0);
  return a.amplitude * std::abs(std::cos(2.0 * (theta - lambda))) + jitter;
}

EventStream sample_threshold(const ThresholdDetectionSpec& spec, double theta_a, double theta_b,
                             std::size_t n, std::uint64_t seed, const SamplerOptions& options) {
  validate_threshold(spec);
  if (n == 0) throw InvalidInput("sample_threshold: n must be positive");
  EventStream stream{theta_a, theta_b, std::vector<Event>(n)};
  for_each_trial(n, options.workers, [&](std::size_t i) {
    CounterRng hidden(seed, i, StreamRole::Hidden);
    const double lambda = std::numbers::pi * hidden.uniform();
    auto arm = [&](double theta, StreamRole role) {
      CounterRng rng(seed, i, role);
      const double energy = spec.pulse_energy + sample_noise(spec.noise, theta, lambda, rng);
      if (energy < spec.threshold) return Outcome::NoClick;
      return outcome_from_sign(std::cos(2.0 * (theta - lambda)) >= 0.0);
    };
    stream.events[i] = {i, arm(theta_a, StreamRole::NoiseA), arm(theta_b, StreamRole::NoiseB)};
  });
  return stream;
}

DriftRule no_drift() {
  return [](std::size_t, const Distribution& base, CounterRng&) { return base; };
}

DriftRule alternating_drift(std::vector<Distribution> laws) {
  if (laws.empty()) throw InvalidInput("alternating drift needs at least one law");
  for (const auto& law : laws) validate_distribution(law);
  return [laws = std::move(laws)](std::size_t run, const Distribution&, CounterRng&) {
    return laws[run % laws.size()];
  };
}

DriftRule jitter_drift(double amplitude) {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) throw InvalidInput("jitter amplitude must be in [0,1)");
  return [amplitude](std::size_t, const Distribution& base, CounterRng& rng) -> Distribution {
    const auto* d = std::get_if<DiscreteDistribution>(&base);
    if (!d) throw InvalidInput("jitter drift needs a discrete hidden law");
    DiscreteDistribution out = *d;
    double sum = 0.0;
    for (auto& w : out.weights) {
      w *= 1.0 + amplitude * rng.open_uniform(-1.0, 1.0);
      sum += w;
    }
    for (auto& w : out.weights) w /= sum;
    return out;
  };
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t run) {
  return run == 0 ? seed : mix64(seed ^ mix64(0xd1b54a32d192ed03ULL * run));
}

std::vector<EventStream> run_with_drift(const RunDriftSpec& spec, std::size_t n_per_run,
                                        std::uint64_t seed, const SamplerOptions& options) {
  if (spec.runs == 0) throw InvalidInput("run drift needs at least one run");
  validate_context(spec.base);
  std::vector<EventStream> runs;
  runs.reserve(spec.runs);
  for (std::size_t r = 0; r < spec.runs; ++r) {
    ContextSpec context = spec.base;
    if (spec.perturbation) {
      CounterRng rng(seed, r, StreamRole::Drift);
      context.system = spec.perturbation(r, spec.base.system, rng);
    }
    runs.push_back(sample_context(context, n_per_run, run_seed(seed, r), options));
  }
  return runs;
}

PostSelection post_select(const EventStream& stream) {
  PostSelection out;
  out.record.theta1 = stream.theta_a;
  out.record.theta2 = stream.theta_b;
  for (const auto& e : stream.events) {
    if (e.a == Outcome::NoClick || e.b == Outcome::NoClick) {
      ++out.discarded;
      continue;
    }
    const bool a = e.a == Outcome::Plus;
    const bool b = e.b == Outcome::Plus;
    switch (cell_index(a, b)) {
      case kPP: ++out.record.n_pp; break;
      case kPM: ++out.record.n_pm; break;
      case kMP: ++out.record.n_mp; break;
      default: ++out.record.n_mm; break;
    }
  }
  return out;
}

RawTally tally(const EventStream& stream) {
  RawTally t;
  for (const auto& e : stream.events) {
    ++t.counts[sign_of(e.a) + 1][sign_of(e.b) + 1];
    ++t.total;
  }
  return t;
}

OutcomeRule polarization_rule() {
  return [](double theta, const HiddenState& lambda, const HiddenState& instrument) {
    const double offset = instrument.empty() ? 0.0 : instrument[0];
    return outcome_from_sign(std::cos(2.0 * (theta + offset - lambda.at(0))) >= 0.0);
  };
}

OutcomeRule shared_sign_rule() {
  return [](double, const HiddenState& lambda, const HiddenState&) {
    return outcome_from_sign(lambda.at(0) >= 0.0);
  };
}

OutcomeRule coordinate_rule(std::vector<double> settings) {
  return [settings = std::move(settings)](double theta, const HiddenState& lambda,
                                          const HiddenState&) {
    for (std::size_t k = 0; k < settings.size(); ++k) {
      if (std::abs(settings[k] - theta) < 1e-12) return outcome_from_sign(lambda.at(k) >= 0.0);
    }
    throw InvalidInput("coordinate rule: setting not in its list");
  };
}

}  // namespace bellcompat
