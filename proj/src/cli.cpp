#include "bellcompat/cli.hpp"

#include "bellcompat/analysis.hpp"
#include "bellcompat/family_csv.hpp"
#include "bellcompat/inequalities.hpp"
#include "bellcompat/leggett.hpp"
#include "bellcompat/marginal_solver.hpp"
#include "bellcompat/random.hpp"
#include "bellcompat/sim_config.hpp"
#include "bellcompat/singlet.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace bellcompat {

using nlohmann::json;

namespace {

/// Requested analysis finding, reported through exit code 1.
struct CommandResult {
  json result;
  std::string summary;
  bool finding = false;
};

struct Common {
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<double> tolerance;
  std::optional<double> sigma_k;
  std::optional<unsigned> workers;
  bool exact = false;
  bool floating = false;
  bool fail_on_finding = false;
};

std::optional<Arithmetic> arithmetic(const Common& c) {
  if (c.exact) return Arithmetic::Exact;
  if (c.floating) return Arithmetic::Float;
  return std::nullopt;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::string atom_signs(std::uint64_t atom, std::size_t n) {
  std::string s;
  for (std::size_t k = 0; k < n; ++k) s += atom_plus(atom, k) ? '+' : '-';
  return s;
}

json rational_json(const Rational& q) { return {{"exact", to_string(q)}, {"value", to_double(q)}}; }

json table_json(const PairwiseTable& t) {
  json cells = json::array();
  for (const auto& c : t.cells()) cells.push_back(to_string(c));
  const auto d = t.as_double();
  return {{"var_i", t.first()},
          {"var_j", t.second()},
          {"cells", cells},
          {"cells_value", json(std::vector<double>(d.begin(), d.end()))},
          {"correlation", d[kPP] - d[kPM] - d[kMP] + d[kMM]}};
}

json family_json(const MarginalFamily& family) {
  json tables = json::array();
  for (const auto& t : family.tables) tables.push_back(table_json(t));
  json out{{"n", family.n}, {"tables", tables}};
  if (!family.labels.empty()) out["labels"] = family.labels;
  return out;
}

json joint_json(const SignedJoint& joint) {
  json atoms = json::array();
  for (std::uint64_t a = 0; a < joint.atoms(); ++a) {
    if (sgn(joint.weight(a)) == 0) continue;
    atoms.push_back({{"atom", a},
                     {"signs", atom_signs(a, joint.n())},
                     {"weight", to_string(joint.weight(a))},
                     {"value", to_double(joint.weight(a))}});
  }
  return {{"n", joint.n()}, {"nonzero_atoms", atoms}};
}

json inequality_json(const InequalityReport& r) {
  return {{"name", r.name},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"margin", r.margin},
          {"violated", r.violated}};
}

json record_json(const CoincidenceRecord& r) {
  return {{"theta1_deg", rad_to_deg(r.theta1)},
          {"theta2_deg", rad_to_deg(r.theta2)},
          {"counts", {r.n_pp, r.n_pm, r.n_mp, r.n_mm}},
          {"total", r.total()}};
}

json empirical_json(const EmpiricalTable& e) {
  return {{"p", e.p},
          {"se", e.se},
          {"correlation", e.correlation},
          {"correlation_se", e.correlation_se}};
}

json evaluation_json(const CrossContextEvaluation& ev) {
  json settings = json::array();
  for (double s : ev.settings) settings.push_back(rad_to_deg(s));
  json contexts = json::array();
  for (const auto& c : ev.contexts) contexts.push_back(record_json(c));
  json estimates = json::array();
  for (const auto& e : ev.estimates) {
    estimates.push_back({{"quantity", e.quantity},
                         {"context", e.context},
                         {"transposed", e.transposed},
                         {"value", e.value},
                         {"se", e.se}});
  }
  return {{"inequality", to_string(ev.inequality)},
          {"settings_deg", settings},
          {"contexts", contexts},
          {"estimates", estimates},
          {"report", inequality_json(ev.report)},
          {"sigma", ev.sigma},
          {"sigma_k", ev.sigma_k},
          {"violated", ev.violated}};
}

std::string evaluation_summary(const CrossContextEvaluation& ev) {
  std::ostringstream os;
  os << to_string(ev.inequality) << ": lhs " << fmt(ev.report.lhs) << ", rhs " << fmt(ev.report.rhs)
     << ", margin " << fmt(ev.report.margin) << " +- " << fmt(ev.sigma) << " (1 sigma); "
     << (ev.violated ? "VIOLATED" : "not violated") << " at " << fmt(ev.sigma_k) << " sigma";
  return os.str();
}

MarginalFamily load_family(const std::string& path, const SolverOptions& options) {
  auto family = parse_family_csv(std::filesystem::path(path));
  const auto violations =
      validate_family(family, options.resolve(family.n), options.tolerance);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "invalid family '" << path << "':";
    for (const auto& v : violations) {
      os << "\n  " << v.invariant << ": " << v.detail;
    }
    throw InvalidInput(os.str());
  }
  return family;
}

SolverOptions solver_options(const Common& c) {
  SolverOptions options;
  options.arithmetic = arithmetic(c);
  if (c.tolerance) options.tolerance = *c.tolerance;
  return options;
}

const char* mode_name(Arithmetic a) { return a == Arithmetic::Exact ? "exact" : "float"; }

// ---- subcommands ----------------------------------------------------------

CommandResult cmd_check(const Common& c, const std::string& family_path) {
  const auto options = solver_options(c);
  const auto family = load_family(family_path, options);
  const Arithmetic mode = options.resolve(family.n);
  const auto verdict = check_compatibility(family, options);

  CommandResult o;
  o.result = {{"family", family_json(family)},
              {"arithmetic", mode_name(mode)},
              {"status", verdict.feasible() ? "FEASIBLE" : "INFEASIBLE"}};
  std::ostringstream summary;
  summary << "check: " << (verdict.feasible() ? "FEASIBLE" : "INFEASIBLE") << " (" << family.n
          << " variables, " << family.tables.size() << " tables, " << mode_name(mode)
          << " arithmetic)";
  if (verdict.witness) o.result["witness"] = joint_json(*verdict.witness);
  if (verdict.certificate) {
    json cert = json::array();
    for (const auto& y : *verdict.certificate) cert.push_back(to_string(y));
    o.result["certificate"] = cert;
    const double slack = mode == Arithmetic::Exact ? 0.0 : options.tolerance;
    if (const auto gap = certificate_gap(family, *verdict.certificate, slack)) {
      o.result["certificate_gap"] = rational_json(*gap);
      summary << "; Farkas certificate y.b = " << to_string(*gap);
    }
  }
  o.summary = summary.str();
  o.finding = !verdict.feasible();
  return o;
}

CommandResult cmd_quasi(const Common& c, const std::string& family_path) {
  const auto options = solver_options(c);
  const auto family = load_family(family_path, options);
  const Arithmetic mode = options.resolve(family.n);
  const auto q = solve_quasi(family, options);
  CommandResult o;
  o.result = {{"family", family_json(family)},
              {"arithmetic", mode_name(mode)},
              {"negativity", rational_json(q.negativity)},
              {"joint", joint_json(q.joint)}};
  o.summary = "quasi: minimal negativity " + to_string(q.negativity) + " (" +
              fmt(to_double(q.negativity)) + ", " + mode_name(mode) + " arithmetic)";
  o.finding = sgn(q.negativity) > 0;
  return o;
}

CommandResult cmd_predict(const Common& c, const std::vector<double>& angles_deg, bool chsh_mode) {
  const AngleSet angles = AngleSet::from_degrees(angles_deg);
  const auto family = singlet_family(angles, chsh_mode ? FamilyMode::Chsh : FamilyMode::AllPairs);
  CommandResult o;
  o.result["angles_deg"] = angles_deg;
  o.result["mode"] = chsh_mode ? "chsh" : "all_pairs";
  o.result["family"] = family_json(family);
  std::ostringstream summary;
  summary << "predict: " << family.tables.size() << " singlet tables";

  const double tol = c.tolerance.value_or(kInequalityTolerance);
  json reports = json::array();
  auto table = [&](std::size_t i, std::size_t j) { return singlet_pair_table(angles[i], angles[j]); };
  auto corr = [&](std::size_t i, std::size_t j) { return singlet_correlation(angles[i], angles[j]); };
  if (!chsh_mode && angles.size() >= 3) {
    const auto w = wigner(to_double(table(0, 1).cell(kPP)), to_double(table(1, 2).cell(kMP)),
                          to_double(table(0, 2).cell(kPP)), tol);
    const auto b = bell_covariance(corr(0, 1), corr(2, 1), corr(0, 2), tol);
    reports.push_back(inequality_json(w));
    reports.push_back(inequality_json(b));
    summary << "; wigner " << (w.violated ? "VIOLATED" : "satisfied") << " (P(a+,c+) "
            << fmt(w.lhs) << " vs P(a+,b+)+P(b-,c+) " << fmt(w.rhs) << ")";
    summary << "; bell " << (b.violated ? "VIOLATED" : "satisfied") << " (lhs " << fmt(b.lhs)
            << ", rhs " << fmt(b.rhs) << ")";
    o.finding = o.finding || w.violated || b.violated;
  }
  if (angles.size() == 4) {
    // (a, a', b, b') = angles 0..3. Each of the four terms in turn carries
    // the minus sign; a single joint must satisfy all four forms.
    const std::array<double, 4> e = {corr(0, 2), corr(0, 3), corr(1, 2), corr(1, 3)};
    static const char* const kTerms[] = {"E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"};
    double worst = 0.0;
    bool any = false;
    for (std::size_t minus = 4; minus-- > 0;) {
      std::array<double, 4> order{};
      std::size_t slot = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        if (k != minus) order[slot++] = e[k];
      }
      order[3] = e[minus];
      auto r = chsh(order[0], order[1], order[2], order[3], tol);
      r.name += std::string(" minus ") + kTerms[minus];
      reports.push_back(inequality_json(r));
      worst = std::max(worst, r.lhs);
      any = any || r.violated;
    }
    summary << "; chsh " << (any ? "VIOLATED" : "satisfied") << " (max lhs over sign forms "
            << fmt(worst) << ")";
    o.finding = o.finding || any;
  }
  o.result["inequalities"] = reports;

  SolverOptions options;
  options.arithmetic = arithmetic(c);
  if (family.n <= options.exact_limit) {
    const auto verdict = check_compatibility(family, options);
    o.result["compatibility"] = verdict.feasible() ? "FEASIBLE" : "INFEASIBLE";
    summary << "; joint distribution " << (verdict.feasible() ? "exists" : "does not exist");
    o.finding = o.finding || !verdict.feasible();
  }
  o.summary = summary.str();
  return o;
}

CommandResult cmd_simulate(const Common& c, const std::string& config_path, const std::string& csv_path) {
  auto config = load_simulation_config(config_path);
  if (c.seed) config.seed = *c.seed;
  if (c.trials) {
    if (*c.trials == 0) throw InvalidInput("--trials must be at least 1");
    config.trials = *c.trials;
  }
  if (c.workers) config.workers = std::max(1U, *c.workers);
  const auto result = run_simulation(config, c.sigma_k.value_or(kDefaultSigmaK));

  CommandResult o;
  o.result["config"] = config.source;
  o.result["seed"] = config.seed;
  o.result["trials"] = config.trials;
  json contexts = json::array();
  for (const auto& s : result.contexts) {
    json raw = json::array();
    for (const auto& row : s.raw.counts) raw.push_back(row);
    json entry{{"context", s.context},
               {"theta_a_deg", rad_to_deg(s.theta_a)},
               {"theta_b_deg", rad_to_deg(s.theta_b)},
               {"record", record_json(s.selection.record)},
               {"discarded", s.selection.discarded},
               {"raw_counts", raw}};
    if (s.run) entry["run"] = *s.run;
    if (s.selection.record.total() > 0) {
      entry["empirical"] = empirical_json(empirical_table(s.selection.record));
    } else {
      entry["zero_total"] = true;
    }
    contexts.push_back(entry);
  }
  o.result["contexts"] = contexts;
  json pooled = json::array();
  for (const auto& r : result.pooled) pooled.push_back(record_json(r));
  o.result["pooled"] = pooled;

  std::ostringstream summary;
  summary << "simulate: " << result.pooled.size() << " contexts x " << config.trials
          << " trials (seed " << config.seed << ")";
  if (result.evaluation) {
    o.result["evaluation"] = evaluation_json(*result.evaluation);
    summary << "; " << evaluation_summary(*result.evaluation);
    o.finding = result.evaluation->violated;
  }
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::ios_base::failure("cannot write '" + csv_path + "'");
    write_coincidence_csv(csv, result.pooled);
    if (!csv) throw std::ios_base::failure("write failed for '" + csv_path + "'");
  }
  o.summary = summary.str();
  return o;
}

CommandResult cmd_analyze(const Common& c, const std::string& data_path,
                    const std::vector<std::string>& combinations) {
  const auto records = parse_coincidence_csv(std::filesystem::path(data_path));
  AnomalyOptions options;
  if (c.tolerance) options.tolerance = *c.tolerance;
  if (c.sigma_k) options.sigma_k = *c.sigma_k;
  for (const auto& spec : combinations) {
    std::array<double, 4> coeffs{};
    std::stringstream ss(spec);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
      if (k == 4) throw InvalidInput("--combination takes four coefficients: '" + spec + "'");
      try {
        std::size_t used = 0;
        coeffs[k] = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidInput("--combination coefficient is not a number: '" + item + "'");
      }
      ++k;
    }
    if (k != 4) throw InvalidInput("--combination takes four coefficients: '" + spec + "'");
    options.combinations.push_back(coeffs);
  }
  const auto reports = anomaly_analysis(records, options);

  CommandResult o;
  json out = json::array();
  std::size_t flagged = 0;
  double worst_identity = 0.0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    json combos = json::array();
    for (const auto& cr : r.combinations) {
      combos.push_back({{"coefficients", cr.coefficients},
                        {"experimental", cr.experimental},
                        {"predicted", cr.predicted},
                        {"deviation", cr.deviation}});
    }
    out.push_back({{"record", record_json(records[i])},
                   {"empirical", empirical_json(empirical_table(records[i]))},
                   {"predicted", r.predicted},
                   {"deviation", r.deviation},
                   {"delta_e", r.delta_e},
                   {"compensation_residual", r.compensation_residual},
                   {"marginal_deviation", r.marginal_deviation},
                   {"marginal_se", r.marginal_se},
                   {"flagged", r.flagged},
                   {"combinations", combos}});
    if (r.flagged) ++flagged;
    worst_identity = std::max(worst_identity, std::abs(r.compensation_residual - r.delta_e));
  }
  o.result["records"] = out;
  o.result["sigma_k"] = options.sigma_k;
  o.result["tolerance"] = options.tolerance;
  std::ostringstream summary;
  summary << "analyze: " << reports.size() << " records, " << flagged
          << " with single-station marginal deviations; max |residual - delta_E| = "
          << fmt(worst_identity);
  o.summary = summary.str();
  o.finding = flagged > 0;
  return o;
}

CommandResult cmd_cross(const Common& c, const std::string& data_path, const std::string& inequality,
                  const std::vector<double>& settings_deg) {
  const auto records = parse_coincidence_csv(std::filesystem::path(data_path));
  const auto which = parse_cross_inequality(inequality);
  const double k = c.sigma_k.value_or(kDefaultSigmaK);
  CrossContextEvaluation ev;
  if (settings_deg.empty()) {
    ev = evaluate_cross_context(records, which, k);
  } else {
    std::vector<double> settings;
    for (double d : settings_deg) settings.push_back(deg_to_rad(d));
    ev = evaluate_cross_context(records, which, settings, k);
  }
  CommandResult o;
  o.result = evaluation_json(ev);
  o.summary = "cross: " + evaluation_summary(ev);
  o.finding = ev.violated;
  return o;
}

std::array<std::size_t, 3> parse_grid(const std::string& text) {
  std::array<std::size_t, 3> dims{};
  std::stringstream ss(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, 'x')) {
    if (k == 3) break;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v == 0 || v > 64) {
      throw InvalidInput("--grid expects UxVxL with sizes in 1..64, got '" + text + "'");
    }
    dims[k++] = v;
  }
  if (k != 3 || ss.rdbuf()->in_avail() > 0) {
    throw InvalidInput("--grid expects UxVxL, got '" + text + "'");
  }
  return dims;
}

CommandResult cmd_legget(const Common& c, const std::string& grid_text,
                   const std::vector<double>& settings_deg) {
  const auto max_dims = parse_grid(grid_text);
  if (settings_deg.size() != 2) throw InvalidInput("--settings takes two angles a,b in degrees");
  const double a = deg_to_rad(settings_deg[0]);
  const double b = deg_to_rad(settings_deg[1]);
  const std::uint64_t seed = c.seed.value_or(0);
  const std::size_t trials = c.trials.value_or(1000);
  const double tol = c.tolerance.value_or(1e-12);

  // Station outcomes: the arm's polarization alignment against a shared threshold lambda.
  const LeggettOutcome A = [](double a_, double, double u, double, double lambda) {
    return std::cos(2.0 * (a_ - u)) >= 2.0 * lambda - 1.0 ? 1 : -1;
  };
  const LeggettOutcome B = [](double, double b_, double, double v, double lambda) {
    return std::cos(2.0 * (b_ - v)) >= 1.0 - 2.0 * lambda ? 1 : -1;
  };

  double worst = 0.0;
  std::size_t failures = 0;
  std::size_t zero_cells = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, t, StreamRole::Hidden);
    JointWeights w;
    const std::size_t nu = 1 + rng.next() % max_dims[0];
    const std::size_t nv = 1 + rng.next() % max_dims[1];
    const std::size_t nl = 1 + rng.next() % max_dims[2];
    for (std::size_t i = 0; i < nu; ++i) w.grid.u.push_back(std::numbers::pi * i / nu);
    for (std::size_t i = 0; i < nv; ++i) w.grid.v.push_back(std::numbers::pi * i / nv);
    for (std::size_t i = 0; i < nl; ++i) w.grid.lambda.push_back((i + 0.5) / nl);
    w.p.resize(w.grid.size());
    double sum = 0.0;
    for (std::size_t iu = 0; iu < nu; ++iu) {
      for (std::size_t iv = 0; iv < nv; ++iv) {
        // Some (u, v) cells carry no mass at all.
        const bool empty = w.grid.cells() > 1 && rng.uniform() < 0.2;
        for (std::size_t il = 0; il < nl; ++il) {
          const double x = empty ? 0.0 : rng.uniform();
          w.p[w.grid.index(iu, iv, il)] = x;
          sum += x;
        }
      }
    }
    if (sum == 0.0) {
      w.p[0] = 1.0;
      sum = 1.0;
    }
    for (auto& x : w.p) x /= sum;
    const auto model = model_from_joint(w, A, B, a, b);
    for (const auto& r : model.rho) zero_cells += r ? 0 : 1;
    const double diff = std::abs(leggett_two_step(model) - leggett_joint_average(w, A, B, a, b));
    worst = std::max(worst, diff);
    if (diff > tol) ++failures;
  }

  CommandResult o;
  o.result = {{"seed", seed},
              {"trials", trials},
              {"max_grid", max_dims},
              {"settings_deg", settings_deg},
              {"tolerance", tol},
              {"max_abs_difference", worst},
              {"failures", failures},
              {"zero_mass_cells_excluded", zero_cells}};
  o.summary = "legget: " + std::to_string(trials) + " random P(u,v,lambda); max |two-step - joint| = " +
              fmt(worst) + ", " + std::to_string(failures) + " above tolerance";
  o.finding = failures > 0;
  return o;
}

void emit(const Common& c, const std::string& command, const json& inputs, const CommandResult& o,
          std::ostream& out) {
  json report{{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
              {"command", command},
              {"inputs", inputs},
              {"summary", o.summary},
              {"finding", o.finding},
              {"result", o.result}};
  const std::string text = report.dump(2) + "\n";
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out_path, std::ios::binary);
  if (!file) throw std::ios_base::failure("cannot write '" + c.out_path + "'");
  file << text;
  file.close();
  if (!file) throw std::ios_base::failure("write failed for '" + c.out_path + "'");
  out << o.summary << '\n';
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pairwise-marginal compatibility and Bell-type analysis", kToolName};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  Common c;
  app.add_option("--out", c.out_path, "Write the JSON report to this file");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--trials", c.trials, "Trials per context / random instances");
  app.add_option("--tolerance", c.tolerance, "Numerical tolerance");
  app.add_option("--sigma-k", c.sigma_k, "Statistical violation threshold in standard errors")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--workers", c.workers, "Sampler threads")->check(CLI::Range(1U, 1024U));
  auto* exact = app.add_flag("--exact", c.exact, "Exact rational arithmetic");
  auto* floating = app.add_flag("--float", c.floating, "Floating-point arithmetic");
  exact->excludes(floating);
  app.add_flag("--fail-on-finding", c.fail_on_finding,
               "Exit 1 on infeasibility, violations or flagged anomalies");

  std::string family_path, config_path, csv_path, data_path, inequality = "bell";
  std::string grid = "4x4x8";
  std::vector<double> angles, settings, leggett_settings{0.0, 22.5};
  std::vector<std::string> combinations;
  bool chsh_mode = false;

  auto* check = app.add_subcommand("check", "Decide whether one joint distribution reproduces a family");
  check->add_option("--family", family_path, "Family CSV")->required();
  auto* quasi = app.add_subcommand("quasi", "Minimal-negativity signed joint for a family");
  quasi->add_option("--family", family_path, "Family CSV")->required();
  auto* predict = app.add_subcommand("predict", "Singlet predictions at the given angles");
  predict->add_option("--angles", angles, "Angles in degrees, comma separated")
      ->required()
      ->delimiter(',');
  predict->add_flag("--chsh", chsh_mode, "Four angles a,a',b,b': cross-station pairs only");
  auto* simulate = app.add_subcommand("simulate", "Run a simulation config");
  simulate->add_option("--config", config_path, "Simulation config (JSON)")->required();
  simulate->add_option("--csv", csv_path, "Also write pooled records as coincidence CSV");
  auto* analyze = app.add_subcommand("analyze", "Anomaly compensation analysis of coincidence data");
  analyze->add_option("--data", data_path, "Coincidence CSV")->required();
  analyze->add_option("--combination", combinations,
                      "Coefficients c_pp,c_pm,c_mp,c_mm of a linear combination (repeatable)");
  auto* legget = app.add_subcommand("legget", "Check the two-step vs joint average identity");
  legget->add_option("--grid", grid, "Largest grid UxVxL")->capture_default_str();
  legget->add_option("--settings", leggett_settings, "Settings a,b in degrees")->delimiter(',');
  auto* cross = app.add_subcommand("cross", "Assemble an inequality from per-context records");
  cross->add_option("--data", data_path, "Coincidence CSV")->required();
  cross->add_option("--inequality", inequality, "bell, wigner or chsh");
  cross->add_option("--settings", settings, "Setting angles in degrees")->delimiter(',');
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  if (args.size() > 1 && !args[1].empty() && args[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args[1];
    if (!known) {
      err << "error: unknown subcommand '" << args[1]
          << "' (expected check, quasi, predict, simulate, analyze, legget or cross)\n";
      return kExitInput;
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  const auto* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  json inputs = json::object();
  for (const auto& arg : args) inputs["argv"].push_back(arg);
  try {
    CommandResult o;
    if (command == "check") {
      o = cmd_check(c, family_path);
    } else if (command == "quasi") {
      o = cmd_quasi(c, family_path);
    } else if (command == "predict") {
      o = cmd_predict(c, angles, chsh_mode);
    } else if (command == "simulate") {
      o = cmd_simulate(c, config_path, csv_path);
    } else if (command == "analyze") {
      o = cmd_analyze(c, data_path, combinations);
    } else if (command == "legget") {
      o = cmd_legget(c, grid, leggett_settings);
    } else {
      o = cmd_cross(c, data_path, inequality, settings);
    }
    emit(c, command, inputs, o, out);
    return c.fail_on_finding && o.finding ? kExitFinding : kExitOk;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInput;
}

}  // namespace bellcompat
