#include "bellcompat/analysis.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace bellcompat {

namespace {

constexpr double kAngleMatch = 1e-9;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_angle(std::string_view field, const std::string& source, std::size_t line,
                   const char* column) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(source, line,
                     std::string(column) + " is not a number: '" + std::string(field) + "'");
  }
  return value;
}

std::uint64_t parse_count(std::string_view field, const std::string& source, std::size_t line,
                          const char* column) {
  if (!field.empty() && field.front() == '-') {
    double probe = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), probe);
    if (ec == std::errc() && ptr == field.data() + field.size()) {
      throw ParseError(source, line,
                       std::string(column) + " is negative: '" + std::string(field) + "'");
    }
  }
  std::uint64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(source, line,
                     std::string(column) + " is not a nonnegative integer: '" +
                         std::string(field) + "'");
  }
  return value;
}

bool same_angle(double x, double y) { return std::abs(x - y) <= kAngleMatch; }

std::string degrees_text(double radians) {
  std::ostringstream os;
  os << rad_to_deg(radians);
  return os.str();
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : InvalidInput(source + ":" + std::to_string(line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

std::vector<CoincidenceRecord> parse_coincidence_csv(std::istream& in, const std::string& source) {
  static const char* const kColumns[] = {"theta1_deg", "theta2_deg", "n_pp",
                                         "n_pm",       "n_mp",       "n_mm"};
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty file");
  ++line_no;
  if (trim(line) != kCoincidenceHeader) {
    throw ParseError(source, line_no,
                     "expected header '" + std::string(kCoincidenceHeader) + "', found '" +
                         std::string(trim(line)) + "'");
  }

  std::vector<CoincidenceRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      throw ParseError(source, line_no,
                       "expected 6 fields, found " + std::to_string(fields.size()));
    }
    CoincidenceRecord r;
    r.theta1 = deg_to_rad(parse_angle(fields[0], source, line_no, kColumns[0]));
    r.theta2 = deg_to_rad(parse_angle(fields[1], source, line_no, kColumns[1]));
    std::array<std::uint64_t, 4> counts{};
    for (std::size_t k = 0; k < 4; ++k) {
      counts[k] = parse_count(fields[2 + k], source, line_no, kColumns[2 + k]);
    }
    std::uint64_t total = 0;
    for (auto c : counts) {
      if (c > std::numeric_limits<std::uint64_t>::max() - total) {
        throw ParseError(source, line_no, "total count overflows 64 bits");
      }
      total += c;
    }
    if (total == 0) throw ParseError(source, line_no, "zero-total row: all counts are 0");
    r.n_pp = counts[0];
    r.n_pm = counts[1];
    r.n_mp = counts[2];
    r.n_mm = counts[3];
    records.push_back(r);
  }
  if (records.empty()) throw ParseError(source, line_no + 1, "no data rows after the header");
  return records;
}

std::vector<CoincidenceRecord> parse_coincidence_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return parse_coincidence_csv(in, path.string());
}

void write_coincidence_csv(std::ostream& out, const std::vector<CoincidenceRecord>& records) {
  out << kCoincidenceHeader << '\n';
  const auto precision = out.precision(12);
  for (const auto& r : records) {
    out << rad_to_deg(r.theta1) << ',' << rad_to_deg(r.theta2) << ',' << r.n_pp << ',' << r.n_pm
        << ',' << r.n_mp << ',' << r.n_mm << '\n';
  }
  out.precision(precision);
}

EmpiricalTable empirical_table(const CoincidenceRecord& record) {
  const std::uint64_t n = record.total();
  if (n == 0) throw InvalidInput("zero-total record: no coincidences to estimate from");
  const auto counts = record.counts();
  std::array<Rational, 4> cells;
  for (std::size_t k = 0; k < 4; ++k) {
    cells[k] = Rational(mpz_class(std::to_string(counts[k])), mpz_class(std::to_string(n)));
    cells[k].canonicalize();
  }
  EmpiricalTable out{PairwiseTable(0, 1, cells)};
  out.total = n;
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < 4; ++k) {
    out.p[k] = static_cast<double>(counts[k]) / nd;
    out.se[k] = std::sqrt(out.p[k] * (1.0 - out.p[k]) / nd);
  }
  out.correlation = out.p[kPP] - out.p[kPM] - out.p[kMP] + out.p[kMM];
  out.correlation_se = std::sqrt(std::max(0.0, 1.0 - out.correlation * out.correlation) / nd);
  return out;
}

std::vector<AnomalyReport> anomaly_analysis(const std::vector<CoincidenceRecord>& records,
                                            const AnomalyOptions& options) {
  std::vector<AnomalyReport> reports;
  reports.reserve(records.size());
  for (const auto& record : records) {
    const auto emp = empirical_table(record);
    AnomalyReport r;
    r.theta1 = record.theta1;
    r.theta2 = record.theta2;
    const double c = std::cos(record.theta1 - record.theta2);
    const double s = std::sin(record.theta1 - record.theta2);
    r.predicted = {0.5 * c * c, 0.5 * s * s, 0.5 * s * s, 0.5 * c * c};
    r.observed = emp.p;
    for (std::size_t k = 0; k < 4; ++k) r.deviation[k] = r.observed[k] - r.predicted[k];
    r.delta_e = emp.correlation - std::cos(2.0 * (record.theta1 - record.theta2));
    r.compensation_residual = r.deviation[kPP] - r.deviation[kPM] - r.deviation[kMP] +
                              r.deviation[kMM];

    const double nd = static_cast<double>(emp.total);
    const std::array<double, 2> plus = {r.observed[kPP] + r.observed[kPM],
                                        r.observed[kPP] + r.observed[kMP]};
    for (std::size_t side = 0; side < 2; ++side) {
      r.marginal_deviation[side] = plus[side] - 0.5;
      r.marginal_se[side] = std::sqrt(plus[side] * (1.0 - plus[side]) / nd);
      const double bound = std::max(options.tolerance, options.sigma_k * r.marginal_se[side]);
      if (std::abs(r.marginal_deviation[side]) > bound) r.flagged = true;
    }

    for (const auto& coeffs : options.combinations) {
      CombinationResult cr;
      cr.coefficients = coeffs;
      for (std::size_t k = 0; k < 4; ++k) {
        cr.experimental += coeffs[k] * r.observed[k];
        cr.predicted += coeffs[k] * r.predicted[k];
        cr.deviation += coeffs[k] * r.deviation[k];
      }
      r.combinations.push_back(cr);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

CrossInequality parse_cross_inequality(const std::string& name) {
  if (name == "bell") return CrossInequality::Bell;
  if (name == "wigner") return CrossInequality::Wigner;
  if (name == "chsh") return CrossInequality::Chsh;
  throw InvalidInput("unknown inequality '" + name + "' (expected bell, wigner or chsh)");
}

std::string to_string(CrossInequality inequality) {
  switch (inequality) {
    case CrossInequality::Bell: return "bell";
    case CrossInequality::Wigner: return "wigner";
    case CrossInequality::Chsh: return "chsh";
  }
  return "?";
}

std::size_t setting_count(CrossInequality inequality) {
  return inequality == CrossInequality::Chsh ? 4 : 3;
}

std::vector<std::pair<std::size_t, std::size_t>> required_contexts(CrossInequality inequality) {
  switch (inequality) {
    case CrossInequality::Bell: return {{0, 1}, {2, 1}, {0, 2}};
    case CrossInequality::Wigner: return {{0, 1}, {1, 2}, {0, 2}};
    case CrossInequality::Chsh: return {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
  }
  return {};
}

namespace {

const char* setting_name(CrossInequality inequality, std::size_t k) {
  static const char* const three[] = {"a", "b", "c"};
  static const char* const four[] = {"a", "a'", "b", "b'"};
  return inequality == CrossInequality::Chsh ? four[k] : three[k];
}

CrossContextEvaluation assemble(CrossInequality inequality, std::vector<double> settings,
                                std::vector<CoincidenceRecord> contexts,
                                const std::vector<bool>& transposed, double sigma_k) {
  if (!(sigma_k >= 0.0) || !std::isfinite(sigma_k)) {
    throw InvalidInput("sigma multiplier must be a finite nonnegative number");
  }
  const auto pairs = required_contexts(inequality);
  CrossContextEvaluation out;
  out.inequality = inequality;
  out.settings = std::move(settings);
  out.contexts = std::move(contexts);
  out.sigma_k = sigma_k;

  std::vector<EmpiricalTable> tables;
  for (std::size_t k = 0; k < out.contexts.size(); ++k) {
    try {
      tables.push_back(empirical_table(out.contexts[k]));
    } catch (const InvalidInput& e) {
      throw InvalidInput("context " + std::to_string(k) + ": " + e.what());
    }
  }

  auto pair_name = [&](std::size_t k) {
    return std::string(setting_name(inequality, pairs[k].first)) + "," +
           setting_name(inequality, pairs[k].second);
  };
  auto correlation = [&](std::size_t k) {
    ContextEstimate e{"E(" + pair_name(k) + ")", k, transposed[k], tables[k].correlation,
                      tables[k].correlation_se};
    out.estimates.push_back(e);
    return e.value;
  };
  // Cell of the required (first, second) orientation within the stored record.
  auto probability = [&](std::size_t k, bool first_plus, bool second_plus) {
    const std::size_t cell = transposed[k] ? cell_index(second_plus, first_plus)
                                           : cell_index(first_plus, second_plus);
    const auto& [x, y] = pairs[k];
    std::string q = std::string("P(") + setting_name(inequality, x) + "=" +
                    (first_plus ? "+" : "-") + "," + setting_name(inequality, y) + "=" +
                    (second_plus ? "+" : "-") + ")";
    ContextEstimate e{q, k, transposed[k], tables[k].p[cell], tables[k].se[cell]};
    out.estimates.push_back(e);
    return e.value;
  };

  switch (inequality) {
    case CrossInequality::Bell: {
      const double e_ab = correlation(0);
      const double e_cb = correlation(1);
      const double e_ac = correlation(2);
      out.report = bell_covariance(e_ab, e_cb, e_ac);
      break;
    }
    case CrossInequality::Wigner: {
      const double p_ab = probability(0, true, true);
      const double p_bc = probability(1, false, true);
      const double p_ac = probability(2, true, true);
      out.report = wigner(p_ab, p_bc, p_ac);
      break;
    }
    case CrossInequality::Chsh: {
      const double e0 = correlation(0);
      const double e1 = correlation(1);
      const double e2 = correlation(2);
      const double e3 = correlation(3);
      out.report = chsh(e0, e1, e2, e3);
      break;
    }
  }
  // Contexts are independent samples, each estimate enters with weight +-1.
  double var = 0.0;
  for (const auto& e : out.estimates) var += e.se * e.se;
  out.sigma = std::sqrt(var);
  out.violated = out.report.margin > sigma_k * out.sigma;
  return out;
}

}  // namespace

CrossContextEvaluation evaluate_cross_context(const std::vector<CoincidenceRecord>& records,
                                              CrossInequality inequality, double sigma_k) {
  const auto pairs = required_contexts(inequality);
  if (records.size() < pairs.size()) {
    std::ostringstream os;
    os << "missing context: " << to_string(inequality) << " needs " << pairs.size()
       << " contexts, got " << records.size();
    throw InvalidInput(os.str());
  }
  if (records.size() > pairs.size()) {
    std::ostringstream os;
    os << to_string(inequality) << " takes exactly " << pairs.size() << " contexts, got "
       << records.size() << "; pass --settings to select among them";
    throw InvalidInput(os.str());
  }
  std::vector<std::optional<double>> settings(setting_count(inequality));
  auto bind = [&](std::size_t slot, double angle, std::size_t k, const char* column) {
    if (!settings[slot]) {
      settings[slot] = angle;
    } else if (!same_angle(*settings[slot], angle)) {
      std::ostringstream os;
      os << "mismatched angle labels: context " << k << " has " << column << " = "
         << degrees_text(angle) << " deg but setting " << setting_name(inequality, slot)
         << " was already " << degrees_text(*settings[slot]) << " deg";
      throw InvalidInput(os.str());
    }
  };
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    bind(pairs[k].first, records[k].theta1, k, "theta1");
    bind(pairs[k].second, records[k].theta2, k, "theta2");
  }
  std::vector<double> resolved;
  for (const auto& s : settings) resolved.push_back(*s);
  return assemble(inequality, std::move(resolved), records,
                  std::vector<bool>(pairs.size(), false), sigma_k);
}

CrossContextEvaluation evaluate_cross_context(const std::vector<CoincidenceRecord>& records,
                                              CrossInequality inequality,
                                              const std::vector<double>& settings,
                                              double sigma_k) {
  if (settings.size() != setting_count(inequality)) {
    std::ostringstream os;
    os << to_string(inequality) << " needs " << setting_count(inequality) << " settings, got "
       << settings.size();
    throw InvalidInput(os.str());
  }
  const auto pairs = required_contexts(inequality);
  std::vector<CoincidenceRecord> chosen;
  std::vector<bool> transposed;
  for (const auto& [x, y] : pairs) {
    std::optional<std::size_t> match;
    bool flipped = false;
    for (std::size_t r = 0; r < records.size(); ++r) {
      const bool direct = same_angle(records[r].theta1, settings[x]) &&
                          same_angle(records[r].theta2, settings[y]);
      const bool reverse = same_angle(records[r].theta1, settings[y]) &&
                           same_angle(records[r].theta2, settings[x]);
      if (!direct && !reverse) continue;
      if (match) {
        std::ostringstream os;
        os << "context (" << setting_name(inequality, x) << "," << setting_name(inequality, y)
           << ") matches records " << *match << " and " << r << "; keep one record per context";
        throw InvalidInput(os.str());
      }
      match = r;
      flipped = !direct;
    }
    if (!match) {
      std::ostringstream os;
      os << "missing context (" << setting_name(inequality, x) << "," << setting_name(inequality, y)
         << ") = (" << degrees_text(settings[x]) << " deg, " << degrees_text(settings[y])
         << " deg)";
      throw InvalidInput(os.str());
    }
    chosen.push_back(records[*match]);
    transposed.push_back(flipped);
  }
  return assemble(inequality, settings, std::move(chosen), transposed, sigma_k);
}

}  // namespace bellcompat
