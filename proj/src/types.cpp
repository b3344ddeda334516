#include "bellcompat/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace bellcompat {

PairwiseTable::PairwiseTable(std::size_t first, std::size_t second, std::array<Rational, 4> cells)
    : first_(first), second_(second), cells_(std::move(cells)) {
  for (auto& c : cells_) c.canonicalize();
}

PairwiseTable PairwiseTable::from_doubles(std::size_t first, std::size_t second,
                                          const std::array<double, 4>& cells) {
  std::array<Rational, 4> exact;
  for (std::size_t i = 0; i < 4; ++i) exact[i] = Rational(cells[i]);
  return PairwiseTable(first, second, std::move(exact));
}

std::array<double, 4> PairwiseTable::as_double() const {
  return {cells_[0].get_d(), cells_[1].get_d(), cells_[2].get_d(), cells_[3].get_d()};
}

PairwiseTable PairwiseTable::transposed() const {
  return PairwiseTable(second_, first_, {cells_[kPP], cells_[kMP], cells_[kPM], cells_[kMM]});
}

namespace {

std::string pair_text(std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

bool equal_within(const Rational& a, const Rational& b, Arithmetic mode, double tolerance) {
  if (mode == Arithmetic::Exact) return a == b;
  return std::abs(a.get_d() - b.get_d()) <= tolerance;
}

}  // namespace

ValidationReport validate_table(const PairwiseTable& table, Arithmetic mode, double tolerance) {
  ValidationReport report;
  const auto pair = std::make_pair(table.first(), table.second());
  if (table.first() == table.second()) {
    report.push_back({"distinct-pair", "table pairs a variable with itself", pair});
  }
  static constexpr const char* kNames[] = {"++", "+-", "-+", "--"};
  for (std::size_t c = 0; c < 4; ++c) {
    const bool negative = mode == Arithmetic::Exact ? table.cell(c) < 0
                                                    : table.cell(c).get_d() < -tolerance;
    if (negative) {
      report.push_back({"nonnegative-cell",
                        "cell " + std::string(kNames[c]) + " = " + to_string(table.cell(c)) +
                            " of pair " + pair_text(pair.first, pair.second),
                        pair});
    }
  }
  Rational sum = table.cell(0) + table.cell(1) + table.cell(2) + table.cell(3);
  if (!equal_within(sum, Rational(1), mode, tolerance)) {
    report.push_back({"normalization",
                      "cells of pair " + pair_text(pair.first, pair.second) + " sum to " +
                          std::to_string(sum.get_d()),
                      pair});
  }
  return report;
}

ValidationReport validate_family(const MarginalFamily& family, Arithmetic mode, double tolerance) {
  ValidationReport report;
  if (!family.labels.empty() && family.labels.size() != family.n) {
    report.push_back({"labels", "label count differs from variable count", std::nullopt});
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  // Per variable: the first table that fixed its single marginal.
  std::map<std::size_t, std::pair<Rational, std::pair<std::size_t, std::size_t>>> marginal;
  for (const auto& table : family.tables) {
    const auto pair = std::make_pair(table.first(), table.second());
    if (table.first() >= family.n || table.second() >= family.n) {
      report.push_back({"variable-range",
                        "pair " + pair_text(pair.first, pair.second) + " references a variable >= n",
                        pair});
      continue;
    }
    auto table_report = validate_table(table, mode, tolerance);
    report.insert(report.end(), table_report.begin(), table_report.end());
    const std::size_t lo = std::min(table.first(), table.second());
    const std::size_t hi = std::max(table.first(), table.second());
    if (!seen.insert({lo, hi}).second) {
      report.push_back({"one-table-per-pair", "duplicate table for pair " + pair_text(lo, hi),
                        pair});
    }
    const std::pair<std::size_t, Rational> singles[] = {{table.first(), table.first_plus()},
                                                        {table.second(), table.second_plus()}};
    for (const auto& [var, plus] : singles) {
      auto it = marginal.find(var);
      if (it == marginal.end()) {
        marginal.emplace(var, std::make_pair(plus, pair));
      } else if (!equal_within(it->second.first, plus, mode, tolerance)) {
        std::ostringstream os;
        os << "P(x" << var << "=+1) is " << it->second.first.get_d() << " in pair "
           << pair_text(it->second.second.first, it->second.second.second) << " but "
           << plus.get_d() << " in pair " << pair_text(pair.first, pair.second);
        report.push_back({"single-marginal-consistency", os.str(), pair});
      }
    }
  }
  return report;
}

double correlation_of(const PairwiseTable& table) {
  if (!validate_table(table).empty()) throw InvalidInput("correlation_of: invalid table");
  const auto p = table.as_double();
  return p[kPP] - p[kPM] - p[kMP] + p[kMM];
}

SignedJoint::SignedJoint(std::size_t n, std::vector<Rational> weights)
    : n_(n), weights_(std::move(weights)) {
  if (n_ >= 63 || weights_.size() != (std::size_t{1} << n_)) {
    throw InvalidInput("SignedJoint: weight vector must have 2^n entries");
  }
}

SignedJoint SignedJoint::point_mass(std::size_t n, std::uint64_t atom) {
  std::vector<Rational> w(std::size_t{1} << n);
  w.at(atom) = 1;
  return SignedJoint(n, std::move(w));
}

std::vector<double> SignedJoint::weights_double() const {
  std::vector<double> out;
  out.reserve(weights_.size());
  for (const auto& w : weights_) out.push_back(w.get_d());
  return out;
}

Rational SignedJoint::total() const {
  Rational s = 0;
  for (const auto& w : weights_) s += w;
  return s;
}

Rational SignedJoint::negativity() const {
  Rational s = 0;
  for (const auto& w : weights_) {
    if (w < 0) s -= w;
  }
  return s;
}

bool SignedJoint::nonnegative() const {
  for (const auto& w : weights_) {
    if (w < 0) return false;
  }
  return true;
}

PairwiseTable SignedJoint::pair_marginal(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_ || i == j) throw InvalidInput("pair_marginal: bad pair");
  std::array<Rational, 4> cells;
  for (std::uint64_t atom = 0; atom < weights_.size(); ++atom) {
    cells[cell_index(atom_plus(atom, i), atom_plus(atom, j))] += weights_[atom];
  }
  return PairwiseTable(i, j, std::move(cells));
}

MarginalFamily SignedJoint::all_pair_marginals() const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) pairs.emplace_back(i, j);
  return marginals_for(pairs);
}

MarginalFamily SignedJoint::marginals_for(
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const {
  MarginalFamily family;
  family.n = n_;
  for (auto [i, j] : pairs) family.tables.push_back(pair_marginal(i, j));
  return family;
}

std::uint64_t encode_atom(const std::vector<int>& signs) {
  std::uint64_t atom = 0;
  for (std::size_t k = 0; k < signs.size(); ++k) {
    if (signs[k] == 1) {
      atom |= std::uint64_t{1} << k;
    } else if (signs[k] != -1) {
      throw InvalidInput("encode_atom: signs must be +1 or -1");
    }
  }
  return atom;
}

std::vector<int> decode_atom(std::uint64_t atom, std::size_t n) {
  std::vector<int> signs(n);
  for (std::size_t k = 0; k < n; ++k) signs[k] = atom_plus(atom, k) ? 1 : -1;
  return signs;
}

double deg_to_rad(double degrees) { return degrees * std::numbers::pi / 180.0; }
double rad_to_deg(double radians) { return radians * 180.0 / std::numbers::pi; }

}  // namespace bellcompat
