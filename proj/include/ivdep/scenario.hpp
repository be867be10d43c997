#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ivdep/numeric.hpp"

namespace ivdep {

/// Instrumental scenario X -> A -> B with binary treatment and outcome.
/// Values are 0-based: x in [x_card], a, b in {0, 1}.
struct Scenario {
  static constexpr int a_card = 2;
  static constexpr int b_card = 2;
  int x_card = 2;

  /// Number of observable cells (a, b, x).
  std::size_t num_cells() const { return static_cast<std::size_t>(4 * x_card); }
  /// Throws Error(invalid_argument) unless x_card >= 2.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Flat index of the cell p(a,b|x): x-major, then a, then b.
constexpr std::size_t cell_index(int a, int b, int x) {
  return static_cast<std::size_t>(x * 4 + a * 2 + b);
}

/// p(a,b|x) together with the instrument marginal p(x).
template <class T>
struct ObservedDistribution {
  Scenario scenario;
  std::vector<T> p_x;
  std::vector<T> table;  // cell_index(a, b, x)

  const T& p(int a, int b, int x) const { return table[cell_index(a, b, x)]; }
  T& p(int a, int b, int x) { return table[cell_index(a, b, x)]; }

  static ObservedDistribution uniform(Scenario scenario);
};

/// p(b|do(a)), indexed [a][b].
template <class T>
struct InterventionalDistribution {
  std::array<std::array<T, 2>, 2> p_b_do_a{};

  const T& p(int b, int a) const { return p_b_do_a[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  T& p(int b, int a) { return p_b_do_a[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

template <class T>
ValidationReport validate_distribution(const ObservedDistribution<T>& dist);

template <class T>
ValidationReport validate_interventional(const InterventionalDistribution<T>& dist);

/// Parses the distribution document
///   {"scenario": {"x_card": m}, "p_x": [...], "p_ab_given_x": [[[..,..],[..,..]], ...]}
/// Entries may be JSON numbers or strings such as "1/3" or "0.25". In exact
/// mode JSON numbers are read through their shortest decimal form. With
/// `check` false only structure and dimensions are enforced.
template <class T>
ObservedDistribution<T> parse_distribution(std::string_view json_text, bool check = true);

/// Exact mode writes fraction strings; floating mode writes JSON numbers.
template <class T>
std::string serialize_distribution(const ObservedDistribution<T>& dist);

/// {"p_b_do_a": [[p(0|do 0), p(1|do 0)], [p(0|do 1), p(1|do 1)]]}
template <class T>
InterventionalDistribution<T> parse_interventional(std::string_view json_text);

template <class T>
std::string serialize_interventional(const InterventionalDistribution<T>& dist);

/// One observed (x, a, b) row.
struct Sample {
  int x = 0;
  int a = 0;
  int b = 0;
  friend bool operator==(const Sample&, const Sample&) = default;
};

using SampleSet = std::vector<Sample>;

/// CSV with header "x,a,b".
SampleSet parse_samples_csv(std::string_view text);
std::string samples_to_csv(const SampleSet& samples);
ValidationReport validate_samples(const SampleSet& samples, const Scenario& scenario);

enum class BetaEstimator {
  /// corr(X,B)/corr(X,A) with corr(U,V) = <UV>/(<U><V>).
  correlation_ratio,
  /// cov(X,B)/cov(X,A), the conventional Wald-type ratio.
  covariance_ratio,
};

/// Instrumental-variable estimate of the linear effect of A on B.
/// Throws Error(division_by_zero) when a denominator vanishes.
double iv_beta(const SampleSet& samples, BetaEstimator estimator = BetaEstimator::correlation_ratio);

}  // namespace ivdep
