#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ivdep/inequalities.hpp"
#include "ivdep/lp.hpp"
#include "ivdep/programs.hpp"

namespace ivdep {

/// Largest violation α attainable by any latent model with instrument
/// marginal p_x (max over sign branches, clipped at 0).
template <class T>
T max_violation(const InequalitySpec& spec, const std::vector<T>& p_x);

/// Everything produced while solving one (spec, p_x, α) point.
template <class T>
struct DependencePoint {
  T alpha{0};
  T dependence{0};
  AceBranch branch = AceBranch::nonneg;
  lp::Problem<T> primal;
  lp::Solution<T> solution;
  lp::Problem<T> dual;
  std::vector<T> dual_point;  // y, u, v, z laid out as in build_dual
  lp::CertificateReport<T> certificate;

  std::vector<T> q() const;
};

/// Solves every sign branch and keeps the smallest dependence. Throws
/// Error(out_of_range) when α < 0 or no branch is feasible.
template <class T>
DependencePoint<T> solve_dependence(const InequalitySpec& spec, const std::vector<T>& p_x, const T& alpha,
                                    const std::optional<AceBranch>& only_branch = std::nullopt);

template <class T>
T min_dependence(const InequalitySpec& spec, const std::vector<T>& p_x, const T& alpha);

/// Piecewise linear M(α) on [0, alpha_max].
template <class T>
struct DependenceCurve {
  std::string id;
  std::vector<T> p_x;
  T alpha_max{0};
  std::vector<std::pair<T, T>> breakpoints;  // (α, M), starting at (0, 0)
  std::vector<T> slopes;                     // slopes[k] on [breakpoints[k], breakpoints[k+1]]
  std::size_t lp_solves = 0;

  /// Linear interpolation between breakpoints; α must lie in [0, alpha_max].
  T value(const T& alpha) const;
  /// Slope of the segment containing α (right segment at a breakpoint).
  T slope_at(const T& alpha) const;
  bool single_segment() const { return slopes.size() == 1; }
};

/// Value and dual tangent of the single LP whose feasible set is the union of
/// the sign branches. The tangent ℓ(α') = slope·α' + intercept satisfies
/// ℓ ≤ M everywhere and ℓ(α) = M(α).
template <class T>
struct Tangent {
  T alpha{0};
  T value{0};
  T slope{0};
  T intercept{0};
};

template <class T>
Tangent<T> dependence_tangent(const InequalitySpec& spec, const std::vector<T>& p_x, const T& alpha);

/// Three-point test first (0, α_max/2, α_max); if the middle point is off the
/// chord, segments are found by intersecting dual tangents until every piece
/// is certified.
template <class T>
DependenceCurve<T> dependence_curve(const InequalitySpec& spec, const std::vector<T>& p_x);

/// CSV "alpha,dependence,segment_slope" on an even grid of `grid_points`
/// merged with the breakpoints.
template <class T>
std::string curve_csv(const DependenceCurve<T>& curve, std::size_t grid_points = 50);

/// K_inst + M/u ≥ 0 with u the first-segment slope.
template <class T>
struct AdaptedInequality {
  InequalitySpec base;
  std::vector<T> p_x;
  T slope{0};
  T dependence_level{0};
  T threshold{0};  // K_inst ≥ threshold = −M/u

  /// e.g. "1 - p(0,0|0) - p(0,1|1) >= -1/10"
  std::string statement() const;
};

template <class T>
AdaptedInequality<T> adapted_bound(const InequalitySpec& spec, const std::vector<T>& p_x, const T& dependence_level);

enum class BinaryKind { pearl, c1 };

/// 4p0p1α for pearl, 4p0p1α/(2−p0) for c1. p_x must have two entries.
template <class T>
T closed_form_binary(BinaryKind kind, const std::vector<T>& p_x, const T& alpha);

}  // namespace ivdep
