#pragma once

#include <vector>

#include "ivdep/inequalities.hpp"
#include "ivdep/lp.hpp"
#include "ivdep/strategies.hpp"

namespace ivdep {

/// Rows of K·P: one entry per strategy, alpha rows first, then sign rows.
/// Observed coefficients act on p(a,b|x) = p(a,b,x)/p(x), so p_x needs full
/// support; the constant is folded in through Σq = 1.
template <class T>
Matrix<T> k_times_p(const ScenarioMatrices<T>& mats, const LinearSystem& system);

/// Primal dependence LP:
///   max −𝟙ᵀt  s.t.  Mq − t ≤ 0,  −Mq − t ≤ 0,  K·P·q ≤ −[α; 0],  Δq = p_x,  q ≥ 0.
/// Variable blocks "q", "t"; row blocks "dep_plus", "dep_minus", "alpha",
/// "sign", "marginal". The optimum is minus the minimal dependence.
template <class T>
lp::Problem<T> build_primal(const ScenarioMatrices<T>& mats, const InequalitySpec& spec, AceBranch branch,
                            const T& alpha);

/// Dual in the form
///   min −α𝟙ᵀu + p_xᵀz  s.t.  Mᵀy + (KP)ᵀ[u; v] + Δᵀz ≥ 0,  0 ≤ y ≤ 2,  u, v ≥ 0.
/// Variable blocks "y", "u", "v" (possibly empty), "z"; rows "columns".
template <class T>
lp::Problem<T> build_dual(const ScenarioMatrices<T>& mats, const InequalitySpec& spec, AceBranch branch,
                          const T& alpha);

/// Maps the row duals of an optimal build_primal solution to a point of
/// build_dual: y = 2·(duals of dep_plus), u, v, z read off directly. The shift
/// by 𝟙 is absorbed because Mᵀ𝟙 = 0.
template <class T>
std::vector<T> dual_point_from_primal(const lp::Problem<T>& primal, const lp::Solution<T>& solution);

/// max −K·P·q over q ≥ 0 with Δq = p_x and the sign rows; one alpha row only.
/// Variable block "q"; the optimum is the largest attainable violation.
template <class T>
lp::Problem<T> build_max_violation(const ScenarioMatrices<T>& mats, const InequalitySpec& spec, AceBranch branch);

/// ỹ_i = y_i − y_{i+n/2} for the binary-instrument dual.
template <class T>
std::vector<T> y_tilde(const std::vector<T>& y);

/// Explicit dual feasible point for pearl-00 at p_x = (p0, 1−p0), laid out for
/// build_dual(·, pearl-00, nonneg, α). Objective −4p0(1−p0)α.
std::vector<Rational> pearl_certificate(const Rational& p0);

/// Explicit dual feasible point for c1 (nonneg branch) at p_x = (p0, 1−p0).
/// Objective −4p0(1−p0)α/(2−p0).
std::vector<Rational> c1_certificate(const Rational& p0);

}  // namespace ivdep
