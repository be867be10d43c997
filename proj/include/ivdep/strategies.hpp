#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ivdep/matrix.hpp"
#include "ivdep/numeric.hpp"
#include "ivdep/scenario.hpp"

namespace ivdep {

/// One deterministic latent assignment (λx, λa, λb).
///
/// Ordering is most-significant-first: f(x) is bit (m_x−1−x) of lambda_a and
/// g(a) is bit (1−a) of lambda_b, so lambda_b = 0,1,2,3 are the tables
/// (g(0),g(1)) = (0,0), (0,1), (1,0), (1,1).
struct DeterministicStrategy {
  int lambda_x = 0;
  int lambda_a = 0;
  int lambda_b = 0;
  std::vector<int> f;    // f[x]
  std::array<int, 2> g{};  // g[a]
};

/// Number of strategies m_x·2^{m_x}·4.
std::size_t num_strategies(const Scenario& scenario);

/// Index of (λx, λa, λb): (λx·2^{m_x} + λa)·4 + λb.
std::size_t strategy_index(const Scenario& scenario, int lambda_x, int lambda_a, int lambda_b);

/// λx slowest, then λa, then λb; position i has strategy_index i.
std::vector<DeterministicStrategy> enumerate_strategies(const Scenario& scenario);

/// q over strategies, in enumerate_strategies order.
template <class T>
struct LatentJoint {
  Scenario scenario;
  std::vector<T> q;
};

/// Requires q ≥ 0 and Σq = 1 (within tolerance in floating mode).
template <class T>
ValidationReport validate_latent(const LatentJoint<T>& joint);

/// {"x_card": m, "q": [...]}
template <class T>
LatentJoint<T> parse_latent(std::string_view json_text);
template <class T>
std::string serialize_latent(const LatentJoint<T>& joint);

/// Matrices of the dependence LP. Observed rows of P are cell_index(a,b,x);
/// with_do appends four rows indexed a*2+b encoding δ_{b,g(a)}.
template <class T>
struct ScenarioMatrices {
  Scenario scenario;
  std::vector<T> p_x;
  bool with_do = false;
  Matrix<T> M;
  Matrix<T> P;
  Matrix<T> Delta;

  std::size_t num_observed_rows() const { return scenario.num_cells(); }
  static constexpr std::size_t do_row(int a, int b) { return static_cast<std::size_t>(a * 2 + b); }
};

template <class T>
ScenarioMatrices<T> build_matrices(const Scenario& scenario, const std::vector<T>& p_x, bool with_do);

/// p(a,b|x) and p_x = Δq. Throws Error(division_by_zero) if some p(x) = 0.
template <class T>
ObservedDistribution<T> forward_distribution(const LatentJoint<T>& joint);

template <class T>
InterventionalDistribution<T> interventional(const LatentJoint<T>& joint);

/// Σ_{x,λa,λb} |q(x,λa,λb) − p(x)·q(λa,λb)| evaluated directly.
template <class T>
T dependence_measure(const LatentJoint<T>& joint);

/// ‖M·q‖₁ with M built from the λx-marginal of q.
template <class T>
T dependence_measure_via_matrix(const LatentJoint<T>& joint);

/// p_x ⊗ r.
template <class T>
LatentJoint<T> product_joint(const Scenario& scenario, const std::vector<T>& p_x, const std::vector<T>& r);

}  // namespace ivdep
