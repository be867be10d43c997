#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivdep/numeric.hpp"
#include "ivdep/scenario.hpp"

namespace ivdep {

/// K_inst = [ACE] + constant + Σ obs·p(a,b|x) + Σ do·p(b|do(a)).
/// Valid instruments satisfy K_inst ≥ 0. Coefficients are integers for every
/// cataloged inequality and all of their relabelings.
struct InequalitySpec {
  std::string id;
  int x_card = 2;
  std::vector<long> obs_coeffs;   // cell_index(a, b, x)
  std::array<long, 4> do_coeffs{};  // a*2 + b
  long constant = 0;
  bool ace_term = false;

  long obs(int a, int b, int x) const { return obs_coeffs[cell_index(a, b, x)]; }
  bool has_do() const;
};

/// Relabeling of instrument values, treatment values and (per treatment
/// value) outcome values. Written as "/x<perm>/a/b<s0><s1>" in ids.
struct Relabeling {
  std::vector<int> x_perm;      // new x = x_perm[old x]
  int a_flip = 0;               // new a = a xor a_flip
  std::array<int, 2> b_flip{};  // new b = b xor b_flip[old a]

  static Relabeling identity(int x_card);
  bool is_identity() const;
  std::string suffix() const;
};

/// "pearl-00", "c1/x10/a/b11", ...
InequalitySpec inequality_by_id(std::string_view id);

/// Cataloged inequalities for this cardinality (empty for m_x outside 2..4).
std::vector<InequalitySpec> catalog(const Scenario& scenario);

/// Ids of every base inequality regardless of cardinality.
std::vector<std::string> catalog_ids();

/// Pushes coefficients forward so that
/// evaluate(relabel(spec, r), relabel(dist, r)) == evaluate(spec, dist).
/// Outcome flips that depend on the treatment value are rejected for ACE terms.
InequalitySpec relabel(const InequalitySpec& spec, const Relabeling& r);

template <class T>
ObservedDistribution<T> relabel(const ObservedDistribution<T>& dist, const Relabeling& r);
template <class T>
InterventionalDistribution<T> relabel(const InterventionalDistribution<T>& dist, const Relabeling& r);

/// |p(0|do(0)) − p(0|do(1))|, i.e. the max over (a, a', b) for binary A, B.
template <class T>
T ace(const InterventionalDistribution<T>& dist);

template <class T>
struct ViolationReport {
  T k_value{0};
  T alpha{0};
  bool violated = false;
};

/// Throws Error(invalid_argument) when do_dist is needed but absent and
/// Error(dimension_mismatch) on a cardinality mismatch.
template <class T>
ViolationReport<T> evaluate(const InequalitySpec& spec, const ObservedDistribution<T>& dist,
                            const std::optional<InterventionalDistribution<T>>& do_dist = std::nullopt);

/// A linear functional constant + obs·p(a,b|x) + do·p(b|do(a)).
struct LinearForm {
  std::vector<long> obs;
  std::array<long, 4> dos{};
  long constant = 0;
};

/// How the absolute value in ACE is removed.
///   nonneg:   p(0|do0) ≥ p(0|do1), ACE replaced by the difference D
///   nonpos:   p(0|do0) ≤ p(0|do1), ACE replaced by −D
///   combined: both linear pieces must be ≤ −α; no sign rows. Its feasible
///             set is the union of the two branches.
enum class AceBranch { nonneg, nonpos, combined };

std::string_view to_string(AceBranch branch);

/// Rows "form ≤ −α" and sign rows "form ≤ 0".
struct LinearSystem {
  std::vector<LinearForm> alpha_rows;
  std::vector<LinearForm> sign_rows;
};

LinearSystem linearize(const InequalitySpec& spec, AceBranch branch);

/// Branches to be solved separately: {nonneg, nonpos} with an ACE term, {nonneg} otherwise.
std::vector<AceBranch> branches(const InequalitySpec& spec);

}  // namespace ivdep
