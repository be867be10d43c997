#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ivdep/matrix.hpp"
#include "ivdep/numeric.hpp"

namespace ivdep::lp {

enum class Sense { maximize, minimize };
enum class RowSense { less_equal, greater_equal, equal };
enum class Status { optimal, infeasible, unbounded };

std::string_view to_string(Status status);

/// A contiguous, named range of variables or rows (e.g. "q", "t", "y", "u").
struct Block {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// opt objective·x  s.t.  row_i·x (<=|>=|=) rhs_i,  lower <= x <= upper.
/// A missing bound is infinite.
template <class T>
struct Problem {
  Sense sense = Sense::maximize;
  std::vector<T> objective;
  Matrix<T> rows;
  std::vector<RowSense> row_sense;
  std::vector<T> rhs;
  std::vector<std::optional<T>> lower;
  std::vector<std::optional<T>> upper;
  std::vector<Block> variable_blocks;
  std::vector<Block> row_blocks;

  std::size_t num_variables() const { return objective.size(); }
  std::size_t num_rows() const { return rhs.size(); }

  /// Appends `count` variables sharing bounds and objective coefficient; returns the offset.
  std::size_t add_variables(std::string name, std::size_t count, std::optional<T> lo,
                            std::optional<T> hi, const T& cost = T{0});

  /// Rows must be added after all variables.
  void add_row(std::span<const T> coefficients, RowSense sense, const T& rhs_value);
  void begin_row_block(std::string name);

  const Block& variable_block(std::string_view name) const;
  const Block* find_variable_block(std::string_view name) const;
  const Block& row_block(std::string_view name) const;

  /// Throws Error(dimension_mismatch) when the arrays disagree.
  void validate() const;
};

template <class T>
struct Solution {
  Status status = Status::infeasible;
  T objective{0};
  std::vector<T> x;
  /// Lagrange multipliers of the rows: objective = Σ dual_i rhs_i + bound terms.
  /// For a maximization, <= rows carry duals >= 0; signs flip for minimization.
  std::vector<T> row_duals;
  std::size_t iterations = 0;

  bool optimal() const { return status == Status::optimal; }
};

template <class T>
std::span<const T> block_values(const Problem<T>& problem, const std::vector<T>& x,
                                std::string_view name) {
  const Block& b = problem.variable_block(name);
  return std::span<const T>(x).subspan(b.offset, b.size);
}

struct SolverOptions {
  std::size_t max_iterations = 2'000'000;
  /// Consecutive degenerate pivots tolerated under largest-coefficient pricing
  /// before switching to Bland's rule until the objective moves again.
  std::size_t degenerate_switch = 40;
};

/// Bounded-variable primal simplex (two phases) on a dense tableau.
/// In floating mode the returned point is re-verified; a point that fails
/// verification raises Error(numerical_failure) instead of a wrong status.
template <class T>
Solution<T> solve(const Problem<T>& problem, const SolverOptions& options = {});

/// Feasibility of an explicit assignment; `violated` names the first failing
/// row ("row 12") or bound ("lower 3"). Tolerance is exact for rationals.
template <class T>
struct FeasibilityReport {
  bool feasible = true;
  std::optional<std::size_t> violated_row;
  std::optional<std::size_t> violated_variable;
  std::string message;
  T objective{0};
  T max_violation{0};
};

template <class T>
FeasibilityReport<T> check_feasible(const Problem<T>& problem, std::span<const T> x,
                                    const T& tolerance = Num<T>::tolerance);

template <class T>
struct CertificateReport {
  FeasibilityReport<T> primal;
  FeasibilityReport<T> dual;
  T gap{0};
  bool ok = false;
  std::string message;
};

/// Confirms that `primal_x` and `dual_x` are feasible in their own programs and
/// that their objectives coincide (exactly, or within `gap_tolerance`).
template <class T>
CertificateReport<T> check_certificate(const Problem<T>& primal, std::span<const T> primal_x,
                                       const Problem<T>& dual, std::span<const T> dual_x,
                                       const T& gap_tolerance = Num<T>::tolerance);

/// Mechanical LP dual. Variables with bounds other than [0,inf) or free are
/// first turned into explicit rows. Dual variable j corresponds to row j of
/// the (extended) primal.
template <class T>
Problem<T> dualize(const Problem<T>& problem);

/// CPLEX LP text format. Layout: "\\" comment header, objective section named
/// "obj", rows "c<i>" in order, a Bounds section listing every variable,
/// variable names "<block>_<index>". Coefficients are printed as doubles with
/// 17 significant digits.
template <class T>
void write_lp_format(const Problem<T>& problem, std::ostream& out);

}  // namespace ivdep::lp
