#include <cmath>
#include <iomanip>
#include <sstream>

#include "ivdep/error.hpp"
#include "ivdep/lp.hpp"

namespace ivdep::lp {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "unknown";
}

template <class T>
std::size_t Problem<T>::add_variables(std::string name, std::size_t count, std::optional<T> lo,
                                      std::optional<T> hi, const T& cost) {
  if (num_rows() != 0) {
    throw Error(ErrorCode::invalid_argument, "variables must be added before rows");
  }
  const std::size_t offset = objective.size();
  variable_blocks.push_back(Block{std::move(name), offset, count});
  objective.insert(objective.end(), count, cost);
  lower.insert(lower.end(), count, lo);
  upper.insert(upper.end(), count, hi);
  return offset;
}

template <class T>
void Problem<T>::begin_row_block(std::string name) {
  row_blocks.push_back(Block{std::move(name), num_rows(), 0});
}

template <class T>
void Problem<T>::add_row(std::span<const T> coefficients, RowSense sense, const T& rhs_value) {
  if (coefficients.size() != num_variables()) {
    throw Error(ErrorCode::dimension_mismatch, "row length does not match variable count");
  }
  if (rows.rows() == 0 && rows.cols() == 0) rows = Matrix<T>(0, num_variables());
  rows.append_row(coefficients);
  row_sense.push_back(sense);
  rhs.push_back(rhs_value);
  if (!row_blocks.empty()) row_blocks.back().size += 1;
}

template <class T>
const Block* Problem<T>::find_variable_block(std::string_view name) const {
  for (const auto& b : variable_blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

template <class T>
const Block& Problem<T>::variable_block(std::string_view name) const {
  if (const Block* b = find_variable_block(name)) return *b;
  throw Error(ErrorCode::invalid_argument, "no variable block '" + std::string(name) + "'");
}

template <class T>
const Block& Problem<T>::row_block(std::string_view name) const {
  for (const auto& b : row_blocks) {
    if (b.name == name) return b;
  }
  throw Error(ErrorCode::invalid_argument, "no row block '" + std::string(name) + "'");
}

template <class T>
void Problem<T>::validate() const {
  const std::size_t n = objective.size();
  const std::size_t m = rhs.size();
  const bool rows_ok = (m == 0) ? (rows.rows() == 0) : (rows.rows() == m && rows.cols() == n);
  if (!rows_ok || row_sense.size() != m || lower.size() != n || upper.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "inconsistent LP dimensions");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (lower[j] && upper[j] && *upper[j] < *lower[j]) {
      throw Error(ErrorCode::invalid_argument, "variable " + std::to_string(j) + " has empty bounds");
    }
  }
}

template <class T>
FeasibilityReport<T> check_feasible(const Problem<T>& problem, std::span<const T> x,
                                    const T& tolerance) {
  FeasibilityReport<T> report;
  problem.validate();
  if (x.size() != problem.num_variables()) {
    throw Error(ErrorCode::dimension_mismatch, "assignment length does not match variable count");
  }
  auto note = [&](const T& excess, std::optional<std::size_t> row, std::optional<std::size_t> var,
                  const std::string& what) {
    if (excess > report.max_violation) report.max_violation = excess;
    if (excess > tolerance && report.feasible) {
      report.feasible = false;
      report.violated_row = row;
      report.violated_variable = var;
      report.message = what;
    }
  };
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (problem.lower[j]) note(T(*problem.lower[j] - x[j]), std::nullopt, j, "lower bound of variable " + std::to_string(j));
    if (problem.upper[j]) note(T(x[j] - *problem.upper[j]), std::nullopt, j, "upper bound of variable " + std::to_string(j));
  }
  const std::vector<T> lhs = problem.rows.multiply(x);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const T diff = lhs[i] - problem.rhs[i];
    const std::string what = "row " + std::to_string(i);
    switch (problem.row_sense[i]) {
      case RowSense::less_equal: note(diff, i, std::nullopt, what); break;
      case RowSense::greater_equal: note(T(-diff), i, std::nullopt, what); break;
      case RowSense::equal: note(Num<T>::abs(diff), i, std::nullopt, what); break;
    }
  }
  T obj{0};
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (problem.objective[j] != 0) obj += problem.objective[j] * x[j];
  }
  report.objective = obj;
  return report;
}

template <class T>
CertificateReport<T> check_certificate(const Problem<T>& primal, std::span<const T> primal_x,
                                       const Problem<T>& dual, std::span<const T> dual_x,
                                       const T& gap_tolerance) {
  CertificateReport<T> report;
  const T feas_tol = std::is_same_v<T, double> ? T(1e-9) : T(0);
  report.primal = check_feasible(primal, primal_x, feas_tol);
  report.dual = check_feasible(dual, dual_x, feas_tol);
  report.gap = Num<T>::abs(T(report.primal.objective - report.dual.objective));
  const bool gap_ok = report.gap <= gap_tolerance;
  report.ok = report.primal.feasible && report.dual.feasible && gap_ok;
  std::ostringstream msg;
  if (!report.primal.feasible) msg << "primal infeasible at " << report.primal.message << "; ";
  if (!report.dual.feasible) msg << "dual infeasible at " << report.dual.message << "; ";
  if (!gap_ok) msg << "duality gap " << Num<T>::str(report.gap);
  if (report.ok) msg << "certificate verified";
  report.message = msg.str();
  return report;
}

template <class T>
Problem<T> dualize(const Problem<T>& input) {
  input.validate();
  const std::size_t n = input.num_variables();
  const bool maximize = input.sense == Sense::maximize;

  // Bring every variable to either x >= 0 or free, moving other bounds to rows.
  std::vector<std::vector<T>> rows;
  std::vector<RowSense> senses;
  std::vector<T> rhs;
  for (std::size_t i = 0; i < input.num_rows(); ++i) {
    auto r = input.rows.row(i);
    rows.emplace_back(r.begin(), r.end());
    senses.push_back(input.row_sense[i]);
    rhs.push_back(input.rhs[i]);
  }
  std::vector<bool> nonneg(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const bool zero_lower = input.lower[j] && *input.lower[j] == 0;
    if (zero_lower) {
      nonneg[j] = true;
    } else if (input.lower[j]) {
      std::vector<T> row(n, T{0});
      row[j] = T{1};
      rows.push_back(row);
      senses.push_back(RowSense::greater_equal);
      rhs.push_back(*input.lower[j]);
    }
    if (input.upper[j]) {
      std::vector<T> row(n, T{0});
      row[j] = T{1};
      rows.push_back(row);
      senses.push_back(RowSense::less_equal);
      rhs.push_back(*input.upper[j]);
    }
  }

  // max c.x, rows (<=: pi>=0, >=: pi<=0, =: free)  ->  min b.pi, A^T pi (>= c | = c)
  // min c.x, rows (<=: pi<=0, >=: pi>=0, =: free)  ->  max b.pi, A^T pi (<= c | = c)
  Problem<T> dual;
  dual.sense = maximize ? Sense::minimize : Sense::maximize;
  const std::size_t m = rows.size();
  dual.variable_blocks.push_back(Block{"pi", 0, m});
  for (std::size_t i = 0; i < m; ++i) {
    dual.objective.push_back(rhs[i]);
    std::optional<T> lo, hi;
    const bool le = senses[i] == RowSense::less_equal;
    const bool ge = senses[i] == RowSense::greater_equal;
    if ((maximize && le) || (!maximize && ge)) lo = T{0};
    if ((maximize && ge) || (!maximize && le)) hi = T{0};
    dual.lower.push_back(lo);
    dual.upper.push_back(hi);
  }
  dual.begin_row_block("columns");
  std::vector<T> coeff(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) coeff[i] = rows[i][j];
    RowSense s = RowSense::equal;
    if (nonneg[j]) s = maximize ? RowSense::greater_equal : RowSense::less_equal;
    dual.add_row(coeff, s, input.objective[j]);
  }
  return dual;
}

namespace {

template <class T>
std::string lp_number(const T& v) {
  std::ostringstream os;
  os << std::setprecision(17) << Num<T>::to_double(v);
  return os.str();
}

template <class T>
std::vector<std::string> variable_names(const Problem<T>& problem) {
  std::vector<std::string> names(problem.num_variables());
  for (std::size_t j = 0; j < names.size(); ++j) names[j] = "x_" + std::to_string(j);
  for (const auto& b : problem.variable_blocks) {
    for (std::size_t k = 0; k < b.size; ++k) names[b.offset + k] = b.name + "_" + std::to_string(k);
  }
  return names;
}

template <class T>
void write_linear(std::ostream& out, std::span<const T> coeff, const std::vector<std::string>& names) {
  bool first = true;
  for (std::size_t j = 0; j < coeff.size(); ++j) {
    if (coeff[j] == 0) continue;
    const double v = Num<T>::to_double(coeff[j]);
    out << (v < 0 ? " - " : (first ? " " : " + ")) << lp_number(Num<T>::abs(coeff[j])) << ' '
        << names[j];
    first = false;
  }
  if (first) out << " 0 " << (names.empty() ? std::string("x_0") : names[0]);
}

}  // namespace

template <class T>
void write_lp_format(const Problem<T>& problem, std::ostream& out) {
  problem.validate();
  const auto names = variable_names(problem);
  out << "\\ ivdep linear program: " << problem.num_variables() << " variables, "
      << problem.num_rows() << " rows\n";
  out << (problem.sense == Sense::maximize ? "Maximize\n" : "Minimize\n");
  out << " obj:";
  write_linear<T>(out, problem.objective, names);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    out << " c" << i << ':';
    write_linear<T>(out, problem.rows.row(i), names);
    switch (problem.row_sense[i]) {
      case RowSense::less_equal: out << " <= "; break;
      case RowSense::greater_equal: out << " >= "; break;
      case RowSense::equal: out << " = "; break;
    }
    out << lp_number(problem.rhs[i]) << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < problem.num_variables(); ++j) {
    const auto& lo = problem.lower[j];
    const auto& hi = problem.upper[j];
    if (!lo && !hi) {
      out << ' ' << names[j] << " free\n";
    } else {
      out << ' ' << (lo ? lp_number(*lo) : std::string("-inf")) << " <= " << names[j] << " <= "
          << (hi ? lp_number(*hi) : std::string("+inf")) << '\n';
    }
  }
  out << "End\n";
}

#define IVDEP_INSTANTIATE_LP(T)                                                                   \
  template struct Problem<T>;                                                                     \
  template FeasibilityReport<T> check_feasible(const Problem<T>&, std::span<const T>, const T&); \
  template CertificateReport<T> check_certificate(const Problem<T>&, std::span<const T>,          \
                                                  const Problem<T>&, std::span<const T>,          \
                                                  const T&);                                      \
  template Problem<T> dualize(const Problem<T>&);                                                 \
  template void write_lp_format(const Problem<T>&, std::ostream&);

IVDEP_INSTANTIATE_LP(double)
IVDEP_INSTANTIATE_LP(Rational)

}  // namespace ivdep::lp
