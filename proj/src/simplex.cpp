#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ivdep/error.hpp"
#include "ivdep/lp.hpp"

namespace ivdep::lp {

namespace {

template <class T>
struct Tol;

template <>
struct Tol<double> {
  static constexpr double cost = 1e-10;
  static constexpr double pivot = 1e-10;
  static constexpr double drop = 1e-14;
  static constexpr double feasibility = 1e-9;
  static bool positive(double v, double tol) { return v > tol; }
  static bool negative(double v, double tol) { return v < -tol; }
  static bool nonzero(double v, double tol) { return std::fabs(v) > tol; }
  static double magnitude(double v) { return std::fabs(v); }
};

template <>
struct Tol<Rational> {
  static inline const Rational cost{0};
  static inline const Rational pivot{0};
  static inline const Rational drop{0};
  static inline const Rational feasibility{0};
  static bool positive(const Rational& v, const Rational&) { return sgn(v) > 0; }
  static bool negative(const Rational& v, const Rational&) { return sgn(v) < 0; }
  static bool nonzero(const Rational& v, const Rational&) { return sgn(v) != 0; }
  static double magnitude(const Rational& v) { return std::fabs(v.get_d()); }
};

enum class ColumnKind { structural, slack, artificial };

// Column layout: [0, n) structural, then one slack per inequality row, then
// one artificial per row that needs one. Every stored row has a basic
// variable with coefficient +1.
template <class T>
class TableauSimplex {
 public:
  TableauSimplex(const Problem<T>& problem, const SolverOptions& options)
      : problem_(problem), options_(options) {
    setup();
  }

  Solution<T> run() {
    Solution<T> result;
    // Phase 1: maximize -(sum of artificials).
    std::vector<T> phase1(ncols_, T{0});
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (kind_[j] == ColumnKind::artificial) phase1[j] = T{-1};
    }
    set_costs(phase1);
    if (iterate() != Status::optimal) {
      throw Error(ErrorCode::numerical_failure, "phase 1 reported unbounded");
    }
    T infeasibility{0};
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (kind_[j] == ColumnKind::artificial) infeasibility += value_of(j);
    }
    result.iterations = iterations_;
    if (Tol<T>::positive(infeasibility, Tol<T>::feasibility)) {
      result.status = Status::infeasible;
      return result;
    }
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (kind_[j] == ColumnKind::artificial) {
        upper_[j] = T{0};
        if (row_of_[j] < 0) value_[j] = T{0};
      }
    }
    drive_out_artificials();

    // Phase 2.
    std::vector<T> phase2(ncols_, T{0});
    const bool minimize = problem_.sense == Sense::minimize;
    for (std::size_t j = 0; j < n_; ++j) {
      phase2[j] = minimize ? T(-problem_.objective[j]) : problem_.objective[j];
    }
    set_costs(phase2);
    const Status status = iterate();
    result.iterations = iterations_;
    result.status = status;
    if (status != Status::optimal) return result;

    result.x.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) result.x[j] = value_of(j);
    T obj{0};
    for (std::size_t j = 0; j < n_; ++j) {
      if (problem_.objective[j] != 0) obj += problem_.objective[j] * result.x[j];
    }
    result.objective = obj;

    result.row_duals.assign(m_, T{0});
    for (std::size_t i = 0; i < m_; ++i) {
      T pi;
      if (art_col_[i] >= 0) {
        pi = T(-row_sign_[i] * d_[static_cast<std::size_t>(art_col_[i])]);
      } else {
        const std::size_t s = static_cast<std::size_t>(slack_col_[i]);
        pi = T(-slack_coef_[i] * d_[s]);
      }
      if constexpr (std::is_same_v<T, double>) {
        if (pi == 0.0) pi = 0.0;  // no negative zeros in output
      }
      result.row_duals[i] = minimize ? T(-pi) : pi;
    }
    return result;
  }

 private:
  void setup() {
    problem_.validate();
    n_ = problem_.num_variables();
    m_ = problem_.num_rows();

    std::size_t nslack = 0;
    for (auto s : problem_.row_sense) {
      if (s != RowSense::equal) ++nslack;
    }
    // Initial nonbasic values of structurals.
    std::vector<T> x0(n_, T{0});
    for (std::size_t j = 0; j < n_; ++j) {
      if (problem_.lower[j]) {
        x0[j] = *problem_.lower[j];
      } else if (problem_.upper[j]) {
        x0[j] = *problem_.upper[j];
      }
    }
    std::vector<T> residual(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      T acc = problem_.rhs[i];
      auto row = problem_.rows.row(i);
      for (std::size_t j = 0; j < n_; ++j) {
        if (row[j] != 0 && x0[j] != 0) acc -= row[j] * x0[j];
      }
      residual[i] = acc;
    }

    row_sign_.assign(m_, 1);
    slack_coef_.assign(m_, 0);
    slack_col_.assign(m_, -1);
    art_col_.assign(m_, -1);
    std::size_t nart = 0;
    std::vector<bool> needs_art(m_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      const bool neg = Tol<T>::negative(residual[i], Tol<T>::drop) ;
      switch (problem_.row_sense[i]) {
        case RowSense::less_equal:
          slack_coef_[i] = 1;
          if (neg) {
            row_sign_[i] = -1;
            needs_art[i] = true;
          }
          break;
        case RowSense::greater_equal:
          slack_coef_[i] = -1;
          if (Tol<T>::positive(residual[i], Tol<T>::drop)) {
            needs_art[i] = true;
          } else {
            row_sign_[i] = -1;
          }
          break;
        case RowSense::equal:
          if (neg) row_sign_[i] = -1;
          needs_art[i] = true;
          break;
      }
      if (needs_art[i]) ++nart;
    }

    ncols_ = n_ + nslack + nart;
    tab_.assign(m_ * ncols_, T{0});
    kind_.assign(ncols_, ColumnKind::structural);
    lower_.assign(ncols_, std::nullopt);
    upper_.assign(ncols_, std::nullopt);
    value_.assign(ncols_, T{0});
    row_of_.assign(ncols_, -1);
    basis_.assign(m_, 0);
    beta_.assign(m_, T{0});

    for (std::size_t j = 0; j < n_; ++j) {
      lower_[j] = problem_.lower[j];
      upper_[j] = problem_.upper[j];
      value_[j] = x0[j];
    }
    std::size_t next = n_;
    for (std::size_t i = 0; i < m_; ++i) {
      auto src = problem_.rows.row(i);
      T* dst = &tab_[i * ncols_];
      const int rs = row_sign_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        if (src[j] != 0) dst[j] = rs > 0 ? src[j] : T(-src[j]);
      }
      if (slack_coef_[i] != 0) {
        const std::size_t s = next++;
        slack_col_[i] = static_cast<int>(s);
        kind_[s] = ColumnKind::slack;
        lower_[s] = T{0};
        dst[s] = T(rs * slack_coef_[i]);
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const T r = row_sign_[i] > 0 ? residual[i] : T(-residual[i]);
      if (needs_art[i]) {
        const std::size_t a = next++;
        art_col_[i] = static_cast<int>(a);
        kind_[a] = ColumnKind::artificial;
        lower_[a] = T{0};
        tab_[i * ncols_ + a] = T{1};
        make_basic(i, a, Tol<T>::negative(r, Tol<T>::drop) ? T{0} : r);
      } else {
        const std::size_t s = static_cast<std::size_t>(slack_col_[i]);
        make_basic(i, s, Tol<T>::negative(r, Tol<T>::drop) ? T{0} : r);
      }
    }
  }

  void make_basic(std::size_t row, std::size_t col, const T& v) {
    basis_[row] = col;
    row_of_[col] = static_cast<int>(row);
    beta_[row] = v;
  }

  T value_of(std::size_t j) const {
    return row_of_[j] >= 0 ? beta_[static_cast<std::size_t>(row_of_[j])] : value_[j];
  }

  void set_costs(const std::vector<T>& cost) {
    cost_ = cost;
    d_ = cost;
    for (std::size_t i = 0; i < m_; ++i) {
      const T& cb = cost_[basis_[i]];
      if (cb == 0) continue;
      const T* row = &tab_[i * ncols_];
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (row[j] != 0) d_[j] -= cb * row[j];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = T{0};
    degenerate_run_ = 0;
  }

  bool is_fixed(std::size_t j) const {
    return lower_[j] && upper_[j] && *lower_[j] == *upper_[j];
  }

  // +1: may increase, -1: may decrease, 0: not eligible.
  int direction(std::size_t j) const {
    if (row_of_[j] >= 0 || is_fixed(j)) return 0;
    const T& dj = d_[j];
    if (Tol<T>::positive(dj, Tol<T>::cost)) {
      if (!upper_[j] || value_[j] != *upper_[j]) return 1;
    } else if (Tol<T>::negative(dj, Tol<T>::cost)) {
      if (!lower_[j] || value_[j] != *lower_[j]) return -1;
    }
    return 0;
  }

  Status iterate() {
    for (;;) {
      if (iterations_ >= options_.max_iterations) {
        throw Error(ErrorCode::numerical_failure, "simplex iteration limit reached");
      }
      const bool bland = degenerate_run_ >= options_.degenerate_switch;
      std::size_t enter = ncols_;
      int dir = 0;
      double best = 0.0;
      for (std::size_t j = 0; j < ncols_; ++j) {
        const int dj = direction(j);
        if (dj == 0) continue;
        if (bland) {
          enter = j;
          dir = dj;
          break;
        }
        const double mag = Tol<T>::magnitude(d_[j]);
        if (enter == ncols_ || mag > best) {
          enter = j;
          dir = dj;
          best = mag;
        }
      }
      if (enter == ncols_) return Status::optimal;
      ++iterations_;

      // Ratio test: x_B(i) changes by -T(i,enter) * dir * theta. First pass
      // finds the step, second pass picks the leaving row among (near-)ties:
      // smallest basic index under Bland, largest pivot otherwise.
      limits_.assign(m_, std::nullopt);
      std::optional<T> theta;
      for (std::size_t i = 0; i < m_; ++i) {
        const T& tij = tab_[i * ncols_ + enter];
        if (!Tol<T>::nonzero(tij, Tol<T>::pivot)) continue;
        const std::size_t b = basis_[i];
        const bool increasing = (dir > 0) == Tol<T>::negative(tij, T{0});
        T limit;
        if (increasing) {
          if (!upper_[b]) continue;
          limit = (*upper_[b] - beta_[i]) / Num<T>::abs(tij);
        } else {
          if (!lower_[b]) continue;
          limit = (beta_[i] - *lower_[b]) / Num<T>::abs(tij);
        }
        if (Tol<T>::negative(limit, T{0})) limit = T{0};
        if (!theta || limit < *theta) theta = limit;
        limits_[i] = std::move(limit);
      }
      std::size_t leave_row = m_;
      if (theta) {
        double leave_pivot = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          if (!limits_[i]) continue;
          if (Tol<T>::positive(T(*limits_[i] - *theta), Tol<T>::drop)) continue;
          const double mag = Tol<T>::magnitude(tab_[i * ncols_ + enter]);
          bool take = leave_row == m_;
          if (!take) take = bland ? basis_[i] < basis_[leave_row] : mag > leave_pivot;
          if (take) {
            leave_row = i;
            leave_pivot = mag;
          }
        }
      }
      const bool leave_to_upper =
          leave_row < m_ && (dir > 0) == Tol<T>::negative(tab_[leave_row * ncols_ + enter], T{0});

      std::optional<T> flip;
      if (dir > 0 && upper_[enter]) flip = *upper_[enter] - value_[enter];
      if (dir < 0 && lower_[enter]) flip = value_[enter] - *lower_[enter];

      if (!theta && !flip) return Status::unbounded;

      if (flip && (!theta || *flip <= *theta)) {
        // Bound flip: no basis change.
        const T step = dir > 0 ? *flip : T(-*flip);
        apply_step(enter, step);
        value_[enter] = dir > 0 ? *upper_[enter] : *lower_[enter];
        note_progress(*flip);
        continue;
      }

      const T step = dir > 0 ? *theta : T(-*theta);
      apply_step(enter, step);
      const std::size_t leaving = basis_[leave_row];
      const T entering_value = value_[enter] + step;
      value_[leaving] = leave_to_upper ? *upper_[leaving] : *lower_[leaving];
      pivot(leave_row, enter);
      row_of_[leaving] = -1;
      make_basic(leave_row, enter, entering_value);
      note_progress(*theta);
    }
  }

  void note_progress(const T& step) {
    if (Tol<T>::positive(step, Tol<T>::drop)) {
      degenerate_run_ = 0;
    } else {
      ++degenerate_run_;
    }
  }

  // Moves nonbasic column `col` by `step`, updating basic values.
  void apply_step(std::size_t col, const T& step) {
    if (step == 0) return;
    for (std::size_t i = 0; i < m_; ++i) {
      const T& tij = tab_[i * ncols_ + col];
      if (tij != 0) beta_[i] -= tij * step;
    }
  }

  void pivot(std::size_t r, std::size_t s) {
    T* prow = &tab_[r * ncols_];
    const T piv = prow[s];
    nz_.clear();
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (prow[j] != 0) {
        prow[j] /= piv;
        nz_.push_back(j);
      }
    }
    prow[s] = T{1};
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      T* row = &tab_[i * ncols_];
      if (row[s] == 0) continue;
      const T factor = row[s];
      for (std::size_t j : nz_) {
        row[j] -= factor * prow[j];
        if constexpr (std::is_same_v<T, double>) {
          if (std::fabs(row[j]) < Tol<double>::drop) row[j] = 0.0;
        }
      }
      row[s] = T{0};
    }
    if (d_[s] != 0) {
      const T factor = d_[s];
      for (std::size_t j : nz_) {
        d_[j] -= factor * prow[j];
        if constexpr (std::is_same_v<T, double>) {
          if (std::fabs(d_[j]) < Tol<double>::drop) d_[j] = 0.0;
        }
      }
      d_[s] = T{0};
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      if (kind_[b] != ColumnKind::artificial) continue;
      const T* row = &tab_[i * ncols_];
      std::size_t best = ncols_;
      double best_mag = 0.0;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (row_of_[j] >= 0 || kind_[j] == ColumnKind::artificial) continue;
        if (!Tol<T>::nonzero(row[j], Tol<T>::pivot)) continue;
        const double mag = Tol<T>::magnitude(row[j]);
        if (best == ncols_ || mag > best_mag) {
          best = j;
          best_mag = mag;
          if constexpr (!std::is_same_v<T, double>) break;
        }
      }
      if (best == ncols_) continue;  // redundant row; the artificial stays fixed at 0
      const T entering_value = value_[best];
      value_[b] = T{0};
      pivot(i, best);
      row_of_[b] = -1;
      make_basic(i, best, entering_value);
    }
  }

  const Problem<T>& problem_;
  SolverOptions options_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t ncols_ = 0;
  std::vector<T> tab_;
  std::vector<ColumnKind> kind_;
  std::vector<std::optional<T>> lower_;
  std::vector<std::optional<T>> upper_;
  std::vector<T> value_;
  std::vector<int> row_of_;
  std::vector<std::size_t> basis_;
  std::vector<T> beta_;
  std::vector<T> cost_;
  std::vector<T> d_;
  std::vector<int> row_sign_;
  std::vector<int> slack_coef_;
  std::vector<int> slack_col_;
  std::vector<int> art_col_;
  std::vector<std::size_t> nz_;
  std::vector<std::optional<T>> limits_;
  std::size_t iterations_ = 0;
  std::size_t degenerate_run_ = 0;
};

}  // namespace

template <class T>
Solution<T> solve(const Problem<T>& problem, const SolverOptions& options) {
  TableauSimplex<T> simplex(problem, options);
  Solution<T> solution = simplex.run();
  if constexpr (std::is_same_v<T, double>) {
    if (solution.optimal()) {
      auto report = check_feasible(problem, std::span<const double>(solution.x), 1e-7);
      if (!report.feasible) {
        throw Error(ErrorCode::numerical_failure,
                    "floating-point simplex returned an infeasible point: " + report.message);
      }
    }
  }
  return solution;
}

template Solution<double> solve(const Problem<double>&, const SolverOptions&);
template Solution<Rational> solve(const Problem<Rational>&, const SolverOptions&);

}  // namespace ivdep::lp
