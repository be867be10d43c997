#include "ivdep/programs.hpp"

#include "ivdep/error.hpp"

namespace ivdep {

namespace {

template <class T>
std::vector<T> form_row(const ScenarioMatrices<T>& mats, const LinearForm& form) {
  const std::size_t n = mats.M.cols();
  const std::size_t obs = mats.num_observed_rows();
  bool uses_do = false;
  for (long c : form.dos) uses_do = uses_do || c != 0;
  if (uses_do && !mats.with_do) {
    throw Error(ErrorCode::invalid_argument, "inequality needs the interventional block of P");
  }
  // Coefficients on the rows of P: c/p(x) for observed cells, raw for do rows.
  if (form.obs.size() != obs) throw Error(ErrorCode::dimension_mismatch, "linear form does not match the scenario");
  std::vector<T> k(mats.P.rows(), T{0});
  for (std::size_t cell = 0; cell < obs; ++cell) {
    if (form.obs[cell] == 0) continue;
    const T& px = mats.p_x[cell / 4];
    if (px == 0) throw Error(ErrorCode::division_by_zero, "p(x) = 0 for an instrument value used by the inequality");
    k[cell] = T(form.obs[cell]) / px;
  }
  if (mats.with_do) {
    for (std::size_t d = 0; d < 4; ++d) k[obs + d] = T(form.dos[d]);
  }
  std::vector<T> row = mats.P.multiply_transposed(k);
  if (form.constant != 0) {
    for (std::size_t j = 0; j < n; ++j) row[j] += T(form.constant);
  }
  return row;
}

template <class T>
void check_spec(const ScenarioMatrices<T>& mats, const InequalitySpec& spec) {
  if (mats.scenario.x_card != spec.x_card) {
    throw Error(ErrorCode::dimension_mismatch, spec.id + " needs x_card " + std::to_string(spec.x_card));
  }
}

}  // namespace

template <class T>
Matrix<T> k_times_p(const ScenarioMatrices<T>& mats, const LinearSystem& system) {
  Matrix<T> out(0, mats.M.cols());
  for (const auto& f : system.alpha_rows) out.append_row(form_row(mats, f));
  for (const auto& f : system.sign_rows) out.append_row(form_row(mats, f));
  return out;
}

template <class T>
lp::Problem<T> build_primal(const ScenarioMatrices<T>& mats, const InequalitySpec& spec, AceBranch branch,
                            const T& alpha) {
  check_spec(mats, spec);
  if (alpha < 0) throw Error(ErrorCode::out_of_range, "alpha must be nonnegative");
  const LinearSystem sys = linearize(spec, branch);
  const Matrix<T> kp = k_times_p(mats, sys);
  const std::size_t n = mats.M.cols();
  const std::size_t m = static_cast<std::size_t>(mats.scenario.x_card);

  lp::Problem<T> prob;
  prob.sense = lp::Sense::maximize;
  prob.add_variables("q", n, T{0}, std::nullopt);
  prob.add_variables("t", n, std::nullopt, std::nullopt, T{-1});
  std::vector<T> row(2 * n);
  for (int sign : {1, -1}) {
    prob.begin_row_block(sign > 0 ? "dep_plus" : "dep_minus");
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(row.begin(), row.end(), T{0});
      for (std::size_t j = 0; j < n; ++j) row[j] = sign > 0 ? mats.M(i, j) : T(-mats.M(i, j));
      row[n + i] = T{-1};
      prob.add_row(row, lp::RowSense::less_equal, T{0});
    }
  }
  prob.begin_row_block("alpha");
  for (std::size_t r = 0; r < sys.alpha_rows.size(); ++r) {
    std::fill(row.begin(), row.end(), T{0});
    for (std::size_t j = 0; j < n; ++j) row[j] = kp(r, j);
    prob.add_row(row, lp::RowSense::less_equal, T(-alpha));
  }
  prob.begin_row_block("sign");
  for (std::size_t r = sys.alpha_rows.size(); r < kp.rows(); ++r) {
    std::fill(row.begin(), row.end(), T{0});
    for (std::size_t j = 0; j < n; ++j) row[j] = kp(r, j);
    prob.add_row(row, lp::RowSense::less_equal, T{0});
  }
  prob.begin_row_block("marginal");
  for (std::size_t x = 0; x < m; ++x) {
    std::fill(row.begin(), row.end(), T{0});
    for (std::size_t j = 0; j < n; ++j) row[j] = mats.Delta(x, j);
    prob.add_row(row, lp::RowSense::equal, mats.p_x[x]);
  }
  return prob;
}

template <class T>
lp::Problem<T> build_dual(const ScenarioMatrices<T>& mats, const InequalitySpec& spec, AceBranch branch,
                          const T& alpha) {
  check_spec(mats, spec);
  if (alpha < 0) throw Error(ErrorCode::out_of_range, "alpha must be nonnegative");
  const LinearSystem sys = linearize(spec, branch);
  const Matrix<T> kp = k_times_p(mats, sys);
  const std::size_t n = mats.M.cols();
  const std::size_t m = static_cast<std::size_t>(mats.scenario.x_card);
  const std::size_t nu = sys.alpha_rows.size();
  const std::size_t nv = sys.sign_rows.size();

  lp::Problem<T> prob;
  prob.sense = lp::Sense::minimize;
  const std::size_t y0 = prob.add_variables("y", n, T{0}, T{2});
  const std::size_t u0 = prob.add_variables("u", nu, T{0}, std::nullopt, T(-alpha));
  const std::size_t v0 = prob.add_variables("v", nv, T{0}, std::nullopt);
  const std::size_t z0 = prob.add_variables("z", m, std::nullopt, std::nullopt);
  for (std::size_t x = 0; x < m; ++x) prob.objective[z0 + x] = mats.p_x[x];

  prob.begin_row_block("columns");
  std::vector<T> row(prob.num_variables());
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(row.begin(), row.end(), T{0});
    for (std::size_t i = 0; i < n; ++i) row[y0 + i] = mats.M(i, j);
    for (std::size_t r = 0; r < nu; ++r) row[u0 + r] = kp(r, j);
    for (std::size_t r = 0; r < nv; ++r) row[v0 + r] = kp(nu + r, j);
    for (std::size_t x = 0; x < m; ++x) row[z0 + x] = mats.Delta(x, j);
    prob.add_row(row, lp::RowSense::greater_equal, T{0});
  }
  return prob;
}

template <class T>
std::vector<T> dual_point_from_primal(const lp::Problem<T>& primal, const lp::Solution<T>& solution) {
  if (!solution.optimal()) throw Error(ErrorCode::invalid_argument, "dual point needs an optimal primal solution");
  std::vector<T> out;
  const lp::Block& plus = primal.row_block("dep_plus");
  for (std::size_t i = 0; i < plus.size; ++i) out.push_back(T(2) * solution.row_duals[plus.offset + i]);
  for (const char* name : {"alpha", "sign", "marginal"}) {
    const lp::Block& b = primal.row_block(name);
    for (std::size_t i = 0; i < b.size; ++i) out.push_back(solution.row_duals[b.offset + i]);
  }
  return out;
}

template <class T>
lp::Problem<T> build_max_violation(const ScenarioMatrices<T>& mats, const InequalitySpec& spec, AceBranch branch) {
  check_spec(mats, spec);
  if (branch == AceBranch::combined) {
    throw Error(ErrorCode::invalid_argument, "max violation is computed per sign branch");
  }
  const LinearSystem sys = linearize(spec, branch);
  const Matrix<T> kp = k_times_p(mats, sys);
  const std::size_t n = mats.M.cols();
  lp::Problem<T> prob;
  prob.sense = lp::Sense::maximize;
  prob.add_variables("q", n, T{0}, std::nullopt);
  for (std::size_t j = 0; j < n; ++j) prob.objective[j] = T(-kp(0, j));
  prob.begin_row_block("sign");
  for (std::size_t r = 1; r < kp.rows(); ++r) prob.add_row(kp.row(r), lp::RowSense::less_equal, T{0});
  prob.begin_row_block("marginal");
  for (std::size_t x = 0; x < static_cast<std::size_t>(mats.scenario.x_card); ++x) {
    prob.add_row(mats.Delta.row(x), lp::RowSense::equal, mats.p_x[x]);
  }
  return prob;
}

template <class T>
std::vector<T> y_tilde(const std::vector<T>& y) {
  if (y.size() % 2 != 0) throw Error(ErrorCode::dimension_mismatch, "y_tilde needs an even-length y");
  const std::size_t h = y.size() / 2;
  std::vector<T> out(h);
  for (std::size_t i = 0; i < h; ++i) out[i] = y[i] - y[i + h];
  return out;
}

namespace {

void check_p0(const Rational& p0) {
  if (p0 <= 0 || p0 >= 1) throw Error(ErrorCode::out_of_range, "p0 must lie strictly between 0 and 1");
}

// Splits ỹ ∈ [−2, 2] into y ∈ [0, 2]^{2h} with y_i − y_{i+h} = ỹ_i.
std::vector<Rational> split_y(const std::vector<Rational>& yt) {
  const std::size_t h = yt.size();
  std::vector<Rational> y(2 * h, Rational(0));
  for (std::size_t i = 0; i < h; ++i) {
    if (yt[i] > 0) y[i] = yt[i];
    else y[i + h] = -yt[i];
  }
  return y;
}

}  // namespace

std::vector<Rational> pearl_certificate(const Rational& p0) {
  check_p0(p0);
  const Rational p1 = 1 - p0;
  const auto mats = build_matrices<Rational>(Scenario{2}, {p0, p1}, false);
  const Matrix<Rational> kp = k_times_p(mats, linearize(inequality_by_id("pearl-00"), AceBranch::nonneg));
  std::vector<Rational> yt(16, Rational(0));
  for (std::size_t i = 0; i < 16; ++i) {
    if (kp(0, i) != 1) yt[i] = 2;
    else if (kp(0, i + 16) != 1) yt[i] = -2;
  }
  std::vector<Rational> out = split_y(yt);
  const Rational z0 = 2 * p1 * (1 - 2 * p0);
  out.push_back(4 * p0 * p1);  // u
  out.push_back(z0);
  out.push_back(-(p0 / p1) * z0);
  return out;
}

std::vector<Rational> c1_certificate(const Rational& p0) {
  check_p0(p0);
  const Rational p1 = 1 - p0;
  const Rational r = p0 / (2 - p0);
  std::vector<Rational> yt(16, Rational(0));
  for (std::size_t i : {0, 1, 4, 8, 9, 12}) yt[i] = 2;
  for (std::size_t i : {2, 3, 6, 7, 10, 14}) yt[i] = -2;
  for (std::size_t i : {5, 13}) yt[i] = 2 - 4 * r;
  for (std::size_t i : {11, 15}) yt[i] = -2 * r;
  std::vector<Rational> out = split_y(yt);
  const Rational z0 = -2 * p1 * (1 - 4 * p1 / (2 - p0));
  out.push_back(4 * p0 * p1 / (2 - p0));  // u
  out.push_back(0);                        // v
  out.push_back(z0);
  out.push_back(-(p0 / p1) * z0);
  return out;
}

#define IVDEP_INSTANTIATE_PROGRAMS(T)                                                                        \
  template Matrix<T> k_times_p(const ScenarioMatrices<T>&, const LinearSystem&);                            \
  template lp::Problem<T> build_primal(const ScenarioMatrices<T>&, const InequalitySpec&, AceBranch, const T&); \
  template lp::Problem<T> build_dual(const ScenarioMatrices<T>&, const InequalitySpec&, AceBranch, const T&);   \
  template std::vector<T> dual_point_from_primal(const lp::Problem<T>&, const lp::Solution<T>&);           \
  template lp::Problem<T> build_max_violation(const ScenarioMatrices<T>&, const InequalitySpec&, AceBranch); \
  template std::vector<T> y_tilde(const std::vector<T>&);

IVDEP_INSTANTIATE_PROGRAMS(double)
IVDEP_INSTANTIATE_PROGRAMS(Rational)

}  // namespace ivdep
