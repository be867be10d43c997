#include "ivdep/dependence.hpp"

#include <algorithm>
#include <sstream>

#include "ivdep/error.hpp"

namespace ivdep {

namespace {

template <class T>
ScenarioMatrices<T> matrices_for(const InequalitySpec& spec, const std::vector<T>& p_x) {
  return build_matrices<T>(Scenario{spec.x_card}, p_x, spec.has_do());
}

template <class T>
bool close(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, double>) {
    return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
  } else {
    return a == b;
  }
}

template <class T>
T line_at(const Tangent<T>& t, const T& alpha) {
  return t.slope * alpha + t.intercept;
}

template <class T>
struct Piece {
  T a, fa, b, fb, slope;
};

template <class T>
class CurveBuilder {
 public:
  CurveBuilder(const InequalitySpec& spec, const std::vector<T>& p_x) : spec_(spec), p_x_(p_x) {}

  Tangent<T> at(const T& alpha) {
    ++solves_;
    return dependence_tangent(spec_, p_x_, alpha);
  }

  // Both tangents touch M at their own α; M is convex and above both lines.
  void refine(const Tangent<T>& left, const Tangent<T>& right, int depth) {
    if (depth > 200) throw Error(ErrorCode::numerical_failure, "dependence curve refinement did not converge");
    const T& a = left.alpha;
    const T& b = right.alpha;
    if (close(line_at(right, a), left.value)) {
      pieces_.push_back({a, left.value, b, right.value, right.slope});
      return;
    }
    if (close(line_at(left, b), right.value)) {
      pieces_.push_back({a, left.value, b, right.value, left.slope});
      return;
    }
    T mid = (a + b) / T(2);
    if (!close(left.slope, right.slope)) {
      const T cross = (right.intercept - left.intercept) / (left.slope - right.slope);
      if (cross > a && cross < b) mid = cross;
    }
    const Tangent<T> m = at(mid);
    if (close(m.value, line_at(left, mid)) && close(m.value, line_at(right, mid))) {
      pieces_.push_back({a, left.value, mid, m.value, left.slope});
      pieces_.push_back({mid, m.value, b, right.value, right.slope});
      return;
    }
    refine(left, m, depth + 1);
    refine(m, right, depth + 1);
  }

  std::vector<Piece<T>>& pieces() { return pieces_; }
  std::size_t solves() const { return solves_; }

 private:
  const InequalitySpec& spec_;
  const std::vector<T>& p_x_;
  std::vector<Piece<T>> pieces_;
  std::size_t solves_ = 0;
};

template <class T>
std::string term(long coeff, const std::string& name, bool first) {
  std::string out;
  if (coeff < 0) out += first ? "-" : " - ";
  else if (!first) out += " + ";
  const long mag = coeff < 0 ? -coeff : coeff;
  if (mag != 1) out += std::to_string(mag);
  return out + name;
}

}  // namespace

template <class T>
T max_violation(const InequalitySpec& spec, const std::vector<T>& p_x) {
  const auto mats = matrices_for(spec, p_x);
  T best{0};
  for (AceBranch br : branches(spec)) {
    const auto sol = lp::solve(build_max_violation(mats, spec, br));
    if (sol.optimal() && sol.objective > best) best = sol.objective;
  }
  return best;
}

template <class T>
std::vector<T> DependencePoint<T>::q() const {
  const auto v = block_values(primal, solution.x, "q");
  return std::vector<T>(v.begin(), v.end());
}

template <class T>
DependencePoint<T> solve_dependence(const InequalitySpec& spec, const std::vector<T>& p_x, const T& alpha,
                                    const std::optional<AceBranch>& only_branch) {
  if (alpha < 0) throw Error(ErrorCode::out_of_range, "alpha must be nonnegative");
  const auto mats = matrices_for(spec, p_x);
  std::optional<DependencePoint<T>> best;
  const std::vector<AceBranch> todo = only_branch ? std::vector<AceBranch>{*only_branch} : branches(spec);
  for (AceBranch br : todo) {
    DependencePoint<T> pt;
    pt.alpha = alpha;
    pt.branch = br;
    pt.primal = build_primal(mats, spec, br, alpha);
    pt.solution = lp::solve(pt.primal);
    if (!pt.solution.optimal()) continue;
    pt.dependence = -pt.solution.objective;
    if (!best || pt.dependence < best->dependence) best = std::move(pt);
  }
  if (!best) {
    throw Error(ErrorCode::out_of_range, "violation " + Num<T>::str(alpha) + " of " + spec.id +
                                             " is not attainable with this instrument marginal");
  }
  best->dual = build_dual(mats, spec, best->branch, alpha);
  best->dual_point = dual_point_from_primal(best->primal, best->solution);
  best->certificate = lp::check_certificate<T>(best->primal, best->solution.x, best->dual, best->dual_point);
  return *std::move(best);
}

template <class T>
T min_dependence(const InequalitySpec& spec, const std::vector<T>& p_x, const T& alpha) {
  if (alpha < 0) throw Error(ErrorCode::out_of_range, "alpha must be nonnegative");
  const auto mats = matrices_for(spec, p_x);
  std::optional<T> best;
  for (AceBranch br : branches(spec)) {
    const auto sol = lp::solve(build_primal(mats, spec, br, alpha));
    if (sol.optimal() && (!best || -sol.objective < *best)) best = -sol.objective;
  }
  if (!best) {
    throw Error(ErrorCode::out_of_range, "violation " + Num<T>::str(alpha) + " of " + spec.id +
                                             " is not attainable with this instrument marginal");
  }
  return *best;
}

template <class T>
Tangent<T> dependence_tangent(const InequalitySpec& spec, const std::vector<T>& p_x, const T& alpha) {
  const auto mats = matrices_for(spec, p_x);
  const auto primal = build_primal(mats, spec, AceBranch::combined, alpha);
  const auto sol = lp::solve(primal);
  if (!sol.optimal()) {
    throw Error(ErrorCode::out_of_range, "violation " + Num<T>::str(alpha) + " of " + spec.id + " is not attainable");
  }
  Tangent<T> t;
  t.alpha = alpha;
  t.value = -sol.objective;
  const lp::Block& u = primal.row_block("alpha");
  for (std::size_t i = 0; i < u.size; ++i) t.slope += sol.row_duals[u.offset + i];
  t.intercept = t.value - t.slope * alpha;
  return t;
}

template <class T>
T DependenceCurve<T>::value(const T& alpha) const {
  if (alpha < 0 || alpha > alpha_max) throw Error(ErrorCode::out_of_range, "alpha outside [0, alpha_max]");
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (alpha <= breakpoints[k + 1].first) return breakpoints[k].second + slopes[k] * (alpha - breakpoints[k].first);
  }
  return breakpoints.back().second;
}

template <class T>
T DependenceCurve<T>::slope_at(const T& alpha) const {
  if (slopes.empty()) return T{0};
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (alpha < breakpoints[k + 1].first) return slopes[k];
  }
  return slopes.back();
}

template <class T>
DependenceCurve<T> dependence_curve(const InequalitySpec& spec, const std::vector<T>& p_x) {
  DependenceCurve<T> curve;
  curve.id = spec.id;
  curve.p_x = p_x;
  curve.alpha_max = max_violation(spec, p_x);
  curve.lp_solves = branches(spec).size();
  curve.breakpoints.push_back({T{0}, T{0}});
  if (Num<T>::is_zero(curve.alpha_max)) {
    curve.alpha_max = T{0};
    return curve;
  }
  CurveBuilder<T> builder(spec, p_x);
  const Tangent<T> top = builder.at(curve.alpha_max);
  const Tangent<T> mid = builder.at(curve.alpha_max / T(2));
  if (close(T(mid.value * T(2)), top.value) && close(T(mid.slope * curve.alpha_max), top.value)) {
    curve.breakpoints.push_back({curve.alpha_max, top.value});
    curve.slopes.push_back(mid.slope);
    curve.lp_solves += builder.solves();
    return curve;
  }
  const Tangent<T> origin = builder.at(T{0});
  builder.refine(origin, mid, 0);
  builder.refine(mid, top, 0);
  curve.lp_solves += builder.solves();

  auto& pieces = builder.pieces();
  std::sort(pieces.begin(), pieces.end(), [](const Piece<T>& x, const Piece<T>& y) { return x.a < y.a; });
  for (const auto& p : pieces) {
    if (close(p.a, p.b)) continue;
    if (!curve.slopes.empty() && close(curve.slopes.back(), p.slope)) {
      curve.breakpoints.back() = {p.b, p.fb};
      continue;
    }
    curve.breakpoints.push_back({p.b, p.fb});
    curve.slopes.push_back(p.slope);
  }
  return curve;
}

template <class T>
std::string curve_csv(const DependenceCurve<T>& curve, std::size_t grid_points) {
  std::vector<T> alphas;
  if (grid_points < 2) grid_points = 2;
  for (std::size_t i = 0; i < grid_points; ++i) {
    alphas.push_back(curve.alpha_max * T(static_cast<long>(i)) / T(static_cast<long>(grid_points - 1)));
  }
  for (const auto& bp : curve.breakpoints) alphas.push_back(bp.first);
  std::sort(alphas.begin(), alphas.end());
  std::vector<T> unique;
  for (const auto& a : alphas) {
    if (unique.empty() || !close(unique.back(), a)) unique.push_back(a);
  }
  std::ostringstream out;
  out << "alpha,dependence,segment_slope\n";
  for (const auto& a : unique) {
    out << Num<double>::str(Num<T>::to_double(a)) << ',' << Num<double>::str(Num<T>::to_double(curve.value(a))) << ','
        << Num<double>::str(Num<T>::to_double(curve.slope_at(a))) << '\n';
  }
  return out.str();
}

template <class T>
std::string AdaptedInequality<T>::statement() const {
  std::string expr;
  bool first = true;
  if (base.ace_term) {
    expr += "ACE";
    first = false;
  }
  if (base.constant != 0) {
    expr += term<T>(base.constant, "", first);
    if (base.constant == 1 || base.constant == -1) expr += "1";
    first = false;
  }
  for (int x = 0; x < base.x_card; ++x) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const long c = base.obs(a, b, x);
        if (c == 0) continue;
        expr += term<T>(c, "p(" + std::to_string(a) + "," + std::to_string(b) + "|" + std::to_string(x) + ")", first);
        first = false;
      }
    }
  }
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const long c = base.do_coeffs[static_cast<std::size_t>(a * 2 + b)];
      if (c == 0) continue;
      expr += term<T>(c, "p(" + std::to_string(b) + "|do(" + std::to_string(a) + "))", first);
      first = false;
    }
  }
  if (first) expr = "0";
  return expr + " >= " + Num<T>::str(threshold);
}

template <class T>
AdaptedInequality<T> adapted_bound(const InequalitySpec& spec, const std::vector<T>& p_x, const T& dependence_level) {
  if (dependence_level < 0) throw Error(ErrorCode::out_of_range, "dependence level must be nonnegative");
  const DependenceCurve<T> curve = dependence_curve(spec, p_x);
  if (curve.slopes.empty()) {
    throw Error(ErrorCode::unsupported, spec.id + " cannot be violated with this instrument marginal");
  }
  AdaptedInequality<T> out;
  out.base = spec;
  out.p_x = p_x;
  out.slope = curve.slopes.front();
  out.dependence_level = dependence_level;
  out.threshold = -dependence_level / out.slope;
  return out;
}

template <class T>
T closed_form_binary(BinaryKind kind, const std::vector<T>& p_x, const T& alpha) {
  if (p_x.size() != 2) throw Error(ErrorCode::dimension_mismatch, "closed forms hold for a binary instrument only");
  if (alpha < 0 || alpha > T(1)) throw Error(ErrorCode::out_of_range, "alpha must lie in [0, 1]");
  const T base = T(4) * p_x[0] * p_x[1] * alpha;
  return kind == BinaryKind::pearl ? base : T(base / (T(2) - p_x[0]));
}

#define IVDEP_INSTANTIATE_DEPENDENCE(T)                                                                  \
  template T max_violation(const InequalitySpec&, const std::vector<T>&);                               \
  template struct DependencePoint<T>;                                                                   \
  template DependencePoint<T> solve_dependence(const InequalitySpec&, const std::vector<T>&, const T&,  \
                                               const std::optional<AceBranch>&);                        \
  template T min_dependence(const InequalitySpec&, const std::vector<T>&, const T&);                    \
  template Tangent<T> dependence_tangent(const InequalitySpec&, const std::vector<T>&, const T&);       \
  template struct DependenceCurve<T>;                                                                   \
  template DependenceCurve<T> dependence_curve(const InequalitySpec&, const std::vector<T>&);           \
  template std::string curve_csv(const DependenceCurve<T>&, std::size_t);                               \
  template struct AdaptedInequality<T>;                                                                 \
  template AdaptedInequality<T> adapted_bound(const InequalitySpec&, const std::vector<T>&, const T&);  \
  template T closed_form_binary(BinaryKind, const std::vector<T>&, const T&);

IVDEP_INSTANTIATE_DEPENDENCE(double)
IVDEP_INSTANTIATE_DEPENDENCE(Rational)

}  // namespace ivdep
