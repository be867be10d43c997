#include "ivdep/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <thread>

#include "ivdep/error.hpp"
#include "ivdep/rng.hpp"

namespace ivdep {

namespace {

using cd = std::complex<double>;
constexpr double kTol = 1e-9;

Mat2 pauli_x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

Mat2 pauli_z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return out;
}

double trace_real(const Mat4& op, const Mat4& rho) { return (op * rho).trace().real(); }

bool hermitian(const Eigen::MatrixXcd& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff() <= kTol; }

// Sylvester's criterion for semidefiniteness needs every principal minor.
bool positive_semidefinite(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) idx.push_back(i);
    }
    Eigen::MatrixXcd sub(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(idx[r], idx[c]);
    }
    if (sub.determinant().real() < -kTol) return false;
  }
  return true;
}

void check_povm(const std::array<Mat2, 2>& povm, const std::string& name, ValidationReport& report) {
  for (int k = 0; k < 2; ++k) {
    if (!hermitian(povm[static_cast<std::size_t>(k)]) || !positive_semidefinite(povm[static_cast<std::size_t>(k)])) {
      report.violations.push_back(name + " outcome " + std::to_string(k) + " is not positive");
    }
  }
  if ((povm[0] + povm[1] - Mat2::Identity()).cwiseAbs().maxCoeff() > kTol) {
    report.violations.push_back(name + " does not sum to identity");
  }
}

void require_valid(const QuantumSetup& setup) {
  const ValidationReport report = validate_setup(setup);
  if (!report.ok()) throw Error(ErrorCode::invalid_distribution, "invalid quantum setup: " + report.violations.front());
}

Mat4 pure_state(double angle) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(0) = std::sin(angle);
  psi(3) = std::cos(angle);
  return psi * psi.adjoint();
}

// The x-part of K is A + B sin θ + C cos θ; its minimum over θ is A − √(B²+C²).
struct ThetaTerm {
  double a = 0, b = 0, c = 0;
  double minimum() const { return a - std::hypot(b, c); }
  double argmin() const { return std::atan2(-b, -c); }
};

class ReducedObjective {
 public:
  explicit ReducedObjective(const InequalitySpec& spec) : spec_(spec) {}

  // params = (state angle, η0, η1); returns the violation −K with every θ_x at its best.
  double operator()(const double* params, std::vector<double>* theta = nullptr) const {
    const Mat4 rho = pure_state(params[0]);
    const std::array<double, 2> eta{params[1], params[2]};
    const Mat2 id = Mat2::Identity();
    const Mat2 sx = pauli_x();
    const Mat2 sz = pauli_z();
    // traces of (σ ⊗ N^a_b) ρ for σ ∈ {𝟙, σ_X, σ_Z}
    double tr[3][2][2];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const Mat2 n = projector(eta[static_cast<std::size_t>(a)], b);
        tr[0][a][b] = trace_real(kron(id, n), rho);
        tr[1][a][b] = trace_real(kron(sx, n), rho);
        tr[2][a][b] = trace_real(kron(sz, n), rho);
      }
    }
    double k = static_cast<double>(spec_.constant);
    if (spec_.ace_term) {
      double best = 0;
      for (int b = 0; b < 2; ++b) best = std::max(best, std::fabs(tr[0][0][b] - tr[0][1][b]));
      k += best;
    }
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const long c = spec_.do_coeffs[static_cast<std::size_t>(a * 2 + b)];
        if (c != 0) k += static_cast<double>(c) * tr[0][a][b];
      }
    }
    if (theta) theta->assign(static_cast<std::size_t>(spec_.x_card), 0.0);
    for (int x = 0; x < spec_.x_card; ++x) {
      ThetaTerm t;
      for (int a = 0; a < 2; ++a) {
        const double sign = a == 0 ? 0.5 : -0.5;
        for (int b = 0; b < 2; ++b) {
          const double c = static_cast<double>(spec_.obs(a, b, x));
          if (c == 0) continue;
          t.a += 0.5 * c * tr[0][a][b];
          t.b += sign * c * tr[1][a][b];
          t.c += sign * c * tr[2][a][b];
        }
      }
      k += t.minimum();
      if (theta) (*theta)[static_cast<std::size_t>(x)] = t.argmin();
    }
    return -k;
  }

 private:
  const InequalitySpec& spec_;
};

// Maximizes f by Nelder–Mead; stops once the simplex values spread by at most tol.
template <class F>
std::pair<std::vector<double>, double> nelder_mead(const F& f, std::vector<double> start, double step, double tol,
                                                   std::size_t& evaluations) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> val(n + 1);
  auto eval = [&](const std::vector<double>& p) {
    ++evaluations;
    return -f(p.data());
  };
  for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);
  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < 20000; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (val[worst] - val[best] <= tol) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
      return p;
    };
    const auto reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr < val[best]) {
      const auto expanded = along(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        val[worst] = fe;
      } else {
        pts[worst] = reflected;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = reflected;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = contracted;
      val[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
      val[i] = eval(pts[i]);
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  return {pts[best], -val[best]};
}

int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("IVDEP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

}  // namespace

Mat2 projector(double phi, int outcome) {
  const double s = outcome == 0 ? 1.0 : -1.0;
  return 0.5 * (Mat2::Identity() + s * (std::sin(phi) * pauli_x() + std::cos(phi) * pauli_z()));
}

ValidationReport validate_setup(const QuantumSetup& setup) {
  ValidationReport report;
  if (setup.meas_a.size() < 2) report.violations.push_back("need measurements for at least two instrument values");
  if (!hermitian(setup.state)) report.violations.push_back("state is not Hermitian");
  if (std::abs(setup.state.trace() - cd(1, 0)) > kTol) report.violations.push_back("state trace is not 1");
  if (!positive_semidefinite(setup.state)) report.violations.push_back("state is not positive semidefinite");
  for (std::size_t x = 0; x < setup.meas_a.size(); ++x) check_povm(setup.meas_a[x], "M^" + std::to_string(x), report);
  for (std::size_t a = 0; a < 2; ++a) check_povm(setup.meas_b[a], "N^" + std::to_string(a), report);
  return report;
}

QuantumSetup setup_from_angles(const AngleFamily& angles) {
  QuantumSetup setup;
  setup.state = pure_state(angles.state_angle);
  for (double th : angles.theta) setup.meas_a.push_back({projector(th, 0), projector(th, 1)});
  for (std::size_t a = 0; a < 2; ++a) setup.meas_b[a] = {projector(angles.eta[a], 0), projector(angles.eta[a], 1)};
  return setup;
}

ObservedDistribution<double> born_probabilities(const QuantumSetup& setup, const std::vector<double>& p_x) {
  require_valid(setup);
  ObservedDistribution<double> dist;
  dist.scenario.x_card = setup.x_card();
  dist.p_x = p_x;
  dist.table.assign(dist.scenario.num_cells(), 0.0);
  for (int x = 0; x < setup.x_card(); ++x) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const Mat4 op = kron(setup.meas_a[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)],
                             setup.meas_b[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
        dist.p(a, b, x) = trace_real(op, setup.state);
      }
    }
  }
  const ValidationReport report = validate_distribution(dist);
  if (!report.ok()) throw Error(ErrorCode::invalid_distribution, "born_probabilities: " + report.violations.front());
  return dist;
}

InterventionalDistribution<double> quantum_do(const QuantumSetup& setup) {
  require_valid(setup);
  InterventionalDistribution<double> out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      out.p(b, a) = trace_real(kron(Mat2::Identity(), setup.meas_b[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]), setup.state);
    }
  }
  return out;
}

double qace(const QuantumSetup& setup) {
  require_valid(setup);
  double best = 0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t a2 = 0; a2 < 2; ++a2) {
      for (std::size_t b = 0; b < 2; ++b) {
        const Mat4 op = kron(Mat2::Identity(), setup.meas_b[a][b] - setup.meas_b[a2][b]);
        best = std::max(best, std::fabs(trace_real(op, setup.state)));
      }
    }
  }
  return best;
}

double quantum_violation(const InequalitySpec& spec, const QuantumSetup& setup) {
  if (setup.x_card() != spec.x_card) throw Error(ErrorCode::dimension_mismatch, "setup cardinality does not match " + spec.id);
  const std::vector<double> px(static_cast<std::size_t>(spec.x_card), 1.0 / spec.x_card);
  const auto dist = born_probabilities(setup, px);
  const auto dos = quantum_do(setup);
  double k = static_cast<double>(spec.constant);
  for (std::size_t i = 0; i < spec.obs_coeffs.size(); ++i) k += static_cast<double>(spec.obs_coeffs[i]) * dist.table[i];
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) k += static_cast<double>(spec.do_coeffs[static_cast<std::size_t>(a * 2 + b)]) * dos.p(b, a);
  }
  if (spec.ace_term) k += qace(setup);
  return -k;
}

QuantumOptimum maximize_violation(const InequalitySpec& spec, const OptimizerConfig& config) {
  if (config.grid < 2) throw Error(ErrorCode::invalid_argument, "grid needs at least 2 points per angle");
  const ReducedObjective objective(spec);
  Rng rng(config.seed);
  const std::array<double, 3> offset{rng.uniform(), rng.uniform(), rng.uniform()};
  const std::array<double, 3> range{std::numbers::pi, 2 * std::numbers::pi, 2 * std::numbers::pi};
  const std::size_t g = static_cast<std::size_t>(config.grid);
  auto coord = [&](std::size_t dim, std::size_t i) {
    return range[dim] * (static_cast<double>(i) + offset[dim]) / static_cast<double>(g);
  };

  std::vector<double> values(g * g * g);
  const int nthreads = std::max(1, std::min<int>(thread_count(config.threads), static_cast<int>(g)));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = static_cast<std::size_t>(t); i < g; i += static_cast<std::size_t>(nthreads)) {
        for (std::size_t j = 0; j < g; ++j) {
          for (std::size_t k = 0; k < g; ++k) {
            const double p[3] = {coord(0, i), coord(1, j), coord(2, k)};
            values[(i * g + j) * g + k] = objective(p);
          }
        }
      }
    });
  }
  for (auto& th : pool) th.join();

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  QuantumOptimum best;
  best.alpha = -std::numeric_limits<double>::infinity();
  best.evaluations = values.size();
  std::vector<double> best_params;
  const std::size_t starts = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.starts, 1)), order.size());
  const double step = 2 * std::numbers::pi / static_cast<double>(g);
  for (std::size_t s = 0; s < starts; ++s) {
    const std::size_t idx = order[s];
    std::vector<double> start{coord(0, idx / (g * g)), coord(1, (idx / g) % g), coord(2, idx % g)};
    auto [params, value] = nelder_mead(objective, start, step, config.tolerance, best.evaluations);
    if (value > best.alpha) {
      best.alpha = value;
      best_params = params;
    }
  }
  best.angles.state_angle = best_params[0];
  best.angles.eta = {best_params[1], best_params[2]};
  objective(best_params.data(), &best.angles.theta);
  const QuantumSetup setup = setup_from_angles(best.angles);
  best.p = born_probabilities(setup, std::vector<double>(static_cast<std::size_t>(spec.x_card), 1.0 / spec.x_card));
  best.p_do = quantum_do(setup);
  best.alpha = quantum_violation(spec, setup);
  return best;
}

}  // namespace ivdep
