#include "ivdep/strategies.hpp"

#include "ivdep/error.hpp"
#include "json_util.hpp"

namespace ivdep {

using detail::json;

namespace {

std::size_t per_lambda_x(const Scenario& s) { return (std::size_t{1} << s.x_card) * 4; }

void check_x_card(const Scenario& s) {
  s.validate();
  if (s.x_card > 16) throw Error(ErrorCode::unsupported, "x_card above 16 is not supported");
}

int f_of(int lambda_a, int x, int m) { return (lambda_a >> (m - 1 - x)) & 1; }
int g_of(int lambda_b, int a) { return (lambda_b >> (1 - a)) & 1; }

template <class T>
std::vector<T> lambda_x_marginal(const LatentJoint<T>& joint) {
  const std::size_t per = per_lambda_x(joint.scenario);
  std::vector<T> px(static_cast<std::size_t>(joint.scenario.x_card), T{0});
  for (std::size_t i = 0; i < joint.q.size(); ++i) px[i / per] += joint.q[i];
  return px;
}

template <class T>
void check_size(const LatentJoint<T>& joint) {
  check_x_card(joint.scenario);
  if (joint.q.size() != num_strategies(joint.scenario)) {
    throw Error(ErrorCode::dimension_mismatch, "q has " + std::to_string(joint.q.size()) + " entries, expected " +
                                                   std::to_string(num_strategies(joint.scenario)));
  }
}

}  // namespace

std::size_t num_strategies(const Scenario& scenario) {
  check_x_card(scenario);
  return static_cast<std::size_t>(scenario.x_card) * per_lambda_x(scenario);
}

std::size_t strategy_index(const Scenario& scenario, int lambda_x, int lambda_a, int lambda_b) {
  return (static_cast<std::size_t>(lambda_x) * (std::size_t{1} << scenario.x_card) +
          static_cast<std::size_t>(lambda_a)) * 4 +
         static_cast<std::size_t>(lambda_b);
}

std::vector<DeterministicStrategy> enumerate_strategies(const Scenario& scenario) {
  std::vector<DeterministicStrategy> out;
  out.reserve(num_strategies(scenario));
  const int m = scenario.x_card;
  for (int lx = 0; lx < m; ++lx) {
    for (int la = 0; la < (1 << m); ++la) {
      for (int lb = 0; lb < 4; ++lb) {
        DeterministicStrategy s;
        s.lambda_x = lx;
        s.lambda_a = la;
        s.lambda_b = lb;
        s.f.resize(static_cast<std::size_t>(m));
        for (int x = 0; x < m; ++x) s.f[static_cast<std::size_t>(x)] = f_of(la, x, m);
        s.g = {g_of(lb, 0), g_of(lb, 1)};
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

template <class T>
ValidationReport validate_latent(const LatentJoint<T>& joint) {
  ValidationReport report;
  if (joint.q.size() != num_strategies(joint.scenario)) {
    report.violations.push_back("q has wrong length");
    return report;
  }
  T total{0};
  for (std::size_t i = 0; i < joint.q.size(); ++i) {
    if (joint.q[i] < -Num<T>::tolerance) report.violations.push_back("q[" + std::to_string(i) + "] < 0");
    total += joint.q[i];
  }
  if (!Num<T>::equal(total, T(1))) report.violations.push_back("q not normalized");
  return report;
}

template <class T>
LatentJoint<T> parse_latent(std::string_view json_text) {
  const json doc = detail::parse_json(json_text);
  const json& xc = detail::require(doc, "x_card");
  if (!xc.is_number_integer()) throw Error(ErrorCode::malformed_input, "x_card must be an integer");
  LatentJoint<T> joint;
  joint.scenario.x_card = xc.get<int>();
  check_x_card(joint.scenario);
  const json& q = detail::require(doc, "q");
  if (!q.is_array()) throw Error(ErrorCode::malformed_input, "q must be an array");
  for (const auto& v : q) joint.q.push_back(detail::scalar_from_json<T>(v));
  check_size(joint);
  const ValidationReport report = validate_latent(joint);
  if (!report.ok()) throw Error(ErrorCode::invalid_distribution, "invalid latent joint: " + report.violations.front());
  return joint;
}

template <class T>
std::string serialize_latent(const LatentJoint<T>& joint) {
  json q = json::array();
  for (const auto& v : joint.q) q.push_back(detail::scalar_to_json(v));
  return json{{"x_card", joint.scenario.x_card}, {"q", q}}.dump();
}

template <class T>
ScenarioMatrices<T> build_matrices(const Scenario& scenario, const std::vector<T>& p_x, bool with_do) {
  check_x_card(scenario);
  const std::size_t m = static_cast<std::size_t>(scenario.x_card);
  if (p_x.size() != m) throw Error(ErrorCode::dimension_mismatch, "p_x length does not match x_card");
  T total{0};
  for (const auto& v : p_x) {
    if (v < -Num<T>::tolerance) throw Error(ErrorCode::invalid_distribution, "p_x has a negative entry");
    total += v;
  }
  if (!Num<T>::equal(total, T(1))) throw Error(ErrorCode::invalid_distribution, "p_x not normalized");

  ScenarioMatrices<T> mats;
  mats.scenario = scenario;
  mats.p_x = p_x;
  mats.with_do = with_do;
  const std::size_t n = num_strategies(scenario);
  const std::size_t per = per_lambda_x(scenario);

  // (M q)_{x,r} = q_{x,r} − p(x) Σ_{λx} q_{λx,r}
  mats.M = Matrix<T>(n, n);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t x = row / per;
    const std::size_t rest = row % per;
    for (std::size_t lx = 0; lx < m; ++lx) {
      mats.M(row, lx * per + rest) = T(x == lx ? 1 : 0) - p_x[x];
    }
  }

  const std::size_t obs = scenario.num_cells();
  mats.P = Matrix<T>(obs + (with_do ? 4 : 0), n);
  mats.Delta = Matrix<T>(m, n);
  const auto strategies = enumerate_strategies(scenario);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = strategies[j];
    const int a = s.f[static_cast<std::size_t>(s.lambda_x)];
    const int b = s.g[static_cast<std::size_t>(a)];
    mats.P(cell_index(a, b, s.lambda_x), j) = T{1};
    if (with_do) {
      for (int aa = 0; aa < 2; ++aa) mats.P(obs + ScenarioMatrices<T>::do_row(aa, s.g[static_cast<std::size_t>(aa)]), j) = T{1};
    }
    mats.Delta(static_cast<std::size_t>(s.lambda_x), j) = T{1};
  }
  return mats;
}

template <class T>
ObservedDistribution<T> forward_distribution(const LatentJoint<T>& joint) {
  check_size(joint);
  ObservedDistribution<T> dist;
  dist.scenario = joint.scenario;
  dist.p_x = lambda_x_marginal(joint);
  dist.table.assign(joint.scenario.num_cells(), T{0});
  const int m = joint.scenario.x_card;
  for (int x = 0; x < m; ++x) {
    if (Num<T>::is_zero(dist.p_x[static_cast<std::size_t>(x)], T{0})) {
      throw Error(ErrorCode::division_by_zero, "instrument value x=" + std::to_string(x) + " has zero probability");
    }
  }
  const std::size_t n = joint.q.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (joint.q[i] == 0) continue;
    const int lx = static_cast<int>(i / per_lambda_x(joint.scenario));
    const int la = static_cast<int>((i / 4) % (std::size_t{1} << m));
    const int lb = static_cast<int>(i % 4);
    const int a = f_of(la, lx, m);
    const int b = g_of(lb, a);
    dist.p(a, b, lx) += joint.q[i];
  }
  for (int x = 0; x < m; ++x) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) dist.p(a, b, x) /= dist.p_x[static_cast<std::size_t>(x)];
    }
  }
  return dist;
}

template <class T>
InterventionalDistribution<T> interventional(const LatentJoint<T>& joint) {
  check_size(joint);
  InterventionalDistribution<T> out;
  for (auto& row : out.p_b_do_a) row = {T{0}, T{0}};
  for (std::size_t i = 0; i < joint.q.size(); ++i) {
    if (joint.q[i] == 0) continue;
    const int lb = static_cast<int>(i % 4);
    for (int a = 0; a < 2; ++a) out.p(g_of(lb, a), a) += joint.q[i];
  }
  return out;
}

template <class T>
T dependence_measure(const LatentJoint<T>& joint) {
  check_size(joint);
  const std::vector<T> px = lambda_x_marginal(joint);
  const std::size_t per = per_lambda_x(joint.scenario);
  std::vector<T> r(per, T{0});
  for (std::size_t i = 0; i < joint.q.size(); ++i) r[i % per] += joint.q[i];
  T total{0};
  for (std::size_t i = 0; i < joint.q.size(); ++i) {
    total += Num<T>::abs(T(joint.q[i] - px[i / per] * r[i % per]));
  }
  return total;
}

template <class T>
T dependence_measure_via_matrix(const LatentJoint<T>& joint) {
  check_size(joint);
  const auto mats = build_matrices(joint.scenario, lambda_x_marginal(joint), false);
  T total{0};
  for (const auto& v : mats.M.multiply(joint.q)) total += Num<T>::abs(v);
  return total;
}

template <class T>
LatentJoint<T> product_joint(const Scenario& scenario, const std::vector<T>& p_x, const std::vector<T>& r) {
  const std::size_t per = per_lambda_x(scenario);
  if (p_x.size() != static_cast<std::size_t>(scenario.x_card) || r.size() != per) {
    throw Error(ErrorCode::dimension_mismatch, "product_joint: marginal sizes do not match the scenario");
  }
  LatentJoint<T> joint;
  joint.scenario = scenario;
  joint.q.reserve(num_strategies(scenario));
  for (const auto& px : p_x) {
    for (const auto& rv : r) joint.q.push_back(px * rv);
  }
  return joint;
}

#define IVDEP_INSTANTIATE_STRATEGIES(T)                                                              \
  template ValidationReport validate_latent(const LatentJoint<T>&);                                 \
  template LatentJoint<T> parse_latent<T>(std::string_view);                                        \
  template std::string serialize_latent(const LatentJoint<T>&);                                     \
  template ScenarioMatrices<T> build_matrices(const Scenario&, const std::vector<T>&, bool);         \
  template ObservedDistribution<T> forward_distribution(const LatentJoint<T>&);                     \
  template InterventionalDistribution<T> interventional(const LatentJoint<T>&);                     \
  template T dependence_measure(const LatentJoint<T>&);                                             \
  template T dependence_measure_via_matrix(const LatentJoint<T>&);                                  \
  template LatentJoint<T> product_joint(const Scenario&, const std::vector<T>&, const std::vector<T>&);

IVDEP_INSTANTIATE_STRATEGIES(double)
IVDEP_INSTANTIATE_STRATEGIES(Rational)

}  // namespace ivdep
