#include "ivdep/infocost.hpp"

#include <cmath>

#include "ivdep/error.hpp"

namespace ivdep {

namespace {

double plogp(double p) { return p > 0 ? p * std::log2(p) : 0.0; }

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::out_of_range, "probability outside [0, 1]");
  return -plogp(p) - plogp(1.0 - p);
}

double min_info_cost(double k_value) {
  if (k_value < -1.0) throw Error(ErrorCode::out_of_range, "Pearl value below -1 is impossible");
  if (k_value >= 0.0) return 0.0;
  return 1.0 - binary_entropy((1.0 - k_value) / 2.0);
}

template <class T>
double mutual_information(const LatentJoint<T>& joint) {
  const std::size_t n = num_strategies(joint.scenario);
  if (joint.q.size() != n) throw Error(ErrorCode::dimension_mismatch, "q has wrong length");
  const std::size_t m = static_cast<std::size_t>(joint.scenario.x_card);
  const std::size_t per = n / m;
  std::vector<double> q(n), px(m, 0.0), r(per, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = Num<T>::to_double(joint.q[i]);
    px[i / per] += q[i];
    r[i % per] += q[i];
  }
  double info = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] <= 0) continue;
    info += q[i] * std::log2(q[i] / (px[i / per] * r[i % per]));
  }
  return info < 0 ? 0.0 : info;
}

template <class T>
InfoCostModel<T> achievability_model(const T& k_value) {
  if (k_value < T(-1) || !(k_value < T(0))) {
    throw Error(ErrorCode::out_of_range, "achievability needs -1 <= k < 0");
  }
  const Scenario s{2};
  InfoCostModel<T> model;
  model.k_value = k_value;
  model.witness.scenario = s;
  model.witness.q.assign(num_strategies(s), T{0});
  const T w = (T(1) - k_value) / T(2);
  auto at = [&](int x, int lb) -> T& { return model.witness.q[strategy_index(s, x, 0, lb)]; };
  // E = 0 group: g ≡ 0 (λb = 0); E = 1 group: g ≡ 1 (λb = 3).
  at(0, 0) = w / T(2);
  at(1, 0) = (T(1) - w) / T(2);
  at(1, 3) = w / T(2);
  at(0, 3) = (T(1) - w) / T(2);
  model.grouping = {0, -1, -1, 1};
  return model;
}

template double mutual_information(const LatentJoint<double>&);
template double mutual_information(const LatentJoint<Rational>&);
template InfoCostModel<double> achievability_model(const double&);
template InfoCostModel<Rational> achievability_model(const Rational&);

}  // namespace ivdep
