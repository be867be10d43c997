#include "ivdep/scenario.hpp"

#include <cmath>
#include <sstream>

#include "ivdep/error.hpp"
#include "json_util.hpp"

namespace ivdep {

using detail::json;

void Scenario::validate() const {
  if (x_card < 2) {
    throw Error(ErrorCode::invalid_argument, "instrument cardinality must be at least 2");
  }
}

template <class T>
ObservedDistribution<T> ObservedDistribution<T>::uniform(Scenario scenario) {
  scenario.validate();
  ObservedDistribution<T> d;
  d.scenario = scenario;
  d.p_x.assign(static_cast<std::size_t>(scenario.x_card), T(1) / T(scenario.x_card));
  d.table.assign(scenario.num_cells(), T(1) / T(4));
  return d;
}

namespace {

template <class T>
std::string cell_name(int a, int b, int x) {
  std::ostringstream os;
  os << '(' << a << ',' << b << ',' << x << ')';
  return os.str();
}

template <class T>
void check_probability(const T& v, const std::string& where, ValidationReport& report) {
  const T tol = Num<T>::tolerance;
  if (v < -tol) report.violations.push_back("entry < 0 at " + where);
  if (v > T(1) + tol) report.violations.push_back("entry > 1 at " + where);
}

}  // namespace

template <class T>
ValidationReport validate_distribution(const ObservedDistribution<T>& dist) {
  ValidationReport report;
  const int m = dist.scenario.x_card;
  if (m < 2) report.violations.push_back("x_card must be at least 2");
  if (dist.p_x.size() != static_cast<std::size_t>(m)) {
    report.violations.push_back("p_x has " + std::to_string(dist.p_x.size()) + " entries, expected " + std::to_string(m));
    return report;
  }
  if (dist.table.size() != dist.scenario.num_cells()) {
    report.violations.push_back("p_ab_given_x has wrong size");
    return report;
  }
  T px_total{0};
  for (int x = 0; x < m; ++x) {
    check_probability(dist.p_x[static_cast<std::size_t>(x)], "p_x[" + std::to_string(x) + "]", report);
    px_total += dist.p_x[static_cast<std::size_t>(x)];
  }
  if (!Num<T>::equal(px_total, T(1))) report.violations.push_back("p_x not normalized");
  for (int x = 0; x < m; ++x) {
    T total{0};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        check_probability(dist.p(a, b, x), cell_name<T>(a, b, x), report);
        total += dist.p(a, b, x);
      }
    }
    if (!Num<T>::equal(total, T(1))) report.violations.push_back("x=" + std::to_string(x) + " not normalized");
  }
  return report;
}

template <class T>
ValidationReport validate_interventional(const InterventionalDistribution<T>& dist) {
  ValidationReport report;
  for (int a = 0; a < 2; ++a) {
    T total{0};
    for (int b = 0; b < 2; ++b) {
      check_probability(dist.p(b, a), "p(" + std::to_string(b) + "|do(" + std::to_string(a) + "))", report);
      total += dist.p(b, a);
    }
    if (!Num<T>::equal(total, T(1))) report.violations.push_back("do(a=" + std::to_string(a) + ") not normalized");
  }
  return report;
}

template <class T>
ObservedDistribution<T> parse_distribution(std::string_view json_text, bool check) {
  const json doc = detail::parse_json(json_text);
  ObservedDistribution<T> dist;
  const json& scen = detail::require(doc, "scenario");
  const json& xc = detail::require(scen, "x_card");
  if (!xc.is_number_integer()) throw Error(ErrorCode::malformed_input, "x_card must be an integer");
  dist.scenario.x_card = xc.get<int>();
  dist.scenario.validate();
  const std::size_t m = static_cast<std::size_t>(dist.scenario.x_card);

  const json& px = detail::require(doc, "p_x");
  if (!px.is_array()) throw Error(ErrorCode::malformed_input, "p_x must be an array");
  if (px.size() != m) {
    throw Error(ErrorCode::dimension_mismatch, "p_x has " + std::to_string(px.size()) + " entries, expected " + std::to_string(m));
  }
  for (const auto& v : px) dist.p_x.push_back(detail::scalar_from_json<T>(v));

  const json& table = detail::require(doc, "p_ab_given_x");
  if (!table.is_array()) throw Error(ErrorCode::malformed_input, "p_ab_given_x must be an array");
  if (table.size() != m) {
    throw Error(ErrorCode::dimension_mismatch, "p_ab_given_x has " + std::to_string(table.size()) + " x-slices, expected " + std::to_string(m));
  }
  dist.table.assign(dist.scenario.num_cells(), T{0});
  for (std::size_t x = 0; x < m; ++x) {
    const json& slice = table[x];
    if (!slice.is_array() || slice.size() != 2) throw Error(ErrorCode::dimension_mismatch, "each x-slice must be 2x2");
    for (std::size_t a = 0; a < 2; ++a) {
      if (!slice[a].is_array() || slice[a].size() != 2) throw Error(ErrorCode::dimension_mismatch, "each x-slice must be 2x2");
      for (std::size_t b = 0; b < 2; ++b) {
        dist.p(static_cast<int>(a), static_cast<int>(b), static_cast<int>(x)) = detail::scalar_from_json<T>(slice[a][b]);
      }
    }
  }
  if (!check) return dist;
  const ValidationReport report = validate_distribution(dist);
  if (!report.ok()) {
    throw Error(ErrorCode::invalid_distribution, "invalid distribution: " + report.violations.front());
  }
  return dist;
}

template <class T>
std::string serialize_distribution(const ObservedDistribution<T>& dist) {
  json doc;
  doc["scenario"] = {{"x_card", dist.scenario.x_card}};
  json px = json::array();
  for (const auto& v : dist.p_x) px.push_back(detail::scalar_to_json(v));
  doc["p_x"] = px;
  json table = json::array();
  for (int x = 0; x < dist.scenario.x_card; ++x) {
    json slice = json::array();
    for (int a = 0; a < 2; ++a) {
      slice.push_back(json::array({detail::scalar_to_json(dist.p(a, 0, x)), detail::scalar_to_json(dist.p(a, 1, x))}));
    }
    table.push_back(slice);
  }
  doc["p_ab_given_x"] = table;
  return doc.dump();
}

template <class T>
InterventionalDistribution<T> parse_interventional(std::string_view json_text) {
  const json doc = detail::parse_json(json_text);
  const json& t = detail::require(doc, "p_b_do_a");
  if (!t.is_array() || t.size() != 2) throw Error(ErrorCode::dimension_mismatch, "p_b_do_a must be 2x2");
  InterventionalDistribution<T> dist;
  for (int a = 0; a < 2; ++a) {
    const json& row = t[static_cast<std::size_t>(a)];
    if (!row.is_array() || row.size() != 2) throw Error(ErrorCode::dimension_mismatch, "p_b_do_a must be 2x2");
    for (int b = 0; b < 2; ++b) dist.p(b, a) = detail::scalar_from_json<T>(row[static_cast<std::size_t>(b)]);
  }
  const ValidationReport report = validate_interventional(dist);
  if (!report.ok()) {
    throw Error(ErrorCode::invalid_distribution, "invalid interventional distribution: " + report.violations.front());
  }
  return dist;
}

template <class T>
std::string serialize_interventional(const InterventionalDistribution<T>& dist) {
  json t = json::array();
  for (int a = 0; a < 2; ++a) {
    t.push_back(json::array({detail::scalar_to_json(dist.p(0, a)), detail::scalar_to_json(dist.p(1, a))}));
  }
  return json{{"p_b_do_a", t}}.dump();
}

SampleSet parse_samples_csv(std::string_view text) {
  SampleSet out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != "x,a,b") throw Error(ErrorCode::malformed_input, "sample CSV must start with header x,a,b");
      header = false;
      continue;
    }
    Sample s;
    char c1 = 0, c2 = 0;
    std::istringstream row(line);
    if (!(row >> s.x >> c1 >> s.a >> c2 >> s.b) || c1 != ',' || c2 != ',') {
      throw Error(ErrorCode::malformed_input, "bad sample row at line " + std::to_string(lineno));
    }
    out.push_back(s);
  }
  if (header) throw Error(ErrorCode::malformed_input, "empty sample CSV");
  return out;
}

std::string samples_to_csv(const SampleSet& samples) {
  std::string out = "x,a,b\n";
  out.reserve(out.size() + samples.size() * 6);
  for (const auto& s : samples) {
    out += std::to_string(s.x);
    out += ',';
    out += std::to_string(s.a);
    out += ',';
    out += std::to_string(s.b);
    out += '\n';
  }
  return out;
}

ValidationReport validate_samples(const SampleSet& samples, const Scenario& scenario) {
  ValidationReport report;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.x < 0 || s.x >= scenario.x_card || s.a < 0 || s.a > 1 || s.b < 0 || s.b > 1) {
      report.violations.push_back("row " + std::to_string(i) + " out of range");
    }
  }
  return report;
}

double iv_beta(const SampleSet& samples, BetaEstimator estimator) {
  if (samples.empty()) throw Error(ErrorCode::division_by_zero, "no samples");
  double ex = 0, ea = 0, eb = 0, exa = 0, exb = 0;
  for (const auto& s : samples) {
    ex += s.x;
    ea += s.a;
    eb += s.b;
    exa += static_cast<double>(s.x) * s.a;
    exb += static_cast<double>(s.x) * s.b;
  }
  const double n = static_cast<double>(samples.size());
  ex /= n;
  ea /= n;
  eb /= n;
  exa /= n;
  exb /= n;
  if (estimator == BetaEstimator::covariance_ratio) {
    const double cov_xa = exa - ex * ea;
    const double cov_xb = exb - ex * eb;
    if (cov_xa == 0.0) throw Error(ErrorCode::division_by_zero, "cov(X,A) vanishes");
    return cov_xb / cov_xa;
  }
  if (ex == 0.0 || ea == 0.0 || eb == 0.0 || exa == 0.0) {
    throw Error(ErrorCode::division_by_zero, "one of <X>, <A>, <B>, <XA> vanishes");
  }
  const double corr_xb = exb / (ex * eb);
  const double corr_xa = exa / (ex * ea);
  return corr_xb / corr_xa;
}

#define IVDEP_INSTANTIATE_SCENARIO(T)                                                           \
  template struct ObservedDistribution<T>;                                                      \
  template ValidationReport validate_distribution(const ObservedDistribution<T>&);             \
  template ValidationReport validate_interventional(const InterventionalDistribution<T>&);     \
  template ObservedDistribution<T> parse_distribution<T>(std::string_view, bool);              \
  template std::string serialize_distribution(const ObservedDistribution<T>&);                 \
  template InterventionalDistribution<T> parse_interventional<T>(std::string_view);            \
  template std::string serialize_interventional(const InterventionalDistribution<T>&);

IVDEP_INSTANTIATE_SCENARIO(double)
IVDEP_INSTANTIATE_SCENARIO(Rational)

}  // namespace ivdep
