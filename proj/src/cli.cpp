#include "ivdep/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

#include "ivdep/dependence.hpp"
#include "ivdep/error.hpp"
#include "ivdep/infocost.hpp"
#include "ivdep/quantum.hpp"
#include "ivdep/rng.hpp"
#include "json_util.hpp"

namespace ivdep::cli {

namespace {

using detail::json;

struct Config {
  std::string input;
  std::string do_input;
  std::string output;
  std::string ineq;
  std::string px;
  std::string alpha;
  std::string level;
  std::string kinst;
  std::string latent;
  std::string samples;
  std::string dump_lp;
  std::string estimator = "correlation";
  bool exact = false;
  bool witness = false;
  int grid = 20;
  int curve_grid = 50;
  int starts = 8;
  std::uint64_t seed = 1;
  long long n = 1000;
};

// Thrown while turning flag values into typed arguments.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write '" + path + "'");
  out << content;
}

json header(const char* command, bool exact) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}, {"mode", exact ? "exact" : "float"}};
}

template <class T>
json to_json(const T& v) {
  return detail::scalar_to_json(v);
}

template <class T>
json vec_json(std::span<const T> v) {
  json arr = json::array();
  for (const auto& x : v) arr.push_back(to_json(x));
  return arr;
}

template <class T>
json vec_json(const std::vector<T>& v) {
  return vec_json(std::span<const T>(v));
}

template <class T>
json table_json(const ObservedDistribution<T>& d) {
  json t = json::array();
  for (int x = 0; x < d.scenario.x_card; ++x) {
    t.push_back(json::array({json::array({to_json(d.p(0, 0, x)), to_json(d.p(0, 1, x))}),
                             json::array({to_json(d.p(1, 0, x)), to_json(d.p(1, 1, x))})}));
  }
  return t;
}

template <class T>
json do_json(const InterventionalDistribution<T>& d) {
  return json::array({json::array({to_json(d.p(0, 0)), to_json(d.p(1, 0))}),
                      json::array({to_json(d.p(0, 1)), to_json(d.p(1, 1))})});
}

InequalitySpec parse_ineq(const std::string& id) {
  if (id.empty()) throw UsageError("--ineq is required");
  try {
    return inequality_by_id(id);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

template <class T>
T parse_scalar(const std::string& flag, const std::string& text) {
  if (text.empty()) throw UsageError(flag + " is required");
  try {
    return Num<T>::parse(text);
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

template <class T>
std::vector<T> parse_px(const std::string& text, int x_card) {
  std::vector<T> px;
  if (text.empty() || text == "uniform") {
    const Rational share = make_rational(1, x_card);
    for (int x = 0; x < x_card; ++x) px.push_back(Num<T>::from_rational(share));
    return px;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) px.push_back(parse_scalar<T>("--px", item));
  if (px.size() != static_cast<std::size_t>(x_card)) {
    throw UsageError("--px has " + std::to_string(px.size()) + " entries, the inequality needs " + std::to_string(x_card));
  }
  T total{0};
  for (const auto& v : px) {
    if (v < T{0}) throw UsageError("--px has a negative entry");
    total += v;
  }
  if (!Num<T>::equal(total, T(1))) throw UsageError("--px does not sum to 1");
  return px;
}

template <class T>
int cmd_validate(const Config& c, std::ostream& out) {
  const auto dist = parse_distribution<T>(read_file(c.input), false);
  const ValidationReport report = validate_distribution(dist);
  json doc = header("validate", c.exact);
  doc["ok"] = report.ok();
  doc["violations"] = report.violations;
  out << doc.dump(2) << '\n';
  return report.ok() ? success : domain_error;
}

template <class T>
int cmd_eval(const Config& c, std::ostream& out) {
  const InequalitySpec spec = parse_ineq(c.ineq);
  const auto dist = parse_distribution<T>(read_file(c.input));
  std::optional<InterventionalDistribution<T>> dos;
  if (!c.do_input.empty()) dos = parse_interventional<T>(read_file(c.do_input));
  const auto r = evaluate(spec, dist, dos);
  json doc = header("eval", c.exact);
  doc["ineq"] = spec.id;
  doc["k_value"] = to_json(r.k_value);
  doc["alpha"] = to_json(r.alpha);
  doc["violated"] = r.violated;
  out << doc.dump(2) << '\n';
  return success;
}

template <class T>
int cmd_mindep(const Config& c, std::ostream& out) {
  const InequalitySpec spec = parse_ineq(c.ineq);
  const auto px = parse_px<T>(c.px, spec.x_card);
  const T alpha = parse_scalar<T>("--alpha", c.alpha);
  const auto pt = solve_dependence(spec, px, alpha);
  if (!c.dump_lp.empty()) {
    std::ostringstream primal, dual;
    lp::write_lp_format(pt.primal, primal);
    lp::write_lp_format(pt.dual, dual);
    write_file(c.dump_lp + ".primal.lp", primal.str());
    write_file(c.dump_lp + ".dual.lp", dual.str());
  }
  json doc = header("mindep", c.exact);
  doc["ineq"] = spec.id;
  doc["p_x"] = vec_json(px);
  doc["alpha"] = to_json(alpha);
  doc["dependence"] = to_json(pt.dependence);
  doc["dependence_approx"] = Num<T>::to_double(pt.dependence);
  doc["branch"] = std::string(to_string(pt.branch));
  json dual;
  for (const char* name : {"y", "u", "v", "z"}) {
    if (pt.dual.find_variable_block(name)) dual[name] = vec_json(lp::block_values(pt.dual, pt.dual_point, name));
  }
  doc["dual"] = dual;
  doc["latent_q"] = vec_json(pt.q());
  doc["certificate"] = {{"ok", pt.certificate.ok},
                        {"gap", to_json(pt.certificate.gap)},
                        {"primal_objective", to_json(pt.certificate.primal.objective)},
                        {"dual_objective", to_json(pt.certificate.dual.objective)},
                        {"message", pt.certificate.message}};
  out << doc.dump(2) << '\n';
  return pt.certificate.ok ? success : domain_error;
}

template <class T>
int cmd_curve(const Config& c, std::ostream& out) {
  const InequalitySpec spec = parse_ineq(c.ineq);
  const auto px = parse_px<T>(c.px, spec.x_card);
  if (c.curve_grid < 2) throw UsageError("--grid must be at least 2");
  const auto curve = dependence_curve(spec, px);
  const std::string csv = curve_csv(curve, static_cast<std::size_t>(c.curve_grid));
  if (c.output.empty()) {
    out << csv;
    return success;
  }
  write_file(c.output, csv);
  json doc = header("curve", c.exact);
  doc["ineq"] = spec.id;
  doc["p_x"] = vec_json(px);
  doc["alpha_max"] = to_json(curve.alpha_max);
  json bps = json::array();
  for (const auto& [a, m] : curve.breakpoints) bps.push_back(json::array({to_json(a), to_json(m)}));
  doc["breakpoints"] = bps;
  doc["slopes"] = vec_json(curve.slopes);
  doc["single_segment"] = curve.single_segment();
  doc["lp_solves"] = curve.lp_solves;
  doc["csv"] = c.output;
  out << doc.dump(2) << '\n';
  return success;
}

template <class T>
int cmd_adapt(const Config& c, std::ostream& out) {
  const InequalitySpec spec = parse_ineq(c.ineq);
  const auto px = parse_px<T>(c.px, spec.x_card);
  const T level = parse_scalar<T>("--level", c.level);
  if (level < T{0}) throw UsageError("--level must be nonnegative");
  const auto ab = adapted_bound(spec, px, level);
  json doc = header("adapt", c.exact);
  doc["ineq"] = spec.id;
  doc["p_x"] = vec_json(px);
  doc["dependence_level"] = to_json(ab.dependence_level);
  doc["slope"] = to_json(ab.slope);
  doc["threshold"] = to_json(ab.threshold);
  doc["statement"] = ab.statement();
  out << doc.dump(2) << '\n';
  return success;
}

int cmd_infocost(const Config& c, std::ostream& out) {
  const Rational k = parse_scalar<Rational>("--kinst", c.kinst);
  const double kd = k.get_d();
  json doc = header("infocost", c.exact);
  doc["k_value"] = kd;
  doc["bound_bits"] = min_info_cost(kd);
  if (kd >= 0) doc["note"] = "no violation: independence already reproduces this value";
  if (c.witness) {
    const auto model = achievability_model<Rational>(k);
    const auto dist = forward_distribution(model.witness);
    const auto r = evaluate(inequality_by_id("pearl-00"), dist);
    doc["witness"] = json::parse(serialize_latent(model.witness));
    doc["witness_grouping"] = model.grouping;
    doc["witness_k_value"] = r.k_value.get_d();
    doc["witness_mutual_information"] = mutual_information(model.witness);
  }
  out << doc.dump(2) << '\n';
  return success;
}

int cmd_quantum(const Config& c, std::ostream& out) {
  const InequalitySpec spec = parse_ineq(c.ineq);
  const auto px = parse_px<double>(c.px, spec.x_card);
  if (c.grid < 2) throw UsageError("--grid must be at least 2");
  OptimizerConfig cfg;
  cfg.grid = c.grid;
  cfg.seed = c.seed;
  cfg.starts = c.starts;
  const QuantumOptimum best = maximize_violation(spec, cfg);
  json doc = header("quantum", false);
  doc["target"] = spec.id;
  doc["alpha"] = best.alpha;
  doc["angles"] = {{"state_angle", best.angles.state_angle}, {"theta", best.angles.theta}, {"eta", best.angles.eta}};
  doc["p_ab_given_x"] = table_json(best.p);
  doc["p_b_do_a"] = do_json(best.p_do);
  doc["p_x"] = px;
  try {
    doc["min_dependence"] = min_dependence(spec, px, std::max(best.alpha, 0.0));
  } catch (const Error& e) {
    doc["min_dependence"] = nullptr;
    doc["min_dependence_note"] = e.what();
  }
  doc["optimizer"] = {{"grid", c.grid},
                      {"seed", c.seed},
                      {"starts", c.starts},
                      {"tolerance", cfg.tolerance},
                      {"evaluations", best.evaluations},
                      {"rng", std::string(Rng::algorithm)}};
  if (!c.output.empty()) {
    write_file(c.output, doc.dump(2) + "\n");
    out << json{{"schema_version", kSchemaVersion}, {"command", "quantum"}, {"alpha", best.alpha}, {"out", c.output}}.dump(2)
        << '\n';
  } else {
    out << doc.dump(2) << '\n';
  }
  return success;
}

template <class T>
int cmd_simulate(const Config& c, std::ostream& out) {
  if (c.latent.empty()) throw UsageError("--latent is required");
  if (c.n < 0) throw UsageError("--n must be nonnegative");
  const auto joint = parse_latent<T>(read_file(c.latent));
  const auto dist = forward_distribution(joint);
  const auto dos = interventional(joint);
  std::vector<double> weights;
  for (const auto& v : joint.q) weights.push_back(Num<T>::to_double(v));
  const DiscreteSampler sampler(weights);
  const auto strategies = enumerate_strategies(joint.scenario);
  Rng rng(c.seed);
  SampleSet samples;
  samples.reserve(static_cast<std::size_t>(c.n));
  std::vector<long long> counts(joint.scenario.num_cells(), 0);
  for (long long i = 0; i < c.n; ++i) {
    const auto& s = strategies[sampler(rng)];
    const int a = s.f[static_cast<std::size_t>(s.lambda_x)];
    const int b = s.g[static_cast<std::size_t>(a)];
    samples.push_back({s.lambda_x, a, b});
    ++counts[cell_index(a, b, s.lambda_x)];
  }
  if (!c.output.empty()) write_file(c.output, samples_to_csv(samples));
  json doc = header("simulate", c.exact);
  doc["distribution"] = json::parse(serialize_distribution(dist));
  doc["interventional"] = json::parse(serialize_interventional(dos));
  doc["dependence"] = to_json(dependence_measure(joint));
  doc["samples"] = c.n;
  json table = json::array();
  for (int x = 0; x < joint.scenario.x_card; ++x) {
    table.push_back(json::array({json::array({counts[cell_index(0, 0, x)], counts[cell_index(0, 1, x)]}),
                                 json::array({counts[cell_index(1, 0, x)], counts[cell_index(1, 1, x)]})}));
  }
  doc["counts"] = table;
  doc["rng"] = {{"algorithm", std::string(Rng::algorithm)}, {"seed", c.seed}};
  if (!c.output.empty()) doc["samples_file"] = c.output;
  out << doc.dump(2) << '\n';
  return success;
}

int cmd_ivbeta(const Config& c, std::ostream& out) {
  if (c.samples.empty()) throw UsageError("--samples is required");
  BetaEstimator est;
  if (c.estimator == "correlation") est = BetaEstimator::correlation_ratio;
  else if (c.estimator == "covariance") est = BetaEstimator::covariance_ratio;
  else throw UsageError("--estimator must be correlation or covariance");
  const SampleSet samples = parse_samples_csv(read_file(c.samples));
  json doc = header("ivbeta", false);
  doc["estimator"] = c.estimator;
  doc["n"] = samples.size();
  doc["beta"] = iv_beta(samples, est);
  out << doc.dump(2) << '\n';
  return success;
}

template <class T>
int dispatch(const std::string& name, const Config& c, std::ostream& out) {
  if (name == "validate") return cmd_validate<T>(c, out);
  if (name == "eval") return cmd_eval<T>(c, out);
  if (name == "mindep") return cmd_mindep<T>(c, out);
  if (name == "curve") return cmd_curve<T>(c, out);
  if (name == "adapt") return cmd_adapt<T>(c, out);
  if (name == "simulate") return cmd_simulate<T>(c, out);
  if (name == "infocost") return cmd_infocost(c, out);
  if (name == "quantum") return cmd_quantum(c, out);
  if (name == "ivbeta") return cmd_ivbeta(c, out);
  throw UsageError("unknown command '" + name + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Measurement dependence in the instrumental scenario"};
  app.name("ivdep");
  app.require_subcommand(1, 1);
  app.add_flag("--exact", c.exact, "exact rational arithmetic");

  auto* validate = app.add_subcommand("validate", "check a distribution file");
  validate->add_option("--input", c.input, "distribution JSON")->required();

  auto* eval = app.add_subcommand("eval", "evaluate an inequality on a distribution");
  eval->add_option("--input", c.input, "distribution JSON")->required();
  eval->add_option("--do", c.do_input, "interventional distribution JSON");
  eval->add_option("--ineq", c.ineq, "inequality id")->required();

  auto* mindep = app.add_subcommand("mindep", "minimal dependence for one violation");
  mindep->add_option("--ineq", c.ineq)->required();
  mindep->add_option("--px", c.px, "instrument marginal, comma separated, or 'uniform'");
  mindep->add_option("--alpha", c.alpha)->required();
  mindep->add_option("--dump-lp", c.dump_lp, "write PREFIX.primal.lp and PREFIX.dual.lp");

  auto* curve = app.add_subcommand("curve", "piecewise linear dependence curve");
  curve->add_option("--ineq", c.ineq)->required();
  curve->add_option("--px", c.px);
  curve->add_option("--out", c.output, "CSV path (stdout if absent)");
  curve->add_option("--grid", c.curve_grid, "grid points")->capture_default_str();

  auto* adapt = app.add_subcommand("adapt", "inequality relaxed for a dependence level");
  adapt->add_option("--ineq", c.ineq)->required();
  adapt->add_option("--px", c.px);
  adapt->add_option("--level", c.level, "dependence level M")->required();

  auto* info = app.add_subcommand("infocost", "informational cost of a Pearl violation");
  info->add_option("--kinst", c.kinst, "value of the Pearl expression")->required();
  info->add_flag("--witness", c.witness, "include a model attaining the bound");

  auto* quantum = app.add_subcommand("quantum", "maximal quantum violation");
  quantum->add_option("--target", c.ineq)->required();
  quantum->add_option("--grid", c.grid)->capture_default_str();
  quantum->add_option("--seed", c.seed)->capture_default_str();
  quantum->add_option("--starts", c.starts)->capture_default_str();
  quantum->add_option("--px", c.px, "instrument marginal for the classical comparison");
  quantum->add_option("--out", c.output);

  auto* simulate = app.add_subcommand("simulate", "statistics and samples of a latent model");
  simulate->add_option("--latent", c.latent, "latent joint JSON")->required();
  simulate->add_option("--n", c.n)->capture_default_str();
  simulate->add_option("--seed", c.seed)->capture_default_str();
  simulate->add_option("--out", c.output, "sample CSV path");

  auto* beta = app.add_subcommand("ivbeta", "instrumental estimate of a linear effect");
  beta->add_option("--samples", c.samples, "CSV with header x,a,b")->required();
  beta->add_option("--estimator", c.estimator, "correlation or covariance")->capture_default_str();

  for (auto* sub : app.get_subcommands({})) sub->add_flag("--exact", c.exact, "exact rational arithmetic");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return success;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return success;
  } catch (const CLI::ParseError& e) {
    err << "ivdep: usage error: " << e.what() << '\n';
    return usage_error;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return c.exact ? dispatch<Rational>(name, c, out) : dispatch<double>(name, c, out);
  } catch (const UsageError& e) {
    err << "ivdep: usage error: " << e.what() << '\n';
    return usage_error;
  } catch (const Error& e) {
    err << "ivdep: error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return domain_error;
  }
}

}  // namespace ivdep::cli
