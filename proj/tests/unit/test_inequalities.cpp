#include <doctest.h>

#include "helpers.hpp"
#include "ivdep/inequalities.hpp"
#include "ivdep/rng.hpp"
#include "ivdep/strategies.hpp"

using namespace ivdep;
using ivdep::test::error_code_of;
using ivdep::test::R;

namespace {

// Random rational point of the simplex with small denominators.
std::vector<Rational> rational_simplex(Rng& rng, std::size_t n) {
  std::vector<long> w(n);
  long total = 0;
  for (auto& v : w) {
    v = static_cast<long>(rng.below(5));
    total += v;
  }
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  std::vector<Rational> out;
  for (long v : w) out.push_back(R(v, total));
  return out;
}

std::vector<Rational> positive_px(Rng& rng, int m) {
  std::vector<long> w(static_cast<std::size_t>(m));
  long total = 0;
  for (auto& v : w) {
    v = 1 + static_cast<long>(rng.below(4));
    total += v;
  }
  std::vector<Rational> out;
  for (long v : w) out.push_back(R(v, total));
  return out;
}

Relabeling random_relabeling(Rng& rng, int m, bool ace_safe) {
  Relabeling r = Relabeling::identity(m);
  for (int i = m - 1; i > 0; --i) std::swap(r.x_perm[static_cast<std::size_t>(i)], r.x_perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
  r.a_flip = static_cast<int>(rng.below(2));
  r.b_flip[0] = static_cast<int>(rng.below(2));
  r.b_flip[1] = ace_safe ? r.b_flip[0] : static_cast<int>(rng.below(2));
  return r;
}

Relabeling inverse(const Relabeling& r) {
  Relabeling inv = r;
  for (std::size_t x = 0; x < r.x_perm.size(); ++x) inv.x_perm[static_cast<std::size_t>(r.x_perm[x])] = static_cast<int>(x);
  for (int a = 0; a < 2; ++a) inv.b_flip[static_cast<std::size_t>(a)] = r.b_flip[static_cast<std::size_t>(a ^ r.a_flip)];
  return inv;
}

std::vector<InequalitySpec> every_inequality() {
  std::vector<InequalitySpec> out;
  for (int m = 2; m <= 4; ++m) {
    for (auto& s : catalog(Scenario{m})) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_SUITE("inequalities") {
  TEST_CASE("catalog contents") {
    CHECK(catalog(Scenario{2}).size() == 8);
    CHECK(catalog(Scenario{3}).size() == 3);
    CHECK(catalog(Scenario{4}).size() == 1);
    CHECK(catalog(Scenario{5}).empty());
    CHECK(catalog_ids().size() == 9);
    for (const auto& s : every_inequality()) {
      CHECK(inequality_by_id(s.id).obs_coeffs == s.obs_coeffs);
      CHECK(inequality_by_id(s.id).id == s.id);
    }
  }

  TEST_CASE("pearl-00 coefficients") {
    const auto s = inequality_by_id("pearl-00");
    CHECK(s.constant == 1);
    CHECK(s.obs(0, 0, 0) == -1);
    CHECK(s.obs(0, 1, 1) == -1);
    CHECK_FALSE(s.has_do());
    const auto t = inequality_by_id("pearl-11");  // 1 - p(1,0|1) - p(1,1|0)
    CHECK(t.obs(1, 0, 1) == -1);
    CHECK(t.obs(1, 1, 0) == -1);
  }

  TEST_CASE("evaluation on hand-made distributions") {
    const auto uni = ObservedDistribution<Rational>::uniform(Scenario{2});
    CHECK(evaluate(inequality_by_id("pearl-00"), uni).k_value == R(1, 2));
    CHECK_FALSE(evaluate(inequality_by_id("pearl-00"), uni).violated);

    ObservedDistribution<Rational> d = uni;
    for (auto& v : d.table) v = R(0);
    d.p(0, 0, 0) = R(1);
    d.p(0, 1, 1) = R(1);
    const auto rep = evaluate(inequality_by_id("pearl-00"), d);
    CHECK(rep.k_value == R(-1));
    CHECK(rep.alpha == R(1));
    CHECK(rep.violated);

    // c1 on the uniform table: ACE + 2 - 1/2 - 3/4.
    InterventionalDistribution<Rational> iv;
    iv.p(0, 0) = R(7, 10);
    iv.p(1, 0) = R(3, 10);
    iv.p(0, 1) = R(1, 5);
    iv.p(1, 1) = R(4, 5);
    CHECK(ace(iv) == R(1, 2));
    CHECK(evaluate(inequality_by_id("c1"), uni, std::optional(iv)).k_value == R(5, 4));
  }

  TEST_CASE("evaluation errors") {
    const auto uni2 = ObservedDistribution<double>::uniform(Scenario{2});
    CHECK(error_code_of([&] { evaluate(inequality_by_id("c1"), uni2); }) == ErrorCode::invalid_argument);
    CHECK(error_code_of([&] { evaluate(inequality_by_id("bonet"), uni2); }) == ErrorCode::dimension_mismatch);
    CHECK(error_code_of([] { inequality_by_id("nope"); }) == ErrorCode::invalid_argument);
    CHECK(error_code_of([] { inequality_by_id("c1/x12"); }) == ErrorCode::invalid_argument);
    CHECK(error_code_of([] { inequality_by_id("c1/x00"); }) == ErrorCode::invalid_argument);
    CHECK(error_code_of([] { inequality_by_id("c1/b01"); }) == ErrorCode::unsupported);
    CHECK(error_code_of([] { inequality_by_id("pearl-00/q"); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("relabeled ids round trip") {
    CHECK(inequality_by_id("pearl-00/b01").id == "pearl-00/b01");
    CHECK(inequality_by_id("bonet/x201/a").id == "bonet/x201/a");
    Relabeling r = Relabeling::identity(3);
    r.x_perm = {2, 0, 1};
    r.a_flip = 1;
    CHECK(r.suffix() == "/x201/a");
    CHECK(Relabeling::identity(3).suffix().empty());
  }

  TEST_CASE("every inequality holds for random independent instruments") {
    Rng rng(5);
    for (const auto& spec : every_inequality()) {
      const Scenario sc{spec.x_card};
      for (int trial = 0; trial < 40; ++trial) {
        const auto px = positive_px(rng, spec.x_card);
        const auto r = rational_simplex(rng, num_strategies(sc) / static_cast<std::size_t>(spec.x_card));
        const auto joint = product_joint(sc, px, r);
        const auto rep = evaluate(spec, forward_distribution(joint), std::optional(interventional(joint)));
        CHECK_MESSAGE(rep.k_value >= 0, spec.id);
        // Relabelings of valid inequalities stay valid.
        const auto rl = random_relabeling(rng, spec.x_card, spec.ace_term);
        const auto moved = relabel(spec, rl);
        const auto rep2 = evaluate(moved, relabel(forward_distribution(joint), rl),
                                   std::optional(relabel(interventional(joint), rl)));
        CHECK(rep2.k_value == rep.k_value);
      }
    }
  }

  TEST_CASE("relabel invariance and inverse") {
    Rng rng(9);
    for (const auto& spec : every_inequality()) {
      const Scenario sc{spec.x_card};
      for (int trial = 0; trial < 10; ++trial) {
        LatentJoint<Rational> joint{sc, rational_simplex(rng, num_strategies(sc))};
        for (int x = 0; x < spec.x_card; ++x) joint.q[strategy_index(sc, x, 0, 0)] += R(1, 10);
        const Rational total = [&] { Rational t(0); for (auto& v : joint.q) t += v; return t; }();
        for (auto& v : joint.q) v /= total;
        const auto d = forward_distribution(joint);
        const auto iv = interventional(joint);
        const auto r = random_relabeling(rng, spec.x_card, spec.ace_term);
        const auto moved = relabel(spec, r);
        CHECK(evaluate(moved, relabel(d, r), std::optional(relabel(iv, r))).k_value ==
              evaluate(spec, d, std::optional(iv)).k_value);
        const auto back = relabel(moved, inverse(r));
        CHECK(back.obs_coeffs == spec.obs_coeffs);
        CHECK(back.do_coeffs == spec.do_coeffs);
        CHECK(back.constant == spec.constant);
        CHECK(relabel(relabel(d, r), inverse(r)).table == d.table);
      }
    }
  }

  TEST_CASE("treatment-dependent outcome flips are rejected for ACE terms") {
    Relabeling r = Relabeling::identity(2);
    r.b_flip = {0, 1};
    CHECK(error_code_of([&] { relabel(inequality_by_id("c1"), r); }) == ErrorCode::unsupported);
    CHECK_NOTHROW(relabel(inequality_by_id("pearl-00"), r));
  }

  TEST_CASE("linearize splits the absolute value") {
    const auto c1 = inequality_by_id("c1");
    CHECK(branches(c1).size() == 2);
    CHECK(branches(inequality_by_id("bonet")) == std::vector<AceBranch>{AceBranch::nonneg});
    const auto pos = linearize(c1, AceBranch::nonneg);
    REQUIRE(pos.alpha_rows.size() == 1);
    REQUIRE(pos.sign_rows.size() == 1);
    // D = p(0|do0) - p(0|do1); the form is K with ACE := D, the sign row -D <= 0.
    CHECK(pos.alpha_rows[0].dos[ScenarioMatrices<double>::do_row(0, 0)] == 1);
    CHECK(pos.alpha_rows[0].dos[ScenarioMatrices<double>::do_row(1, 0)] == -1);
    CHECK(pos.sign_rows[0].dos[ScenarioMatrices<double>::do_row(0, 0)] == -1);
    CHECK(pos.sign_rows[0].obs.size() == 8);
    const auto comb = linearize(c1, AceBranch::combined);
    CHECK(comb.alpha_rows.size() == 2);
    CHECK(comb.sign_rows.empty());
    CHECK(to_string(AceBranch::nonpos) == "nonpos");
  }
}
