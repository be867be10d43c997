#include <doctest.h>

#include "helpers.hpp"
#include "ivdep/rng.hpp"
#include "ivdep/strategies.hpp"

using namespace ivdep;
using ivdep::test::error_code_of;
using ivdep::test::R;

namespace {

std::vector<Rational> delta_r(const Scenario& sc, int la, int lb) {
  const std::size_t per = num_strategies(sc) / static_cast<std::size_t>(sc.x_card);
  std::vector<Rational> r(per, R(0));
  r[strategy_index(sc, 0, la, lb)] = R(1);
  return r;
}

LatentJoint<double> random_joint(Rng& rng, int m) {
  const Scenario sc{m};
  return LatentJoint<double>{sc, rng.simplex(num_strategies(sc))};
}

}  // namespace

TEST_SUITE("strategies") {
  TEST_CASE("counts and index layout") {
    CHECK(num_strategies(Scenario{2}) == 32);
    CHECK(num_strategies(Scenario{3}) == 96);
    CHECK(num_strategies(Scenario{4}) == 256);
    CHECK(strategy_index(Scenario{2}, 1, 2, 3) == 27);
    CHECK(strategy_index(Scenario{3}, 2, 5, 1) == 85);
  }

  TEST_CASE("enumeration decodes response tables most-significant first") {
    const auto all = enumerate_strategies(Scenario{2});
    REQUIRE(all.size() == 32);
    const auto& s = all[27];
    CHECK(s.lambda_x == 1);
    CHECK(s.lambda_a == 2);
    CHECK(s.lambda_b == 3);
    CHECK(s.f == std::vector<int>{1, 0});
    CHECK(s.g == std::array<int, 2>{1, 1});
    CHECK(all[1].g == std::array<int, 2>{0, 1});
    CHECK(all[2].g == std::array<int, 2>{1, 0});
    const auto three = enumerate_strategies(Scenario{3});
    CHECK(three[strategy_index(Scenario{3}, 0, 6, 0)].f == std::vector<int>{1, 1, 0});
    for (std::size_t i = 0; i < three.size(); ++i) {
      CHECK(strategy_index(Scenario{3}, three[i].lambda_x, three[i].lambda_a, three[i].lambda_b) == i);
    }
  }

  TEST_CASE("a deterministic response produces point masses") {
    // f = (1, 0), g = (0, 1): x=0 -> a=1 -> b=1; x=1 -> a=0 -> b=0.
    const Scenario sc{2};
    const auto joint = product_joint(sc, ivdep::test::uniform_px(2), delta_r(sc, 2, 1));
    CHECK(validate_latent(joint).ok());
    const auto d = forward_distribution(joint);
    CHECK(d.p(1, 1, 0) == R(1));
    CHECK(d.p(0, 0, 1) == R(1));
    CHECK(d.p(0, 1, 0) == R(0));
    CHECK(d.p_x == ivdep::test::uniform_px(2));
    const auto iv = interventional(joint);
    CHECK(iv.p(0, 0) == R(1));
    CHECK(iv.p(1, 1) == R(1));
    CHECK(iv.p(1, 0) == R(0));
    CHECK(dependence_measure(joint) == R(0));
    CHECK(dependence_measure_via_matrix(joint) == R(0));
  }

  TEST_CASE("dependence of a fully correlated joint") {
    // x=0 always gets (f=00, g=00), x=1 always (f=11, g=00): four terms of 1/4.
    const Scenario sc{2};
    LatentJoint<Rational> joint{sc, std::vector<Rational>(32, R(0))};
    joint.q[strategy_index(sc, 0, 0, 0)] = R(1, 2);
    joint.q[strategy_index(sc, 1, 3, 0)] = R(1, 2);
    CHECK(dependence_measure(joint) == R(1));
    CHECK(dependence_measure_via_matrix(joint) == R(1));
    const auto d = forward_distribution(joint);
    CHECK(d.p(0, 0, 0) == R(1));
    CHECK(d.p(1, 0, 1) == R(1));
  }

  TEST_CASE("matrix identities") {
    const std::vector<Rational> px{R(1, 5), R(3, 10), R(1, 2)};
    const auto mats = build_matrices(Scenario{3}, px, true);
    const std::size_t n = num_strategies(Scenario{3});
    CHECK(mats.M.rows() == n);
    CHECK(mats.M.cols() == n);
    CHECK(mats.P.rows() == 12 + 4);
    CHECK(mats.Delta.rows() == 3);
    // Columns of M sum to zero; columns of P over observed rows and over each do-pair sum to one.
    const std::vector<Rational> ones(n, R(1));
    for (const auto& v : mats.M.multiply_transposed(ones)) CHECK(v == R(0));
    for (std::size_t j = 0; j < n; ++j) {
      Rational obs(0), do0(0), do1(0);
      for (std::size_t i = 0; i < 12; ++i) obs += mats.P(i, j);
      do0 = mats.P(12 + ScenarioMatrices<Rational>::do_row(0, 0), j) + mats.P(12 + ScenarioMatrices<Rational>::do_row(0, 1), j);
      do1 = mats.P(12 + ScenarioMatrices<Rational>::do_row(1, 0), j) + mats.P(12 + ScenarioMatrices<Rational>::do_row(1, 1), j);
      CHECK(obs == R(1));
      CHECK(do0 == R(1));
      CHECK(do1 == R(1));
    }
    CHECK(build_matrices(Scenario{2}, ivdep::test::uniform_px(2), false).P.rows() == 8);
  }

  TEST_CASE("random joints: forward model matches matrices and measure agrees") {
    Rng rng(11);
    for (int m = 2; m <= 4; ++m) {
      for (int trial = 0; trial < 20; ++trial) {
        const auto joint = random_joint(rng, m);
        const auto d = forward_distribution(joint);
        CHECK(validate_distribution(d).ok());
        const auto mats = build_matrices(Scenario{m}, d.p_x, true);
        const auto pq = mats.P.multiply(joint.q);
        for (int x = 0; x < m; ++x) {
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              CHECK(pq[cell_index(a, b, x)] == doctest::Approx(d.p(a, b, x) * d.p_x[static_cast<std::size_t>(x)]));
            }
          }
        }
        const auto iv = interventional(joint);
        CHECK(pq[mats.num_observed_rows() + ScenarioMatrices<double>::do_row(0, 1)] == doctest::Approx(iv.p(1, 0)));
        CHECK(dependence_measure(joint) == doctest::Approx(dependence_measure_via_matrix(joint)));
        CHECK(dependence_measure(joint) >= 0.0);
        const auto delta = mats.Delta.multiply(joint.q);
        for (int x = 0; x < m; ++x) CHECK(delta[static_cast<std::size_t>(x)] == doctest::Approx(d.p_x[static_cast<std::size_t>(x)]));
      }
    }
  }

  TEST_CASE("latent JSON round trip and validation") {
    const Scenario sc{2};
    auto joint = product_joint(sc, std::vector<Rational>{R(1, 3), R(2, 3)}, delta_r(sc, 1, 2));
    const auto back = parse_latent<Rational>(serialize_latent(joint));
    CHECK(back.scenario == sc);
    CHECK(back.q == joint.q);
    joint.q[0] = R(-1, 10);
    CHECK_FALSE(validate_latent(joint).ok());
    CHECK(error_code_of([] { parse_latent<double>(R"({"x_card":2,"q":[1]})"); }) == ErrorCode::dimension_mismatch);
  }

  TEST_CASE("zero instrument probability is rejected") {
    const Scenario sc{2};
    LatentJoint<Rational> joint{sc, std::vector<Rational>(32, R(0))};
    joint.q[0] = R(1);
    CHECK(error_code_of([&] { forward_distribution(joint); }) == ErrorCode::division_by_zero);
  }
}
