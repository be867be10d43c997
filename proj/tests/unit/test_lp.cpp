#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "ivdep/lp.hpp"
#include "ivdep/rng.hpp"

using namespace ivdep;
using namespace ivdep::lp;
using ivdep::test::R;

namespace {

template <class T>
void row(Problem<T>& p, std::vector<T> coeffs, RowSense s, T rhs) {
  p.add_row(coeffs, s, rhs);
}

// max 3x + 2y  s.t.  x + y <= 4,  x + 3y <= 6,  0 <= x <= 3,  y >= 0.  Optimum (3, 1), value 11.
template <class T>
Problem<T> textbook(bool with_upper) {
  Problem<T> p;
  p.add_variables("x", 1, T{0}, with_upper ? std::optional<T>(T{3}) : std::nullopt, T{3});
  p.add_variables("y", 1, T{0}, std::nullopt, T{2});
  p.begin_row_block("r");
  row<T>(p, {T{1}, T{1}}, RowSense::less_equal, T{4});
  row<T>(p, {T{1}, T{3}}, RowSense::less_equal, T{6});
  return p;
}

// Beale's cycling example; largest-coefficient pricing without a guard cycles. Optimum 1/20.
Problem<Rational> beale() {
  Problem<Rational> p;
  p.add_variables("x", 4, Rational(0), std::nullopt);
  p.objective = {R(3, 4), R(-150), R(1, 50), R(-6)};
  p.begin_row_block("r");
  row<Rational>(p, {R(1, 4), R(-60), R(-1, 25), R(9)}, RowSense::less_equal, R(0));
  row<Rational>(p, {R(1, 2), R(-90), R(-1, 50), R(3)}, RowSense::less_equal, R(0));
  row<Rational>(p, {R(0), R(0), R(1), R(0)}, RowSense::less_equal, R(1));
  return p;
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("bounded textbook problem, exact") {
    const auto s = solve(textbook<Rational>(true));
    REQUIRE(s.optimal());
    CHECK(s.objective == R(11));
    CHECK(s.x == std::vector<Rational>{R(3), R(1)});
  }

  TEST_CASE("bounded textbook problem, floating") {
    const auto s = solve(textbook<double>(true));
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(11.0));
    CHECK(s.x[0] == doctest::Approx(3.0));
    CHECK(s.x[1] == doctest::Approx(1.0));
  }

  TEST_CASE("row duals reproduce the objective") {
    // Without the bound the optimum is (4, 0) = 12, dual (3, 0).
    const auto s = solve(textbook<Rational>(false));
    REQUIRE(s.optimal());
    CHECK(s.objective == R(12));
    CHECK(s.row_duals == std::vector<Rational>{R(3), R(0)});
  }

  TEST_CASE("infeasible and unbounded are reported") {
    Problem<Rational> inf;
    inf.add_variables("x", 1, Rational(0), std::nullopt, Rational(1));
    row<Rational>(inf, {R(1)}, RowSense::less_equal, R(-1));
    CHECK(solve(inf).status == Status::infeasible);

    Problem<double> unb;
    unb.add_variables("x", 2, 0.0, std::nullopt);
    unb.objective = {1.0, 0.0};
    row<double>(unb, {1.0, -1.0}, RowSense::less_equal, 1.0);
    CHECK(solve(unb).status == Status::unbounded);
  }

  TEST_CASE("minimization with a free variable and an equality") {
    // min x + y  s.t.  x - y = 1,  y >= -2,  x free  ->  (-1, -2), value -3.
    Problem<Rational> p;
    p.sense = Sense::minimize;
    p.add_variables("x", 1, std::nullopt, std::nullopt, R(1));
    p.add_variables("y", 1, R(-2), std::nullopt, R(1));
    row<Rational>(p, {R(1), R(-1)}, RowSense::equal, R(1));
    const auto s = solve(p);
    REQUIRE(s.optimal());
    CHECK(s.objective == R(-3));
    CHECK(s.x == std::vector<Rational>{R(-1), R(-2)});
  }

  TEST_CASE("degenerate cycling example terminates at the optimum") {
    const auto s = solve(beale());
    REQUIRE(s.optimal());
    CHECK(s.objective == R(1, 20));
  }

  TEST_CASE("dualize has the same optimum") {
    for (bool bounded : {true, false}) {
      const auto p = textbook<Rational>(bounded);
      const auto d = dualize(p);
      CHECK(d.sense == Sense::minimize);
      const auto sp = solve(p);
      const auto sd = solve(d);
      REQUIRE(sd.optimal());
      CHECK(sd.objective == sp.objective);
      CHECK(check_certificate<Rational>(p, sp.x, d, sd.x).ok);
    }
    const auto b = beale();
    CHECK(solve(dualize(b)).objective == R(1, 20));
  }

  TEST_CASE("check_feasible names the violated row") {
    const auto p = textbook<Rational>(true);
    const std::vector<Rational> bad{R(1), R(2)};  // 1 + 6 > 6
    const auto rep = check_feasible<Rational>(p, bad);
    CHECK_FALSE(rep.feasible);
    REQUIRE(rep.violated_row);
    CHECK(*rep.violated_row == 1);
    CHECK(rep.max_violation == R(1));
    const std::vector<Rational> over{R(4), R(0)};
    const auto rb = check_feasible<Rational>(p, over);
    REQUIRE(rb.violated_variable);
    CHECK(*rb.violated_variable == 0);
  }

  TEST_CASE("check_certificate rejects a gap and a tampered dual") {
    const auto p = textbook<Rational>(false);
    const auto d = dualize(p);
    const auto sp = solve(p);
    auto sd = solve(d);
    CHECK(check_certificate<Rational>(p, sp.x, d, sd.x).ok);
    const std::vector<Rational> suboptimal{R(1), R(1)};
    const auto gap = check_certificate<Rational>(p, suboptimal, d, sd.x);
    CHECK_FALSE(gap.ok);
    CHECK(gap.gap == R(7));
    sd.x[0] -= R(1, 2);
    CHECK_FALSE(check_certificate<Rational>(p, sp.x, d, sd.x).ok);
  }

  TEST_CASE("write_lp_format layout") {
    Problem<Rational> p;
    p.add_variables("v", 2, R(0), std::nullopt);
    p.add_variables("w", 1, std::nullopt, std::nullopt);
    p.objective = {R(3), R(-2), R(0)};
    p.begin_row_block("r");
    row<Rational>(p, {R(-1), R(1, 2), R(1)}, RowSense::greater_equal, R(4));
    std::ostringstream os;
    write_lp_format(p, os);
    CHECK(os.str() ==
          "\\ ivdep linear program: 3 variables, 1 rows\n"
          "Maximize\n"
          " obj: 3 v_0 - 2 v_1\n"
          "Subject To\n"
          " c0: - 1 v_0 + 0.5 v_1 + 1 w_0 >= 4\n"
          "Bounds\n"
          " 0 <= v_0 <= +inf\n"
          " 0 <= v_1 <= +inf\n"
          " w_0 free\n"
          "End\n");
  }

  TEST_CASE("dimension checks") {
    Problem<double> p;
    p.add_variables("x", 2, 0.0, std::nullopt);
    const std::vector<double> short_row{1.0};
    CHECK(ivdep::test::error_code_of([&] { p.add_row(short_row, RowSense::equal, 0.0); }) ==
          ErrorCode::dimension_mismatch);
    p.add_row(std::vector<double>{1.0, 1.0}, RowSense::equal, 1.0);
    CHECK(ivdep::test::error_code_of([&] { p.add_variables("y", 1, 0.0, std::nullopt); }) ==
          ErrorCode::invalid_argument);
  }

  TEST_CASE("random small programs agree between exact and floating modes") {
    // Feasible by construction (x = 0 satisfies every row) and bounded by the box.
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(4));
      const int m = 1 + static_cast<int>(rng.below(5));
      Problem<Rational> pe;
      Problem<double> pf;
      for (int j = 0; j < n; ++j) {
        const long c = static_cast<long>(rng.below(11)) - 5;
        pe.add_variables("x" + std::to_string(j), 1, R(0), R(5), R(c));
        pf.add_variables("x" + std::to_string(j), 1, 0.0, 5.0, static_cast<double>(c));
      }
      for (int i = 0; i < m; ++i) {
        std::vector<Rational> ce;
        std::vector<double> cf;
        for (int j = 0; j < n; ++j) {
          const long a = static_cast<long>(rng.below(9)) - 4;
          ce.push_back(R(a));
          cf.push_back(static_cast<double>(a));
        }
        const long b = static_cast<long>(rng.below(7));
        pe.add_row(ce, RowSense::less_equal, R(b));
        pf.add_row(cf, RowSense::less_equal, static_cast<double>(b));
      }
      const auto se = solve(pe);
      const auto sf = solve(pf);
      REQUIRE(se.optimal());
      REQUIRE(sf.optimal());
      CHECK(sf.objective == doctest::Approx(to_nearest_double(se.objective)).epsilon(1e-9));
      const auto de = solve(dualize(pe));
      CHECK(de.objective == se.objective);
    }
  }
}
