#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <variant>

#include "dowg/problem.hpp"

using namespace dowg;

namespace {

constexpr double kPi = 3.14159265358979323846;

// centered difference with a step small enough for the oscillatory factors
double diff(const std::function<double(double)>& g, double x, double h = 1e-7) {
  return (g(x + h) - g(x - h)) / (2 * h);
}

}  // namespace

TEST_CASE("builtin ids outside 1..6 are rejected") {
  CHECK_THROWS_AS(builtin_example(0), std::invalid_argument);
  CHECK_THROWS_AS(builtin_example(7), std::invalid_argument);
  CHECK_THROWS_AS(builtin_example(-3), std::invalid_argument);
  for (int id = 1; id <= 6; ++id) {
    const ProblemSpec p = builtin_example(id);
    CHECK(p.builtin_id == id);
    CHECK(!p.name.empty());
    if (id <= 3) {
      // analytic range hints exist only where the extremes have closed forms
      CHECK(p.a_min_hint > 0);
      CHECK(p.a_max_hint >= p.a_min_hint);
    } else {
      CHECK(p.a_min_hint == 0);
    }
  }
}

TEST_CASE("piecewise constant pieces are half-open with x=1 reading the last") {
  DyadicPiecewiseConstant pc{2, {1.0, 2.0, 3.0, 4.0}};
  CHECK(pc.value_at(0.0) == 1.0);
  CHECK(pc.value_at(0.25) == 2.0);   // boundary takes the right piece
  CHECK(pc.value_at(0.25 - 1e-12) == 1.0);
  CHECK(pc.value_at(0.999) == 4.0);
  CHECK(pc.value_at(1.0) == 4.0);    // right endpoint stays defined
  CHECK(pc.piece_index(0.5) == 2);
}

TEST_CASE("oscillatory reciprocal coefficient hits its analytic range") {
  const ProblemSpec p = builtin_example(1);
  // a = 1/(1.05 + sin(2^9 pi x)): extremes 1/2.05 and 1/0.05 = 20
  CHECK(eval_coefficient(p, 0.0) == doctest::Approx(1.0 / 1.05).epsilon(1e-14));
  const double x_max = 1.5 / 512.0;  // sin = -1 there
  CHECK(eval_coefficient(p, x_max) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(p.a_max_hint / p.a_min_hint == doctest::Approx(41.0).epsilon(1e-12));
  CHECK(eval_source(p, 0.25) == doctest::Approx(250.0).epsilon(1e-14));
}

TEST_CASE("high contrast coefficient alternates with the strong phase first") {
  const ProblemSpec p = builtin_example(2);
  const double h = std::ldexp(1.0, -8);
  CHECK(eval_coefficient(p, 0.5 * h) == doctest::Approx(1e4));
  CHECK(eval_coefficient(p, 1.5 * h) == doctest::Approx(1e-4));
  CHECK(eval_coefficient(p, 1.0) == doctest::Approx(1e-4));  // piece 255 is odd
  CHECK(eval_source(p, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("exact solutions satisfy the boundary conditions and the ode") {
  for (int id : {1, 2, 3}) {
    CAPTURE(id);
    const ProblemSpec p = builtin_example(id);
    REQUIRE(has_exact(p));
    CHECK(std::fabs(eval_exact_u(p, 0.0)) < 1e-12);
    CHECK(std::fabs(eval_exact_u(p, 1.0)) < 1e-10);
  }
  // flux' = -f, checked away from breakpoints and the singular endpoint
  for (int id : {1, 2, 3}) {
    CAPTURE(id);
    const ProblemSpec p = builtin_example(id);
    for (double x : {0.301, 0.553, 0.882}) {
      const double lhs = diff([&](double y) { return eval_exact_flux(p, y); }, x);
      CHECK(lhs == doctest::Approx(-eval_source(p, x)).epsilon(1e-5));
    }
  }
  // u' agrees with the difference quotient of u
  for (int id : {1, 2, 3}) {
    CAPTURE(id);
    const ProblemSpec p = builtin_example(id);
    for (double x : {0.31, 0.67}) {
      const double q = diff([&](double y) { return eval_exact_u(p, y); }, x);
      CHECK(q == doctest::Approx(eval_exact_du(p, x)).epsilon(1e-4));
    }
  }
}

TEST_CASE("exact flux equals coefficient times derivative") {
  for (int id : {1, 2, 3}) {
    CAPTURE(id);
    const ProblemSpec p = builtin_example(id);
    for (double x : {0.1251, 0.4999, 0.75, 0.9}) {
      const double prod = eval_coefficient(p, x) * eval_exact_du(p, x);
      CHECK(prod == doctest::Approx(eval_exact_flux(p, x)).epsilon(1e-11));
    }
  }
}

TEST_CASE("piecewise cubic solution glues continuously at the jumps") {
  const ProblemSpec p = builtin_example(2);
  const auto& sol = std::get<PiecewiseCubicSolution>(p.exact);
  const double h = std::ldexp(1.0, -8);
  for (int k : {1, 64, 128, 255}) {
    const double x = k * h;
    // the weak-phase derivative reaches ~1e3, so +-1e-13 moves u by ~1e-10
    CHECK(std::fabs(sol.u(x - 1e-13) - sol.u(x + 1e-13)) < 1e-9);
    // flux is -x^2/2 + K globally, so it is continuous by construction
    CHECK(sol.flux(x) == doctest::Approx(-0.5 * x * x + sol.flux_constant).epsilon(1e-12));
  }
  CHECK(std::fabs(sol.u(1.0)) < 1e-12);
}

TEST_CASE("singular coefficient blows up at zero and declares itself") {
  const ProblemSpec p = builtin_example(3);
  CHECK(p.singular_at_zero);
  CHECK_THROWS_AS(eval_coefficient(p, 0.0), std::domain_error);
  CHECK(eval_inv_coefficient(p, 0.0) == 0.0);
  // 1/a = x^2 (1.05 + sin(2^10 pi x))
  const double x = 0.375;
  const double expected = x * x * (1.05 + std::sin(1024 * kPi * x));
  CHECK(eval_inv_coefficient(p, x) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(eval_coefficient(p, x) == doctest::Approx(1.0 / expected).epsilon(1e-13));
}

TEST_CASE("product coefficients multiply their envelope and smooth factor") {
  const ProblemSpec p = builtin_example(4);
  const double h = std::ldexp(1.0, -8);
  const double x = 2.5 * h;  // piece 2: strong phase
  const double smooth = std::exp(x * x + 1.0) * (10.0 + std::cos(20.0 * x));
  CHECK(eval_coefficient(p, x) == doctest::Approx(1e4 * smooth).epsilon(1e-13));
  const double y = 3.5 * h;  // piece 3: weak phase
  const double smooth_y = std::exp(y * y + 1.0) * (10.0 + std::cos(20.0 * y));
  CHECK(eval_coefficient(p, y) == doctest::Approx(1e-4 * smooth_y).epsilon(1e-13));
  CHECK(eval_source(p, 0.2) == doctest::Approx(std::cos(0.8)).epsilon(1e-14));
  CHECK(!has_exact(p));
  CHECK_THROWS_AS(eval_exact_u(p, 0.5), std::logic_error);
}

TEST_CASE("product sources carry the envelope too") {
  const ProblemSpec p = builtin_example(6);
  const double h = std::ldexp(1.0, -8);
  CHECK(eval_source(p, 0.5 * h) == doctest::Approx(std::cos(10.0 * 0.5 * h)).epsilon(1e-13));
  CHECK(eval_source(p, 1.5 * h) ==
        doctest::Approx(1e-3 * std::cos(10.0 * 1.5 * h)).epsilon(1e-13));
}

TEST_CASE("resolution levels report the deepest piecewise factor") {
  CHECK(coefficient_resolution_level(builtin_example(1)) == 0);
  CHECK(coefficient_resolution_level(builtin_example(2)) == 8);
  CHECK(coefficient_resolution_level(builtin_example(4)) == 8);
  CHECK(source_resolution_level(builtin_example(2)) == 0);
  CHECK(source_resolution_level(builtin_example(6)) == 8);
}

TEST_CASE("analytic registry resolves known names and rejects others") {
  CHECK_THROWS_AS(named_analytic("no_such_formula"), std::invalid_argument);
  for (const std::string& name : named_analytic_names()) {
    const AnalyticFn& fn = named_analytic(name);
    CHECK(fn.name == name);
    CHECK(std::isfinite(fn.fn(0.625)));
  }
  CHECK(named_analytic("one").fn(0.3) == 1.0);
  CHECK(named_analytic("linear").fn(0.3) == doctest::Approx(0.3));
}

TEST_CASE("generic cubic solver reproduces a hand-solved two-piece problem") {
  // a = 2 on [0, 1/2), 1 on [1/2, 1), f = x. With F(x) = -x^2/2 and
  // flux = F + K: u' = (F+K)/a, u(x) = int u', and u(1) = 0 fixes
  // K = (int F/a) / (int 1/a) over the two halves.
  ProblemSpec p;
  p.name = "two_piece";
  p.coefficient = DyadicPiecewiseConstant{1, {2.0, 1.0}};
  p.source = named_analytic("linear");
  const PiecewiseCubicSolution sol = solve_example2_exact(p);
  const double int_inv = 0.5 / 2.0 + 0.5 / 1.0;
  const double int_F_over_a = -(std::pow(0.5, 3) / 6.0) / 2.0 -
                              (1.0 / 6.0 - std::pow(0.5, 3) / 6.0) / 1.0;
  const double K = -int_F_over_a / int_inv;
  CHECK(sol.flux_constant == doctest::Approx(K).epsilon(1e-13));
  CHECK(sol.flux(0.25) == doctest::Approx(-0.5 * 0.25 * 0.25 + K).epsilon(1e-13));
  CHECK(sol.du(0.25) == doctest::Approx((-0.5 * 0.25 * 0.25 + K) / 2.0).epsilon(1e-13));
  CHECK(std::fabs(sol.u(1.0)) < 1e-14);
  CHECK(std::fabs(sol.u(0.5 - 1e-12) - sol.u(0.5 + 1e-12)) < 1e-10);
}
