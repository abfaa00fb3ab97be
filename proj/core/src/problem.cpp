#include "dowg/problem.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace dowg {

namespace {

constexpr double pi = std::numbers::pi;

double clamp01(double x) { return x < 0 ? 0 : (x > 1 ? 1 : x); }

// {1e4, 1e-4, 1e4, ...} on cells of width 2^-8, first cell 1e4
DyadicPiecewiseConstant alternating_contrast(double even_value, double odd_value) {
  DyadicPiecewiseConstant pc;
  pc.level = 8;
  pc.values.resize(std::size_t{1} << 8);
  for (std::size_t p = 0; p < pc.values.size(); ++p)
    pc.values[p] = (p % 2 == 0) ? even_value : odd_value;
  return pc;
}

const std::map<std::string, AnalyticFn>& registry() {
  static const std::map<std::string, AnalyticFn> table = [] {
    std::map<std::string, AnalyticFn> m;
    auto add = [&m](const std::string& name, std::function<double(double)> fn) {
      m[name] = AnalyticFn{name, std::move(fn), {}};
    };
    const double s = 512 * pi;   // oscillation frequency of the example-1 coefficient
    const double r = 1024 * pi;  // oscillation frequency of the example-3 coefficient
    add("one", [](double) { return 1.0; });
    add("linear", [](double x) { return x; });
    add("linear_1000", [](double x) { return 1000.0 * x; });
    add("example1_a", [s](double x) { return 1.0 / (1.05 + std::sin(s * x)); });
    add("example3_a", [r](double x) { return 1.0 / (x * x * (1.05 + std::sin(r * x))); });
    add("example4_f", [](double x) { return std::cos(4.0 * x); });
    add("example4_a_factor",
        [](double x) { return std::exp(x * x + 1.0) * (10.0 + std::cos(20.0 * x)); });
    add("example5_a", [s](double x) {
      return 2.0 * std::exp(1.0) + std::sin(s * x) * std::exp(x * x) * std::cos(10.0 * x);
    });
    add("example5_f", [](double x) { return std::sin(2.0 * x) * std::cos(x); });
    add("example6_a_factor", [](double x) { return 10.0 + std::sin(40.0 * x); });
    add("example6_f_factor", [](double x) { return std::cos(10.0 * x); });
    return m;
  }();
  return table;
}

// Exact solution of -(a u')' = 1000x with a = 1/(1.05 + sin(s x)), s = 2^9 pi.
// Flux a u' = -500 x^2 + K; K makes u(1) = 0 (uses cos(s) = 1, sin(s) = 0).
ClosedFormSolution example1_exact() {
  const double s = 512 * pi;
  const double K = 1000.0 * (1.0 / 6.0 - 10.0 / (21.0 * s));
  ClosedFormSolution ex;
  ex.u = [s, K](double x) {
    const double c = std::cos(s * x), sn = std::sin(s * x);
    return -175.0 * x * x * x + 1.05 * K * x + (K / s) * (1.0 - c) +
           (500.0 / s) * x * x * c - (1000.0 / (s * s)) * x * sn -
           (1000.0 / (s * s * s)) * (c - 1.0);
  };
  ex.du = [s, K](double x) { return (-500.0 * x * x + K) * (1.05 + std::sin(s * x)); };
  ex.flux = [K](double x) { return -500.0 * x * x + K; };
  return ex;
}

// Exact solution of -(a u')' = 1 with a = 1/(x^2 (1.05 + sin(r x))), r = 2^10 pi.
// Flux a u' = K - x; u' = (K x^2 - x^3)(1.05 + sin(r x)).
ClosedFormSolution example3_exact() {
  const double r = 1024 * pi;
  const double K = (1.05 / 4.0 - 1.0 / r + 6.0 / (r * r * r)) / (1.05 / 3.0 - 1.0 / r);
  ClosedFormSolution ex;
  ex.u = [r, K](double x) {
    const double c = std::cos(r * x), sn = std::sin(r * x);
    const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
    const double i2 = -x * x * c / r + 2.0 * x * sn / r2 + 2.0 * c / r3 - 2.0 / r3;
    const double i3 = -x * x * x * c / r + 3.0 * x * x * sn / r2 + 6.0 * x * c / r3 - 6.0 * sn / r4;
    return 1.05 * (K * x * x * x / 3.0 - x * x * x * x / 4.0) + K * i2 - i3;
  };
  ex.du = [r, K](double x) {
    return (K * x * x - x * x * x) * (1.05 + std::sin(r * x));
  };
  ex.flux = [K](double x) { return K - x; };
  return ex;
}

double eval_coefficient_raw(const ProblemSpec& p, double x) {
  return std::visit(
      [x](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, AnalyticFn>)
          return c.fn(x);
        else if constexpr (std::is_same_v<T, DyadicPiecewiseConstant>)
          return c.value_at(x);
        else
          return c.piecewise.value_at(x) * c.analytic.fn(x);
      },
      p.coefficient);
}

}  // namespace

std::size_t DyadicPiecewiseConstant::piece_index(double x) const {
  const std::size_t count = values.size();
  if (x <= 0) return 0;
  auto idx = static_cast<std::size_t>(std::ldexp(clamp01(x), level));
  return idx < count ? idx : count - 1;
}

double DyadicPiecewiseConstant::value_at(double x) const { return values[piece_index(x)]; }

double PiecewiseCubicSolution::u(double x) const {
  std::size_t count = c3.size();
  auto i = static_cast<std::size_t>(std::ldexp(clamp01(x), level));
  if (i >= count) i = count - 1;
  return -c3[i] / 6.0 * x * x * x + c1[i] * x + c0[i];
}

double PiecewiseCubicSolution::du(double x) const {
  std::size_t count = c3.size();
  auto i = static_cast<std::size_t>(std::ldexp(clamp01(x), level));
  if (i >= count) i = count - 1;
  return -c3[i] / 2.0 * x * x + c1[i];
}

double PiecewiseCubicSolution::flux(double x) const { return -0.5 * x * x + flux_constant; }

ProblemSpec builtin_example(int id) {
  ProblemSpec p;
  p.builtin_id = id;
  switch (id) {
    case 1:
      p.name = "example1";
      p.coefficient = named_analytic("example1_a");
      p.source = named_analytic("linear_1000");
      p.exact = example1_exact();
      p.a_min_hint = 1.0 / 2.05;
      p.a_max_hint = 1.0 / 0.05;
      break;
    case 2: {
      p.name = "example2";
      p.coefficient = alternating_contrast(1e4, 1e-4);
      p.source = named_analytic("linear");
      p.exact = solve_example2_exact(p);
      p.a_min_hint = 1e-4;
      p.a_max_hint = 1e4;
      break;
    }
    case 3:
      p.name = "example3";
      p.coefficient = named_analytic("example3_a");
      p.source = named_analytic("one");
      p.exact = example3_exact();
      p.singular_at_zero = true;
      p.a_min_hint = 1.0 / 2.05;
      p.a_max_hint = std::numeric_limits<double>::infinity();
      break;
    case 4:
      p.name = "example4";
      p.coefficient = ProductFactor{alternating_contrast(1e4, 1e-4), named_analytic("example4_a_factor")};
      p.source = named_analytic("example4_f");
      break;
    case 5:
      p.name = "example5";
      p.coefficient = named_analytic("example5_a");
      p.source = named_analytic("example5_f");
      break;
    case 6:
      p.name = "example6";
      p.coefficient = ProductFactor{alternating_contrast(1e4, 1e-4), named_analytic("example6_a_factor")};
      p.source = ProductFactor{alternating_contrast(1.0, 1e-3), named_analytic("example6_f_factor")};
      break;
    default:
      throw std::invalid_argument("builtin_example: unknown id " + std::to_string(id) +
                                  " (expected 1..6)");
  }
  return p;
}

PiecewiseCubicSolution solve_example2_exact(const ProblemSpec& problem) {
  const auto* pc = std::get_if<DyadicPiecewiseConstant>(&problem.coefficient);
  if (!pc)
    throw std::invalid_argument("solve_example2_exact: coefficient must be piecewise constant");
  const std::size_t count = pc->values.size();
  PiecewiseCubicSolution sol;
  sol.level = pc->level;
  sol.c3.resize(count);
  sol.c1.resize(count);
  sol.c0.resize(count);

  for (std::size_t i = 0; i < count; ++i) {
    if (!(pc->values[i] > 0))
      throw std::invalid_argument("solve_example2_exact: nonpositive coefficient piece");
    sol.c3[i] = 1.0 / pc->values[i];
  }

  // u' = c3 (-x^2/2 + K); integral of u' over (0,1) vanishes, which fixes K.
  const double h = std::ldexp(1.0, -pc->level);
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const long double xl = i * static_cast<long double>(h);
    const long double xr = (i + 1) * static_cast<long double>(h);
    num += sol.c3[i] * (xr * xr * xr - xl * xl * xl) / 6.0L;
    den += sol.c3[i] * static_cast<long double>(h);
  }
  const double K = static_cast<double>(num / den);
  sol.flux_constant = K;

  for (std::size_t i = 0; i < count; ++i) sol.c1[i] = K * sol.c3[i];
  sol.c0[0] = 0.0;  // u(0) = 0
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double b = (i + 1) * h;
    sol.c0[i + 1] = sol.c0[i] + (sol.c3[i + 1] - sol.c3[i]) * (b * b * b / 6.0 - K * b);
  }
  return sol;
}

double eval_coefficient(const ProblemSpec& p, double x) {
  if (p.singular_at_zero && x <= 0.0)
    throw std::domain_error("eval_coefficient: coefficient is singular at x = 0");
  return eval_coefficient_raw(p, x);
}

double eval_inv_coefficient(const ProblemSpec& p, double x) {
  if (p.singular_at_zero && x <= 0.0) return 0.0;
  return 1.0 / eval_coefficient_raw(p, x);
}

double eval_source(const ProblemSpec& p, double x) {
  return std::visit(
      [x](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AnalyticFn>)
          return s.fn(x);
        else
          return s.piecewise.value_at(x) * s.analytic.fn(x);
      },
      p.source);
}

bool has_exact(const ProblemSpec& p) {
  return !std::holds_alternative<std::monostate>(p.exact);
}

double eval_exact_u(const ProblemSpec& p, double x) {
  if (const auto* cf = std::get_if<ClosedFormSolution>(&p.exact)) return cf->u(x);
  if (const auto* c = std::get_if<PiecewiseCubicSolution>(&p.exact)) return c->u(x);
  throw std::logic_error("eval_exact_u: problem has no exact solution");
}

double eval_exact_du(const ProblemSpec& p, double x) {
  if (const auto* cf = std::get_if<ClosedFormSolution>(&p.exact)) return cf->du(x);
  if (const auto* c = std::get_if<PiecewiseCubicSolution>(&p.exact)) return c->du(x);
  throw std::logic_error("eval_exact_du: problem has no exact solution");
}

double eval_exact_flux(const ProblemSpec& p, double x) {
  if (const auto* cf = std::get_if<ClosedFormSolution>(&p.exact)) {
    if (cf->flux) return cf->flux(x);
    return eval_coefficient(p, x) * cf->du(x);
  }
  if (const auto* c = std::get_if<PiecewiseCubicSolution>(&p.exact)) return c->flux(x);
  throw std::logic_error("eval_exact_flux: problem has no exact solution");
}

int coefficient_resolution_level(const ProblemSpec& p) {
  if (const auto* pc = std::get_if<DyadicPiecewiseConstant>(&p.coefficient)) return pc->level;
  if (const auto* prod = std::get_if<ProductFactor>(&p.coefficient)) return prod->piecewise.level;
  return 0;
}

int source_resolution_level(const ProblemSpec& p) {
  if (const auto* prod = std::get_if<ProductFactor>(&p.source)) return prod->piecewise.level;
  return 0;
}

const AnalyticFn& named_analytic(const std::string& name) {
  const auto& m = registry();
  auto it = m.find(name);
  if (it == m.end())
    throw std::invalid_argument("named_analytic: unknown function \"" + name + "\"");
  return it->second;
}

std::vector<std::string> named_analytic_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

}  // namespace dowg
