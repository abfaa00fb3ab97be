#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace dowg {

// One closed-form factor of a coefficient or source. Instances meant to be
// serializable must be registered under their name (see named_analytic).
struct AnalyticFn {
  std::string name;
  std::function<double(double)> fn;
  std::vector<double> breakpoints;  // dyadic points where the formula is only piecewise smooth
};

// Positive constants on the 2^level half-open dyadic cells [i*2^-level, (i+1)*2^-level).
// x = 1 reads the last piece so that grid sampling at the right endpoint is defined.
struct DyadicPiecewiseConstant {
  int level = 0;
  std::vector<double> values;

  std::size_t piece_index(double x) const;
  double value_at(double x) const;
};

// Piecewise-constant envelope times a smooth factor, e.g. high-contrast jumps
// modulated by an oscillation.
struct ProductFactor {
  DyadicPiecewiseConstant piecewise;
  AnalyticFn analytic;
};

using CoefficientSpec = std::variant<AnalyticFn, DyadicPiecewiseConstant, ProductFactor>;
using SourceSpec = std::variant<AnalyticFn, ProductFactor>;

struct ClosedFormSolution {
  std::function<double(double)> u;
  std::function<double(double)> du;
  // a*u' as its own formula: for coefficients blowing up at an endpoint the
  // product a(x)*u'(x) is 0*inf there while the flux itself stays finite.
  std::function<double(double)> flux;
};

// u(x) = -c3[i]/6 x^3 + c1[i] x + c0[i] on dyadic piece i. Arises for
// piecewise-constant a with source f(x) = x, where a u' = -x^2/2 + K globally.
struct PiecewiseCubicSolution {
  int level = 0;
  std::vector<double> c3, c1, c0;
  double flux_constant = 0;

  double u(double x) const;
  double du(double x) const;
  double flux(double x) const;
};

using ExactSolutionSpec = std::variant<std::monostate, ClosedFormSolution, PiecewiseCubicSolution>;

// A PDE instance -(a u')' = f on (0,1), u(0) = u(1) = 0.
struct ProblemSpec {
  std::string name;
  int builtin_id = 0;  // 1..6 for the built-in problems, 0 for custom ones
  CoefficientSpec coefficient;
  SourceSpec source;
  ExactSolutionSpec exact;
  bool singular_at_zero = false;  // a(x) -> inf as x -> 0+ (builtin 3)
  // analytic knowledge where available; grid estimates otherwise
  double a_min_hint = 0;
  double a_max_hint = 0;
};

ProblemSpec builtin_example(int id);

// Exact solution for a piecewise-constant coefficient with f(x) = x: per-piece
// cubics glued by continuity of u and of the flux, K fixed by u(1) = 0.
PiecewiseCubicSolution solve_example2_exact(const ProblemSpec& problem);

double eval_coefficient(const ProblemSpec&, double x);
// 1/a with the limit value 0 at a declared singular endpoint.
double eval_inv_coefficient(const ProblemSpec&, double x);
double eval_source(const ProblemSpec&, double x);

bool has_exact(const ProblemSpec&);
double eval_exact_u(const ProblemSpec&, double x);
double eval_exact_du(const ProblemSpec&, double x);
double eval_exact_flux(const ProblemSpec&, double x);

// Resolution level of any piecewise-constant factor of a (0 if none); the fine
// grid must be at least this deep so pieces align with cells.
int coefficient_resolution_level(const ProblemSpec&);
int source_resolution_level(const ProblemSpec&);

// Registry of serializable closed-form factors.
const AnalyticFn& named_analytic(const std::string& name);
std::vector<std::string> named_analytic_names();

}  // namespace dowg
