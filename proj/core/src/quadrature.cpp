#include "dowg/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dowg {

namespace {

// Gauss-Legendre rules on (-1,1), exact for polynomials of degree 2q-1.
void reference_rule(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  switch (q) {
    case 1:
      nodes = {0.0};
      weights = {2.0};
      break;
    case 2: {
      const double n = 1.0 / std::sqrt(3.0);
      nodes = {-n, n};
      weights = {1.0, 1.0};
      break;
    }
    case 3: {
      const double n = std::sqrt(3.0 / 5.0);
      nodes = {-n, 0.0, n};
      weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 5: {
      const double n1 = 0.5384693101056831, n2 = 0.9061798459386640;
      const double w0 = 0.5688888888888889, w1 = 0.4786286704993665, w2 = 0.2369268850561891;
      nodes = {-n2, -n1, 0.0, n1, n2};
      weights = {w2, w1, w0, w1, w2};
      break;
    }
    default:
      throw std::invalid_argument("make_fine_grid: quadrature order must be 1, 2, 3, or 5");
  }
}

}  // namespace

FineGrid make_fine_grid(int level, int quad_order) {
  if (level < 1 || level > 30)
    throw std::invalid_argument("make_fine_grid: level out of range");
  FineGrid g;
  g.level = level;
  g.quad_order = quad_order;
  std::vector<double> nodes, weights;
  reference_rule(quad_order, nodes, weights);
  // map from (-1,1) to the (0,1) reference cell
  g.ref_nodes.resize(nodes.size());
  g.ref_weights.resize(weights.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    g.ref_nodes[i] = 0.5 * (1.0 + nodes[i]);
    g.ref_weights[i] = 0.5 * weights[i];
  }
  return g;
}

CellTables build_tables(const ProblemSpec& problem, const FineGrid& grid) {
  const int res = std::max(coefficient_resolution_level(problem), source_resolution_level(problem));
  if (grid.level < res)
    throw std::invalid_argument("build_tables: grid level " + std::to_string(grid.level) +
                                " is coarser than the piecewise resolution level " +
                                std::to_string(res));

  CellTables t;
  t.grid = grid;
  const std::int64_t N = grid.cells();
  const int Q = grid.quad_order;
  const double h = grid.cell_width();

  t.Ia.resize(N);
  t.IinvA.resize(N);
  t.IinvA2.resize(N);
  t.If.resize(N);
  t.Ixf.resize(N);
  t.a_nodes.resize(N * Q);
  t.f_nodes.resize(N * Q);
  t.inv_a_mid.resize(N * Q);
  t.f_mid.resize(N * Q);

  for (std::int64_t c = 0; c < N; ++c) {
    const double left = c * h;
    double ia = 0, inv = 0, inv2 = 0, fi = 0, xf = 0;
    for (int q = 0; q < Q; ++q) {
      const double x = grid.node(c, q);
      const double w = grid.ref_weights[q] * h;
      const double a = eval_coefficient(problem, x);
      const double f = eval_source(problem, x);
      if (!std::isfinite(a) || !std::isfinite(f))
        throw std::runtime_error("build_tables: non-finite integrand at x = " + std::to_string(x));
      const double ra = 1.0 / a;
      t.a_nodes[c * Q + q] = a;
      t.f_nodes[c * Q + q] = f;
      ia += w * a;
      inv += w * ra;
      inv2 += w * ra * ra;
      fi += w * f;
      xf += w * x * f;
      // midpoint of [left, node]: feeds the boundary-to-node correction terms
      const double xm = left + grid.ref_nodes[q] * h * 0.5;
      t.inv_a_mid[c * Q + q] = eval_inv_coefficient(problem, xm);
      t.f_mid[c * Q + q] = eval_source(problem, xm);
    }
    t.Ia[c] = ia;
    t.IinvA[c] = inv;
    t.IinvA2[c] = inv2;
    t.If[c] = fi;
    t.Ixf[c] = xf;
  }

  auto prefix = [N](const std::vector<double>& cell, std::vector<double>& out) {
    out.resize(N + 1);
    NeumaierSum acc;
    out[0] = 0.0;
    for (std::int64_t c = 0; c < N; ++c) {
      acc.add(cell[c]);
      out[c + 1] = acc.value();
    }
  };
  prefix(t.IinvA, t.PinvA);
  prefix(t.Ia, t.Pa);
  prefix(t.If, t.Pf);
  return t;
}

double interval_integral(const CellTables& t, Integrand kind, std::int64_t first,
                         std::int64_t last) {
  if (first < 0 || last > t.grid.cells() || first >= last)
    throw std::invalid_argument("interval_integral: empty or out-of-range cell span");
  switch (kind) {
    case Integrand::a:
      return t.Pa[last] - t.Pa[first];
    case Integrand::inv_a:
      return t.PinvA[last] - t.PinvA[first];
    case Integrand::f:
      return t.Pf[last] - t.Pf[first];
    case Integrand::inv_a_sq: {
      NeumaierSum acc;
      for (std::int64_t c = first; c < last; ++c) acc.add(t.IinvA2[c]);
      return acc.value();
    }
    case Integrand::xf: {
      NeumaierSum acc;
      for (std::int64_t c = first; c < last; ++c) acc.add(t.Ixf[c]);
      return acc.value();
    }
  }
  throw std::logic_error("interval_integral: unhandled integrand kind");
}

double source_l2_norm(const CellTables& t) {
  const std::int64_t N = t.grid.cells();
  const int Q = t.grid.quad_order;
  const double h = t.grid.cell_width();
  NeumaierSum acc;
  for (std::int64_t c = 0; c < N; ++c)
    for (int q = 0; q < Q; ++q) {
      const double f = t.f_nodes[c * Q + q];
      acc.add(t.grid.ref_weights[q] * h * f * f);
    }
  return std::sqrt(acc.value());
}

}  // namespace dowg
