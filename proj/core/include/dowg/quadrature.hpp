#pragma once

#include "dowg/problem.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace dowg {

// Dyadic quadrature mesh: 2^level cells tiling (0,1), each carrying the same
// Gauss-Legendre rule mapped from the reference cell (0,1).
struct FineGrid {
  int level = 14;
  int quad_order = 3;
  std::vector<double> ref_nodes;    // strictly inside (0,1)
  std::vector<double> ref_weights;  // sum to 1

  std::int64_t cells() const { return std::int64_t{1} << level; }
  double cell_width() const { return std::ldexp(1.0, -level); }
  double boundary(std::int64_t i) const { return std::ldexp(static_cast<double>(i), -level); }
  double node(std::int64_t cell, int q) const {
    return (static_cast<double>(cell) + ref_nodes[static_cast<std::size_t>(q)]) * cell_width();
  }
};

FineGrid make_fine_grid(int level, int quad_order = 3);

// Per-cell integrals and prefix sums from which every stiffness, load, and norm
// integral downstream is assembled without further quadrature passes.
struct CellTables {
  FineGrid grid;
  // per cell c: integrals over [c*2^-L, (c+1)*2^-L)
  std::vector<double> Ia;      // int a
  std::vector<double> IinvA;   // int 1/a
  std::vector<double> IinvA2;  // int 1/a^2
  std::vector<double> If;      // int f
  std::vector<double> Ixf;     // int x f
  // prefix integrals from 0 to the cell boundary, size cells()+1
  std::vector<double> PinvA, Pa, Pf;
  // cached Gauss-node samples, size cells()*quad_order
  std::vector<double> a_nodes, f_nodes;
  // samples at cell_left + t_q*h/2: midpoints of [cell_left, node_q], used as the
  // one-node correction when integrating from a cell boundary to a Gauss node
  std::vector<double> inv_a_mid, f_mid;
};

CellTables build_tables(const ProblemSpec&, const FineGrid&);

enum class Integrand { a, inv_a, inv_a_sq, f, xf };

// Exact sum of per-cell integrals over cells [first, last).
double interval_integral(const CellTables&, Integrand, std::int64_t first, std::int64_t last);

// L2 norm of the source from the cached node values.
double source_l2_norm(const CellTables&);

// Neumaier-compensated accumulator for long sums of mixed magnitudes.
struct NeumaierSum {
  double sum = 0, comp = 0;
  void add(double x) {
    const double t = sum + x;
    comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace dowg
