#pragma once

#include "dowg/quadrature.hpp"

#include <Eigen/Core>

namespace dowg {

// Index into the multiscale basis: the scale hat phi(2x-1), the hierarchical
// wavelets psi(2^j x - k), or the per-coarse-cell special functions S_i.
struct BasisIndex {
  enum class Kind { scale, wavelet, special };
  Kind kind = Kind::scale;
  int j = 0, k = 0;  // wavelet position, 1 <= j <= n-1, 0 <= k < 2^j
  int i = 0;         // special's coarse cell, 0 <= i < 2^n

  static BasisIndex scale_fn() { return {Kind::scale, 0, 0, 0}; }
  static BasisIndex wavelet(int j, int k) { return {Kind::wavelet, j, k, 0}; }
  static BasisIndex special(int i) { return {Kind::special, 0, 0, i}; }
};

// The derivative-orthogonal space at coarse level n: ordered basis (scale,
// wavelets lexicographic by (j,k), retained specials by i) plus the cell
// weights w_i and the squared derivative norms s_i of the specials.
struct MultiscaleSpace {
  int n = 0;
  double H = 0;                   // 2^-n
  std::vector<BasisIndex> basis;
  std::vector<double> w;          // w_i = 2^n int_cell 1/a, one per coarse cell
  std::vector<double> s;          // s_i = int_cell (1/a - w_i)^2, one per coarse cell
  std::vector<char> dropped;      // specials removed because a is constant on the cell

  int M() const { return static_cast<int>(basis.size()); }
  double deriv_norm2(const BasisIndex&) const;
};

double weight(const CellTables&, int n, int i);
MultiscaleSpace build_space(const ProblemSpec&, const CellTables&, int n);

// Tent geometry of a regular basis function: peak 1 at mid, support [left, right].
struct HatGeometry {
  double left, mid, right, slope;
};

HatGeometry hat_geometry(const BasisIndex&);  // scale or wavelet only

// Closed-form hat evaluations. Derivatives follow the half-open convention
// (+slope on [left, mid), -slope on [mid, right)), with x = 1 reading the last
// piece so samples at the right domain edge stay meaningful.
double eval_regular(const BasisIndex&, double x);
double eval_regular_deriv(const BasisIndex&, double x);
double regular_deriv_norm2(const BasisIndex&);  // 4 for the scale hat, 2^(j+2) for wavelets

// S_i at a point of the fine boundary grid (prefix-table granularity).
double eval_special(const CellTables&, const MultiscaleSpace&, int i, double x);
// S_i' = 1/a - w_i inside the cell, 0 outside; pointwise in x.
double eval_special_deriv(const ProblemSpec&, const MultiscaleSpace&, int i, double x);

// Gram matrix of the normalized basis derivatives, computed from the tables.
// Derivative-orthogonality says this is the identity.
Eigen::MatrixXd gram_matrix(const MultiscaleSpace&, const CellTables&);

// Coefficients of a level-n piecewise-constant function over {1, phi', psi'_{j,k}}.
struct HaarCoefficients {
  int n = 0;
  double c0 = 0;            // mean
  double c1 = 0;            // weight of phi(2x-1)'
  std::vector<double> cjk;  // wavelet weights, lexicographic by (j,k)
};

HaarCoefficients decompose_piecewise_constant(const std::vector<double>& p);
std::vector<double> reconstruct_piecewise_constant(const HaarCoefficients&);

}  // namespace dowg
