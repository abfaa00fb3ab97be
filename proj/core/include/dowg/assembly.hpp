#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dowg/basis.hpp"
#include "dowg/problem.hpp"
#include "dowg/quadrature.hpp"

namespace dowg {

/** Dense Galerkin system together with its solution and spectral data. */
struct GalerkinSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd d;  // coefficients in the normalized basis
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
};

/** Solution values sampled at the fine boundaries x_i = i / 2^L, i = 0..2^L. */
struct SampledFields {
  std::vector<double> u;
  std::vector<double> du;
  std::vector<double> flux;  // a * u'
};

struct MultiscaleSolution {
  MultiscaleSpace space;
  Eigen::VectorXd d;
  SampledFields fields;
};

struct FemSolution {
  int level = 0;          // mesh width 2^-level
  Eigen::VectorXd nodal;  // interior node values
  SampledFields fields;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
};

/** Stiffness matrix int a g'_p g'_q in the normalized multiscale basis. */
Eigen::MatrixXd assemble_stiffness(const MultiscaleSpace& space, const CellTables& tables);

/** Load vector int f g_p in the normalized multiscale basis. */
Eigen::VectorXd assemble_load(const MultiscaleSpace& space, const CellTables& tables);

/**
 * Solves A x = b by Cholesky factorization with one step of iterative
 * refinement. Throws std::runtime_error naming the first non-positive pivot
 * if A is not numerically positive definite.
 */
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/** Extreme eigenvalues (min, max) of a symmetric matrix. */
std::pair<double, double> eigenvalue_bounds(const Eigen::MatrixXd& A);

/** Spectral condition number; +inf when the smallest eigenvalue is <= 0. */
double condition_number(const Eigen::MatrixXd& A);

/** Samples u, u' and the flux a u' of a coefficient vector on the fine grid. */
SampledFields sample_multiscale(const ProblemSpec& problem, const MultiscaleSpace& space,
                                const CellTables& tables, const Eigen::VectorXd& d);

/** Full pipeline at coarse level n: build space, assemble, solve, sample. */
std::pair<MultiscaleSolution, GalerkinSystem> solve_multiscale(const ProblemSpec& problem,
                                                               const CellTables& tables, int n);

/** Standard P1 finite elements on the uniform mesh of width 2^-m. */
FemSolution solve_standard_fem(const ProblemSpec& problem, const CellTables& tables, int m);

}  // namespace dowg
