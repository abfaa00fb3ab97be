#pragma once

#include "dowg/assembly.hpp"
#include "dowg/problem.hpp"
#include "dowg/quadrature.hpp"

namespace dowg {

enum class ReferenceKind { closed_form, integral_oracle, self_convergence };

/** Ground-truth samples on the fine boundaries, tagged with their origin. */
struct ReferenceSolution {
  ReferenceKind kind = ReferenceKind::closed_form;
  SampledFields fields;
};

/** Samples the problem's exact solution on the fine grid. Requires one. */
ReferenceSolution closed_form_reference(const ProblemSpec& problem, const FineGrid& grid);

/**
 * High-accuracy reference from the flux representation of the two-point
 * problem: with F(x) = -int_0^x f and K = -(int F/a)/(int 1/a), the solution
 * is u(x) = int_0^x (F+K)/a, its flux is exactly F + K, and u' = (F+K)/a.
 * All integrals are prefix quadratures at oracle_level >= the evaluation
 * level; samples are downsampled onto eval_grid.
 */
ReferenceSolution generic_reference(const ProblemSpec& problem, int oracle_level,
                                    const FineGrid& eval_grid);

/** Reference for problems without an exact solution: solve one level finer. */
ReferenceSolution self_convergence_reference(const ProblemSpec& problem, const CellTables& tables,
                                             int n);

}  // namespace dowg
