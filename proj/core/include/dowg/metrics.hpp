#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dowg/assembly.hpp"
#include "dowg/problem.hpp"
#include "dowg/quadrature.hpp"
#include "dowg/reference.hpp"

namespace dowg {

// exclude_x0 drops i = 0 from the flux norms and from the weighted energy sum,
// matching how results are reported when the coefficient blows up at x = 0
enum class NormMode { full, exclude_x0 };

struct ErrorNorms {
  double rel_l2_u = 0, rel_l2_du = 0, rel_l2_flux = 0;
  double linf_u = 0, linf_du = 0, linf_flux = 0;

  std::array<double, 6> as_array() const {
    return {rel_l2_u, rel_l2_du, rel_l2_flux, linf_u, linf_du, linf_flux};
  }
};

/** Relative l2 ratios and absolute sup errors over the shared sample grid. */
ErrorNorms error_norms(const SampledFields& solution, const SampledFields& reference,
                       NormMode mode);

/** One table row: errors at level n plus orders against the previous level. */
struct ErrorRow {
  int n = 0;
  double H = 0;
  ErrorNorms err;
  std::array<std::optional<double>, 6> order;  // same component order as ErrorNorms::as_array
  double kappa = 0, lambda_min = 0, lambda_max = 0;
  double ratio = 0;  // grid-sampled a_max / a_min
};

struct SweepOptions {
  int n_min = 1, n_max = 6;
  int fine_level = 14;
  int quad_order = 3;
  NormMode mode = NormMode::full;
  bool force_self_reference = false;  // use the level-(n+1) reference even with a closed form
};

struct SweepResult {
  std::vector<ErrorRow> rows;
  ReferenceKind reference_kind = ReferenceKind::closed_form;
  double a_min = 0, a_max = 0;  // grid-sampled
  double f_l2 = 0;
};

SweepResult convergence_sweep(const ProblemSpec& problem, const SweepOptions& opts);

/** Discrete energy and L2 errors against the a-priori bounds C1 H and C2 H^2. */
struct BoundCheck {
  double H = 0;
  double C1 = 0, C2 = 0;  // 2 ||f|| / sqrt(a_min) and 4 ||f|| / a_min
  double energy_error = 0, energy_bound = 0;
  double l2_error = 0, l2_bound = 0;
  bool energy_ok = false, l2_ok = false;
};

BoundCheck check_bounds(const ProblemSpec& problem, const SampledFields& solution,
                        const SampledFields& reference, const CellTables& tables, int n,
                        NormMode mode);

/** Largest deviation |u_H - u| over the 2^n + 1 coarse grid points. */
double interpolation_deviation(const SampledFields& solution, const SampledFields& reference,
                               int n, int fine_level);

/** Coefficient range sampled at the fine boundaries (skips x=0 when singular). */
std::pair<double, double> coefficient_grid_range(const ProblemSpec& problem, int fine_level);

/** Baseline row: standard P1 FEM errors against the same reference. */
struct FemRow {
  int n = 0;  // paired multiscale level
  int m = 0;  // FEM mesh level, n+1 unless same-level mode
  ErrorNorms err;
  double kappa = 0;
};

std::vector<FemRow> fem_comparison(const ProblemSpec& problem, const SweepOptions& opts,
                                   bool same_level);

// Table formatting: 4-digit scientific cells and 2-decimal orders ("--" when
// absent) so rows diff cleanly against published tables.
std::string format_sci(double v);
std::string format_order(const std::optional<double>& ord);

void write_error_table_csv(const std::string& path, const std::vector<ErrorRow>& rows, bool linf);
void write_fem_table_csv(const std::string& path, const std::vector<FemRow>& rows);
void write_fields_csv(const std::string& path, const FineGrid& grid, const SampledFields& fields);

}  // namespace dowg
