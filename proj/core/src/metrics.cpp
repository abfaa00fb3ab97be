#include "dowg/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace dowg {

namespace {

double rel_l2(const std::vector<double>& sol, const std::vector<double>& ref, std::size_t first) {
  NeumaierSum num, den;
  for (std::size_t i = first; i < sol.size(); ++i) {
    const double d = sol[i] - ref[i];
    num.add(d * d);
    den.add(ref[i] * ref[i]);
  }
  if (!(den.value() > 0.0)) throw std::domain_error("error_norms: reference is identically zero");
  return std::sqrt(num.value() / den.value());
}

double sup_diff(const std::vector<double>& sol, const std::vector<double>& ref,
                std::size_t first) {
  double m = 0.0;
  for (std::size_t i = first; i < sol.size(); ++i) m = std::max(m, std::abs(sol[i] - ref[i]));
  return m;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps line endings as written
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

ErrorNorms error_norms(const SampledFields& solution, const SampledFields& reference,
                       NormMode mode) {
  if (solution.u.size() != reference.u.size())
    throw std::invalid_argument("error_norms: sample grids differ");
  const std::size_t flux_first = mode == NormMode::exclude_x0 ? 1 : 0;
  ErrorNorms e;
  e.rel_l2_u = rel_l2(solution.u, reference.u, 0);
  e.rel_l2_du = rel_l2(solution.du, reference.du, 0);
  e.rel_l2_flux = rel_l2(solution.flux, reference.flux, flux_first);
  e.linf_u = sup_diff(solution.u, reference.u, 0);
  e.linf_du = sup_diff(solution.du, reference.du, 0);
  e.linf_flux = sup_diff(solution.flux, reference.flux, flux_first);
  return e;
}

SweepResult convergence_sweep(const ProblemSpec& problem, const SweepOptions& opts) {
  if (opts.n_min < 1 || opts.n_max < opts.n_min)
    throw std::invalid_argument("convergence_sweep: need 1 <= n_min <= n_max");
  const bool self_ref = opts.force_self_reference || !has_exact(problem);
  const int top = opts.n_max + (self_ref ? 1 : 0);
  if (opts.fine_level < top)
    throw std::invalid_argument("convergence_sweep: fine level below the finest solve");

  const FineGrid grid = make_fine_grid(opts.fine_level, opts.quad_order);
  const CellTables tables = build_tables(problem, grid);

  SweepResult result;
  result.reference_kind = self_ref ? ReferenceKind::self_convergence : ReferenceKind::closed_form;
  std::tie(result.a_min, result.a_max) = coefficient_grid_range(problem, opts.fine_level);
  result.f_l2 = source_l2_norm(tables);
  const double ratio = result.a_max / result.a_min;

  std::vector<SampledFields> fields(static_cast<std::size_t>(top - opts.n_min) + 1);
  std::vector<ErrorRow> rows;
  for (int n = opts.n_min; n <= top; ++n) {
    auto [sol, sys] = solve_multiscale(problem, tables, n);
    fields[static_cast<std::size_t>(n - opts.n_min)] = std::move(sol.fields);
    if (n > opts.n_max) break;  // reference-only solve in self mode
    ErrorRow row;
    row.n = n;
    row.H = std::ldexp(1.0, -n);
    row.kappa = sys.kappa;
    row.lambda_min = sys.lambda_min;
    row.lambda_max = sys.lambda_max;
    row.ratio = ratio;
    rows.push_back(row);
  }

  ReferenceSolution closed;
  if (!self_ref) closed = closed_form_reference(problem, grid);
  for (auto& row : rows) {
    const auto& sol = fields[static_cast<std::size_t>(row.n - opts.n_min)];
    const auto& ref =
        self_ref ? fields[static_cast<std::size_t>(row.n - opts.n_min) + 1] : closed.fields;
    row.err = error_norms(sol, ref, opts.mode);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto prev = rows[r - 1].err.as_array(), cur = rows[r].err.as_array();
    for (std::size_t k = 0; k < 6; ++k) {
      // below the noise floor the ratio measures roundoff, not convergence
      if (prev[k] > 1e-12 && cur[k] > 1e-12 && std::isfinite(prev[k]) && std::isfinite(cur[k]))
        rows[r].order[k] = std::log2(prev[k] / cur[k]);
    }
  }
  result.rows = std::move(rows);
  return result;
}

BoundCheck check_bounds(const ProblemSpec& problem, const SampledFields& solution,
                        const SampledFields& reference, const CellTables& tables, int n,
                        NormMode mode) {
  if (solution.u.size() != reference.u.size() ||
      solution.u.size() != static_cast<std::size_t>(tables.grid.cells()) + 1)
    throw std::invalid_argument("check_bounds: sample grids differ");
  const auto [a_min, a_max] = coefficient_grid_range(problem, tables.grid.level);
  (void)a_max;
  const double f_l2 = source_l2_norm(tables);
  const auto N = static_cast<double>(tables.grid.cells());

  BoundCheck bc;
  bc.H = std::ldexp(1.0, -n);
  bc.C1 = 2.0 * f_l2 / std::sqrt(a_min);
  bc.C2 = 4.0 * f_l2 / a_min;
  bc.energy_bound = bc.C1 * bc.H;
  bc.l2_bound = bc.C2 * bc.H * bc.H;

  const std::size_t first = (mode == NormMode::exclude_x0 || problem.singular_at_zero) ? 1 : 0;
  NeumaierSum energy, l2;
  for (std::size_t i = first; i < solution.du.size(); ++i) {
    const double d = solution.du[i] - reference.du[i];
    energy.add(eval_coefficient(problem, tables.grid.boundary(static_cast<std::int64_t>(i))) * d *
               d);
  }
  for (std::size_t i = 0; i < solution.u.size(); ++i) {
    const double d = solution.u[i] - reference.u[i];
    l2.add(d * d);
  }
  bc.energy_error = std::sqrt(energy.value() / N);
  bc.l2_error = std::sqrt(l2.value() / N);
  bc.energy_ok = bc.energy_error <= bc.energy_bound * (1.0 + 1e-6);
  bc.l2_ok = bc.l2_error <= bc.l2_bound * (1.0 + 1e-6);
  return bc;
}

double interpolation_deviation(const SampledFields& solution, const SampledFields& reference,
                               int n, int fine_level) {
  if (fine_level < n) throw std::invalid_argument("interpolation_deviation: fine level below n");
  const std::size_t stride = std::size_t{1} << (fine_level - n);
  double dev = 0.0;
  for (std::size_t i = 0; i < solution.u.size(); i += stride)
    dev = std::max(dev, std::abs(solution.u[i] - reference.u[i]));
  return dev;
}

std::pair<double, double> coefficient_grid_range(const ProblemSpec& problem, int fine_level) {
  const std::int64_t N = std::int64_t{1} << fine_level;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::int64_t i = problem.singular_at_zero ? 1 : 0; i <= N; ++i) {
    const double a = eval_coefficient(problem, std::ldexp(static_cast<double>(i), -fine_level));
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return {lo, hi};
}

std::vector<FemRow> fem_comparison(const ProblemSpec& problem, const SweepOptions& opts,
                                   bool same_level) {
  if (opts.n_min < 1 || opts.n_max < opts.n_min)
    throw std::invalid_argument("fem_comparison: need 1 <= n_min <= n_max");
  const int m_top = opts.n_max + (same_level ? 0 : 1);
  const bool self_ref = opts.force_self_reference || !has_exact(problem);
  if (opts.fine_level < std::max(m_top, opts.n_max + (self_ref ? 1 : 0)))
    throw std::invalid_argument("fem_comparison: fine level below the finest solve");

  const FineGrid grid = make_fine_grid(opts.fine_level, opts.quad_order);
  const CellTables tables = build_tables(problem, grid);
  const SampledFields reference =
      self_ref ? solve_multiscale(problem, tables, opts.n_max + 1).first.fields
               : closed_form_reference(problem, grid).fields;

  std::vector<FemRow> rows;
  for (int n = opts.n_min; n <= opts.n_max; ++n) {
    FemRow row;
    row.n = n;
    row.m = same_level ? n : n + 1;
    const FemSolution fem = solve_standard_fem(problem, tables, row.m);
    row.err = error_norms(fem.fields, reference, opts.mode);
    row.kappa = fem.kappa;
    rows.push_back(row);
  }
  return rows;
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4E", v);
  return buf;
}

std::string format_order(const std::optional<double>& ord) {
  if (!ord) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *ord);
  return buf;
}

void write_error_table_csv(const std::string& path, const std::vector<ErrorRow>& rows,
                           bool linf) {
  auto out = open_csv(path);
  const char* header = linf
                           ? "H,e_linf_u,order_u,e_linf_du,order_du,e_linf_flux,order_flux,"
                             "kappa,ratio\n"
                           : "H,e_l2_u,order_u,e_l2_du,order_du,e_l2_flux,order_flux,kappa,ratio\n";
  out << header;
  const std::size_t base = linf ? 3 : 0;
  for (const auto& row : rows) {
    const auto err = row.err.as_array();
    out << "1/2^" << row.n;
    for (std::size_t k = base; k < base + 3; ++k)
      out << ',' << format_sci(err[k]) << ',' << format_order(row.order[k]);
    out << ',' << format_sci(row.kappa) << ',' << format_sci(row.ratio) << '\n';
  }
}

void write_fem_table_csv(const std::string& path, const std::vector<FemRow>& rows) {
  auto out = open_csv(path);
  out << "H,fem_h,e_l2_u,e_l2_du,e_l2_flux,e_linf_u,e_linf_du,e_linf_flux,kappa\n";
  for (const auto& row : rows) {
    out << "1/2^" << row.n << ",1/2^" << row.m;
    for (double e : row.err.as_array()) out << ',' << format_sci(e);
    out << ',' << format_sci(row.kappa) << '\n';
  }
}

void write_fields_csv(const std::string& path, const FineGrid& grid, const SampledFields& fields) {
  auto out = open_csv(path);
  out << "x,u,du,a_du\n";
  char buf[160];
  for (std::size_t i = 0; i < fields.u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10E,%.10E,%.10E,%.10E\n",
                  grid.boundary(static_cast<std::int64_t>(i)), fields.u[i], fields.du[i],
                  fields.flux[i]);
    out << buf;
  }
}

}  // namespace dowg
