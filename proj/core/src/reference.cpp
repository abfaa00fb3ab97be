#include "dowg/reference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dowg {

ReferenceSolution closed_form_reference(const ProblemSpec& problem, const FineGrid& grid) {
  if (!has_exact(problem))
    throw std::invalid_argument("closed_form_reference: problem has no exact solution");
  const std::int64_t N = grid.cells();
  ReferenceSolution ref;
  ref.kind = ReferenceKind::closed_form;
  ref.fields.u.resize(static_cast<std::size_t>(N) + 1);
  ref.fields.du.resize(static_cast<std::size_t>(N) + 1);
  ref.fields.flux.resize(static_cast<std::size_t>(N) + 1);
  for (std::int64_t i = 0; i <= N; ++i) {
    const double x = grid.boundary(i);
    const auto idx = static_cast<std::size_t>(i);
    ref.fields.u[idx] = eval_exact_u(problem, x);
    ref.fields.du[idx] = eval_exact_du(problem, x);
    ref.fields.flux[idx] = eval_exact_flux(problem, x);
  }
  return ref;
}

ReferenceSolution generic_reference(const ProblemSpec& problem, int oracle_level,
                                    const FineGrid& eval_grid) {
  if (oracle_level < eval_grid.level)
    throw std::invalid_argument("generic_reference: oracle level below the evaluation level");
  const FineGrid og = make_fine_grid(oracle_level, eval_grid.quad_order);
  const CellTables t = build_tables(problem, og);
  const std::int64_t Nr = og.cells();
  const double h = og.cell_width();
  const int Q = og.quad_order;

  // F at a Gauss node: boundary prefix plus a one-node correction into the cell
  auto F_node = [&](std::int64_t c, int q) {
    const std::size_t idx = static_cast<std::size_t>(c) * Q + q;
    const double tq = og.ref_nodes[static_cast<std::size_t>(q)];
    return -(t.Pf[static_cast<std::size_t>(c)] + tq * h * t.f_mid[idx]);
  };

  NeumaierSum int_F_over_a;
  for (std::int64_t c = 0; c < Nr; ++c) {
    double cell = 0.0;
    for (int q = 0; q < Q; ++q) {
      const std::size_t idx = static_cast<std::size_t>(c) * Q + q;
      cell += og.ref_weights[static_cast<std::size_t>(q)] * F_node(c, q) / t.a_nodes[idx];
    }
    int_F_over_a.add(h * cell);
  }
  const double denom = t.PinvA[static_cast<std::size_t>(Nr)];
  if (!(denom > 0.0))
    throw std::runtime_error("generic_reference: int 1/a is not positive, tables corrupt");
  const double K = -int_F_over_a.value() / denom;

  std::vector<double> u_prefix(static_cast<std::size_t>(Nr) + 1, 0.0);
  NeumaierSum up;
  for (std::int64_t c = 0; c < Nr; ++c) {
    double cell = 0.0;
    for (int q = 0; q < Q; ++q) {
      const std::size_t idx = static_cast<std::size_t>(c) * Q + q;
      cell += og.ref_weights[static_cast<std::size_t>(q)] * (F_node(c, q) + K) / t.a_nodes[idx];
    }
    up.add(h * cell);
    u_prefix[static_cast<std::size_t>(c) + 1] = up.value();
  }

  const std::int64_t stride = std::int64_t{1} << (oracle_level - eval_grid.level);
  const std::int64_t N = eval_grid.cells();
  ReferenceSolution ref;
  ref.kind = ReferenceKind::integral_oracle;
  ref.fields.u.resize(static_cast<std::size_t>(N) + 1);
  ref.fields.du.resize(static_cast<std::size_t>(N) + 1);
  ref.fields.flux.resize(static_cast<std::size_t>(N) + 1);
  for (std::int64_t i = 0; i <= N; ++i) {
    const std::int64_t c = i * stride;
    const double x = eval_grid.boundary(i);
    const double flux = -t.Pf[static_cast<std::size_t>(c)] + K;
    const auto idx = static_cast<std::size_t>(i);
    ref.fields.u[idx] = u_prefix[static_cast<std::size_t>(c)];
    ref.fields.flux[idx] = flux;
    ref.fields.du[idx] = flux * eval_inv_coefficient(problem, x);
  }
  return ref;
}

ReferenceSolution self_convergence_reference(const ProblemSpec& problem, const CellTables& tables,
                                             int n) {
  ReferenceSolution ref;
  ref.kind = ReferenceKind::self_convergence;
  ref.fields = solve_multiscale(problem, tables, n + 1).first.fields;
  return ref;
}

}  // namespace dowg
