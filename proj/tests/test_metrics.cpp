#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dowg/metrics.hpp"

using namespace dowg;

namespace {

SampledFields make_fields(std::vector<double> u, std::vector<double> du,
                          std::vector<double> flux) {
  SampledFields f;
  f.u = std::move(u);
  f.du = std::move(du);
  f.flux = std::move(flux);
  return f;
}

ProblemSpec constant_coefficient_problem() {
  ProblemSpec p;
  p.name = "unit";
  p.coefficient = named_analytic("one");
  p.source = named_analytic("linear_1000");
  p.a_min_hint = p.a_max_hint = 1.0;
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("error norms match a hand computation") {
  const SampledFields sol = make_fields({0, 1.5, 2, 0.5, 0}, {3, 1, -1, -3, -3},
                                        {6, 2, -2, -6, -6});
  const SampledFields ref = make_fields({0, 1, 2, 1, 0}, {2, 2, -2, -2, -2},
                                        {4, 4, -4, -4, -4});
  const ErrorNorms e = error_norms(sol, ref, NormMode::full);
  CHECK(e.rel_l2_u == doctest::Approx(std::sqrt(0.5 / 6.0)).epsilon(1e-13));
  CHECK(e.rel_l2_du == doctest::Approx(std::sqrt(5.0 / 20.0)).epsilon(1e-13));
  CHECK(e.rel_l2_flux == doctest::Approx(std::sqrt(20.0 / 80.0)).epsilon(1e-13));
  CHECK(e.linf_u == doctest::Approx(0.5));
  CHECK(e.linf_du == doctest::Approx(1.0));
  CHECK(e.linf_flux == doctest::Approx(2.0));
}

TEST_CASE("exclude mode drops the first flux sample only") {
  const SampledFields sol = make_fields({0, 1}, {100, 2}, {1000, 4});
  const SampledFields ref = make_fields({0, 2}, {1, 2}, {2, 4});
  const ErrorNorms full = error_norms(sol, ref, NormMode::full);
  const ErrorNorms cut = error_norms(sol, ref, NormMode::exclude_x0);
  // u and u' are still compared at every point; only the flux skips x = 0,
  // where a singular coefficient would make the sample meaningless
  CHECK(cut.rel_l2_u == doctest::Approx(full.rel_l2_u));
  CHECK(cut.linf_u == doctest::Approx(full.linf_u));
  CHECK(cut.rel_l2_du == doctest::Approx(full.rel_l2_du));
  CHECK(cut.linf_du == doctest::Approx(full.linf_du));
  CHECK(full.linf_flux == doctest::Approx(998.0));
  CHECK(cut.linf_flux == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cut.rel_l2_flux == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("degenerate references are rejected") {
  const SampledFields sol = make_fields({0, 1}, {1, 1}, {1, 1});
  const SampledFields zero = make_fields({0, 0}, {0, 0}, {0, 0});
  CHECK_THROWS_AS(error_norms(sol, zero, NormMode::full), std::domain_error);
  const SampledFields other = make_fields({0, 1, 2}, {1, 1, 1}, {1, 1, 1});
  CHECK_THROWS_AS(error_norms(sol, other, NormMode::full), std::invalid_argument);
}

TEST_CASE("sweep rows carry consistent orders and decreasing errors") {
  const ProblemSpec p = builtin_example(1);
  SweepOptions opts;
  opts.n_min = 1;
  opts.n_max = 4;
  opts.fine_level = 12;
  const SweepResult res = convergence_sweep(p, opts);
  CHECK(res.reference_kind == ReferenceKind::closed_form);
  REQUIRE(res.rows.size() == 4);
  CHECK(!res.rows[0].order[0].has_value());
  for (std::size_t r = 1; r < res.rows.size(); ++r) {
    const double expected =
        std::log2(res.rows[r - 1].err.rel_l2_u / res.rows[r].err.rel_l2_u);
    REQUIRE(res.rows[r].order[0].has_value());
    CHECK(*res.rows[r].order[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(res.rows[r].err.rel_l2_u < res.rows[r - 1].err.rel_l2_u);
    CHECK(res.rows[r].err.rel_l2_du < res.rows[r - 1].err.rel_l2_du);
  }
  for (const ErrorRow& row : res.rows) {
    CHECK(row.H == doctest::Approx(std::ldexp(1.0, -row.n)));
    CHECK(row.ratio == doctest::Approx(41.0).epsilon(1e-6));
    CHECK(row.kappa == doctest::Approx(11.64).epsilon(0.02));
    CHECK(row.lambda_min > 0);
    CHECK(row.lambda_max >= row.lambda_min);
  }
  CHECK(res.f_l2 == doctest::Approx(1000.0 / std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("self-convergence errors track the exact-reference errors") {
  const ProblemSpec p = builtin_example(2);
  SweepOptions opts;
  opts.n_min = 2;
  opts.n_max = 4;
  opts.fine_level = 12;
  const SweepResult exact = convergence_sweep(p, opts);
  opts.force_self_reference = true;
  const SweepResult self = convergence_sweep(p, opts);
  CHECK(self.reference_kind == ReferenceKind::self_convergence);
  for (std::size_t r = 0; r < exact.rows.size(); ++r) {
    const double e = exact.rows[r].err.rel_l2_u;
    const double s = self.rows[r].err.rel_l2_u;
    CHECK(s > e / 3);
    CHECK(s < e * 3);
  }
}

TEST_CASE("sweep options are validated") {
  const ProblemSpec p = builtin_example(1);
  SweepOptions opts;
  opts.n_min = 0;
  CHECK_THROWS_AS(convergence_sweep(p, opts), std::invalid_argument);
  opts.n_min = 3;
  opts.n_max = 2;
  CHECK_THROWS_AS(convergence_sweep(p, opts), std::invalid_argument);
  opts.n_min = 1;
  opts.n_max = 6;
  opts.fine_level = 5;  // below the finest solve
  CHECK_THROWS_AS(convergence_sweep(p, opts), std::invalid_argument);
  opts.fine_level = 6;
  opts.force_self_reference = true;  // needs an n_max+1 solve on the same grid
  CHECK_THROWS_AS(convergence_sweep(p, opts), std::invalid_argument);
}

TEST_CASE("a-priori bounds hold with quadrature constants") {
  const ProblemSpec p = builtin_example(1);
  const FineGrid g = make_fine_grid(12, 3);
  const CellTables t = build_tables(p, g);
  const ReferenceSolution ref = closed_form_reference(p, g);
  for (int n : {1, 2, 3}) {
    CAPTURE(n);
    auto [sol, sys] = solve_multiscale(p, t, n);
    (void)sys;
    const BoundCheck bc = check_bounds(p, sol.fields, ref.fields, t, n, NormMode::full);
    CHECK(bc.energy_ok);
    CHECK(bc.l2_ok);
    CHECK(bc.H == doctest::Approx(std::ldexp(1.0, -n)));
    // C1 = 2 ||f|| / sqrt(a_min), C2 = 4 ||f|| / a_min with the grid minimum
    const auto [a_min, a_max] = coefficient_grid_range(p, g.level);
    (void)a_max;
    CHECK(bc.C1 == doctest::Approx(2 * source_l2_norm(t) / std::sqrt(a_min)).epsilon(1e-12));
    CHECK(bc.C2 == doctest::Approx(4 * source_l2_norm(t) / a_min).epsilon(1e-12));
    CHECK(bc.energy_bound == doctest::Approx(bc.C1 * bc.H).epsilon(1e-12));
    CHECK(bc.l2_bound == doctest::Approx(bc.C2 * bc.H * bc.H).epsilon(1e-12));
    CHECK(bc.energy_error <= bc.energy_bound);
    CHECK(bc.l2_error <= bc.l2_bound);
  }
}

TEST_CASE("coarse-node interpolation deviation") {
  const ProblemSpec p2 = builtin_example(2);
  const FineGrid g = make_fine_grid(12, 3);
  const CellTables t2 = build_tables(p2, g);
  const ReferenceSolution ref2 = closed_form_reference(p2, g);
  double u_max = 0;
  for (double v : ref2.fields.u) u_max = std::max(u_max, std::fabs(v));
  auto [sol2, sys2] = solve_multiscale(p2, t2, 4);
  (void)sys2;
  CHECK(interpolation_deviation(sol2.fields, ref2.fields, 4, g.level) < 1e-6 * u_max);

  const ProblemSpec p1 = constant_coefficient_problem();
  const CellTables t1 = build_tables(p1, g);
  const ReferenceSolution ref1 = generic_reference(p1, 14, g);
  double u1_max = 0;
  for (double v : ref1.fields.u) u1_max = std::max(u1_max, std::fabs(v));
  auto [sol1, sys1] = solve_multiscale(p1, t1, 4);
  (void)sys1;
  CHECK(interpolation_deviation(sol1.fields, ref1.fields, 4, g.level) < 1e-12 * u1_max);
}

TEST_CASE("coefficient range sampling hits the analytic extremes") {
  const auto [lo, hi] = coefficient_grid_range(builtin_example(1), 12);
  CHECK(lo == doctest::Approx(1.0 / 2.05).epsilon(1e-12));
  CHECK(hi == doctest::Approx(20.0).epsilon(1e-12));
  // the singular case skips x = 0 and stays finite
  const auto [lo3, hi3] = coefficient_grid_range(builtin_example(3), 12);
  CHECK(lo3 > 0);
  CHECK(std::isfinite(hi3));
  CHECK(hi3 / lo3 > 1e6);
}

TEST_CASE("fem baseline stagnates on the contrast problem") {
  const ProblemSpec p = builtin_example(2);
  SweepOptions opts;
  opts.n_min = 1;
  opts.n_max = 3;
  opts.fine_level = 10;
  const std::vector<FemRow> rows = fem_comparison(p, opts, false);
  REQUIRE(rows.size() == 3);
  for (const FemRow& row : rows) {
    CHECK(row.m == row.n + 1);
    CHECK(row.err.rel_l2_u >= 0.9);
    CHECK(row.err.rel_l2_du >= 0.9);
    CHECK(row.kappa > 1);
  }
  const std::vector<FemRow> same = fem_comparison(p, opts, true);
  CHECK(same[0].m == same[0].n);
}

TEST_CASE("scientific table formatting") {
  CHECK(format_sci(2.768e-4) == "2.7680E-04");
  CHECK(format_sci(1.0) == "1.0000E+00");
  CHECK(format_sci(-3.14159e7) == "-3.1416E+07");
  CHECK(format_order(std::nullopt) == "--");
  CHECK(format_order(1.9702) == "1.97");
}

TEST_CASE("error table csv uses LF endings and the fixed layout") {
  const ProblemSpec p = builtin_example(1);
  SweepOptions opts;
  opts.n_min = 1;
  opts.n_max = 2;
  opts.fine_level = 10;
  const SweepResult res = convergence_sweep(p, opts);
  const std::string path = "metrics_test_table.csv";
  write_error_table_csv(path, res.rows, false);
  const std::string text = slurp(path);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.rfind("H,e_l2_u,order_u,e_l2_du,order_du,e_l2_flux,order_flux,kappa,ratio\n",
                   0) == 0);
  CHECK(text.find("1/2^1,") != std::string::npos);
  CHECK(text.find("1/2^2,") != std::string::npos);
  CHECK(text.find(",--,") != std::string::npos);  // first row carries no orders
  CHECK(text.back() == '\n');

  write_error_table_csv(path, res.rows, true);
  CHECK(slurp(path).rfind("H,e_linf_u,", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("field dump csv carries one row per sample") {
  const ProblemSpec p = builtin_example(1);
  const FineGrid g = make_fine_grid(6, 3);
  const ReferenceSolution ref = closed_form_reference(p, g);
  const std::string path = "metrics_test_fields.csv";
  write_fields_csv(path, g, ref.fields);
  const std::string text = slurp(path);
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == static_cast<std::size_t>(g.cells()) + 2);  // header + 65 samples
  CHECK(text.rfind("x,u,du,a_du\n", 0) == 0);
  std::remove(path.c_str());
}
