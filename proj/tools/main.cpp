// Command-line front end: convergence sweeps, FEM baseline comparisons,
// invariant checks, and debug dumps for the multiscale solver in core/.
//
// Exit codes: 0 success, 1 failed checks, 2 bad configuration, 3 solver error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dowg/assembly.hpp"
#include "dowg/basis.hpp"
#include "dowg/metrics.hpp"
#include "dowg/problem.hpp"
#include "dowg/problem_json.hpp"
#include "dowg/quadrature.hpp"
#include "dowg/reference.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  int example = 0;  // 0 = not set
  std::string problem_path;
  std::string n_range;
  int fine_level = 0;  // 0 = pick per problem (15 when singular at x=0, else 14)
  int quad = 3;
  std::string out_dir = ".";
  bool exclude_x0 = false;
  std::string config_path;

  bool self_reference = false;
  bool with_bounds = false;
  bool with_interpolation = false;
  bool dump_system = false;
  bool same_level = false;
  int oracle_level = 0;  // 0 = closed form when available, else fine level + 2

  int n_lo = 0, n_hi = 0;

  // handles for "flags win over config file" resolution
  CLI::Option *h_example = nullptr, *h_problem = nullptr, *h_n = nullptr, *h_fine = nullptr,
              *h_quad = nullptr, *h_out = nullptr, *h_excl = nullptr, *h_self = nullptr,
              *h_bounds = nullptr, *h_interp = nullptr, *h_dumpsys = nullptr, *h_same = nullptr,
              *h_oracle = nullptr;
};

void add_common_options(CLI::App* cmd, Options& o) {
  o.h_example = cmd->add_option("--example", o.example, "built-in problem id")
                    ->check(CLI::Range(1, 6));
  o.h_problem = cmd->add_option("--problem", o.problem_path, "problem description JSON file");
  o.h_n = cmd->add_option("--n", o.n_range, "coarse level range a..b (or a single level)");
  o.h_fine = cmd->add_option("--fine-level", o.fine_level, "evaluation grid level L, grid 2^L")
                 ->check(CLI::Range(1, 20));
  o.h_quad = cmd->add_option("--quad", o.quad, "Gauss points per fine cell")
                 ->check(CLI::IsMember({1, 2, 3, 5}));
  o.h_out = cmd->add_option("--out", o.out_dir, "output directory for CSV files");
  o.h_excl = cmd->add_flag("--exclude-x0", o.exclude_x0,
                           "drop i=0 from flux norms (automatic for singular coefficients)");
  cmd->add_option("--config", o.config_path, "JSON config file; explicit flags win");
}

template <typename T>
void config_fill(const json& j, const char* key, const CLI::Option* handle, T& field) {
  if (handle != nullptr && handle->count() > 0) return;
  if (j.contains(key)) field = j.at(key).get<T>();
}

void merge_config_file(Options& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file " + o.config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config file: " + std::string(e.what()));
  }
  config_fill(j, "example", o.h_example, o.example);
  config_fill(j, "problem", o.h_problem, o.problem_path);
  config_fill(j, "n", o.h_n, o.n_range);
  config_fill(j, "fine-level", o.h_fine, o.fine_level);
  config_fill(j, "quad", o.h_quad, o.quad);
  config_fill(j, "out", o.h_out, o.out_dir);
  config_fill(j, "exclude-x0", o.h_excl, o.exclude_x0);
  config_fill(j, "self-reference", o.h_self, o.self_reference);
  config_fill(j, "check-bounds", o.h_bounds, o.with_bounds);
  config_fill(j, "check-interpolation", o.h_interp, o.with_interpolation);
  config_fill(j, "dump-system", o.h_dumpsys, o.dump_system);
  config_fill(j, "same-level", o.h_same, o.same_level);
  config_fill(j, "oracle-level", o.h_oracle, o.oracle_level);
}

dowg::ProblemSpec resolve_problem(const Options& o) {
  const bool have_example = o.example != 0;
  const bool have_path = !o.problem_path.empty();
  if (have_example == have_path)
    throw std::invalid_argument("pass exactly one of --example or --problem");
  if (have_example) return dowg::builtin_example(o.example);
  try {
    return dowg::load_problem_file(o.problem_path);
  } catch (const std::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

void parse_n_range(const std::string& text, int& lo, int& hi) {
  try {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
      lo = hi = std::stoi(text);
    } else {
      lo = std::stoi(text.substr(0, dots));
      hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("--n expects a..b or a single integer, got \"" + text + "\"");
  }
  if (lo < 1 || hi < lo)
    throw std::invalid_argument("--n range must satisfy 1 <= a <= b, got \"" + text + "\"");
}

// Fills the per-problem defaults that depend on which problem was selected.
void finalize(Options& o, const dowg::ProblemSpec& problem) {
  if (o.fine_level == 0) o.fine_level = problem.singular_at_zero ? 15 : 14;
  if (o.n_range.empty()) o.n_range = problem.singular_at_zero ? "1..7" : "1..6";
  if (problem.singular_at_zero) o.exclude_x0 = true;
  parse_n_range(o.n_range, o.n_lo, o.n_hi);
}

std::string output_stem(const Options& o, const dowg::ProblemSpec& problem) {
  if (problem.builtin_id >= 1) return "example" + std::to_string(problem.builtin_id);
  std::string stem;
  for (char c : problem.name)
    stem += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return stem.empty() ? "problem" : stem;
}

std::string out_path(const Options& o, const std::string& file) {
  fs::create_directories(o.out_dir);
  return (fs::path(o.out_dir) / file).string();
}

dowg::SweepOptions sweep_options(const Options& o) {
  dowg::SweepOptions s;
  s.n_min = o.n_lo;
  s.n_max = o.n_hi;
  s.fine_level = o.fine_level;
  s.quad_order = o.quad;
  s.mode = o.exclude_x0 ? dowg::NormMode::exclude_x0 : dowg::NormMode::full;
  s.force_self_reference = o.self_reference;
  return s;
}

const char* reference_name(dowg::ReferenceKind kind) {
  switch (kind) {
    case dowg::ReferenceKind::closed_form: return "closed form";
    case dowg::ReferenceKind::integral_oracle: return "integral oracle";
    case dowg::ReferenceKind::self_convergence: return "next-finer level";
  }
  return "?";
}

void print_error_table(const std::vector<dowg::ErrorRow>& rows, bool linf) {
  const std::size_t base = linf ? 3 : 0;
  std::printf("%-7s %11s %6s %11s %6s %11s %6s %11s %11s\n", "H",
              linf ? "linf_u" : "l2_u", "order", linf ? "linf_du" : "l2_du", "order",
              linf ? "linf_flux" : "l2_flux", "order", "kappa", "ratio");
  for (const auto& row : rows) {
    const auto err = row.err.as_array();
    std::printf("1/2^%-3d", row.n);
    for (std::size_t k = base; k < base + 3; ++k)
      std::printf(" %11s %6s", dowg::format_sci(err[k]).c_str(),
                  dowg::format_order(row.order[k]).c_str());
    std::printf(" %11s %11s\n", dowg::format_sci(row.kappa).c_str(),
                dowg::format_sci(row.ratio).c_str());
  }
}

void dump_matrix_csv(const std::string& path, const Eigen::MatrixXd& A) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[32];
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.10E", A(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

// Interpolation deviations are quadrature-limited; below 3 Gauss points per
// cell the special-function moments are too crude for the 1e-6 budget, so the
// check is reported but does not fail the run.
bool check_interpolation_rows(const dowg::ProblemSpec& problem, const Options& o,
                              const dowg::CellTables& tables,
                              const std::vector<dowg::SampledFields>& solutions) {
  const dowg::ReferenceSolution ref =
      dowg::has_exact(problem)
          ? dowg::closed_form_reference(problem, tables.grid)
          : dowg::generic_reference(problem, std::min(o.fine_level + 2, 20), tables.grid);
  double u_max = 0.0;
  for (double v : ref.fields.u) u_max = std::max(u_max, std::abs(v));
  const double tol = 1e-6 * u_max;

  bool ok = true;
  for (int n = o.n_lo; n <= o.n_hi; ++n) {
    const auto& sol = solutions[static_cast<std::size_t>(n - o.n_lo)];
    const double dev = dowg::interpolation_deviation(sol, ref.fields, n, o.fine_level);
    const bool pass = dev <= tol;
    const char* verdict = pass ? "PASS" : (o.quad < 3 ? "EXPECTED-FAIL" : "FAIL");
    std::printf("%-13s interpolation n=%d  deviation %s  tol %s%s\n", verdict, n,
                dowg::format_sci(dev).c_str(), dowg::format_sci(tol).c_str(),
                (!pass && o.quad < 3) ? "  (quadrature below 3 points per cell)" : "");
    if (!pass && o.quad >= 3) ok = false;
  }
  return ok;
}

bool check_bound_rows(const dowg::ProblemSpec& problem, const Options& o,
                      const dowg::CellTables& tables,
                      const std::vector<dowg::SampledFields>& solutions,
                      const std::vector<const dowg::SampledFields*>& references) {
  const auto mode = o.exclude_x0 ? dowg::NormMode::exclude_x0 : dowg::NormMode::full;
  bool ok = true;
  for (int n = o.n_lo; n <= o.n_hi; ++n) {
    const std::size_t r = static_cast<std::size_t>(n - o.n_lo);
    const auto bc = dowg::check_bounds(problem, solutions[r], *references[r], tables, n, mode);
    std::printf("%-13s energy bound  n=%d  error %s <= %s\n", bc.energy_ok ? "PASS" : "FAIL", n,
                dowg::format_sci(bc.energy_error).c_str(),
                dowg::format_sci(bc.energy_bound).c_str());
    std::printf("%-13s l2 bound      n=%d  error %s <= %s\n", bc.l2_ok ? "PASS" : "FAIL", n,
                dowg::format_sci(bc.l2_error).c_str(), dowg::format_sci(bc.l2_bound).c_str());
    ok = ok && bc.energy_ok && bc.l2_ok;
  }
  return ok;
}

int run_sweep(Options& o) {
  const dowg::ProblemSpec problem = resolve_problem(o);
  finalize(o, problem);
  const std::string stem = output_stem(o, problem);

  const dowg::SweepResult res = dowg::convergence_sweep(problem, sweep_options(o));
  std::printf("# %s: reference = %s, fine level %d, q = %d\n", stem.c_str(),
              reference_name(res.reference_kind), o.fine_level, o.quad);
  print_error_table(res.rows, false);

  const std::string l2_path = out_path(o, stem + "_l2.csv");
  const std::string linf_path = out_path(o, stem + "_linf.csv");
  dowg::write_error_table_csv(l2_path, res.rows, false);
  dowg::write_error_table_csv(linf_path, res.rows, true);
  std::printf("wrote %s\nwrote %s\n", l2_path.c_str(), linf_path.c_str());

  if (!(o.with_bounds || o.with_interpolation || o.dump_system)) return 0;

  const dowg::FineGrid grid = dowg::make_fine_grid(o.fine_level, o.quad);
  const dowg::CellTables tables = dowg::build_tables(problem, grid);
  const bool self_ref = o.self_reference || !dowg::has_exact(problem);

  std::vector<dowg::SampledFields> solutions;
  for (int n = o.n_lo; n <= o.n_hi; ++n) {
    auto [sol, sys] = dowg::solve_multiscale(problem, tables, n);
    if (o.dump_system) {
      const std::string a_path = out_path(o, stem + "_A_n" + std::to_string(n) + ".csv");
      dump_matrix_csv(a_path, sys.A);
      const std::string b_path = out_path(o, stem + "_b_n" + std::to_string(n) + ".csv");
      dump_matrix_csv(b_path, sys.b);
      std::printf("wrote %s\nwrote %s\n", a_path.c_str(), b_path.c_str());
    }
    solutions.push_back(std::move(sol.fields));
  }

  bool ok = true;
  if (o.with_bounds) {
    dowg::ReferenceSolution closed;
    std::vector<dowg::ReferenceSolution> self_refs;
    std::vector<const dowg::SampledFields*> refs;
    if (!self_ref) {
      closed = dowg::closed_form_reference(problem, grid);
      for (int n = o.n_lo; n <= o.n_hi; ++n) refs.push_back(&closed.fields);
    } else {
      for (int n = o.n_lo; n <= o.n_hi; ++n)
        self_refs.push_back(dowg::self_convergence_reference(problem, tables, n));
      for (const auto& r : self_refs) refs.push_back(&r.fields);
    }
    ok = check_bound_rows(problem, o, tables, solutions, refs) && ok;
  }
  if (o.with_interpolation) ok = check_interpolation_rows(problem, o, tables, solutions) && ok;
  return ok ? 0 : 1;
}

int run_compare_fem(Options& o) {
  const dowg::ProblemSpec problem = resolve_problem(o);
  finalize(o, problem);
  const std::string stem = output_stem(o, problem);

  const auto rows = dowg::fem_comparison(problem, sweep_options(o), o.same_level);
  std::printf("# %s: standard P1 FEM at level %s\n", stem.c_str(),
              o.same_level ? "n" : "n+1");
  std::printf("%-7s %-7s %11s %11s %11s %11s\n", "H", "fem_h", "l2_u", "l2_du", "l2_flux",
              "kappa");
  for (const auto& row : rows)
    std::printf("1/2^%-3d 1/2^%-3d %11s %11s %11s %11s\n", row.n, row.m,
                dowg::format_sci(row.err.rel_l2_u).c_str(),
                dowg::format_sci(row.err.rel_l2_du).c_str(),
                dowg::format_sci(row.err.rel_l2_flux).c_str(),
                dowg::format_sci(row.kappa).c_str());

  const std::string path = out_path(o, stem + "_fem.csv");
  dowg::write_fem_table_csv(path, rows);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int run_check(Options& o) {
  const dowg::ProblemSpec problem = resolve_problem(o);
  finalize(o, problem);

  const dowg::FineGrid grid = dowg::make_fine_grid(o.fine_level, o.quad);
  const dowg::CellTables tables = dowg::build_tables(problem, grid);
  const auto [a_min, a_max] = dowg::coefficient_grid_range(problem, o.fine_level);
  const double ratio = a_max / a_min;
  bool ok = true;

  std::vector<dowg::SampledFields> solutions;
  for (int n = o.n_lo; n <= o.n_hi; ++n) {
    const dowg::MultiscaleSpace space = dowg::build_space(problem, tables, n);
    const Eigen::MatrixXd G = dowg::gram_matrix(space, tables);
    const double gram_dev =
        (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
    const bool gram_ok = gram_dev <= 1e-10;
    std::printf("%-13s gram identity n=%d  max deviation %s\n", gram_ok ? "PASS" : "FAIL", n,
                dowg::format_sci(gram_dev).c_str());

    auto [sol, sys] = dowg::solve_multiscale(problem, tables, n);
    // Rayleigh: eigenvalues live inside the coefficient range, so kappa is
    // bounded by the contrast; grid sampling justifies the small slack
    const bool rayleigh_ok = sys.lambda_min >= 0.98 * a_min && sys.lambda_max <= 1.02 * a_max;
    std::printf("%-13s rayleigh      n=%d  lambda in [%s, %s], a in [%s, %s]\n",
                rayleigh_ok ? "PASS" : "FAIL", n, dowg::format_sci(sys.lambda_min).c_str(),
                dowg::format_sci(sys.lambda_max).c_str(), dowg::format_sci(a_min).c_str(),
                dowg::format_sci(a_max).c_str());
    const bool kappa_ok = sys.kappa <= 1.01 * ratio;
    std::printf("%-13s kappa bound   n=%d  kappa %s <= ratio %s\n", kappa_ok ? "PASS" : "FAIL", n,
                dowg::format_sci(sys.kappa).c_str(), dowg::format_sci(ratio).c_str());
    ok = ok && gram_ok && rayleigh_ok && kappa_ok;
    solutions.push_back(std::move(sol.fields));
  }

  ok = check_interpolation_rows(problem, o, tables, solutions) && ok;

  const bool self_ref = !dowg::has_exact(problem);
  dowg::ReferenceSolution closed;
  std::vector<dowg::ReferenceSolution> self_refs;
  std::vector<const dowg::SampledFields*> refs;
  if (!self_ref) {
    closed = dowg::closed_form_reference(problem, grid);
    for (int n = o.n_lo; n <= o.n_hi; ++n) refs.push_back(&closed.fields);
  } else {
    for (int n = o.n_lo; n <= o.n_hi; ++n)
      self_refs.push_back(dowg::self_convergence_reference(problem, tables, n));
    for (const auto& r : self_refs) refs.push_back(&r.fields);
  }
  ok = check_bound_rows(problem, o, tables, solutions, refs) && ok;

  std::printf("%s\n", ok ? "all checks passed" : "some checks FAILED");
  return ok ? 0 : 1;
}

int run_dump_basis(Options& o) {
  const dowg::ProblemSpec problem = resolve_problem(o);
  finalize(o, problem);
  const int n = o.n_lo;
  const std::string stem = output_stem(o, problem);

  const dowg::FineGrid grid = dowg::make_fine_grid(o.fine_level, o.quad);
  const dowg::CellTables tables = dowg::build_tables(problem, grid);
  const dowg::MultiscaleSpace space = dowg::build_space(problem, tables, n);

  const std::string path = out_path(o, stem + "_basis_n" + std::to_string(n) + ".csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "index,kind,j,k,i,x,value,derivative\n";
  char buf[96];
  for (int p = 0; p < space.M(); ++p) {
    const dowg::BasisIndex& b = space.basis[p];
    const char* kind = b.kind == dowg::BasisIndex::Kind::scale
                           ? "scale"
                           : (b.kind == dowg::BasisIndex::Kind::wavelet ? "wavelet" : "special");
    const double norm = std::sqrt(space.deriv_norm2(b));
    for (std::int64_t i = 0; i <= grid.cells(); ++i) {
      const double x = grid.boundary(i);
      double value, deriv;
      if (b.kind == dowg::BasisIndex::Kind::special) {
        value = dowg::eval_special(tables, space, b.i, x);
        deriv = dowg::eval_special_deriv(problem, space, b.i, x);
      } else {
        value = dowg::eval_regular(b, x);
        deriv = dowg::eval_regular_deriv(b, x);
      }
      std::snprintf(buf, sizeof buf, "%d,%s,%d,%d,%d,%.10E,%.10E,%.10E\n", p, kind, b.j, b.k, b.i,
                    x, value / norm, deriv / norm);
      out << buf;
    }
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int run_dump_reference(Options& o) {
  const dowg::ProblemSpec problem = resolve_problem(o);
  finalize(o, problem);
  const std::string stem = output_stem(o, problem);

  const dowg::FineGrid grid = dowg::make_fine_grid(o.fine_level, o.quad);
  dowg::ReferenceSolution ref;
  if (o.oracle_level == 0 && dowg::has_exact(problem)) {
    ref = dowg::closed_form_reference(problem, grid);
  } else {
    const int oracle = o.oracle_level != 0 ? o.oracle_level : std::min(o.fine_level + 2, 20);
    ref = dowg::generic_reference(problem, oracle, grid);
  }
  const std::string path = out_path(o, stem + "_reference.csv");
  dowg::write_fields_csv(path, grid, ref.fields);
  std::printf("reference = %s\nwrote %s\n", reference_name(ref.kind), path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"derivative-orthogonal multiscale Galerkin solver for -(a u')' = f on (0,1)"};
  app.require_subcommand(1);

  Options sweep_o, fem_o, check_o, basis_o, ref_o;

  CLI::App* sweep = app.add_subcommand("sweep", "convergence sweep over coarse levels");
  add_common_options(sweep, sweep_o);
  sweep_o.h_self = sweep->add_flag("--self-reference", sweep_o.self_reference,
                                   "compare against the next-finer level even with a closed form");
  sweep_o.h_bounds =
      sweep->add_flag("--check-bounds", sweep_o.with_bounds, "verify the a-priori error bounds");
  sweep_o.h_interp = sweep->add_flag("--check-interpolation", sweep_o.with_interpolation,
                                     "verify the coarse-grid interpolation property");
  sweep_o.h_dumpsys =
      sweep->add_flag("--dump-system", sweep_o.dump_system, "write stiffness matrix and load CSV");

  CLI::App* fem = app.add_subcommand("compare-fem", "standard P1 FEM baseline table");
  add_common_options(fem, fem_o);
  fem_o.h_same = fem->add_flag("--same-level", fem_o.same_level,
                               "FEM mesh at level n instead of the DOF-matched n+1");

  CLI::App* check = app.add_subcommand("check", "run invariant and bound checks");
  add_common_options(check, check_o);

  CLI::App* basis = app.add_subcommand("dump-basis", "sample the basis functions to CSV");
  add_common_options(basis, basis_o);

  CLI::App* ref = app.add_subcommand("dump-reference", "sample the reference solution to CSV");
  add_common_options(ref, ref_o);
  ref_o.h_oracle = ref->add_option("--oracle-level", ref_o.oracle_level,
                                   "force the integral oracle at this grid level")
                       ->check(CLI::Range(1, 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed()) {
      merge_config_file(sweep_o);
      return run_sweep(sweep_o);
    }
    if (fem->parsed()) {
      merge_config_file(fem_o);
      return run_compare_fem(fem_o);
    }
    if (check->parsed()) {
      merge_config_file(check_o);
      return run_check(check_o);
    }
    if (basis->parsed()) {
      merge_config_file(basis_o);
      return run_dump_basis(basis_o);
    }
    if (ref->parsed()) {
      merge_config_file(ref_o);
      return run_dump_reference(ref_o);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
