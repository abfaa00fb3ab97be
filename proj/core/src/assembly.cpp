#include "dowg/assembly.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dowg {

namespace {

// Plain right-looking Cholesky, returning the index of the first pivot that is
// not strictly positive, or -1 when the factorization completes.
int first_nonpositive_pivot(Eigen::MatrixXd C) {
  const int m = static_cast<int>(C.rows());
  for (int k = 0; k < m; ++k) {
    if (!(C(k, k) > 0.0)) return k;
    const double root = std::sqrt(C(k, k));
    for (int r = k + 1; r < m; ++r) C(r, k) /= root;
    for (int c = k + 1; c < m; ++c)
      for (int r = c; r < m; ++r) C(r, c) -= C(r, k) * C(c, k);
  }
  return -1;
}

double flux_at(const ProblemSpec& problem, double x, double du) {
  if (problem.singular_at_zero && x == 0.0) return 0.0;  // a blows up, excluded from norms
  return eval_coefficient(problem, x) * du;
}

}  // namespace

Eigen::MatrixXd assemble_stiffness(const MultiscaleSpace& sp, const CellTables& t) {
  const int M = sp.M();
  const std::int64_t N = t.grid.cells();
  const std::int64_t per = N >> sp.n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);

  for (int p = 0; p < M; ++p) {
    for (int q = p; q < M; ++q) {
      const BasisIndex &bp = sp.basis[p], &bq = sp.basis[q];
      const bool sp_p = bp.kind == BasisIndex::Kind::special;
      const bool sp_q = bq.kind == BasisIndex::Kind::special;
      double entry = 0.0;
      if (!sp_p && !sp_q) {
        // both derivatives are constant on each half of the finer hat
        const auto gp = hat_geometry(bp), gq = hat_geometry(bq);
        const bool q_finer = gq.right - gq.left < gp.right - gp.left;
        const auto& fine = q_finer ? gq : gp;
        const auto& b_fine = q_finer ? bq : bp;
        const auto& b_coarse = q_finer ? bp : bq;
        const double halves[2][2] = {{fine.left, fine.mid}, {fine.mid, fine.right}};
        for (const auto& half : halves) {
          const double midpoint = 0.5 * (half[0] + half[1]);
          const double product =
              eval_regular_deriv(b_fine, midpoint) * eval_regular_deriv(b_coarse, midpoint);
          if (product != 0.0) {
            const auto c0 = static_cast<std::int64_t>(std::llround(half[0] * N));
            const auto c1 = static_cast<std::int64_t>(std::llround(half[1] * N));
            entry += product * interval_integral(t, Integrand::a, c0, c1);
          }
        }
      } else if (sp_p && sp_q) {
        if (bp.i == bq.i) {
          const std::int64_t c0 = bp.i * per, c1 = c0 + per;
          const double wi = sp.w[static_cast<std::size_t>(bp.i)];
          // int a (1/a - w)^2 = int 1/a - 2 w H + w^2 int a over the cell
          entry = interval_integral(t, Integrand::inv_a, c0, c1) - 2.0 * wi * sp.H +
                  wi * wi * interval_integral(t, Integrand::a, c0, c1);
        }
      } else {
        const BasisIndex& reg = sp_p ? bq : bp;
        const int i = sp_p ? bp.i : bq.i;
        const double sigma = eval_regular_deriv(reg, (i + 0.5) * sp.H);
        if (sigma != 0.0) {
          // int a sigma (1/a - w) = sigma (H - w int a) over the cell
          const std::int64_t c0 = i * per, c1 = c0 + per;
          const double wi = sp.w[static_cast<std::size_t>(i)];
          entry = sigma * (sp.H - wi * interval_integral(t, Integrand::a, c0, c1));
        }
      }
      entry /= std::sqrt(sp.deriv_norm2(bp) * sp.deriv_norm2(bq));
      A(p, q) = entry;
      A(q, p) = entry;
    }
  }
  return A;
}

Eigen::VectorXd assemble_load(const MultiscaleSpace& sp, const CellTables& t) {
  const int M = sp.M();
  const std::int64_t N = t.grid.cells();
  const std::int64_t per = N >> sp.n;
  const double h = t.grid.cell_width();
  const int Q = t.grid.quad_order;
  Eigen::VectorXd b(M);

  for (int p = 0; p < M; ++p) {
    const BasisIndex& bp = sp.basis[p];
    double entry = 0.0;
    if (bp.kind != BasisIndex::Kind::special) {
      // the hat is alpha + beta x on each half; int f g needs only int f, int x f
      const auto g = hat_geometry(bp);
      const double pieces[2][4] = {{g.left, g.mid, -g.slope * g.left, g.slope},
                                   {g.mid, g.right, g.slope * g.right, -g.slope}};
      for (const auto& piece : pieces) {
        const auto c0 = static_cast<std::int64_t>(std::llround(piece[0] * N));
        const auto c1 = static_cast<std::int64_t>(std::llround(piece[1] * N));
        entry += piece[2] * interval_integral(t, Integrand::f, c0, c1) +
                 piece[3] * interval_integral(t, Integrand::xf, c0, c1);
      }
    } else {
      // Gauss sum of f S_i; S_i at a node is its boundary value plus a one-node
      // correction of int 1/a from the cell boundary to the node
      const std::int64_t cl = bp.i * per, cr = cl + per;
      const double wi = sp.w[static_cast<std::size_t>(bp.i)];
      NeumaierSum acc;
      for (std::int64_t c = cl; c < cr; ++c) {
        const double base = t.PinvA[static_cast<std::size_t>(c)] -
                            t.PinvA[static_cast<std::size_t>(cl)] -
                            wi * static_cast<double>(c - cl) * h;
        double cell = 0.0;
        for (int q = 0; q < Q; ++q) {
          const std::size_t idx = static_cast<std::size_t>(c) * Q + q;
          const double tq = t.grid.ref_nodes[static_cast<std::size_t>(q)];
          const double s_node = base + tq * h * (t.inv_a_mid[idx] - wi);
          cell += t.grid.ref_weights[static_cast<std::size_t>(q)] * t.f_nodes[idx] * s_node;
        }
        acc.add(h * cell);
      }
      entry = acc.value();
    }
    b(p) = entry / std::sqrt(sp.deriv_norm2(bp));
  }
  return b;
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    const int bad = first_nonpositive_pivot(A);
    throw std::runtime_error("solve_spd: matrix is not positive definite (pivot " +
                             std::to_string(bad) + " of " + std::to_string(A.rows()) + ")");
  }
  Eigen::VectorXd x = llt.solve(b);
  const Eigen::VectorXd r = b - A * x;  // one refinement step tightens the residual
  x += llt.solve(r);
  return x;
}

std::pair<double, double> eigenvalue_bounds(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue_bounds: eigensolver failed to converge");
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

double condition_number(const Eigen::MatrixXd& A) {
  const auto [lo, hi] = eigenvalue_bounds(A);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

SampledFields sample_multiscale(const ProblemSpec& problem, const MultiscaleSpace& sp,
                                const CellTables& t, const Eigen::VectorXd& d) {
  const std::int64_t N = t.grid.cells();
  const std::int64_t per = N >> sp.n;
  const double h = t.grid.cell_width();
  const int cells_n = 1 << sp.n;

  SampledFields out;
  out.u.assign(static_cast<std::size_t>(N) + 1, 0.0);
  out.du.assign(static_cast<std::size_t>(N) + 1, 0.0);
  out.flux.assign(static_cast<std::size_t>(N) + 1, 0.0);

  std::vector<double> slope_sum(static_cast<std::size_t>(N), 0.0);  // regular part of u'
  std::vector<double> spec_coeff(static_cast<std::size_t>(cells_n), 0.0);
  std::vector<char> has_spec(static_cast<std::size_t>(cells_n), 0);

  for (int p = 0; p < sp.M(); ++p) {
    const BasisIndex& bp = sp.basis[p];
    const double cp = d(p) / std::sqrt(sp.deriv_norm2(bp));
    if (bp.kind != BasisIndex::Kind::special) {
      const auto g = hat_geometry(bp);
      const auto il = static_cast<std::int64_t>(std::llround(g.left * N));
      const auto im = static_cast<std::int64_t>(std::llround(g.mid * N));
      const auto ir = static_cast<std::int64_t>(std::llround(g.right * N));
      for (std::int64_t i = il + 1; i < ir; ++i) {
        const double x = t.grid.boundary(i);
        const double tent = x < g.mid ? g.slope * (x - g.left) : g.slope * (g.right - x);
        out.u[static_cast<std::size_t>(i)] += cp * tent;
      }
      for (std::int64_t c = il; c < im; ++c) slope_sum[static_cast<std::size_t>(c)] += cp * g.slope;
      for (std::int64_t c = im; c < ir; ++c) slope_sum[static_cast<std::size_t>(c)] -= cp * g.slope;
    } else {
      const std::int64_t cl = bp.i * per, cr = cl + per;
      const double wi = sp.w[static_cast<std::size_t>(bp.i)];
      for (std::int64_t i = cl + 1; i < cr; ++i) {
        const double s_val = t.PinvA[static_cast<std::size_t>(i)] -
                             t.PinvA[static_cast<std::size_t>(cl)] -
                             wi * static_cast<double>(i - cl) * h;
        out.u[static_cast<std::size_t>(i)] += cp * s_val;
      }
      spec_coeff[static_cast<std::size_t>(bp.i)] = cp;
      has_spec[static_cast<std::size_t>(bp.i)] = 1;
    }
  }

  for (std::int64_t i = 0; i <= N; ++i) {
    const double x = t.grid.boundary(i);
    const std::int64_t c = std::min(i, N - 1);  // x = 1 reads the last piece
    const auto ic = static_cast<std::size_t>(c / per);
    double du = slope_sum[static_cast<std::size_t>(c)];
    if (has_spec[ic]) du += spec_coeff[ic] * (eval_inv_coefficient(problem, x) - sp.w[ic]);
    out.du[static_cast<std::size_t>(i)] = du;
    out.flux[static_cast<std::size_t>(i)] = flux_at(problem, x, du);
  }
  return out;
}

std::pair<MultiscaleSolution, GalerkinSystem> solve_multiscale(const ProblemSpec& problem,
                                                               const CellTables& t, int n) {
  GalerkinSystem sys;
  MultiscaleSolution sol;
  sol.space = build_space(problem, t, n);
  sys.A = assemble_stiffness(sol.space, t);
  sys.b = assemble_load(sol.space, t);
  sys.d = solve_spd(sys.A, sys.b);
  const auto [lo, hi] = eigenvalue_bounds(sys.A);
  sys.lambda_min = lo;
  sys.lambda_max = hi;
  sys.kappa = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  sol.d = sys.d;
  sol.fields = sample_multiscale(problem, sol.space, t, sys.d);
  return {std::move(sol), std::move(sys)};
}

FemSolution solve_standard_fem(const ProblemSpec& problem, const CellTables& t, int m) {
  if (m < 1) throw std::invalid_argument("solve_standard_fem: mesh level must be >= 1");
  if (t.grid.level < m)
    throw std::invalid_argument("solve_standard_fem: tables are coarser than the mesh");

  const std::int64_t N = t.grid.cells();
  const std::int64_t per = N >> m;
  const int Mf = (1 << m) - 1;
  const double hm = std::ldexp(1.0, -m);
  const double scale2 = std::ldexp(1.0, 2 * m);  // squared hat slope

  auto block_int = [&](Integrand kind, int k) {
    return interval_integral(t, kind, k * per, (k + 1) * per);
  };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Mf, Mf);
  Eigen::VectorXd b(Mf);
  for (int i = 1; i <= Mf; ++i) {
    A(i - 1, i - 1) = scale2 * (block_int(Integrand::a, i - 1) + block_int(Integrand::a, i));
    if (i < Mf) {
      const double off = -scale2 * block_int(Integrand::a, i);
      A(i - 1, i) = off;
      A(i, i - 1) = off;
    }
    const double y_prev = (i - 1) * hm, y_next = (i + 1) * hm;
    b(i - 1) = std::ldexp(block_int(Integrand::xf, i - 1) - y_prev * block_int(Integrand::f, i - 1) +
                              y_next * block_int(Integrand::f, i) - block_int(Integrand::xf, i),
                          m);
  }

  FemSolution fem;
  fem.level = m;
  fem.nodal = solve_spd(A, b);
  const auto [lo, hi] = eigenvalue_bounds(A);
  fem.lambda_min = lo;
  fem.lambda_max = hi;
  fem.kappa = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();

  auto node_value = [&](std::int64_t k) {
    return (k <= 0 || k > Mf) ? 0.0 : fem.nodal(static_cast<int>(k) - 1);
  };
  fem.fields.u.assign(static_cast<std::size_t>(N) + 1, 0.0);
  fem.fields.du.assign(static_cast<std::size_t>(N) + 1, 0.0);
  fem.fields.flux.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (std::int64_t i = 0; i <= N; ++i) {
    const double x = t.grid.boundary(i);
    const std::int64_t c = std::min(i, N - 1);
    const std::int64_t k = c / per;
    const double ul = node_value(k), ur = node_value(k + 1);
    const double theta = (x - static_cast<double>(k) * hm) / hm;
    fem.fields.u[static_cast<std::size_t>(i)] = ul + (ur - ul) * theta;
    const double du = (ur - ul) / hm;
    fem.fields.du[static_cast<std::size_t>(i)] = du;
    fem.fields.flux[static_cast<std::size_t>(i)] = flux_at(problem, x, du);
  }
  return fem;
}

}  // namespace dowg
