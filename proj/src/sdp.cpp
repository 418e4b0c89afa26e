#include "athermal/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace athermal::sdp {

namespace {

using BlockList = std::vector<Matrix>;

double inner(const BlockList& x, const BlockMatrix& a) {
  double v = 0.0;
  for (const auto& [idx, m] : a.entries) {
    v += m.conjugate().cwiseProduct(x[static_cast<size_t>(idx)]).sum().real();
  }
  return v;
}

double inner_full(const BlockList& x, const BlockList& y) {
  double v = 0.0;
  for (size_t k = 0; k < x.size(); ++k) v += x[k].conjugate().cwiseProduct(y[k]).sum().real();
  return v;
}

double frob_norm(const BlockList& x) { return std::sqrt(std::max(0.0, inner_full(x, x))); }

BlockList zeros_like(const std::vector<int>& dims) {
  BlockList out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(Matrix::Zero(d, d));
  return out;
}

BlockList identity_like(const std::vector<int>& dims) {
  BlockList out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(Matrix::Identity(d, d));
  return out;
}

void accumulate(BlockList& x, const BlockMatrix& a, double scale) {
  for (const auto& [idx, m] : a.entries) x[static_cast<size_t>(idx)] += scale * m;
}

Eigen::VectorXd apply_constraints(const std::vector<BlockMatrix>& cons, const BlockList& x) {
  Eigen::VectorXd out(static_cast<long>(cons.size()));
  for (size_t i = 0; i < cons.size(); ++i) out[static_cast<long>(i)] = inner(x, cons[i]);
  return out;
}

// Spectral helper: f applied to the eigenvalues of a Hermitian matrix.
Matrix spectral_map(const Matrix& x, const std::function<double(double)>& f) {
  const EigenSystem es = eigh(x);
  RealVector w(es.values.size());
  for (int k = 0; k < es.values.size(); ++k) w[k] = f(es.values[k]);
  return hermitize(es.vectors * w.asDiagonal() * es.vectors.adjoint());
}

// Largest alpha in (0, cap] keeping X + alpha D positive definite.
double max_step(const Matrix& x, const Matrix& d, double cap) {
  Eigen::LLT<Matrix> llt(x);
  Matrix b;
  if (llt.info() == Eigen::Success) {
    const Matrix l = llt.matrixL();
    b = l.triangularView<Eigen::Lower>().solve(d);
    b = l.triangularView<Eigen::Lower>().solve(b.adjoint()).adjoint();
  } else {
    const Matrix xinv_half = spectral_map(x, [](double v) { return 1.0 / std::sqrt(std::max(v, 1e-300)); });
    b = xinv_half * d * xinv_half;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(b), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0) return cap;
  return std::min(cap, 1.0 / (-lmin));
}

struct Workspace {
  const SdpProblem& p;
  int m;                                  // constraint count
  std::vector<std::vector<int>> by_block; // block -> constraint indices touching it

  explicit Workspace(const SdpProblem& prob) : p(prob), m(static_cast<int>(prob.constraints.size())) {
    by_block.resize(p.block_dims.size());
    for (int i = 0; i < m; ++i) {
      for (const auto& [idx, mat] : p.constraints[static_cast<size_t>(i)].entries) {
        (void)mat;
        by_block[static_cast<size_t>(idx)].push_back(i);
      }
    }
  }

  // Schur complement M_ij = <A_i, W A_j W>.
  Eigen::MatrixXd schur(const BlockList& w) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (size_t blk = 0; blk < p.block_dims.size(); ++blk) {
      const auto& touching = by_block[blk];
      if (touching.empty()) continue;
      for (size_t jj = 0; jj < touching.size(); ++jj) {
        const int j = touching[jj];
        const Matrix* aj = nullptr;
        for (const auto& [idx, mat] : p.constraints[static_cast<size_t>(j)].entries) {
          if (idx == static_cast<int>(blk)) { aj = &mat; break; }
        }
        const Matrix waw = w[blk] * (*aj) * w[blk];
        for (size_t ii = 0; ii <= jj; ++ii) {
          const int i = touching[ii];
          const Matrix* ai = nullptr;
          for (const auto& [idx, mat] : p.constraints[static_cast<size_t>(i)].entries) {
            if (idx == static_cast<int>(blk)) { ai = &mat; break; }
          }
          const double v = ai->conjugate().cwiseProduct(waw).sum().real();
          out(i, j) += v;
          if (i != j) out(j, i) += v;
        }
      }
    }
    return out;
  }
};

void validate_problem(const SdpProblem& p) {
  long total = 0;
  for (int d : p.block_dims) {
    if (d < 1) throw InputError("sdp: block dimensions must be positive");
    total += d;
  }
  if (total > 128) throw InputError("sdp: total block dimension exceeds 128");
  const long m = static_cast<long>(p.constraints.size());
  if (m != p.rhs.size()) throw InputError("sdp: constraint/rhs count mismatch");
  if (m > total * total) throw InputError("sdp: more constraints than total dimension squared");
  auto check_bm = [&](const BlockMatrix& bm, const char* what) {
    for (const auto& [idx, mat] : bm.entries) {
      if (idx < 0 || idx >= static_cast<int>(p.block_dims.size())) {
        throw InputError(std::string("sdp: ") + what + " references an unknown block");
      }
      if (mat.rows() != p.block_dims[static_cast<size_t>(idx)] || mat.cols() != mat.rows()) {
        throw InputError(std::string("sdp: ") + what + " block shape mismatch");
      }
      if (!is_hermitian(mat)) {
        throw InputError(std::string("sdp: ") + what + " block is not Hermitian within 1e-10");
      }
    }
  };
  check_bm(p.objective, "objective");
  for (const auto& c : p.constraints) check_bm(c, "constraint");
}

void check_constraint_rank(const SdpProblem& p) {
  const int m = static_cast<int>(p.constraints.size());
  if (m == 0) return;
  Eigen::MatrixXd gram(m, m);
  // Dense inner products over shared blocks only.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      double v = 0.0;
      for (const auto& [bi, mi] : p.constraints[static_cast<size_t>(i)].entries) {
        for (const auto& [bj, mj] : p.constraints[static_cast<size_t>(j)].entries) {
          if (bi == bj) v += mi.conjugate().cwiseProduct(mj).sum().real();
        }
      }
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  qr.setThreshold(1e-10);
  if (qr.rank() < m) {
    const auto perm = qr.colsPermutation().indices();
    std::ostringstream msg;
    msg << "sdp: constraints are linearly dependent; dependent rows:";
    for (int k = qr.rank(); k < m && k < qr.rank() + 8; ++k) msg << " " << perm[k];
    throw InputError(msg.str());
  }
}

}  // namespace

std::vector<Matrix> hermitian_basis(int n) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    Matrix e = Matrix::Zero(n, n);
    e(k, k) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      Matrix re = Matrix::Zero(n, n);
      re(k, l) = 1.0;
      re(l, k) = 1.0;
      basis.push_back(std::move(re));
      Matrix im = Matrix::Zero(n, n);
      im(k, l) = Complex(0.0, 1.0);
      im(l, k) = Complex(0.0, -1.0);
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

SdpSolution solve(const SdpProblem& problem) {
  validate_problem(problem);
  check_constraint_rank(problem);

  // Internally always minimize.
  SdpProblem p = problem;
  const bool flip = (problem.sense == SdpProblem::Sense::maximize);
  if (flip) {
    for (auto& [idx, mat] : p.objective.entries) mat = -mat;
  }

  const int m = static_cast<int>(p.constraints.size());
  const size_t nblocks = p.block_dims.size();
  double nu = 0.0;
  for (int d : p.block_dims) nu += d;

  Workspace ws(p);

  BlockList c = zeros_like(p.block_dims);
  accumulate(c, p.objective, 1.0);
  const double norm_b = p.rhs.norm();
  const double norm_c = frob_norm(c);

  BlockList x = identity_like(p.block_dims);
  BlockList s = identity_like(p.block_dims);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double tau = 1.0, kappa = 1.0;

  SdpSolution sol;
  sol.y = Eigen::VectorXd::Zero(m);

  const int max_iter = 200;
  const double feas_target = 1e-9, gap_target = 1e-9;
  const double feas_accept = 1e-7, gap_accept = 1e-6;
  const double mu0 = (inner_full(x, s) + tau * kappa) / (nu + 1.0);

  auto adjoint_y = [&](const Eigen::VectorXd& vy) {
    BlockList out = zeros_like(p.block_dims);
    for (int i = 0; i < m; ++i) accumulate(out, p.constraints[static_cast<size_t>(i)], vy[i]);
    return out;
  };

  double best_gap = std::numeric_limits<double>::infinity();
  BlockList best_x = x;
  Eigen::VectorXd best_y = y;
  double best_tau = tau, best_pobj = 0, best_dobj = 0, best_pres = 1e30, best_dres = 1e30;
  int stall = 0;

  int it = 0;
  SdpStatus status = SdpStatus::max_iter;
  for (; it < max_iter; ++it) {
    const double mu = (inner_full(x, s) + tau * kappa) / (nu + 1.0);

    // Scaled-back candidate solution and residual metrics.
    BlockList xhat = x;
    for (auto& b : xhat) b /= tau;
    Eigen::VectorXd yhat = y / tau;
    BlockList shat = s;
    for (auto& b : shat) b /= tau;
    const double pobj = inner_full(c, xhat);
    const double dobj = p.rhs.dot(yhat);
    const Eigen::VectorXd pres_vec = apply_constraints(p.constraints, xhat) - p.rhs;
    const double pres = pres_vec.norm() / (1.0 + norm_b);
    BlockList dres_mat = adjoint_y(yhat);
    for (size_t k = 0; k < nblocks; ++k) dres_mat[k] += shat[k] - c[k];
    const double dres = frob_norm(dres_mat) / (1.0 + norm_c);
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));

    sol.trace.push_back(IterateLog{pobj, dobj, mu, pres, dres});

    const double score = std::max({pres, dres, relgap});
    if (score < best_gap) {
      best_gap = score;
      best_x = xhat;
      best_y = yhat;
      best_tau = tau;
      best_pobj = pobj;
      best_dobj = dobj;
      best_pres = pres;
      best_dres = dres;
    }

    if (pres <= feas_target && dres <= feas_target && relgap <= gap_target) {
      status = SdpStatus::optimal;
      break;
    }
    if (tau <= 1e-12 || (mu < 1e-10 * mu0 && tau < 1e-6 * kappa)) {
      status = SdpStatus::infeasible;
      break;
    }
    if (stall >= 4) break;

    // Residuals of the self-dual system.
    Eigen::VectorXd res_p = apply_constraints(p.constraints, x) - p.rhs * tau;  // P
    BlockList res_d = adjoint_y(y);                                             // D
    for (size_t k = 0; k < nblocks; ++k) res_d[k] += s[k] - c[k] * tau;
    const double res_g = inner_full(c, x) - p.rhs.dot(y) + kappa;               // G

    // Nesterov-Todd scaling point per block: W S W = X.
    BlockList w(nblocks), winv(nblocks);
    for (size_t k = 0; k < nblocks; ++k) {
      const Matrix s_half = spectral_map(s[k], [](double v) { return std::sqrt(std::max(v, 1e-300)); });
      const Matrix s_ihalf = spectral_map(s[k], [](double v) { return 1.0 / std::sqrt(std::max(v, 1e-300)); });
      const Matrix t = hermitize(s_half * x[k] * s_half);
      const Matrix t_half = spectral_map(t, [](double v) { return std::sqrt(std::max(v, 1e-300)); });
      const Matrix t_ihalf = spectral_map(t, [](double v) { return 1.0 / std::sqrt(std::max(v, 1e-300)); });
      w[k] = hermitize(s_ihalf * t_half * s_ihalf);
      winv[k] = hermitize(s_half * t_ihalf * s_half);
    }

    Eigen::MatrixXd schur = ws.schur(w);
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) {
      const double ridge = 1e-12 * (schur.trace() / std::max(1, m) + 1.0);
      schur += ridge * Eigen::MatrixXd::Identity(m, m);
      llt.compute(schur);
      if (llt.info() != Eigen::Success) break;
    }

    // Quantities shared by predictor and corrector.
    BlockList wcw(nblocks);
    for (size_t k = 0; k < nblocks; ++k) wcw[k] = hermitize(w[k] * c[k] * w[k]);
    BlockList wdw(nblocks);
    for (size_t k = 0; k < nblocks; ++k) wdw[k] = hermitize(w[k] * res_d[k] * w[k]);
    const Eigen::VectorXd a_wcw = apply_constraints(p.constraints, wcw);
    const Eigen::VectorXd a_wdw = apply_constraints(p.constraints, wdw);
    const Eigen::VectorXd h = a_wcw + p.rhs;
    const Eigen::VectorXd v2 = llt.solve(h);
    const double c_wcw = inner_full(c, wcw);
    const double c_wdw = inner_full(c, wdw);

    struct Direction {
      BlockList dx, ds;
      Eigen::VectorXd dy;
      double dtau = 0, dkappa = 0;
    };

    auto solve_direction = [&](const BlockList& r_c, double r_tk) {
      Direction dir;
      Eigen::VectorXd a_rc = apply_constraints(p.constraints, r_c);
      const double c_rc = inner_full(c, r_c);
      Eigen::VectorXd r1 = -res_p - a_wdw - a_rc;
      const double r2 = -res_g - c_wdw - c_rc - r_tk / tau;
      const Eigen::VectorXd v1 = llt.solve(r1);
      const Eigen::VectorXd ucb = a_wcw - p.rhs;
      const double denom = ucb.dot(v2) - c_wcw - kappa / tau;
      double dtau = 0.0;
      if (std::abs(denom) > 1e-300) dtau = (r2 - ucb.dot(v1)) / denom;
      dir.dtau = dtau;
      dir.dy = v1 + v2 * dtau;
      BlockList ady = adjoint_y(dir.dy);
      dir.dx = zeros_like(p.block_dims);
      dir.ds = zeros_like(p.block_dims);
      for (size_t k = 0; k < nblocks; ++k) {
        const Matrix inner_term = hermitize(ady[k] - c[k] * dtau + res_d[k]);
        dir.dx[k] = hermitize(w[k] * inner_term * w[k] + r_c[k]);
        dir.ds[k] = hermitize(winv[k] * (r_c[k] - dir.dx[k]) * winv[k]);
      }
      dir.dkappa = (r_tk - kappa * dtau) / tau;
      return dir;
    };

    auto step_length = [&](const Direction& d) {
      double alpha = 1.0;
      for (size_t k = 0; k < nblocks; ++k) {
        alpha = max_step(x[k], d.dx[k], alpha);
        alpha = max_step(s[k], d.ds[k], alpha);
      }
      if (d.dtau < 0) alpha = std::min(alpha, tau / (-d.dtau));
      if (d.dkappa < 0) alpha = std::min(alpha, kappa / (-d.dkappa));
      return alpha;
    };

    // Predictor (affine direction).
    BlockList rc_aff(nblocks);
    for (size_t k = 0; k < nblocks; ++k) rc_aff[k] = -x[k];
    Direction aff = solve_direction(rc_aff, -tau * kappa);
    const double alpha_aff = step_length(aff);

    double mu_aff = tau * kappa + alpha_aff * (tau * aff.dkappa + kappa * aff.dtau) +
                    alpha_aff * alpha_aff * aff.dtau * aff.dkappa;
    for (size_t k = 0; k < nblocks; ++k) {
      mu_aff += ((x[k] + alpha_aff * aff.dx[k]).conjugate().cwiseProduct(s[k] + alpha_aff * aff.ds[k]))
                    .sum()
                    .real();
    }
    mu_aff /= (nu + 1.0);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::clamp(sigma, 1e-8, 0.999);

    // Corrector: recentring on the blocks, second-order term on (tau, kappa).
    BlockList rc(nblocks);
    for (size_t k = 0; k < nblocks; ++k) {
      const Matrix sinv = spectral_map(s[k], [](double v) { return 1.0 / std::max(v, 1e-300); });
      rc[k] = hermitize(sigma * mu * sinv - x[k]);
    }
    Direction dir = solve_direction(rc, sigma * mu - tau * kappa - alpha_aff * alpha_aff * aff.dtau * aff.dkappa);
    double alpha = 0.99 * step_length(dir);
    alpha = std::min(alpha, 1.0);

    if (alpha < 1e-8) {
      ++stall;
    } else {
      stall = 0;
    }

    for (size_t k = 0; k < nblocks; ++k) {
      x[k] = hermitize(x[k] + alpha * dir.dx[k]);
      s[k] = hermitize(s[k] + alpha * dir.ds[k]);
    }
    y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
  }

  sol.iterations = it;
  if (status == SdpStatus::infeasible) {
    sol.status = SdpStatus::infeasible;
    sol.x = best_x;
    sol.y = best_y;
    return sol;
  }

  // Accept the best iterate if it meets either the tight or the contract tolerances.
  const double relgap_best =
      std::abs(best_pobj - best_dobj) / (1.0 + std::max(std::abs(best_pobj), std::abs(best_dobj)));
  if (best_pres <= feas_accept && best_dres <= feas_accept && relgap_best <= gap_accept) {
    sol.status = SdpStatus::optimal;
  } else {
    sol.status = SdpStatus::max_iter;
  }
  (void)best_tau;
  sol.x = best_x;
  sol.y = best_y;
  sol.primal_value = flip ? -best_pobj : best_pobj;
  sol.dual_value = flip ? -best_dobj : best_dobj;
  if (flip) {
    for (auto& t : sol.trace) {
      t.primal_obj = -t.primal_obj;
      t.dual_obj = -t.dual_obj;
    }
  }
  return sol;
}

double diamond_norm(const Matrix& choi_delta, int dim_in) {
  const long n = choi_delta.rows();
  if (n != choi_delta.cols() || dim_in < 1 || n % dim_in != 0) {
    throw InputError("diamond_norm: Choi dimension must be a multiple of dim_in");
  }
  if (n > 64) throw InputError("diamond_norm: Choi dimension exceeds 64");
  if (!is_hermitian(choi_delta, 1e-8)) {
    throw InputError("diamond_norm: Choi matrix must be Hermitian (Hermiticity-preserving map)");
  }
  const Matrix j = hermitize(choi_delta);
  const int dout = static_cast<int>(n) / dim_in;

  // max <tr_out J, sigma> - <J, P>
  //   s.t. P + Q - 2 sigma (x) I_out = 0,  tr sigma = 1,  P, Q, sigma >= 0.
  SdpProblem p;
  p.block_dims = {static_cast<int>(n), static_cast<int>(n), dim_in};
  p.block_labels = {"P", "Q", "sigma"};
  p.sense = SdpProblem::Sense::maximize;

  const Matrix tr_out_j = hermitize(partial_trace(j, {dim_in, dout}, {0}));
  p.objective.add(0, -j);
  p.objective.add(2, tr_out_j);

  const auto basis = hermitian_basis(static_cast<int>(n));
  p.rhs = Eigen::VectorXd::Zero(static_cast<long>(basis.size()) + 1);
  const Matrix eye_out = Matrix::Identity(dout, dout);
  for (size_t i = 0; i < basis.size(); ++i) {
    BlockMatrix a;
    a.add(0, basis[i]);
    a.add(1, basis[i]);
    a.add(2, hermitize(-2.0 * partial_trace(basis[i], {dim_in, dout}, {0})));
    (void)eye_out;
    p.constraints.push_back(std::move(a));
  }
  BlockMatrix trace_con;
  trace_con.add(2, Matrix::Identity(dim_in, dim_in));
  p.constraints.push_back(std::move(trace_con));
  p.rhs[static_cast<long>(basis.size())] = 1.0;

  const SdpSolution sol = solve(p);
  if (sol.status != SdpStatus::optimal) {
    throw NumericalError("diamond_norm: SDP did not reach optimality");
  }
  return sol.primal_value;
}

}  // namespace athermal::sdp
