#include "athermal/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <utility>
#include <vector>

#include "athermal/sdp.hpp"

namespace athermal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double trace_product(const Matrix& a, const Matrix& b) {
  // tr(a b) for Hermitian a, b.
  return a.cwiseProduct(b.transpose()).sum().real();
}

// Projector onto eigenvalues at or below the support cutoff, plus the kernel mass of rho there.
struct SupportInfo {
  Matrix kernel_projector;
  double min_eigenvalue;
  bool full_rank;
};

SupportInfo support_of(const EigenSystem& es, double scale) {
  const int d = static_cast<int>(es.values.size());
  Matrix pker = Matrix::Zero(d, d);
  bool full = true;
  for (int k = 0; k < d; ++k) {
    if (es.values[k] <= tol::support_cutoff * scale) {
      pker += es.vectors.col(k) * es.vectors.col(k).adjoint();
      full = false;
    }
  }
  return SupportInfo{hermitize(pker), es.values.minCoeff(), full};
}

Matrix clamped_log(const Matrix& h) {
  const EigenSystem es = eigh(h);
  RealVector w(es.values.size());
  for (int k = 0; k < es.values.size(); ++k) w[k] = std::log(std::max(es.values[k], 1e-300));
  return hermitize(es.vectors * w.asDiagonal() * es.vectors.adjoint());
}

bool lexicographic_less(const Matrix& a, const Matrix& b) {
  for (long r = 0; r < a.rows(); ++r) {
    for (long c = 0; c < a.cols(); ++c) {
      const Complex x = a(r, c), y = b(r, c);
      if (x.real() != y.real()) return x.real() < y.real();
      if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
  }
  return false;
}

}  // namespace

const char* to_string(DivergenceReport::Kind k) {
  switch (k) {
    case DivergenceReport::Kind::relative: return "relative";
    case DivergenceReport::Kind::max: return "max";
    case DivergenceReport::Kind::hypothesis_testing: return "hypothesis_testing";
    case DivergenceReport::Kind::smoothed_max: return "smoothed_max";
  }
  return "?";
}

const char* to_string(DivergenceReport::Certificate c) {
  switch (c) {
    case DivergenceReport::Certificate::exact: return "exact";
    case DivergenceReport::Certificate::lower_bound: return "lower_bound";
    case DivergenceReport::Certificate::upper_bound: return "upper_bound";
    case DivergenceReport::Certificate::heuristic: return "heuristic";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// state divergences

double rel_entropy(const Matrix& rho_in, const Matrix& sigma_in) {
  const Matrix rho = hermitize(rho_in);
  const Matrix sigma = hermitize(sigma_in);
  const EigenSystem ess = eigh(sigma);
  const double sscale = std::max(1.0, ess.values.cwiseAbs().maxCoeff());
  const SupportInfo sup = support_of(ess, sscale);
  if (!sup.full_rank) {
    const double outside = std::max(0.0, trace_product(sup.kernel_projector, rho));
    if (outside > tol::support_check) return kInf;
  }

  const EigenSystem esr = eigh(rho);
  double tr_rho_log_rho = 0.0;
  for (int k = 0; k < esr.values.size(); ++k) {
    const double lam = esr.values[k];
    if (lam > tol::support_cutoff) tr_rho_log_rho += lam * std::log(lam);
  }

  RealVector logs = RealVector::Zero(ess.values.size());
  for (int k = 0; k < ess.values.size(); ++k) {
    if (ess.values[k] > tol::support_cutoff * sscale) logs[k] = std::log(ess.values[k]);
  }
  const Matrix log_sigma = hermitize(ess.vectors * logs.asDiagonal() * ess.vectors.adjoint());
  return tr_rho_log_rho - trace_product(rho, log_sigma);
}

double rel_entropy(const DensityMatrix& rho, const HermitianOperator& sigma) {
  return rel_entropy(rho.matrix(), sigma.matrix());
}

double max_rel_entropy(const Matrix& rho_in, const Matrix& sigma_in) {
  const Matrix rho = hermitize(rho_in);
  const Matrix sigma = hermitize(sigma_in);
  const EigenSystem ess = eigh(sigma);
  const double sscale = std::max(1.0, ess.values.cwiseAbs().maxCoeff());
  const SupportInfo sup = support_of(ess, sscale);
  if (!sup.full_rank) {
    const double outside = std::max(0.0, trace_product(sup.kernel_projector, rho));
    if (outside > tol::support_check) return kInf;
  }
  RealVector w = RealVector::Zero(ess.values.size());
  for (int k = 0; k < ess.values.size(); ++k) {
    if (ess.values[k] > tol::support_cutoff * sscale) w[k] = 1.0 / std::sqrt(ess.values[k]);
  }
  const Matrix sih = hermitize(ess.vectors * w.asDiagonal() * ess.vectors.adjoint());
  const EigenSystem pencil = eigh(sih * rho * sih);
  const double lmax = pencil.values.maxCoeff();
  if (lmax <= 0) return -kInf;
  return std::log(lmax);
}

double max_rel_entropy(const DensityMatrix& rho, const HermitianOperator& sigma) {
  return max_rel_entropy(rho.matrix(), sigma.matrix());
}

double ht_rel_entropy(const Matrix& rho_in, const Matrix& sigma_in, double eps) {
  if (eps < 0.0 || eps > 1.0) throw InputError("ht_rel_entropy: eps must lie in [0, 1)");
  if (eps == 1.0) return kInf;  // unbounded: the feasible set admits tr(Lambda sigma) -> 0
  const Matrix rho = hermitize(rho_in);
  const Matrix sigma = hermitize(sigma_in);

  const EigenSystem ess = eigh(sigma);
  const double sscale = std::max(1.0, ess.values.cwiseAbs().maxCoeff());
  const SupportInfo sup = support_of(ess, sscale);
  if (!sup.full_rank) {
    const double kernel_mass = std::max(0.0, trace_product(sup.kernel_projector, rho));
    if (kernel_mass >= 1.0 - eps - tol::support_check) return kInf;
  }

  const double need = std::max(0.0, 1.0 - eps - 1e-12);
  auto positive_mass = [&](double t) {
    const EigenSystem es = eigh(rho - t * sigma);
    double g = 0.0;
    for (int k = 0; k < es.values.size(); ++k) {
      if (es.values[k] > 0.0) {
        g += std::max(0.0, (es.vectors.col(k).adjoint() * rho * es.vectors.col(k))(0, 0).real());
      }
    }
    return g;
  };

  double t_hi = 1.0;
  int guard = 0;
  while (positive_mass(t_hi) >= need && guard++ < 70) t_hi *= 2.0;
  if (guard > 70) return kInf;
  double t_lo = 0.0;
  for (int i = 0; i < 120 && (t_hi - t_lo) > 1e-15 * std::max(1.0, t_hi); ++i) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (positive_mass(mid) >= need) {
      t_lo = mid;
    } else {
      t_hi = mid;
    }
  }
  const double t = 0.5 * (t_lo + t_hi);

  // Neyman-Pearson test at the converged threshold: full weight in descending
  // eigenvalue order, fractional weight on the boundary eigenvector.
  const EigenSystem es = eigh(rho - t * sigma);
  const int d = static_cast<int>(es.values.size());
  std::vector<int> order(d);
  for (int k = 0; k < d; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return es.values[a] > es.values[b]; });

  double acc = 0.0, beta = 0.0;
  for (int k : order) {
    if (acc >= need) break;
    const Vector v = es.vectors.col(k);
    const double r = std::max(0.0, (v.adjoint() * rho * v)(0, 0).real());
    const double s = std::max(0.0, (v.adjoint() * sigma * v)(0, 0).real());
    const double take = std::min(1.0, (need - acc) / std::max(r, 1e-300));
    acc += take * r;
    beta += take * s;
  }
  if (beta <= 1e-300) return kInf;
  return -std::log(beta);
}

double ht_rel_entropy(const DensityMatrix& rho, const HermitianOperator& sigma, double eps) {
  return ht_rel_entropy(rho.matrix(), sigma.matrix(), eps);
}

// ---------------------------------------------------------------------------
// mirror ascent for D[N || R^omega]

namespace {

struct ReplacerObjective {
  const Channel* n = nullptr;
  Matrix log_omega;

  double value(const Matrix& rho) const {
    const Matrix out = apply(*n, rho);
    const Matrix env = complementary_apply(*n, rho);
    return vn_entropy(rho) - vn_entropy(env) - trace_product(out, log_omega);
  }

  Matrix gradient(const Matrix& rho) const {
    const Matrix env = complementary_apply(*n, rho);
    const Matrix log_env = clamped_log(env);
    Matrix g = -clamped_log(rho);
    for (const Matrix& f : n->complementary_kraus()) g += f.adjoint() * log_env * f;
    g -= adjoint_apply(*n, log_omega);
    return hermitize(g);
  }
};

struct AscentOutcome {
  Matrix rho;
  double value = -kInf;
  int iterations = 0;
  double residual = 0.0;
};

AscentOutcome mirror_ascent(const ReplacerObjective& obj, Matrix rho0, const MirrorAscentOptions& o) {
  const int d = static_cast<int>(rho0.rows());
  const Matrix eye = Matrix::Identity(d, d);
  Matrix rho = hermitize(rho0);
  double f = obj.value(rho);
  double step = o.step_init;
  AscentOutcome out;
  int it = 0;
  double resid = 0.0;

  for (; it < o.max_iter; ++it) {
    const Matrix g = obj.gradient(rho);
    const double mean = trace_product(g, rho);
    resid = (g - mean * eye).norm();

    const Matrix log_rho = clamped_log(rho);
    bool accepted = false;
    double improvement = 0.0;
    for (double local = step; local >= o.min_step; local *= o.backtrack) {
      const EigenSystem es = eigh(log_rho + local * g);
      const double shift = es.values.maxCoeff();
      RealVector w(d);
      for (int k = 0; k < d; ++k) w[k] = std::exp(es.values[k] - shift);
      w /= w.sum();
      const Matrix cand = hermitize(es.vectors * w.asDiagonal() * es.vectors.adjoint());
      const double fc = obj.value(cand);
      const double predicted = trace_product(g, cand - rho);
      if (fc >= f + 1e-4 * predicted - 1e-14) {
        improvement = fc - f;
        rho = cand;
        f = fc;
        if (local == step) step = std::min(step * 2.0, 1e6);
        else step = local;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    if (improvement <= o.rel_tol * (1.0 + std::abs(f))) {
      ++it;
      break;
    }
  }

  out.rho = rho;
  out.value = f;
  out.iterations = it;
  out.residual = resid;
  return out;
}

// Rank validation shared by the replacer divergences; returns an infinite
// report when the Choi matrix leaks outside I (x) supp(omega).
std::optional<DivergenceReport> check_omega_support(const Channel& n, const HermitianOperator& omega,
                                                    DivergenceReport::Kind kind, const char* who) {
  const EigenSystem es = eigh(omega.matrix());
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
  if (es.values.minCoeff() < -tol::psd) {
    throw InputError(std::string(who) + ": omega must be positive semidefinite");
  }
  const SupportInfo sup = support_of(es, scale);
  if (sup.full_rank) return std::nullopt;
  const Matrix pker_full =
      tensor_product(Matrix(Matrix::Identity(n.dim_in(), n.dim_in())), sup.kernel_projector);
  const double leak = std::max(0.0, trace_product(pker_full, n.choi()));
  if (leak > 1e-10) {
    DivergenceReport r;
    r.value = kInf;
    r.kind = kind;
    r.certificate = DivergenceReport::Certificate::exact;
    return r;
  }
  throw InputError(std::string(who) + ": omega must be full rank");
}

}  // namespace

DivergenceReport channel_rel_entropy_replacer(const Channel& n, const HermitianOperator& omega,
                                              const MirrorAscentOptions& opts) {
  if (omega.dim() != n.dim_out()) {
    throw InputError("channel_rel_entropy_replacer: omega dimension must match the channel output");
  }
  if (auto early = check_omega_support(n, omega, DivergenceReport::Kind::relative,
                                       "channel_rel_entropy_replacer")) {
    return *early;
  }

  ReplacerObjective obj{&n, matrix_log_safe(omega.matrix(), true)};
  const int d = n.dim_in();

  std::vector<Matrix> starts;
  starts.push_back(Matrix::Identity(d, d) / double(d));
  for (int i = 0; i < opts.restarts; ++i) {
    starts.push_back(random_density_matrix(d, derive_seed(opts.seed, static_cast<std::uint64_t>(i))).matrix());
  }

  AscentOutcome best;
  bool first = true;
  for (Matrix& s : starts) {
    AscentOutcome r = mirror_ascent(obj, std::move(s), opts);
    if (first || r.value > best.value ||
        (r.value == best.value && lexicographic_less(r.rho, best.rho))) {
      best = std::move(r);
      first = false;
    }
  }

  // Concavity midpoint audit of the reduction objective.
  bool concave_ok = true;
  double worst_violation = 0.0;
  for (int i = 0; i < opts.concavity_audit_pairs; ++i) {
    const Matrix a = random_density_matrix(d, derive_seed(opts.seed, 9000 + 2ull * i)).matrix();
    const Matrix b = random_density_matrix(d, derive_seed(opts.seed, 9001 + 2ull * i)).matrix();
    const double gap = obj.value(0.5 * (a + b)) - 0.5 * (obj.value(a) + obj.value(b));
    if (gap < -1e-9) {
      concave_ok = false;
      worst_violation = std::min(worst_violation, gap);
    }
  }
  if (!concave_ok) {
    std::cerr << "warning: concavity midpoint audit failed (worst gap " << worst_violation
              << "); downgrading certificate to heuristic\n";
  }

  DivergenceReport report;
  report.value = best.value;
  report.kind = DivergenceReport::Kind::relative;
  report.certificate = concave_ok ? DivergenceReport::Certificate::lower_bound
                                  : DivergenceReport::Certificate::heuristic;
  report.achieving_input = DensityMatrix(best.rho);
  report.iterations = best.iterations;
  report.residual = best.residual;
  return report;
}

// ---------------------------------------------------------------------------
// brute-force oracle

namespace {

Vector purify(const EigenSystem& es) {
  const int d = static_cast<int>(es.values.size());
  Vector psi = Vector::Zero(static_cast<long>(d) * d);
  for (int k = 0; k < d; ++k) {
    const double lam = std::max(0.0, es.values[k]);
    if (lam <= 0) continue;
    psi.segment(static_cast<long>(k) * d, d) += std::sqrt(lam) * es.vectors.col(k);
  }
  psi /= psi.norm();
  return psi;
}

Matrix bloch_state(double r, double theta, double phi) {
  Matrix rho(2, 2);
  const double x = r * std::sin(theta) * std::cos(phi);
  const double y = r * std::sin(theta) * std::sin(phi);
  const double z = r * std::cos(theta);
  rho(0, 0) = 0.5 * (1.0 + z);
  rho(1, 1) = 0.5 * (1.0 - z);
  rho(0, 1) = 0.5 * Complex(x, -y);
  rho(1, 0) = 0.5 * Complex(x, y);
  return rho;
}

Vector max_entangled_vector(int d) {
  Vector phi = Vector::Zero(static_cast<long>(d) * d);
  for (int k = 0; k < d; ++k) phi[static_cast<long>(k) * d + k] = 1.0 / std::sqrt(double(d));
  return phi;
}

}  // namespace

DivergenceReport channel_rel_entropy_bruteforce(const Channel& n, const HermitianOperator& omega,
                                                const BruteForceOptions& opts) {
  if (omega.dim() != n.dim_out()) {
    throw InputError("channel_rel_entropy_bruteforce: omega dimension must match the channel output");
  }
  const int d = n.dim_in();

  int evals = 0;
  auto value_of_psi = [&](const Vector& psi) {
    ++evals;
    const Matrix joint = psi * psi.adjoint();
    const Matrix out = apply_with_reference(n, joint, d);
    const Matrix marginal = partial_trace(joint, {d, d}, {0});
    return rel_entropy(out, tensor_product(marginal, omega.matrix()));
  };

  double best = -kInf;
  Vector best_psi;

  if (d == 2) {
    const int g = std::max(2, opts.grid_density);
    double lo_r = 0.0, hi_r = 1.0, lo_t = 0.0, hi_t = M_PI, lo_p = 0.0, hi_p = 2.0 * M_PI;
    int points = g;
    double br = 0, bt = 0, bp = 0;
    for (int level = 0; level <= opts.refine_levels; ++level) {
      for (int ir = 0; ir < points; ++ir) {
        const double r = lo_r + (hi_r - lo_r) * ir / (points - 1);
        for (int it = 0; it < points; ++it) {
          const double theta = lo_t + (hi_t - lo_t) * it / (points - 1);
          for (int ip = 0; ip < points; ++ip) {
            const double phi = lo_p + (hi_p - lo_p) * ip / (points - 1);
            const Vector psi = purify(eigh(bloch_state(r, theta, phi)));
            const double v = value_of_psi(psi);
            if (v > best) {
              best = v;
              best_psi = psi;
              br = r;
              bt = theta;
              bp = phi;
            }
          }
        }
      }
      // zoom the box around the best cell for the next level
      const double wr = (hi_r - lo_r) / (points - 1), wt = (hi_t - lo_t) / (points - 1),
                   wp = (hi_p - lo_p) / (points - 1);
      lo_r = std::max(0.0, br - wr);
      hi_r = std::min(1.0, br + wr);
      lo_t = std::max(0.0, bt - wt);
      hi_t = std::min(M_PI, bt + wt);
      lo_p = bp - wp;
      hi_p = bp + wp;
      points = 9;
    }
  } else {
    Rng rng(opts.seed);
    for (int i = 0; i < opts.samples; ++i) {
      const Vector psi = random_unit_vector(d * d, rng);
      const double v = value_of_psi(psi);
      if (v > best) {
        best = v;
        best_psi = psi;
      }
    }
  }

  DivergenceReport report;
  report.value = best;
  report.kind = DivergenceReport::Kind::relative;
  report.certificate = DivergenceReport::Certificate::lower_bound;
  if (best_psi.size() > 0) report.achieving_input = DensityMatrix(best_psi * best_psi.adjoint());
  report.iterations = evals;
  report.residual = 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// channel max divergence (Choi pencil)

DivergenceReport channel_max_rel_entropy(const Channel& n, const HermitianOperator& omega) {
  if (omega.dim() != n.dim_out()) {
    throw InputError("channel_max_rel_entropy: omega dimension must match the channel output");
  }
  if (auto early = check_omega_support(n, omega, DivergenceReport::Kind::max,
                                       "channel_max_rel_entropy")) {
    return *early;
  }
  const EigenSystem es = eigh(omega.matrix());
  RealVector w(es.values.size());
  for (int k = 0; k < es.values.size(); ++k) w[k] = 1.0 / std::sqrt(es.values[k]);
  const Matrix omega_ih = hermitize(es.vectors * w.asDiagonal() * es.vectors.adjoint());
  const Matrix scaler = tensor_product(Matrix(Matrix::Identity(n.dim_in(), n.dim_in())), omega_ih);
  const EigenSystem pencil = eigh(scaler * n.choi() * scaler);

  DivergenceReport report;
  report.value = std::log(pencil.values.maxCoeff());
  report.kind = DivergenceReport::Kind::max;
  report.certificate = DivergenceReport::Certificate::exact;
  if (n.dim_in() >= 2) report.achieving_input = max_entangled_state(n.dim_in());
  report.iterations = 0;
  report.residual = 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// channel hypothesis-testing divergence (multi-start Nelder-Mead)

namespace {

struct NmResult {
  Eigen::VectorXd x;
  double value = kInf;
  int iterations = 0;
  double spread = 0.0;
};

NmResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                     double scale, int max_iter) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(static_cast<size_t>(n) + 1, x0);
  std::vector<double> vals(static_cast<size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) pts[static_cast<size_t>(i)][i - 1] += scale;
  for (size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);

  std::vector<int> idx(pts.size());
  int it = 0;
  for (; it < max_iter; ++it) {
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[static_cast<size_t>(a)] < vals[static_cast<size_t>(b)]; });
    const int lo = idx[0], hi = idx[idx.size() - 1], second_hi = idx[idx.size() - 2];
    if (std::abs(vals[static_cast<size_t>(hi)] - vals[static_cast<size_t>(lo)]) <=
        1e-11 * (1.0 + std::abs(vals[static_cast<size_t>(lo)]))) {
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i : idx) {
      if (i != hi) centroid += pts[static_cast<size_t>(i)];
    }
    centroid /= double(n);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[static_cast<size_t>(hi)]);
    const double fr = f(reflected);
    if (fr < vals[static_cast<size_t>(lo)]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[static_cast<size_t>(hi)]);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[static_cast<size_t>(hi)] = expanded;
        vals[static_cast<size_t>(hi)] = fe;
      } else {
        pts[static_cast<size_t>(hi)] = reflected;
        vals[static_cast<size_t>(hi)] = fr;
      }
    } else if (fr < vals[static_cast<size_t>(second_hi)]) {
      pts[static_cast<size_t>(hi)] = reflected;
      vals[static_cast<size_t>(hi)] = fr;
    } else {
      const Eigen::VectorXd contracted = centroid + 0.5 * (pts[static_cast<size_t>(hi)] - centroid);
      const double fc = f(contracted);
      if (fc < vals[static_cast<size_t>(hi)]) {
        pts[static_cast<size_t>(hi)] = contracted;
        vals[static_cast<size_t>(hi)] = fc;
      } else {
        for (size_t i = 0; i < pts.size(); ++i) {
          if (static_cast<int>(i) == lo) continue;
          pts[i] = pts[static_cast<size_t>(lo)] + 0.5 * (pts[i] - pts[static_cast<size_t>(lo)]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }

  NmResult out;
  size_t best = 0;
  for (size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] < vals[best]) best = i;
  }
  double worst = vals[0];
  for (double v : vals) worst = std::max(worst, v);
  out.x = pts[best];
  out.value = vals[best];
  out.iterations = it;
  out.spread = worst - vals[best];
  return out;
}

}  // namespace

DivergenceReport channel_ht_rel_entropy(const Channel& n, const HermitianOperator& omega, double eps,
                                        const SearchBudget& budget) {
  if (omega.dim() != n.dim_out()) {
    throw InputError("channel_ht_rel_entropy: omega dimension must match the channel output");
  }
  if (eps < 0.0 || eps > 1.0) throw InputError("channel_ht_rel_entropy: eps must lie in [0, 1)");
  DivergenceReport report;
  report.kind = DivergenceReport::Kind::hypothesis_testing;
  report.certificate = DivergenceReport::Certificate::lower_bound;
  if (eps == 1.0) {
    report.value = kInf;
    return report;
  }

  const int d = n.dim_in();
  const long nv = static_cast<long>(d) * d;

  auto value_of_psi = [&](const Vector& psi) {
    const Matrix joint = psi * psi.adjoint();
    const Matrix out = apply_with_reference(n, joint, d);
    const Matrix marginal = partial_trace(joint, {d, d}, {0});
    return ht_rel_entropy(out, tensor_product(marginal, omega.matrix()), eps);
  };

  auto psi_of_params = [&](const Eigen::VectorXd& p) -> Vector {
    Vector v(nv);
    for (long k = 0; k < nv; ++k) v[k] = Complex(p[2 * k], p[2 * k + 1]);
    const double norm = v.norm();
    if (norm < 1e-9) return Vector();
    return v / norm;
  };

  auto objective = [&](const Eigen::VectorXd& p) {
    const Vector psi = psi_of_params(p);
    if (psi.size() == 0) return 1e6;
    const double v = value_of_psi(psi);
    if (std::isinf(v)) return -1e12;  // propagate unbounded values through the search
    return -v;
  };

  std::vector<Eigen::VectorXd> starts;
  {
    const Vector phi = max_entangled_vector(d);
    Eigen::VectorXd p(2 * nv);
    for (long k = 0; k < nv; ++k) {
      p[2 * k] = phi[k].real();
      p[2 * k + 1] = phi[k].imag();
    }
    starts.push_back(std::move(p));
  }
  for (int i = 1; i < budget.restarts; ++i) {
    Rng rng(derive_seed(budget.seed, static_cast<std::uint64_t>(i)));
    const Vector psi = random_unit_vector(static_cast<int>(nv), rng);
    Eigen::VectorXd p(2 * nv);
    for (long k = 0; k < nv; ++k) {
      p[2 * k] = psi[k].real();
      p[2 * k + 1] = psi[k].imag();
    }
    starts.push_back(std::move(p));
  }

  double best = -kInf;
  Vector best_psi;
  int total_iters = 0;
  double final_spread = 0.0;
  for (const auto& start : starts) {
    const NmResult r = nelder_mead(objective, start, 0.15, budget.max_iters);
    total_iters += r.iterations;
    const Vector psi = psi_of_params(r.x);
    if (psi.size() == 0) continue;
    const double v = -r.value;
    if (v > best || (v == best && best_psi.size() > 0 &&
                     lexicographic_less(psi * psi.adjoint(), best_psi * best_psi.adjoint()))) {
      best = v;
      best_psi = psi;
      final_spread = r.spread;
    }
  }

  // Qubit grid oracle folded into the search.
  if (d == 2 && budget.grid_density >= 2) {
    const int g = budget.grid_density;
    for (int ir = 0; ir < g; ++ir) {
      const double r = double(ir) / (g - 1);
      for (int it = 0; it < g; ++it) {
        const double theta = M_PI * it / (g - 1);
        for (int ip = 0; ip < g; ++ip) {
          const double phi = 2.0 * M_PI * ip / (g - 1);
          const Vector psi = purify(eigh(bloch_state(r, theta, phi)));
          const double v = value_of_psi(psi);
          if (v > best) {
            best = v;
            best_psi = psi;
          }
        }
      }
    }
  }

  report.value = best;
  if (best_psi.size() > 0) report.achieving_input = DensityMatrix(best_psi * best_psi.adjoint());
  report.iterations = total_iters;
  report.residual = final_spread;
  return report;
}

// ---------------------------------------------------------------------------
// smoothed channel max divergence (single SDP)

DivergenceReport smoothed_channel_max_rel_entropy(const Channel& n, const HermitianOperator& omega,
                                                  double eps) {
  if (omega.dim() != n.dim_out()) {
    throw InputError("smoothed_channel_max_rel_entropy: omega dimension must match the channel output");
  }
  if (eps < 0.0 || eps > 1.0) {
    throw InputError("smoothed_channel_max_rel_entropy: eps must lie in [0, 1)");
  }
  const long choi_dim = n.choi().rows();
  if (choi_dim > 64) {
    throw NumericalError("smoothed_channel_max_rel_entropy: Choi dimension exceeds the SDP budget (64)");
  }

  if (eps < 1e-12) {
    DivergenceReport r = channel_max_rel_entropy(n, omega);
    r.kind = DivergenceReport::Kind::smoothed_max;
    return r;
  }
  if (auto early = check_omega_support(n, omega, DivergenceReport::Kind::smoothed_max,
                                       "smoothed_channel_max_rel_entropy")) {
    return *early;
  }

  const int din = n.dim_in();
  const int dout = n.dim_out();
  const int nc = static_cast<int>(choi_dim);
  const Matrix eye_out = Matrix::Identity(dout, dout);
  const Matrix i_omega = hermitize(
      tensor_product(Matrix(Matrix::Identity(din, din)), omega.matrix()));

  // Variables: J' (Choi of the smoothed channel), T1 = lambda(I(x)omega) - J',
  // Z (diamond-ball dual certificate), T2 = Z + J_N - J', T3 = eps I - 2 tr_out Z,
  // and the scalar lambda.
  sdp::SdpProblem p;
  p.block_dims = {nc, nc, nc, nc, din, 1};
  p.block_labels = {"choi_smoothed", "max_slack", "diamond_ball_dual", "diamond_ball_shift",
                    "diamond_ball_trace", "lambda"};
  p.sense = sdp::SdpProblem::Sense::minimize;
  p.objective.add(5, Matrix::Constant(1, 1, 1.0));

  std::vector<double> rhs;
  const auto basis_in = sdp::hermitian_basis(din);
  const auto basis_full = sdp::hermitian_basis(nc);

  // tr_out J' = I
  for (const Matrix& f : basis_in) {
    sdp::BlockMatrix a;
    a.add(0, tensor_product(f, eye_out));
    p.constraints.push_back(std::move(a));
    rhs.push_back(f.trace().real());
  }
  // J' + T1 - lambda (I(x)omega) = 0
  for (const Matrix& f : basis_full) {
    sdp::BlockMatrix a;
    a.add(0, f);
    a.add(1, f);
    a.add(5, Matrix::Constant(1, 1, -f.cwiseProduct(i_omega.transpose()).sum().real()));
    p.constraints.push_back(std::move(a));
    rhs.push_back(0.0);
  }
  // J' - Z + T2 = J_N
  for (const Matrix& f : basis_full) {
    sdp::BlockMatrix a;
    a.add(0, f);
    a.add(2, -f);
    a.add(3, f);
    p.constraints.push_back(std::move(a));
    rhs.push_back(f.cwiseProduct(n.choi().transpose()).sum().real());
  }
  // 2 tr_out Z + T3 = eps I
  for (const Matrix& f : basis_in) {
    sdp::BlockMatrix a;
    a.add(2, 2.0 * tensor_product(f, eye_out));
    a.add(4, f);
    p.constraints.push_back(std::move(a));
    rhs.push_back(eps * f.trace().real());
  }
  p.rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<long>(rhs.size()));

  const sdp::SdpSolution sol = sdp::solve(p);
  if (sol.status == sdp::SdpStatus::infeasible) {
    throw NumericalError(
        "smoothed_channel_max_rel_entropy: SDP infeasible; violated constraint block: "
        "diamond_ball_dual/diamond_ball_trace (the eps-ball around the channel)");
  }
  if (sol.status != sdp::SdpStatus::optimal) {
    throw NumericalError("smoothed_channel_max_rel_entropy: SDP did not converge");
  }
  const double lambda = sol.primal_value;
  if (lambda <= 0) {
    throw NumericalError("smoothed_channel_max_rel_entropy: nonpositive pencil value");
  }

  DivergenceReport report;
  report.value = std::log(lambda);
  report.kind = DivergenceReport::Kind::smoothed_max;
  report.certificate = DivergenceReport::Certificate::upper_bound;
  report.iterations = sol.iterations;
  report.residual = std::abs(sol.primal_value - sol.dual_value);
  return report;
}

}  // namespace athermal
