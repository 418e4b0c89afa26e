#include "athermal/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace athermal {

double max_abs(const Matrix& x) { return x.cwiseAbs().maxCoeff(); }

Matrix hermitize(const Matrix& x) { return 0.5 * (x + x.adjoint()); }

bool is_hermitian(const Matrix& x, double tolerance) {
  if (x.rows() != x.cols()) return false;
  return max_abs(x - x.adjoint().eval()) <= tolerance * std::max(1.0, max_abs(x));
}

EigenSystem eigh(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(x));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed to converge");
  }
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

double Rng::uniform() {
  // 53 high bits -> [0, 1), exact on every platform.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on open interval arguments.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

Complex Rng::complex_gaussian() {
  double re = gaussian();
  double im = gaussian();
  return Complex(re, im);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined word.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

HermitianOperator::HermitianOperator(Matrix entries) : mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 1) {
    throw InputError("HermitianOperator: matrix must be square and nonempty");
  }
  if (!is_hermitian(mat_)) {
    throw InputError("HermitianOperator: matrix is not Hermitian within 1e-10");
  }
  mat_ = hermitize(mat_);
}

DensityMatrix::DensityMatrix(Matrix entries) : mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 1) {
    throw InputError("DensityMatrix: matrix must be square and nonempty");
  }
  if (!is_hermitian(mat_)) {
    throw InputError("DensityMatrix: matrix is not Hermitian within 1e-10");
  }
  mat_ = hermitize(mat_);
  if (std::abs(mat_.trace().real() - 1.0) > tol::unit_trace) {
    throw InputError("DensityMatrix: trace differs from 1 beyond 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(mat_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol::psd) {
    throw InputError("DensityMatrix: matrix has an eigenvalue below -1e-10");
  }
}

ThermalContext thermal_state(const HermitianOperator& h, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InputError("thermal_state: beta must be positive and finite");
  }
  if (!h.matrix().allFinite()) {
    throw InputError("thermal_state: Hamiltonian entries must be finite");
  }
  const EigenSystem es = eigh(h.matrix());
  const int d = h.dim();

  RealVector boltzmann(d);
  for (int k = 0; k < d; ++k) boltzmann[k] = std::exp(-beta * es.values[k]);
  const double z = boltzmann.sum();

  // Gibbs weights through a shifted softmax so extreme beta*H stays stable.
  const double emin = es.values.minCoeff();
  RealVector shifted(d);
  for (int k = 0; k < d; ++k) shifted[k] = std::exp(-beta * (es.values[k] - emin));
  RealVector p = shifted / shifted.sum();

  Matrix gamma = hermitize(es.vectors * p.asDiagonal() * es.vectors.adjoint());
  Matrix gamma_hat = hermitize(es.vectors * boltzmann.asDiagonal() * es.vectors.adjoint());

  return ThermalContext{h,
                        beta,
                        DensityMatrix(gamma),
                        HermitianOperator(gamma_hat),
                        z,
                        -std::log(z) / beta};
}

double vn_entropy(const Matrix& rho) {
  const EigenSystem es = eigh(rho);
  double s = 0.0;
  for (int k = 0; k < es.values.size(); ++k) {
    const double lam = es.values[k];
    if (lam > tol::support_cutoff) s -= lam * std::log(lam);
  }
  return std::max(s, 0.0);
}

double vn_entropy(const DensityMatrix& rho) { return vn_entropy(rho.matrix()); }

double mutual_information(const DensityMatrix& rho_ab, int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != rho_ab.dim()) {
    throw InputError("mutual_information: dim_a*dim_b must equal the joint dimension");
  }
  const Matrix rho_a = partial_trace(rho_ab.matrix(), {dim_a, dim_b}, {0});
  const Matrix rho_b = partial_trace(rho_ab.matrix(), {dim_a, dim_b}, {1});
  return vn_entropy(rho_a) + vn_entropy(rho_b) - vn_entropy(rho_ab.matrix());
}

Matrix partial_trace(const Matrix& x, const std::vector<int>& dims, const std::vector<int>& keep) {
  const long total = std::accumulate(dims.begin(), dims.end(), 1L, std::multiplies<long>());
  if (dims.empty() || total != x.rows() || x.rows() != x.cols()) {
    throw InputError("partial_trace: factor dimensions do not multiply to the matrix dimension");
  }
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  keep_sorted.erase(std::unique(keep_sorted.begin(), keep_sorted.end()), keep_sorted.end());
  for (int k : keep_sorted) {
    if (k < 0 || k >= static_cast<int>(dims.size())) {
      throw InputError("partial_trace: keep index out of range");
    }
  }

  const int nf = static_cast<int>(dims.size());
  std::vector<long> stride(nf);
  long acc = 1;
  for (int f = nf - 1; f >= 0; --f) {
    stride[f] = acc;
    acc *= dims[f];
  }
  std::vector<int> traced;
  for (int f = 0; f < nf; ++f) {
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), f)) traced.push_back(f);
  }

  long keep_dim = 1, traced_dim = 1;
  for (int f : keep_sorted) keep_dim *= dims[f];
  for (int f : traced) traced_dim *= dims[f];

  // Decompose a flat index over the given factor subset, row-major.
  auto offset = [&](const std::vector<int>& factors, long flat) {
    long off = 0;
    for (int i = static_cast<int>(factors.size()) - 1; i >= 0; --i) {
      const int f = factors[i];
      off += (flat % dims[f]) * stride[f];
      flat /= dims[f];
    }
    return off;
  };

  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  for (long t = 0; t < traced_dim; ++t) {
    const long toff = offset(traced, t);
    for (long r = 0; r < keep_dim; ++r) {
      const long roff = offset(keep_sorted, r) + toff;
      for (long c = 0; c < keep_dim; ++c) {
        out(r, c) += x(roff, offset(keep_sorted, c) + toff);
      }
    }
  }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& x, const std::vector<int>& dims,
                                const std::vector<int>& keep) {
  return HermitianOperator(hermitize(partial_trace(x.matrix(), dims, keep)));
}

Matrix tensor_product(const Matrix& x, const Matrix& y) {
  return Eigen::kroneckerProduct(x, y).eval();
}

HermitianOperator tensor_product(const HermitianOperator& x, const HermitianOperator& y) {
  return HermitianOperator(hermitize(tensor_product(x.matrix(), y.matrix())));
}

DensityMatrix tensor_product(const DensityMatrix& x, const DensityMatrix& y) {
  return DensityMatrix(hermitize(tensor_product(x.matrix(), y.matrix())));
}

Matrix matrix_log_safe(const Matrix& x, bool require_psd) {
  const EigenSystem es = eigh(x);
  const int d = static_cast<int>(es.values.size());
  RealVector logs = RealVector::Zero(d);
  for (int k = 0; k < d; ++k) {
    const double lam = es.values[k];
    if (require_psd && lam < -tol::psd) {
      throw InputError("matrix_log_safe: input has an eigenvalue below -1e-10");
    }
    logs[k] = (lam > tol::support_cutoff) ? std::log(lam) : 0.0;
  }
  return hermitize(es.vectors * logs.asDiagonal() * es.vectors.adjoint());
}

HermitianOperator matrix_log_safe(const HermitianOperator& x, bool require_psd) {
  return HermitianOperator(matrix_log_safe(x.matrix(), require_psd));
}

DensityMatrix max_entangled_state(int m) {
  if (m < 2) throw InputError("max_entangled_state: dimension must be at least 2");
  Vector phi = Vector::Zero(static_cast<long>(m) * m);
  for (int i = 0; i < m; ++i) phi[static_cast<long>(i) * m + i] = 1.0 / std::sqrt(double(m));
  return DensityMatrix(phi * phi.adjoint());
}

DensityMatrix random_density_matrix(int dim, std::uint64_t seed) {
  if (dim < 1) throw InputError("random_density_matrix: dimension must be positive");
  Rng rng(seed);
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_gaussian();
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitize(rho));
}

Vector random_unit_vector(int dim, Rng& rng) {
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v[k] = rng.complex_gaussian();
  return v / v.norm();
}

DensityMatrix random_pure_state(int dim, std::uint64_t seed) {
  if (dim < 1) throw InputError("random_pure_state: dimension must be positive");
  Rng rng(seed);
  const Vector v = random_unit_vector(dim, rng);
  return DensityMatrix(hermitize(v * v.adjoint()));
}

Matrix random_unitary(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the factorization is unique.
  for (int c = 0; c < dim; ++c) {
    const Complex rc = r(c, c);
    const double a = std::abs(rc);
    if (a > 0) q.col(c) *= rc / a;
  }
  return q;
}

Matrix random_unitary(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(dim, rng);
}

double trace_norm(const Matrix& x) {
  const EigenSystem es = eigh(x);
  return es.values.cwiseAbs().sum();
}

double trace_norm(const HermitianOperator& x) { return trace_norm(x.matrix()); }

}  // namespace athermal
