#include "athermal/channels.hpp"

#include <cmath>
#include <numeric>

namespace athermal {

namespace {

Matrix kraus_completeness(const std::vector<Matrix>& kraus) {
  Matrix e = Matrix::Zero(kraus[0].cols(), kraus[0].cols());
  for (const Matrix& k : kraus) e += k.adjoint() * k;
  return e;
}

Matrix inverse_sqrt_psd(const Matrix& x) {
  const EigenSystem es = eigh(x);
  RealVector w(es.values.size());
  for (int k = 0; k < es.values.size(); ++k) {
    if (es.values[k] <= 0) throw NumericalError("inverse_sqrt_psd: nonpositive eigenvalue");
    w[k] = 1.0 / std::sqrt(es.values[k]);
  }
  return hermitize(es.vectors * w.asDiagonal() * es.vectors.adjoint());
}

}  // namespace

Channel::Channel(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InputError("Channel: empty Kraus list");
  dim_out_ = static_cast<int>(kraus_[0].rows());
  dim_in_ = static_cast<int>(kraus_[0].cols());
  if (dim_in_ < 1 || dim_out_ < 1) throw InputError("Channel: empty Kraus operator");
  for (const Matrix& k : kraus_) {
    if (k.rows() != dim_out_ || k.cols() != dim_in_) {
      throw InputError("Channel: inconsistent Kraus operator shapes");
    }
  }

  const Matrix e = kraus_completeness(kraus_);
  const double defect = max_abs(e - Matrix::Identity(dim_in_, dim_in_));
  if (defect > 1e-6) {
    throw InputError("Channel: Kraus completeness defect exceeds 1e-6 (map is not CPTP)");
  }
  if (defect > tol::cptp) {
    const Matrix fix = inverse_sqrt_psd(e);
    for (Matrix& k : kraus_) k = k * fix;
  }

  // Choi: J = sum_k v_k v_k^dagger with v_k = sum_i |i> (x) K_k|i>.
  const long choi_dim = static_cast<long>(dim_in_) * dim_out_;
  choi_ = Matrix::Zero(choi_dim, choi_dim);
  for (const Matrix& k : kraus_) {
    Vector v(choi_dim);
    for (int i = 0; i < dim_in_; ++i) v.segment(static_cast<long>(i) * dim_out_, dim_out_) = k.col(i);
    choi_ += v * v.adjoint();
  }
  choi_ = hermitize(choi_);

  // Complementary Kraus: F_j maps input to environment, (F_j)_{i,l} = (K_i)_{j,l}.
  complementary_kraus_.resize(dim_out_);
  const int env = kraus_count();
  for (int j = 0; j < dim_out_; ++j) {
    Matrix f(env, dim_in_);
    for (int i = 0; i < env; ++i) f.row(i) = kraus_[static_cast<size_t>(i)].row(j);
    complementary_kraus_[j] = std::move(f);
  }
}

Channel from_kraus(std::vector<Matrix> kraus) { return Channel(std::move(kraus)); }

Matrix apply(const Channel& n, const Matrix& x) {
  if (x.rows() != n.dim_in() || x.cols() != n.dim_in()) {
    throw InputError("apply: input dimension does not match the channel");
  }
  Matrix out = Matrix::Zero(n.dim_out(), n.dim_out());
  for (const Matrix& k : n.kraus()) out += k * x * k.adjoint();
  return hermitize(out);
}

DensityMatrix apply(const Channel& n, const DensityMatrix& rho) {
  return DensityMatrix(apply(n, rho.matrix()));
}

Matrix apply_with_reference(const Channel& n, const Matrix& x, int dim_ref) {
  const long din = n.dim_in(), dout = n.dim_out();
  if (dim_ref < 1 || x.rows() != dim_ref * din || x.cols() != dim_ref * din) {
    throw InputError("apply_with_reference: input dimension must be dim_ref * dim_in");
  }
  Matrix out = Matrix::Zero(dim_ref * dout, dim_ref * dout);
  for (int r = 0; r < dim_ref; ++r) {
    for (int c = 0; c < dim_ref; ++c) {
      const Matrix block = x.block(r * din, c * din, din, din);
      Matrix mapped = Matrix::Zero(dout, dout);
      for (const Matrix& k : n.kraus()) mapped += k * block * k.adjoint();
      out.block(r * dout, c * dout, dout, dout) = mapped;
    }
  }
  return hermitize(out);
}

DensityMatrix apply_with_reference(const Channel& n, const DensityMatrix& rho, int dim_ref) {
  return DensityMatrix(apply_with_reference(n, rho.matrix(), dim_ref));
}

Matrix adjoint_apply(const Channel& n, const Matrix& x) {
  if (x.rows() != n.dim_out() || x.cols() != n.dim_out()) {
    throw InputError("adjoint_apply: input dimension must be the channel output dimension");
  }
  Matrix out = Matrix::Zero(n.dim_in(), n.dim_in());
  for (const Matrix& k : n.kraus()) out += k.adjoint() * x * k;
  return hermitize(out);
}

HermitianOperator adjoint_apply(const Channel& n, const HermitianOperator& x) {
  return HermitianOperator(adjoint_apply(n, x.matrix()));
}

Matrix complementary_apply(const Channel& n, const Matrix& rho) {
  if (rho.rows() != n.dim_in() || rho.cols() != n.dim_in()) {
    throw InputError("complementary_apply: input dimension does not match the channel");
  }
  const int env = n.kraus_count();
  std::vector<Matrix> tmp(env);
  for (int i = 0; i < env; ++i) tmp[i] = n.kraus()[static_cast<size_t>(i)] * rho;
  Matrix out(env, env);
  for (int i = 0; i < env; ++i) {
    for (int j = 0; j <= i; ++j) {
      const Complex v = (tmp[i].cwiseProduct(n.kraus()[static_cast<size_t>(j)].conjugate())).sum();
      out(i, j) = v;
      out(j, i) = std::conj(v);
    }
  }
  return hermitize(out);
}

DensityMatrix complementary_apply(const Channel& n, const DensityMatrix& rho) {
  return DensityMatrix(complementary_apply(n, rho.matrix()));
}

Channel replacer(const DensityMatrix& omega, int dim_in) {
  if (dim_in < 1) throw InputError("replacer: input dimension must be positive");
  const EigenSystem es = eigh(omega.matrix());
  std::vector<Matrix> kraus;
  const int d = omega.dim();
  for (int k = d - 1; k >= 0; --k) {  // descending eigenvalue order
    const double lam = es.values[k];
    if (lam <= tol::support_cutoff) continue;
    for (int j = 0; j < dim_in; ++j) {
      Matrix op = Matrix::Zero(d, dim_in);
      op.col(j) = std::sqrt(lam) * es.vectors.col(k);
      kraus.push_back(std::move(op));
    }
  }
  return Channel(std::move(kraus));
}

Channel absolutely_thermal(const ThermalContext& ctx, int dim_in) {
  return replacer(ctx.gamma, dim_in);
}

WeylSet weyl_set(int m) {
  if (m < 2) throw InputError("weyl_set: dimension must be at least 2");
  Matrix x = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) x((j + 1) % m, j) = 1.0;
  Matrix z = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) z(j, j) = std::polar(1.0, 2.0 * M_PI * j / m);

  WeylSet set;
  set.m = m;
  Matrix xa = Matrix::Identity(m, m);
  for (int a = 0; a < m; ++a) {
    Matrix w = xa;
    for (int b = 0; b < m; ++b) {
      set.unitaries.push_back(w);
      w = w * z;
    }
    xa = x * xa;
  }
  return set;
}

Channel uniform_mixing(int m) {
  const WeylSet set = weyl_set(m);
  std::vector<Matrix> kraus;
  kraus.reserve(set.unitaries.size());
  for (const Matrix& w : set.unitaries) kraus.push_back(w / double(m));
  return Channel(std::move(kraus));
}

Channel tensor(const Channel& n, const Channel& m) {
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<size_t>(n.kraus_count()) * m.kraus_count());
  for (const Matrix& a : n.kraus())
    for (const Matrix& b : m.kraus()) kraus.push_back(tensor_product(a, b));
  return Channel(std::move(kraus));
}

Channel compose(const Channel& after, const Channel& before) {
  if (before.dim_out() != after.dim_in()) {
    throw InputError("compose: inner dimensions do not match");
  }
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<size_t>(after.kraus_count()) * before.kraus_count());
  for (const Matrix& a : after.kraus())
    for (const Matrix& b : before.kraus()) kraus.push_back(a * b);
  return Channel(std::move(kraus));
}

Channel unitary_channel(const Matrix& u) {
  if (u.rows() != u.cols() || u.rows() < 1) throw InputError("unitary_channel: matrix must be square");
  if (max_abs(u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())) > 1e-9) {
    throw InputError("unitary_channel: matrix is not unitary within 1e-9");
  }
  return Channel({u});
}

Channel identity_channel(int m) {
  if (m < 1) throw InputError("identity_channel: dimension must be positive");
  return Channel({Matrix::Identity(m, m)});
}

Channel convex_mixture(const std::vector<double>& weights, const std::vector<Channel>& parts) {
  if (weights.size() != parts.size() || parts.empty()) {
    throw InputError("convex_mixture: weights and channels must pair up");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-10) throw InputError("convex_mixture: weights must sum to 1");
  const int din = parts[0].dim_in(), dout = parts[0].dim_out();
  std::vector<Matrix> kraus;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].dim_in() != din || parts[i].dim_out() != dout) {
      throw InputError("convex_mixture: channel dimensions differ");
    }
    if (weights[i] < 0) throw InputError("convex_mixture: negative weight");
    if (weights[i] == 0) continue;
    const double root = std::sqrt(weights[i]);
    for (const Matrix& k : parts[i].kraus()) kraus.push_back(root * k);
  }
  return Channel(std::move(kraus));
}

Channel random_channel(int dim_in, int dim_out, int kraus_count, std::uint64_t seed) {
  if (dim_in < 1 || dim_out < 1 || kraus_count < 1) {
    throw InputError("random_channel: dimensions and Kraus count must be positive");
  }
  Rng rng(seed);
  const long rows = static_cast<long>(dim_out) * kraus_count;
  if (rows < dim_in) throw InputError("random_channel: environment too small for an isometry");
  Matrix g(rows, dim_in);
  for (long r = 0; r < rows; ++r)
    for (int c = 0; c < dim_in; ++c) g(r, c) = rng.complex_gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, dim_in);
  std::vector<Matrix> kraus(kraus_count);
  for (int i = 0; i < kraus_count; ++i) kraus[i] = q.middleRows(static_cast<long>(i) * dim_out, dim_out);
  return Channel(std::move(kraus));
}

}  // namespace athermal
