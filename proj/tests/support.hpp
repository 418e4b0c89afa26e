#pragma once

// Shared helpers and independent oracles used across the test suites. Oracles
// here must not reuse the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "athermal/qcore.hpp"
#include "athermal/sdp.hpp"

namespace testsupport {

using athermal::Complex;
using athermal::Matrix;

// Hypothesis-testing divergence as an explicit SDP:
//   min <sigma, Lambda>  s.t.  Lambda + S = I,  tr(Lambda rho) - s = 1 - eps,
// over blocks (Lambda, S, s). Independent of the Neyman-Pearson bisection path.
inline double ht_sdp_value(const Matrix& rho, const Matrix& sigma, double eps) {
  namespace sdp = athermal::sdp;
  const int n = static_cast<int>(rho.rows());
  sdp::SdpProblem p;
  p.block_dims = {n, n, 1};
  p.block_labels = {"Lambda", "slack_upper", "slack_power"};
  p.objective.add(0, athermal::hermitize(sigma));
  std::vector<double> rhs;
  for (const Matrix& f : sdp::hermitian_basis(n)) {
    sdp::BlockMatrix a;
    a.add(0, f);
    a.add(1, f);
    p.constraints.push_back(std::move(a));
    rhs.push_back(f.trace().real());
  }
  sdp::BlockMatrix power;
  power.add(0, athermal::hermitize(rho));
  power.add(2, -Matrix::Identity(1, 1));
  p.constraints.push_back(std::move(power));
  rhs.push_back(1.0 - eps);
  p.rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<long>(rhs.size()));
  const sdp::SdpSolution sol = sdp::solve(p);
  if (sol.status != sdp::SdpStatus::optimal) {
    throw athermal::NumericalError("ht_sdp_value: solve failed");
  }
  return -std::log(std::max(sol.primal_value, 1e-300));
}

// Trace norm as an SDP: min tr(P) + tr(Q) s.t. P - Q = H, P, Q >= 0.
inline double trace_norm_sdp(const Matrix& h) {
  namespace sdp = athermal::sdp;
  const int n = static_cast<int>(h.rows());
  sdp::SdpProblem p;
  p.block_dims = {n, n};
  p.objective.add(0, Matrix::Identity(n, n));
  p.objective.add(1, Matrix::Identity(n, n));
  std::vector<double> rhs;
  for (const Matrix& f : sdp::hermitian_basis(n)) {
    sdp::BlockMatrix a;
    a.add(0, f);
    a.add(1, -f);
    p.constraints.push_back(std::move(a));
    rhs.push_back(f.conjugate().cwiseProduct(athermal::hermitize(h)).sum().real());
  }
  p.rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<long>(rhs.size()));
  const sdp::SdpSolution sol = sdp::solve(p);
  if (sol.status != sdp::SdpStatus::optimal) {
    throw athermal::NumericalError("trace_norm_sdp: solve failed");
  }
  return sol.primal_value;
}

// Classical Neyman-Pearson LP oracle for commuting (diagonal) pairs: greedy in
// descending likelihood-ratio order with a fractional weight on the marginal
// atom. Returns -ln beta*.
inline double classical_np_value(const std::vector<double>& p, const std::vector<double>& q,
                                 double eps) {
  std::vector<int> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = q[a] > 0 ? p[a] / q[a] : (p[a] > 0 ? 1e300 : 0.0);
    const double rb = q[b] > 0 ? p[b] / q[b] : (p[b] > 0 ? 1e300 : 0.0);
    return ra > rb;
  });
  double need = 1.0 - eps;
  double beta = 0.0;
  for (int i : order) {
    if (need <= 1e-12) break;
    const double take = std::min(1.0, need / std::max(p[i], 1e-300));
    need -= take * p[i];
    beta += take * q[i];
  }
  return -std::log(std::max(beta, 1e-300));
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace testsupport
