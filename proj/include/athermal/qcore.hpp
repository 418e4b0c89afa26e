#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "athermal/errors.hpp"

namespace athermal {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Shared numerical policy. All entropic quantities are in nats.
namespace tol {
inline constexpr double hermiticity = 1e-10;
inline constexpr double psd = 1e-10;             // eigenvalue >= -psd counts as nonnegative
inline constexpr double unit_trace = 1e-10;
inline constexpr double support_cutoff = 1e-14;  // below this an eigenvalue is an exact zero
inline constexpr double support_check = 1e-12;   // allowed mass outside supp(sigma)
inline constexpr double cptp = 1e-9;             // completeness / Choi residuals
}  // namespace tol

double max_abs(const Matrix& x);
Matrix hermitize(const Matrix& x);  // (x + x^dagger)/2
bool is_hermitian(const Matrix& x, double tolerance = tol::hermiticity);

// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct EigenSystem {
  RealVector values;
  Matrix vectors;  // column k pairs with values[k]
};
EigenSystem eigh(const Matrix& x);

// Deterministic random stream; identical sequence for a given seed on every platform
// (raw mt19937_64 words, bits mapped to doubles without library distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform();            // [0, 1)
  double gaussian();           // N(0, 1)
  Complex complex_gaussian();  // re, im independent N(0, 1)
  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable child-seed derivation for independent substreams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Hermitian matrix with validated symmetry. Carries energy units when it is a
// Hamiltonian, dimensionless otherwise (tests, witnesses, log-outputs).
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix entries);
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

// Positive semidefinite unit-trace Hermitian matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix entries);
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }
  HermitianOperator as_operator() const { return HermitianOperator(mat_); }

 private:
  Matrix mat_;
};

// Thermal-equilibrium data for a Hamiltonian and inverse temperature:
// gamma = exp(-beta H)/Z, gamma_hat = exp(-beta H), Z = tr gamma_hat.
struct ThermalContext {
  HermitianOperator hamiltonian;
  double beta;
  DensityMatrix gamma;
  HermitianOperator gamma_hat;
  double partition_function;
  double equilibrium_free_energy;  // -ln(Z)/beta

  int dim() const { return hamiltonian.dim(); }
};

ThermalContext thermal_state(const HermitianOperator& h, double beta);

double vn_entropy(const DensityMatrix& rho);
// Entropy of a PSD matrix given directly; negative eigenvalues within tol::psd
// are clamped to zero. Used on raw iterates inside optimizers.
double vn_entropy(const Matrix& rho);

// I(A;B) = S(A) + S(B) - S(AB) for rho_ab on a dim_a x dim_b bipartition.
double mutual_information(const DensityMatrix& rho_ab, int dim_a, int dim_b);

// Trace over the factors not listed in `keep`. `dims` factorizes the space,
// `keep` lists factor indices to retain (ascending output ordering).
Matrix partial_trace(const Matrix& x, const std::vector<int>& dims, const std::vector<int>& keep);
HermitianOperator partial_trace(const HermitianOperator& x, const std::vector<int>& dims,
                                const std::vector<int>& keep);

Matrix tensor_product(const Matrix& x, const Matrix& y);
HermitianOperator tensor_product(const HermitianOperator& x, const HermitianOperator& y);
DensityMatrix tensor_product(const DensityMatrix& x, const DensityMatrix& y);

// Support-restricted logarithm: eigenvalues below tol::support_cutoff are
// treated as exact zeros and excluded. With require_psd set, an eigenvalue
// below -tol::psd is an input error.
HermitianOperator matrix_log_safe(const HermitianOperator& x, bool require_psd = true);
Matrix matrix_log_safe(const Matrix& x, bool require_psd = true);

DensityMatrix max_entangled_state(int m);

// Hilbert-Schmidt random state (normalized G G^dagger with complex-Gaussian G).
DensityMatrix random_density_matrix(int dim, std::uint64_t seed);
DensityMatrix random_pure_state(int dim, std::uint64_t seed);
Vector random_unit_vector(int dim, Rng& rng);
Matrix random_unitary(int dim, Rng& rng);
Matrix random_unitary(int dim, std::uint64_t seed);

double trace_norm(const HermitianOperator& x);
double trace_norm(const Matrix& x);  // Hermitian input expected

}  // namespace athermal
