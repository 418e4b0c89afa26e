#pragma once

#include <cstdint>
#include <vector>

#include "athermal/qcore.hpp"

namespace athermal {

// CPTP map held in Kraus form (the source of truth). The Choi matrix and the
// complementary Kraus list are derived once at construction; instances are
// immutable afterwards.
//
// Choi convention is unnormalized: J = sum_{ij} |i><j| (x) N(|i><j|) on the
// (input (x) output) ordering, tr J = dim_in.
class Channel {
 public:
  explicit Channel(std::vector<Matrix> kraus);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  bool is_square() const { return dim_in_ == dim_out_; }
  int kraus_count() const { return static_cast<int>(kraus_.size()); }
  int env_dim() const { return kraus_count(); }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  const Matrix& choi() const { return choi_; }
  const std::vector<Matrix>& complementary_kraus() const { return complementary_kraus_; }

 private:
  int dim_in_ = 0;
  int dim_out_ = 0;
  std::vector<Matrix> kraus_;
  Matrix choi_;
  std::vector<Matrix> complementary_kraus_;
};

// Constructs a Channel, rejecting Kraus lists whose completeness defect
// exceeds 1e-6. Defects between 1e-9 and 1e-6 are polished away by a
// right inverse-square-root so the stored channel meets the 1e-9 invariant.
Channel from_kraus(std::vector<Matrix> kraus);

Matrix apply(const Channel& n, const Matrix& x);
DensityMatrix apply(const Channel& n, const DensityMatrix& rho);
// id_R (x) N on a (dim_ref * dim_in)-dimensional input.
Matrix apply_with_reference(const Channel& n, const Matrix& x, int dim_ref);
DensityMatrix apply_with_reference(const Channel& n, const DensityMatrix& rho, int dim_ref);

// Heisenberg picture: sum_i K_i^dagger X K_i.
Matrix adjoint_apply(const Channel& n, const Matrix& x);
HermitianOperator adjoint_apply(const Channel& n, const HermitianOperator& x);

// Environment output of the Stinespring dilation: N^c(rho)[i][j] = tr(K_i rho K_j^dagger).
Matrix complementary_apply(const Channel& n, const Matrix& rho);
DensityMatrix complementary_apply(const Channel& n, const DensityMatrix& rho);

// R^omega(.) = tr(.) omega. Kraus operators are sqrt(lam_k)|omega_k><e_j| over
// the eigenbasis of omega and the input basis, zero-eigenvalue terms dropped.
Channel replacer(const DensityMatrix& omega, int dim_in);
// T^beta = replacer onto the Gibbs state of the context.
Channel absolutely_thermal(const ThermalContext& ctx, int dim_in);

// Shift/clock Weyl unitaries W^(a,b) = X^a Z^b, index a*m+b.
struct WeylSet {
  int m = 0;
  std::vector<Matrix> unitaries;
};
WeylSet weyl_set(int m);
// Uniform mixture of the m^2 Weyl unitary channels; equals replacer(I/m).
Channel uniform_mixing(int m);

Channel tensor(const Channel& n, const Channel& m);
Channel compose(const Channel& after, const Channel& before);

Channel unitary_channel(const Matrix& u);
Channel identity_channel(int m);

// Convex combination of channels with matching dimensions; weights must sum to 1.
Channel convex_mixture(const std::vector<double>& weights, const std::vector<Channel>& parts);

// Stinespring sampling: Kraus blocks of a Haar-random isometry into
// environment (x) output.
Channel random_channel(int dim_in, int dim_out, int kraus_count, std::uint64_t seed);

}  // namespace athermal
