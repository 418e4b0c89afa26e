#pragma once

#include <string>
#include <utility>
#include <vector>

#include "athermal/qcore.hpp"

namespace athermal::sdp {

// Block-diagonal Hermitian operator; blocks not listed are zero.
struct BlockMatrix {
  std::vector<std::pair<int, Matrix>> entries;

  void add(int block, Matrix m) { entries.emplace_back(block, std::move(m)); }
};

// min/max <C, X> subject to <A_i, X> = b_i, X per-block PSD, over complex
// Hermitian blocks with inner product <A, B> = Re tr(A^dagger B).
struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<std::string> block_labels;  // optional diagnostics, may be empty
  BlockMatrix objective;
  std::vector<BlockMatrix> constraints;
  Eigen::VectorXd rhs;

  enum class Sense { minimize, maximize };
  Sense sense = Sense::minimize;
};

enum class SdpStatus { optimal, infeasible, max_iter };

struct IterateLog {
  double primal_obj;
  double dual_obj;
  double mu;
  double primal_residual;
  double dual_residual;
};

struct SdpSolution {
  double primal_value = 0.0;
  double dual_value = 0.0;
  std::vector<Matrix> x;
  Eigen::VectorXd y;
  SdpStatus status = SdpStatus::max_iter;
  int iterations = 0;
  std::vector<IterateLog> trace;  // per-iteration diagnostics
};

// Primal-dual path-following interior point with Nesterov-Todd scaling on the
// homogeneous self-dual embedding. Deterministic; complex Hermitian blocks are
// handled natively. Status `optimal` certifies duality gap <= 1e-6*(1+|primal|)
// and primal feasibility residual <= 1e-7 (the solver itself targets 1e-9).
SdpSolution solve(const SdpProblem& p);

// Diamond norm of a Hermiticity-preserving map given by its unnormalized Choi
// matrix on (input (x) output); the convention is the input-supremum one,
// ||Delta||_diamond = sup_psi ||(id (x) Delta)(psi)||_1, without a 1/2 factor.
double diamond_norm(const Matrix& choi_delta, int dim_in);

// Hermitian basis of an n x n space (n^2 elements, deterministic order):
// E_kk, then for k<l the pair (E_kl + E_lk) and i(E_kl - E_lk).
std::vector<Matrix> hermitian_basis(int n);

}  // namespace athermal::sdp
