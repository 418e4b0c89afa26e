#pragma once

#include <cstdint>
#include <optional>

#include "athermal/channels.hpp"
#include "athermal/qcore.hpp"

namespace athermal {

// Outcome of a (channel) divergence computation. `value` is +infinity with
// certificate `exact` when a support violation makes the divergence infinite.
struct DivergenceReport {
  enum class Kind { relative, max, hypothesis_testing, smoothed_max };
  enum class Certificate { exact, lower_bound, upper_bound, heuristic };

  double value = 0.0;
  Kind kind = Kind::relative;
  Certificate certificate = Certificate::heuristic;
  std::optional<DensityMatrix> achieving_input;  // psi_RA' or rho attaining the reported value
  int iterations = 0;
  double residual = 0.0;
};

const char* to_string(DivergenceReport::Kind k);
const char* to_string(DivergenceReport::Certificate c);

// D(rho||sigma) = tr(rho ln rho - rho ln sigma); sigma may be unnormalized.
// Support violation (mass outside supp sigma above 1e-12) returns +infinity.
double rel_entropy(const DensityMatrix& rho, const HermitianOperator& sigma);
double rel_entropy(const Matrix& rho, const Matrix& sigma);

// D_inf(rho||sigma) = ln lambda_max(sigma^{-1/2} rho sigma^{-1/2}) on supp(sigma).
double max_rel_entropy(const DensityMatrix& rho, const HermitianOperator& sigma);
double max_rel_entropy(const Matrix& rho, const Matrix& sigma);

// Hypothesis-testing relative entropy
//   D_H^eps(rho||sigma) = -ln min{ tr(Lambda sigma) : 0 <= Lambda <= I, tr(Lambda rho) >= 1-eps }
// solved by quantum Neyman-Pearson bisection over the threshold t in rho - t sigma,
// with a fractional weight on the boundary eigenvector.
double ht_rel_entropy(const DensityMatrix& rho, const HermitianOperator& sigma, double eps);
double ht_rel_entropy(const Matrix& rho, const Matrix& sigma, double eps);

// Entropic mirror-ascent controls (rho_{k+1} ~ exp(ln rho_k + step G)).
struct MirrorAscentOptions {
  double step_init = 1.0;
  double backtrack = 0.5;
  double min_step = 1e-12;
  double rel_tol = 1e-9;
  int max_iter = 5000;
  int restarts = 10;  // random starts in addition to the maximally mixed one
  std::uint64_t seed = 0;
  int concavity_audit_pairs = 100;
};

// D[N||R^omega] = sup_psi D((id (x) N)(psi) || psi_R (x) omega), computed via the
// concave reduction f(rho) = S(rho) - S(N^c(rho)) - tr(N(rho) ln omega) over
// channel inputs. omega must be full rank (it may be unnormalized, e.g. a
// thermal operator). Certificate is lower_bound when the concavity midpoint
// audit passes, heuristic otherwise.
DivergenceReport channel_rel_entropy_replacer(const Channel& n, const HermitianOperator& omega,
                                              const MirrorAscentOptions& opts = {});

struct BruteForceOptions {
  int grid_density = 25;   // per Bloch axis, endpoints included
  int refine_levels = 0;   // local grid zooms around the best cell
  int samples = 10000;     // random-sampling mode (dim_in > 2)
  std::uint64_t seed = 1;
};

// Independent oracle: maximizes the defining objective D((id (x) N)(psi) || psi_R (x) omega)
// over a Bloch-ball grid of purified inputs (dim_in == 2) or over random pure
// inputs (any dim). Always a lower bound on the channel divergence.
DivergenceReport channel_rel_entropy_bruteforce(const Channel& n, const HermitianOperator& omega,
                                                const BruteForceOptions& opts = {});

// Closed form via the Choi pencil: D_inf[N||R^omega] = ln lambda_max((I(x)omega)^{-1/2} J_N (I(x)omega)^{-1/2}).
DivergenceReport channel_max_rel_entropy(const Channel& n, const HermitianOperator& omega);

// Multi-start search controls for the channel hypothesis-testing divergence.
struct SearchBudget {
  int restarts = 6;        // Nelder-Mead starts (first one is the maximally entangled input)
  int max_iters = 400;     // Nelder-Mead iterations per start
  int grid_density = 13;   // qubit Bloch-grid oracle folded into the search
  std::uint64_t seed = 1;
};

// sup_psi D_H^eps((id (x) N)(psi) || psi_R (x) omega); certificate lower_bound.
DivergenceReport channel_ht_rel_entropy(const Channel& n, const HermitianOperator& omega, double eps,
                                        const SearchBudget& budget = {});

// min{ D_inf[N'||R^omega] : N' CPTP, ||N - N'||_diamond <= eps } as one SDP;
// certificate upper_bound at solver tolerance.
DivergenceReport smoothed_channel_max_rel_entropy(const Channel& n, const HermitianOperator& omega,
                                                  double eps);

}  // namespace athermal
