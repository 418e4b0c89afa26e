#pragma once

#include <optional>
#include <vector>

#include "athermal/channels.hpp"
#include "athermal/divergences.hpp"
#include "athermal/qcore.hpp"

namespace athermal {

struct StateFreeEnergies {
  double thermal;   // F_T = E - S/beta
  double resource;  // F = D(rho||gamma)/beta
};

// Both free energies of a state; the cross-identity F_T = D(rho||gamma_hat)/beta
// is recomputed and enforced within 1e-8.
StateFreeEnergies state_free_energies(const DensityMatrix& rho, const ThermalContext& ctx);

// Work from rho_AB -> rho_A (x) rho_B -> gamma_A (x) gamma_B:
// I(A;B)/beta + F(rho_A) + F(rho_B), cross-checked against the single
// relative-entropy form within 1e-8. Both baths must share beta.
double extractable_work_bipartite(const DensityMatrix& rho_ab, const ThermalContext& ctx_a,
                                  const ThermalContext& ctx_b);

// Bundled thermodynamic quantities of one channel against one bath.
struct ThermoReport {
  double beta = 0.0;
  double thermal_free_energy = 0.0;  // F_T[N] = D[N||R^gamma_hat]/beta
  double free_energy = 0.0;          // F[N]   = D[N||R^gamma]/beta
  double extractable_work = 0.0;     // identical to free_energy by definition
  double energy = 0.0;               // E[N] = lambda_max(N^dagger(H))
  double entropy = 0.0;              // S[N] = -D[N||R^I], nats
  double helmholtz_gap = 0.0;        // E - S/beta - F_T (>= 0)
  DivergenceReport::Certificate thermal_free_energy_certificate =
      DivergenceReport::Certificate::heuristic;
  DivergenceReport::Certificate free_energy_certificate = DivergenceReport::Certificate::heuristic;
  DivergenceReport::Certificate entropy_certificate = DivergenceReport::Certificate::heuristic;
};

ThermoReport channel_thermo_report(const Channel& n, const ThermalContext& ctx,
                                   const MirrorAscentOptions& opts = {});

// Thermodynamic work capacity of the conversion n -> m, computed through both
// the free-energy difference and the divergence difference (compared at 1e-6).
struct WorkCapacity {
  double value = 0.0;            // = free_energy_form
  double free_energy_form = 0.0; // F_T[N] - F_T[M]
  double divergence_form = 0.0;  // (D[N||T] - D[M||T])/beta
};

WorkCapacity work_capacity(const Channel& n, const Channel& m, const ThermalContext& ctx,
                           const MirrorAscentOptions& opts = {});

struct OneShotResult {
  double eps = 0.0;
  int copies = 1;
  std::optional<double> distill_nats;  // Dist^eps in ln m units (raw/2)
  std::optional<double> cost_nats;     // Cost^eps in ln m units (raw/2)
  double raw_divergence = 0.0;
  double rate_per_copy = 0.0;
  // Golden units live on the integer lattice {ln m}: the largest ln m at or
  // below raw/2 for distillation, the smallest at or above raw/2 for cost.
  double golden_units_floor = 0.0;
};

// One-shot distillation: raw divergence D_H^eps[N||T^beta], golden units raw/2.
OneShotResult one_shot_distill(const Channel& n, const ThermalContext& ctx, double eps,
                               const SearchBudget& budget = {}, int copies = 1);
// One-shot cost: raw divergence D_inf^eps[N||T^beta], golden units raw/2.
OneShotResult one_shot_cost(const Channel& n, const ThermalContext& ctx, double eps, int copies = 1);

struct RatePoint {
  int copies = 0;
  double ht_rate = 0.0;            // D_H^eps[N^k||T^k]/k
  double smoothed_max_rate = 0.0;  // D_inf^eps[N^k||T^k]/k
};

struct AsymptoticRates {
  double target = 0.0;  // D[N||T]
  std::vector<RatePoint> points;
  bool complete = true;  // false when the tensor-power budget ran out
};

AsymptoticRates asymptotic_rate_estimate(const Channel& n, const ThermalContext& ctx, double eps,
                                         int max_copies, const SearchBudget& budget = {},
                                         const MirrorAscentOptions& opts = {});

// k-fold parallel uses: Kronecker-sum Hamiltonian, so gamma_k = gamma^(x)k.
ThermalContext tensor_context(const ThermalContext& ctx, int copies);
Channel tensor_power(const Channel& n, int copies);

}  // namespace athermal
