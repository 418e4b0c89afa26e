#pragma once

#include <cstdint>

#include "athermal/channels.hpp"
#include "athermal/divergences.hpp"
#include "athermal/qcore.hpp"

namespace athermal {

// Memoryless Gibbs-preserving superchannel: Theta(N) = post o N o pre.
// `pre` may be any CPTP map; `post` must fix the bath's Gibbs state, which is
// what makes Theta map the absolutely thermal channel to itself.
struct SuperchannelSandwich {
  Channel pre;
  Channel post;
};

struct GibbsCheck {
  bool preserving = false;
  double residual = 0.0;  // ||G(gamma) - gamma||_1
};

GibbsCheck is_gibbs_preserving(const Channel& g, const ThermalContext& ctx);

// Random convex combination of identity, T^beta, energy-conserving unitaries
// (random phases plus Haar blocks inside degenerate eigenspaces) and partial
// thermalizations. Always Gibbs preserving by construction.
Channel random_gibbs_preserving_channel(const ThermalContext& ctx, std::uint64_t seed);

// Energy-conserving unitary: [U, H] = 0, hence U gamma U^dagger = gamma.
Matrix random_energy_conserving_unitary(const ThermalContext& ctx, std::uint64_t seed);

Channel apply_superchannel(const SuperchannelSandwich& theta, const Channel& n);

// Invariant audit for a sandwich against a bath: post fixes gamma (1e-9) and
// Theta(T^beta) = T^beta within diamond distance 1e-6.
struct SandwichAudit {
  double post_gibbs_residual = 0.0;
  double thermal_fixed_point_diamond = 0.0;
  bool pass = false;
};
SandwichAudit audit_sandwich(const SuperchannelSandwich& theta, const ThermalContext& ctx);

SuperchannelSandwich random_gp_superchannel(const ThermalContext& ctx, std::uint64_t seed);

// Upper bound on the conversion distance d_GP: minimum of ||Theta(N) - M||_diamond
// over a constructive sandwich family (identity, thermalizing post, unitary
// rewiring when both channels are unitary, plus `budget` random sandwiches).
double conversion_distance_restricted(const Channel& n_from, const Channel& n_to,
                                      const ThermalContext& ctx, int budget,
                                      std::uint64_t seed = 7);

// Golden unit (id_m, R^pi); the divergence 2 ln m is recomputed at construction.
struct GoldenUnit {
  int m = 0;
  Channel channel;         // id_m
  Channel free_reference;  // R^pi on dimension m
  double divergence = 0.0; // D[id_m || R^pi]
};
GoldenUnit golden_unit(int m);

// Checks D[id_m||R^pi] = 2 D(|0><0| || pi) = 2 ln m with both sides computed
// independently. Requires a fully degenerate Hamiltonian.
struct DoublingCheckReport {
  int m = 0;
  double channel_divergence = 0.0;
  double state_divergence = 0.0;
  double residual = 0.0;
  bool pass = false;
};
DoublingCheckReport golden_unit_doubling_check(int m, const ThermalContext& ctx_degenerate);

}  // namespace athermal
