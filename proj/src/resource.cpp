#include "athermal/resource.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "athermal/sdp.hpp"

namespace athermal {

namespace {

bool is_degenerate_hamiltonian(const HermitianOperator& h) {
  const int d = h.dim();
  const Complex c = h.matrix()(0, 0);
  const double scale = std::max(1.0, max_abs(h.matrix()));
  return max_abs(h.matrix() - c * Matrix::Identity(d, d)) <= 1e-9 * scale;
}

}  // namespace

GibbsCheck is_gibbs_preserving(const Channel& g, const ThermalContext& ctx) {
  if (!g.is_square() || g.dim_in() != ctx.dim()) {
    throw InputError("is_gibbs_preserving: channel must be square and match the bath dimension");
  }
  const double residual = trace_norm(apply(g, ctx.gamma.matrix()) - ctx.gamma.matrix());
  return GibbsCheck{residual <= 1e-9, residual};
}

Matrix random_energy_conserving_unitary(const ThermalContext& ctx, std::uint64_t seed) {
  Rng rng(seed);
  const EigenSystem es = eigh(ctx.hamiltonian.matrix());
  const int d = ctx.dim();
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());

  // Haar block per degenerate eigenspace, a random phase for 1-dim blocks.
  Matrix block_diag = Matrix::Zero(d, d);
  int start = 0;
  while (start < d) {
    int stop = start + 1;
    while (stop < d && std::abs(es.values[stop] - es.values[start]) <= 1e-9 * scale) ++stop;
    const int size = stop - start;
    if (size == 1) {
      block_diag(start, start) = std::polar(1.0, 2.0 * M_PI * rng.uniform());
    } else {
      block_diag.block(start, start, size, size) = random_unitary(size, rng);
    }
    start = stop;
  }
  return es.vectors * block_diag * es.vectors.adjoint();
}

Channel random_gibbs_preserving_channel(const ThermalContext& ctx, std::uint64_t seed) {
  Rng rng(seed);
  const int d = ctx.dim();

  std::vector<Channel> parts;
  parts.push_back(identity_channel(d));
  parts.push_back(absolutely_thermal(ctx, d));
  parts.push_back(unitary_channel(random_energy_conserving_unitary(ctx, derive_seed(seed, 1))));
  parts.push_back(unitary_channel(random_energy_conserving_unitary(ctx, derive_seed(seed, 2))));
  // Partial thermalization (1-p) id + p T^beta.
  const double p = rng.uniform();
  parts.push_back(convex_mixture({1.0 - p, p}, {identity_channel(d), absolutely_thermal(ctx, d)}));

  std::vector<double> weights(parts.size());
  double total = 0.0;
  for (double& w : weights) {
    w = rng.uniform() + 1e-3;
    total += w;
  }
  for (double& w : weights) w /= total;

  Channel g = convex_mixture(weights, parts);
  const GibbsCheck check = is_gibbs_preserving(g, ctx);
  if (!check.preserving) {
    throw NumericalError("random_gibbs_preserving_channel: construction failed the Gibbs audit");
  }
  return g;
}

Channel apply_superchannel(const SuperchannelSandwich& theta, const Channel& n) {
  if (theta.pre.dim_out() != n.dim_in() || n.dim_out() != theta.post.dim_in()) {
    throw InputError("apply_superchannel: sandwich dimensions do not chain with the channel");
  }
  return compose(theta.post, compose(n, theta.pre));
}

SandwichAudit audit_sandwich(const SuperchannelSandwich& theta, const ThermalContext& ctx) {
  SandwichAudit audit;
  audit.post_gibbs_residual = is_gibbs_preserving(theta.post, ctx).residual;

  const Channel thermal = absolutely_thermal(ctx, theta.pre.dim_in());
  const Channel mapped = apply_superchannel(theta, thermal);
  const Channel target = absolutely_thermal(ctx, mapped.dim_in());
  audit.thermal_fixed_point_diamond = sdp::diamond_norm(mapped.choi() - target.choi(), mapped.dim_in());
  audit.pass = audit.post_gibbs_residual <= 1e-9 && audit.thermal_fixed_point_diamond <= 1e-6;
  return audit;
}

SuperchannelSandwich random_gp_superchannel(const ThermalContext& ctx, std::uint64_t seed) {
  const int d = ctx.dim();
  // Arbitrary CPTP pre; only the post-processing must preserve the Gibbs state.
  Channel pre = random_channel(d, d, d, derive_seed(seed, 11));
  Channel post = random_gibbs_preserving_channel(ctx, derive_seed(seed, 13));
  return SuperchannelSandwich{std::move(pre), std::move(post)};
}

double conversion_distance_restricted(const Channel& n_from, const Channel& n_to,
                                      const ThermalContext& ctx, int budget, std::uint64_t seed) {
  if (!n_from.is_square() || !n_to.is_square() || n_from.dim_in() != n_to.dim_in()) {
    throw InputError("conversion_distance_restricted: channels must be square with equal dimensions");
  }
  const int d = n_from.dim_in();

  std::vector<SuperchannelSandwich> candidates;
  candidates.push_back({identity_channel(d), identity_channel(d)});
  candidates.push_back({identity_channel(d), absolutely_thermal(ctx, d)});
  if (n_from.kraus_count() == 1 && n_to.kraus_count() == 1) {
    // Unitary-to-unitary rewiring: pre-compose with U_from^dagger U_to.
    const Matrix u = n_from.kraus()[0].adjoint() * n_to.kraus()[0];
    candidates.push_back({unitary_channel(u), identity_channel(d)});
  }
  for (int i = 0; i < budget; ++i) {
    candidates.push_back(random_gp_superchannel(ctx, derive_seed(seed, static_cast<std::uint64_t>(i))));
  }

  double best = std::numeric_limits<double>::infinity();
  for (const SuperchannelSandwich& theta : candidates) {
    const Channel mapped = apply_superchannel(theta, n_from);
    best = std::min(best, sdp::diamond_norm(mapped.choi() - n_to.choi(), d));
  }
  return best;
}

GoldenUnit golden_unit(int m) {
  if (m < 2) throw InputError("golden_unit: dimension must be at least 2");
  GoldenUnit unit{m, identity_channel(m),
                  replacer(DensityMatrix(Matrix::Identity(m, m) / double(m)), m), 0.0};
  const HermitianOperator pi(Matrix::Identity(m, m) / double(m));
  unit.divergence = channel_rel_entropy_replacer(unit.channel, pi).value;
  if (std::abs(unit.divergence - 2.0 * std::log(double(m))) > 1e-5) {
    throw NumericalError("golden_unit: recomputed divergence differs from 2 ln m beyond 1e-5");
  }
  return unit;
}

DoublingCheckReport golden_unit_doubling_check(int m, const ThermalContext& ctx_degenerate) {
  if (m < 2) throw InputError("golden_unit_doubling_check: dimension must be at least 2");
  if (ctx_degenerate.dim() != m) {
    throw InputError("golden_unit_doubling_check: context dimension does not match m");
  }
  if (!is_degenerate_hamiltonian(ctx_degenerate.hamiltonian)) {
    throw InputError("golden_unit_doubling_check: Hamiltonian must be fully degenerate (H ~ I)");
  }

  DoublingCheckReport report;
  report.m = m;
  report.channel_divergence =
      channel_rel_entropy_replacer(identity_channel(m), ctx_degenerate.gamma.as_operator()).value;

  Matrix pure = Matrix::Zero(m, m);
  pure(0, 0) = 1.0;
  report.state_divergence = rel_entropy(DensityMatrix(pure), ctx_degenerate.gamma.as_operator());

  report.residual = std::abs(report.channel_divergence - 2.0 * report.state_divergence);
  const double lnm = std::log(double(m));
  report.pass = report.residual <= 1e-5 && std::abs(report.channel_divergence - 2.0 * lnm) <= 1e-5 &&
                std::abs(report.state_divergence - lnm) <= 1e-5;
  return report;
}

}  // namespace athermal
