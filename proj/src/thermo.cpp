#include "athermal/thermo.hpp"

#include <cmath>
#include <sstream>

namespace athermal {

namespace {

double energy_of(const DensityMatrix& rho, const ThermalContext& ctx) {
  return rho.matrix().cwiseProduct(ctx.hamiltonian.matrix().transpose()).sum().real();
}

void require_same_bath(const ThermalContext& a, const ThermalContext& b, const char* who) {
  if (std::abs(a.beta - b.beta) > 1e-12 * std::max(1.0, std::abs(a.beta))) {
    throw InputError(std::string(who) + ": contexts carry different inverse temperatures");
  }
}

}  // namespace

StateFreeEnergies state_free_energies(const DensityMatrix& rho, const ThermalContext& ctx) {
  if (rho.dim() != ctx.dim()) throw InputError("state_free_energies: dimension mismatch");
  const double beta = ctx.beta;
  const double thermal = energy_of(rho, ctx) - vn_entropy(rho) / beta;
  const double resource = rel_entropy(rho, ctx.gamma.as_operator()) / beta;

  const double thermal_via_divergence = rel_entropy(rho, ctx.gamma_hat) / beta;
  if (std::abs(thermal - thermal_via_divergence) > 1e-8 * (1.0 + std::abs(thermal))) {
    throw NumericalError("state_free_energies: F_T and D(rho||gamma_hat)/beta disagree beyond 1e-8");
  }
  return StateFreeEnergies{thermal, resource};
}

double extractable_work_bipartite(const DensityMatrix& rho_ab, const ThermalContext& ctx_a,
                                  const ThermalContext& ctx_b) {
  require_same_bath(ctx_a, ctx_b, "extractable_work_bipartite");
  const int da = ctx_a.dim(), db = ctx_b.dim();
  if (da * db != rho_ab.dim()) {
    throw InputError("extractable_work_bipartite: state dimension must factor over the two baths");
  }
  const double beta = ctx_a.beta;

  const DensityMatrix rho_a(partial_trace(rho_ab.matrix(), {da, db}, {0}));
  const DensityMatrix rho_b(partial_trace(rho_ab.matrix(), {da, db}, {1}));
  const double mi = mutual_information(rho_ab, da, db);
  const double work = mi / beta + state_free_energies(rho_a, ctx_a).resource +
                      state_free_energies(rho_b, ctx_b).resource;

  // Same quantity as one divergence: D(rho_AB || gamma_A (x) gamma_B)/beta.
  const double direct =
      rel_entropy(rho_ab.matrix(), tensor_product(ctx_a.gamma.matrix(), ctx_b.gamma.matrix())) / beta;
  if (std::abs(work - direct) > 1e-8 * (1.0 + std::abs(work))) {
    throw NumericalError("extractable_work_bipartite: mutual-information and divergence forms disagree");
  }
  return work;
}

ThermoReport channel_thermo_report(const Channel& n, const ThermalContext& ctx,
                                   const MirrorAscentOptions& opts) {
  if (!n.is_square()) {
    throw InputError("channel_thermo_report: the resource theory covers square channels only");
  }
  if (n.dim_out() != ctx.dim()) {
    throw InputError("channel_thermo_report: channel output dimension must match the bath");
  }
  const double beta = ctx.beta;
  const int d = n.dim_out();

  const DivergenceReport thermal_div = channel_rel_entropy_replacer(n, ctx.gamma_hat, opts);
  const DivergenceReport resource_div = channel_rel_entropy_replacer(n, ctx.gamma.as_operator(), opts);
  const DivergenceReport identity_div =
      channel_rel_entropy_replacer(n, HermitianOperator(Matrix::Identity(d, d)), opts);

  ThermoReport report;
  report.beta = beta;
  report.thermal_free_energy = thermal_div.value / beta;
  report.free_energy = resource_div.value / beta;
  report.extractable_work = report.free_energy;
  report.entropy = -identity_div.value;
  report.thermal_free_energy_certificate = thermal_div.certificate;
  report.free_energy_certificate = resource_div.certificate;
  report.entropy_certificate = identity_div.certificate;

  const EigenSystem es = eigh(adjoint_apply(n, ctx.hamiltonian.matrix()));
  report.energy = es.values.maxCoeff();
  report.helmholtz_gap = report.energy - report.entropy / beta - report.thermal_free_energy;

  // Eq-style identity between the two free-energy pipelines.
  const double alt_free_energy = report.thermal_free_energy - ctx.equilibrium_free_energy;
  if (std::abs(report.free_energy - alt_free_energy) > 1e-6 * (1.0 + std::abs(report.free_energy))) {
    std::ostringstream msg;
    msg << "channel_thermo_report: F and F_T - F_T[T] disagree (" << report.free_energy << " vs "
        << alt_free_energy << ")";
    throw NumericalError(msg.str());
  }
  return report;
}

WorkCapacity work_capacity(const Channel& n, const Channel& m, const ThermalContext& ctx,
                           const MirrorAscentOptions& opts) {
  if (!n.is_square() || !m.is_square()) {
    throw InputError("work_capacity: both channels must be square");
  }
  const ThermoReport rn = channel_thermo_report(n, ctx, opts);
  const ThermoReport rm = channel_thermo_report(m, ctx, opts);

  WorkCapacity wc;
  wc.free_energy_form = rn.thermal_free_energy - rm.thermal_free_energy;
  wc.divergence_form = rn.free_energy - rm.free_energy;  // (D[N||T] - D[M||T])/beta
  wc.value = wc.free_energy_form;
  if (std::abs(wc.free_energy_form - wc.divergence_form) > 1e-6 * (1.0 + std::abs(wc.value))) {
    throw NumericalError("work_capacity: free-energy and divergence forms disagree beyond 1e-6");
  }
  return wc;
}

ThermalContext tensor_context(const ThermalContext& ctx, int copies) {
  if (copies < 1) throw InputError("tensor_context: copies must be positive");
  const int d = ctx.dim();
  Matrix h = ctx.hamiltonian.matrix();
  for (int k = 1; k < copies; ++k) {
    const long dim_left = h.rows();
    h = tensor_product(h, Matrix(Matrix::Identity(d, d))) +
        tensor_product(Matrix(Matrix::Identity(dim_left, dim_left)), ctx.hamiltonian.matrix());
  }
  return thermal_state(HermitianOperator(h), ctx.beta);
}

Channel tensor_power(const Channel& n, int copies) {
  if (copies < 1) throw InputError("tensor_power: copies must be positive");
  Channel out = n;
  for (int k = 1; k < copies; ++k) out = tensor(out, n);
  return out;
}

OneShotResult one_shot_distill(const Channel& n, const ThermalContext& ctx, double eps,
                               const SearchBudget& budget, int copies) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("one_shot_distill: eps must lie in (0, 1)");
  if (!n.is_square()) throw InputError("one_shot_distill: channel must be square");
  if (copies < 1 || copies > 3) throw InputError("one_shot_distill: copies must lie in 1..3");

  const Channel nk = tensor_power(n, copies);
  if (nk.choi().rows() > 64) {
    throw NumericalError("one_shot_distill: tensor-power Choi dimension exceeds the budget (64)");
  }
  const ThermalContext ck = tensor_context(ctx, copies);

  OneShotResult result;
  result.eps = eps;
  result.copies = copies;
  result.raw_divergence = channel_ht_rel_entropy(nk, ck.gamma.as_operator(), eps, budget).value;
  result.distill_nats = result.raw_divergence / 2.0;
  result.rate_per_copy = *result.distill_nats / copies;
  const double m_floor = std::floor(std::exp(*result.distill_nats) * (1.0 + 1e-9));
  result.golden_units_floor = std::log(std::max(1.0, m_floor));
  return result;
}

OneShotResult one_shot_cost(const Channel& n, const ThermalContext& ctx, double eps, int copies) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("one_shot_cost: eps must lie in (0, 1)");
  if (!n.is_square()) throw InputError("one_shot_cost: channel must be square");
  if (copies < 1 || copies > 3) throw InputError("one_shot_cost: copies must lie in 1..3");

  const Channel nk = tensor_power(n, copies);
  const ThermalContext ck = tensor_context(ctx, copies);

  OneShotResult result;
  result.eps = eps;
  result.copies = copies;
  result.raw_divergence = smoothed_channel_max_rel_entropy(nk, ck.gamma.as_operator(), eps).value;
  result.cost_nats = result.raw_divergence / 2.0;
  result.rate_per_copy = *result.cost_nats / copies;
  const double m_ceil = std::ceil(std::exp(*result.cost_nats) * (1.0 - 1e-9));
  result.golden_units_floor = std::log(std::max(1.0, m_ceil));
  return result;
}

AsymptoticRates asymptotic_rate_estimate(const Channel& n, const ThermalContext& ctx, double eps,
                                         int max_copies, const SearchBudget& budget,
                                         const MirrorAscentOptions& opts) {
  if (max_copies < 1 || max_copies > 3) {
    throw InputError("asymptotic_rate_estimate: max_copies must lie in 1..3");
  }
  if (!n.is_square()) throw InputError("asymptotic_rate_estimate: channel must be square");

  AsymptoticRates rates;
  rates.target = channel_rel_entropy_replacer(n, ctx.gamma.as_operator(), opts).value;

  for (int k = 1; k <= max_copies; ++k) {
    const Channel nk = tensor_power(n, k);
    const long choi_dim = nk.choi().rows();
    // 4 Choi blocks + input block + lambda in the smoothing SDP must stay <= 128.
    if (choi_dim > 64 || 4 * choi_dim + nk.dim_in() + 1 > 128) {
      rates.complete = false;
      break;
    }
    const ThermalContext ck = tensor_context(ctx, k);
    SearchBudget scaled = budget;
    if (k >= 2) {
      scaled.restarts = std::max(2, budget.restarts / 2);
      scaled.max_iters = std::max(200, budget.max_iters);
    }
    RatePoint point;
    point.copies = k;
    point.ht_rate = channel_ht_rel_entropy(nk, ck.gamma.as_operator(), eps, scaled).value / k;
    point.smoothed_max_rate =
        smoothed_channel_max_rel_entropy(nk, ck.gamma.as_operator(), eps).value / k;
    rates.points.push_back(point);
  }
  return rates;
}

}  // namespace athermal
