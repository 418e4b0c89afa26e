#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "athermal/thermo.hpp"
#include "support.hpp"

using namespace athermal;

namespace {

const double kLn2 = std::log(2.0);

ThermalContext two_level_bath(double e = 1.0, double beta = 1.0) {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = e;
  return thermal_state(HermitianOperator(h), beta);
}

ThermalContext flat_bath(int dim = 2, double beta = 1.0) {
  return thermal_state(HermitianOperator(Matrix::Zero(dim, dim)), beta);
}

MirrorAscentOptions fast_opts(std::uint64_t seed = 0, int restarts = 5) {
  MirrorAscentOptions o;
  o.seed = seed;
  o.restarts = restarts;
  o.concavity_audit_pairs = 10;
  return o;
}

}  // namespace

TEST_CASE("state_free_energies: equilibrium, excited state, faithfulness") {
  const ThermalContext ctx = two_level_bath(kLn2);  // Z = 3/2
  const StateFreeEnergies eq = state_free_energies(ctx.gamma, ctx);
  CHECK(eq.resource == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(eq.thermal == doctest::Approx(-std::log(1.5)).epsilon(1e-10));

  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  const StateFreeEnergies g = state_free_energies(DensityMatrix(ground), ctx);
  CHECK(g.resource == doctest::Approx(std::log(1.5)).epsilon(1e-10));

  for (int i = 0; i < 50; ++i) {
    const DensityMatrix rho = random_density_matrix(2, 100 + i);
    const double f = state_free_energies(rho, ctx).resource;
    CHECK(f >= -1e-10);
    const double distance = max_abs(rho.matrix() - ctx.gamma.matrix());
    if (distance > 1e-3) CHECK(f > 1e-8);
  }
}

TEST_CASE("extractable_work_bipartite: product, entangled, correlation bonus") {
  const ThermalContext ctx_a = two_level_bath(0.9, 1.4);
  const ThermalContext ctx_b = two_level_bath(0.3, 1.4);

  const DensityMatrix a = random_density_matrix(2, 11);
  const DensityMatrix b = random_density_matrix(2, 12);
  const double product_work = extractable_work_bipartite(tensor_product(a, b), ctx_a, ctx_b);
  const double fa = state_free_energies(a, ctx_a).resource;
  const double fb = state_free_energies(b, ctx_b).resource;
  CHECK(product_work == doctest::Approx(fa + fb).epsilon(1e-8));

  const ThermalContext flat = flat_bath();
  CHECK(extractable_work_bipartite(max_entangled_state(2), flat, flat) ==
        doctest::Approx(2.0 * kLn2).epsilon(1e-8));

  for (int i = 0; i < 30; ++i) {
    const DensityMatrix joint = random_density_matrix(4, 200 + i);
    const double w = extractable_work_bipartite(joint, ctx_a, ctx_b);
    const DensityMatrix ra(partial_trace(joint.matrix(), {2, 2}, {0}));
    const DensityMatrix rb(partial_trace(joint.matrix(), {2, 2}, {1}));
    const double marginal_work = state_free_energies(ra, ctx_a).resource +
                                 state_free_energies(rb, ctx_b).resource;
    CHECK(w >= marginal_work - 1e-9);
  }

  const ThermalContext other_beta = two_level_bath(0.3, 2.0);
  CHECK_THROWS_AS(extractable_work_bipartite(max_entangled_state(2), ctx_a, other_beta), InputError);
}

TEST_CASE("channel_thermo_report: absolutely thermal channel is free") {
  const ThermalContext ctx = two_level_bath();
  const ThermoReport r = channel_thermo_report(absolutely_thermal(ctx, 2), ctx, fast_opts(1));
  CHECK(std::abs(r.free_energy) < 1e-8);
  CHECK(std::abs(r.extractable_work) < 1e-8);
  CHECK(r.helmholtz_gap >= -1e-6);
}

TEST_CASE("channel_thermo_report: identity channel with a degenerate bath") {
  const double beta = 1.7;
  ThermalContext ctx = thermal_state(HermitianOperator(0.4 * Matrix::Identity(2, 2)), beta);
  const ThermoReport r = channel_thermo_report(identity_channel(2), ctx, fast_opts(2));
  CHECK(r.free_energy == doctest::Approx(2.0 * kLn2 / beta).epsilon(1e-6));
  CHECK(r.entropy == doctest::Approx(-kLn2).epsilon(1e-6));
  CHECK(r.energy == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(r.extractable_work == r.free_energy);
}

TEST_CASE("channel_thermo_report: replacer saturates Helmholtz and has state entropy") {
  const ThermalContext ctx = two_level_bath(1.3, 0.9);
  for (int i = 0; i < 5; ++i) {
    const DensityMatrix sigma = random_density_matrix(2, 300 + i);
    const ThermoReport r = channel_thermo_report(replacer(sigma, 2), ctx, fast_opts(300 + i));
    CHECK(std::abs(r.helmholtz_gap) < 1e-6);
    CHECK(r.entropy == doctest::Approx(vn_entropy(sigma)).epsilon(1e-5));
  }
}

TEST_CASE("channel_thermo_report rejects non-square channels") {
  const Channel wide = random_channel(2, 3, 2, 17);
  const ThermalContext ctx3 = thermal_state(HermitianOperator(Matrix::Zero(3, 3)), 1.0);
  CHECK_THROWS_AS(channel_thermo_report(wide, ctx3, fast_opts()), InputError);
}

TEST_CASE("work_capacity: reflexivity, golden conversion, antisymmetry") {
  const ThermalContext ctx = flat_bath();
  const Channel n = random_channel(2, 2, 3, 400);
  const WorkCapacity self = work_capacity(n, n, ctx, fast_opts(3));
  CHECK(std::abs(self.value) < 1e-9);

  const WorkCapacity golden = work_capacity(identity_channel(2), absolutely_thermal(ctx, 2), ctx,
                                            fast_opts(4));
  CHECK(golden.value == doctest::Approx(2.0 * kLn2).epsilon(1e-6));
  CHECK(golden.free_energy_form == doctest::Approx(golden.divergence_form).epsilon(1e-6));

  for (int i = 0; i < 5; ++i) {
    const Channel a = random_channel(2, 2, 2, 500 + i);
    const Channel b = random_channel(2, 2, 3, 600 + i);
    const ThermalContext bath = two_level_bath();
    const double ab = work_capacity(a, b, bath, fast_opts(5)).value;
    const double ba = work_capacity(b, a, bath, fast_opts(5)).value;
    CHECK(ab == doctest::Approx(-ba).epsilon(1e-9));
  }
}

TEST_CASE("one_shot_distill: golden unit content and free-object lattice zero") {
  const ThermalContext ctx = flat_bath();
  SearchBudget budget;
  budget.restarts = 4;
  budget.max_iters = 250;

  const double eps = 0.01;
  const OneShotResult golden = one_shot_distill(identity_channel(2), ctx, eps, budget);
  CHECK(golden.raw_divergence >= 2.0 * kLn2 - 1e-6);
  CHECK(golden.raw_divergence <= 2.0 * kLn2 + std::log(1.0 / (1.0 - eps)) + 1e-6);
  CHECK(*golden.distill_nats == golden.raw_divergence / 2.0);
  CHECK(golden.golden_units_floor == doctest::Approx(kLn2).epsilon(1e-12));

  const OneShotResult free_obj = one_shot_distill(absolutely_thermal(ctx, 2), ctx, 0.05, budget);
  // the raw divergence carries only the -ln(1-eps) testing overhead
  CHECK(free_obj.raw_divergence <= std::log(1.0 / 0.95) + 1e-8);
  CHECK(free_obj.golden_units_floor == 0.0);

  CHECK_THROWS_AS(one_shot_distill(identity_channel(2), ctx, 0.0, budget), InputError);
  CHECK_THROWS_AS(one_shot_distill(identity_channel(2), ctx, 1.0, budget), InputError);
}

TEST_CASE("one_shot_cost: free object costs nothing, eps-monotone") {
  const ThermalContext ctx = flat_bath();
  const OneShotResult free_obj = one_shot_cost(absolutely_thermal(ctx, 2), ctx, 0.05);
  CHECK(std::abs(free_obj.raw_divergence) < 1e-7);
  CHECK(free_obj.golden_units_floor == 0.0);

  const Channel n = random_channel(2, 2, 3, 700);
  const double c1 = one_shot_cost(n, ctx, 0.05).raw_divergence;
  const double c2 = one_shot_cost(n, ctx, 0.2).raw_divergence;
  CHECK(c2 <= c1 + 1e-7);
}

TEST_CASE("one_shot distill/cost ordering at matched eps") {
  const ThermalContext ctx = two_level_bath();
  SearchBudget budget;
  budget.restarts = 4;
  budget.max_iters = 250;
  for (int i = 0; i < 3; ++i) {
    const Channel n = random_channel(2, 2, 2 + i, 800 + i);
    const double eps = 0.05;
    const OneShotResult d = one_shot_distill(n, ctx, eps, budget);
    const OneShotResult c = one_shot_cost(n, ctx, eps);
    CHECK(*d.distill_nats <= *c.cost_nats + std::log(1.0 / (1.0 - eps)) + 1e-6);
  }
}

TEST_CASE("distillation is eps-monotone") {
  const ThermalContext ctx = two_level_bath();
  SearchBudget budget;
  budget.restarts = 4;
  budget.max_iters = 250;
  const Channel n = random_channel(2, 2, 2, 900);
  const double v1 = one_shot_distill(n, ctx, 0.05, budget).raw_divergence;
  const double v2 = one_shot_distill(n, ctx, 0.25, budget).raw_divergence;
  CHECK(v1 <= v2 + 1e-9);
}

TEST_CASE("asymptotic_rate_estimate: free object carries only testing overhead") {
  const ThermalContext ctx = flat_bath();
  SearchBudget budget;
  budget.restarts = 3;
  budget.max_iters = 200;
  const double eps = 0.05;
  const AsymptoticRates rates =
      asymptotic_rate_estimate(absolutely_thermal(ctx, 2), ctx, eps, 2, budget, fast_opts(6));
  CHECK(rates.complete);
  CHECK(std::abs(rates.target) < 1e-8);
  for (const RatePoint& pt : rates.points) {
    CHECK(pt.ht_rate <= std::log(1.0 / (1.0 - eps)) / pt.copies + 1e-7);
    CHECK(std::abs(pt.smoothed_max_rate) < 1e-6);
  }
}

TEST_CASE("asymptotic_rate_estimate: identity channel bracket and trend") {
  const ThermalContext ctx = flat_bath();
  SearchBudget budget;
  budget.restarts = 3;
  budget.max_iters = 300;
  const double eps = 0.05;
  const AsymptoticRates rates =
      asymptotic_rate_estimate(identity_channel(2), ctx, eps, 2, budget, fast_opts(7));
  REQUIRE(rates.complete);
  REQUIRE(rates.points.size() == 2);
  const double overhead = std::log(1.0 / (1.0 - eps));
  const double dmax = 2.0 * kLn2;
  for (const RatePoint& pt : rates.points) {
    CHECK(pt.ht_rate >= 0.0);
    CHECK(pt.ht_rate <= dmax + overhead / pt.copies + 1e-6);
  }
  CHECK(std::abs(rates.points[1].ht_rate - rates.points[0].ht_rate) <= overhead + 1e-6);
  CHECK(rates.target == doctest::Approx(dmax).epsilon(1e-6));
}

TEST_CASE("asymptotic_rate_estimate flags the tensor-power budget") {
  const ThermalContext ctx3 = thermal_state(HermitianOperator(Matrix::Zero(3, 3)), 1.0);
  SearchBudget budget;
  budget.restarts = 2;
  budget.max_iters = 150;
  const AsymptoticRates rates =
      asymptotic_rate_estimate(identity_channel(3), ctx3, 0.05, 2, budget, fast_opts(8, 3));
  CHECK_FALSE(rates.complete);  // Choi dimension of the 2nd power is 81 > 64
  CHECK(rates.points.size() == 1);
}

TEST_CASE("tensor_context builds the Kronecker-sum bath") {
  const ThermalContext ctx = two_level_bath(0.8, 1.2);
  const ThermalContext ctx2 = tensor_context(ctx, 2);
  CHECK(max_abs(ctx2.gamma.matrix() - tensor_product(ctx.gamma.matrix(), ctx.gamma.matrix())) <
        1e-12);
  CHECK(ctx2.partition_function ==
        doctest::Approx(ctx.partition_function * ctx.partition_function).epsilon(1e-12));
}
