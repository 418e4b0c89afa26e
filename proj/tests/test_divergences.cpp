#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "athermal/divergences.hpp"
#include "support.hpp"

using namespace athermal;

namespace {

const double kLn2 = std::log(2.0);

ThermalContext two_level_bath(double e = 1.0, double beta = 1.0) {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = e;
  return thermal_state(HermitianOperator(h), beta);
}

Matrix ket0_proj() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return m;
}

MirrorAscentOptions fast_opts(std::uint64_t seed = 0, int restarts = 6) {
  MirrorAscentOptions o;
  o.seed = seed;
  o.restarts = restarts;
  o.concavity_audit_pairs = 20;
  return o;
}

}  // namespace

TEST_CASE("rel_entropy: identity of arguments, pure vs mixed, thermal identity") {
  const DensityMatrix rho = random_density_matrix(3, 10);
  CHECK(rel_entropy(rho.matrix(), rho.matrix()) == doctest::Approx(0.0).epsilon(1e-10));

  CHECK(rel_entropy(ket0_proj(), Matrix(Matrix::Identity(2, 2) / 2.0)) ==
        doctest::Approx(kLn2).epsilon(1e-12));

  // beta F_T(rho) = D(rho||gamma_hat) with F_T = E - S/beta.
  const ThermalContext ctx = two_level_bath(kLn2);
  for (int i = 0; i < 20; ++i) {
    const DensityMatrix r = random_density_matrix(2, 2000 + i);
    const double energy = r.matrix().cwiseProduct(ctx.hamiltonian.matrix().transpose()).sum().real();
    const double ft = energy - vn_entropy(r);
    CHECK(rel_entropy(r, ctx.gamma_hat) == doctest::Approx(ft).epsilon(1e-10));
  }

  // support violation reports +infinity
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 0) = 1.0;
  CHECK(std::isinf(rel_entropy(Matrix(Matrix::Identity(2, 2) / 2.0), sigma)));
}

TEST_CASE("max_rel_entropy: basics and ordering against rel_entropy") {
  const DensityMatrix rho = random_density_matrix(3, 20);
  CHECK(max_rel_entropy(rho.matrix(), rho.matrix()) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(max_rel_entropy(ket0_proj(), Matrix(Matrix::Identity(2, 2) / 2.0)) ==
        doctest::Approx(kLn2).epsilon(1e-10));

  for (int i = 0; i < 50; ++i) {
    const Matrix a = random_density_matrix(3, 3000 + i).matrix();
    const Matrix b = random_density_matrix(3, 3100 + i).matrix();
    CHECK(max_rel_entropy(a, b) >= rel_entropy(a, b) - 1e-9);
  }
}

TEST_CASE("ht_rel_entropy: self-pair, pure vs mixed, classical oracle") {
  const DensityMatrix rho = random_density_matrix(2, 30);
  for (double eps : {0.0, 0.1, 0.35}) {
    CHECK(ht_rel_entropy(rho.matrix(), rho.matrix(), eps) ==
          doctest::Approx(-std::log(1.0 - eps)).epsilon(1e-9));
  }
  CHECK(ht_rel_entropy(ket0_proj(), Matrix(Matrix::Identity(2, 2) / 2.0), 0.0) ==
        doctest::Approx(kLn2).epsilon(1e-9));

  // Commuting pairs match the classical greedy LP exactly.
  for (int i = 0; i < 30; ++i) {
    Rng rng(4000 + i);
    const int n = 3;
    std::vector<double> pv(n), qv(n);
    double ps = 0, qs = 0;
    for (int k = 0; k < n; ++k) {
      pv[k] = rng.uniform() + 0.02;
      qv[k] = rng.uniform() + 0.02;
      ps += pv[k];
      qs += qv[k];
    }
    Matrix p = Matrix::Zero(n, n), q = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      pv[k] /= ps;
      qv[k] /= qs;
      p(k, k) = pv[k];
      q(k, k) = qv[k];
    }
    for (double eps : {0.0, 0.15, 0.4}) {
      CHECK(std::abs(ht_rel_entropy(p, q, eps) - testsupport::classical_np_value(pv, qv, eps)) <
            1e-9);
    }
  }

  CHECK(std::isinf(ht_rel_entropy(rho.matrix(), rho.matrix(), 1.0)));
  CHECK_THROWS_AS(ht_rel_entropy(rho.matrix(), rho.matrix(), 1.2), InputError);
  CHECK_THROWS_AS(ht_rel_entropy(rho.matrix(), rho.matrix(), -0.1), InputError);
}

TEST_CASE("data processing: all three divergences contract under channels") {
  for (int i = 0; i < 30; ++i) {
    const Channel n = random_channel(2, 2, 2 + (i % 3), 5000 + i);
    const Matrix rho = random_density_matrix(2, 5100 + i).matrix();
    const Matrix sigma = random_density_matrix(2, 5200 + i).matrix();
    const Matrix nrho = apply(n, rho);
    const Matrix nsigma = apply(n, sigma);
    CHECK(rel_entropy(nrho, nsigma) <= rel_entropy(rho, sigma) + 1e-9);
    CHECK(max_rel_entropy(nrho, nsigma) <= max_rel_entropy(rho, sigma) + 1e-9);
    CHECK(ht_rel_entropy(nrho, nsigma, 0.1) <= ht_rel_entropy(rho, sigma, 0.1) + 1e-8);
  }
}

TEST_CASE("channel_rel_entropy_replacer: free object, identity, replacer reduction") {
  const ThermalContext ctx = two_level_bath();
  const Channel thermal = absolutely_thermal(ctx, 2);
  const DivergenceReport zero = channel_rel_entropy_replacer(thermal, ctx.gamma.as_operator(),
                                                             fast_opts(1));
  CHECK(std::abs(zero.value) < 1e-8);

  const HermitianOperator pi(Matrix::Identity(2, 2) / 2.0);
  const DivergenceReport ident = channel_rel_entropy_replacer(identity_channel(2), pi, fast_opts(2));
  CHECK(ident.value == doctest::Approx(2 * kLn2).epsilon(1e-7));
  CHECK(ident.certificate == DivergenceReport::Certificate::lower_bound);
  REQUIRE(ident.achieving_input.has_value());
  // the supremum sits at the maximally mixed input
  CHECK(max_abs(ident.achieving_input->matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-4);

  for (int i = 0; i < 10; ++i) {
    const DensityMatrix sigma = random_density_matrix(2, 6000 + i);
    const DivergenceReport rep =
        channel_rel_entropy_replacer(replacer(sigma, 2), ctx.gamma.as_operator(), fast_opts(3, 2));
    CHECK(rep.value == doctest::Approx(rel_entropy(sigma, ctx.gamma.as_operator())).epsilon(1e-7));
  }
}

TEST_CASE("channel_rel_entropy_replacer: rank-deficient omega") {
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 0) = 1.0;
  // identity channel leaks outside supp(omega) -> infinite divergence flag
  const DivergenceReport inf_report =
      channel_rel_entropy_replacer(identity_channel(2), HermitianOperator(sigma));
  CHECK(std::isinf(inf_report.value));

  // a channel contained in the support: rank-deficiency is an input error
  const Channel prep = replacer(DensityMatrix(ket0_proj()), 2);
  CHECK_THROWS_AS(channel_rel_entropy_replacer(prep, HermitianOperator(sigma)), InputError);
}

TEST_CASE("mirror ascent agrees with the brute-force oracle on random qubit channels") {
  const ThermalContext ctx = two_level_bath();
  for (int i = 0; i < 10; ++i) {
    const Channel n = random_channel(2, 2, 2 + (i % 3), 7000 + i);
    const double solver =
        channel_rel_entropy_replacer(n, ctx.gamma.as_operator(), fast_opts(7000 + i)).value;
    BruteForceOptions bf;
    bf.refine_levels = 3;
    const double oracle = channel_rel_entropy_bruteforce(n, ctx.gamma.as_operator(), bf).value;
    CHECK(std::abs(solver - oracle) < 1e-4);
  }
}

TEST_CASE("brute force: identity channel grid value and grid monotonicity") {
  const HermitianOperator pi(Matrix::Identity(2, 2) / 2.0);
  BruteForceOptions base;
  const double coarse_25 = channel_rel_entropy_bruteforce(identity_channel(2), pi, base).value;
  CHECK(coarse_25 == doctest::Approx(2 * kLn2).epsilon(1e-9));  // grid contains r = 0

  const Channel n = random_channel(2, 2, 3, 7100);
  BruteForceOptions coarse;
  coarse.grid_density = 13;
  BruteForceOptions fine;
  fine.grid_density = 25;  // nested refinement of the 13-point grid
  const double v13 = channel_rel_entropy_bruteforce(n, pi, coarse).value;
  const double v25 = channel_rel_entropy_bruteforce(n, pi, fine).value;
  CHECK(v25 >= v13 - 1e-12);
}

TEST_CASE("brute force random-sampling mode covers dim > 2") {
  const HermitianOperator pi3(Matrix::Identity(3, 3) / 3.0);
  BruteForceOptions opts;
  opts.samples = 2000;
  const double v = channel_rel_entropy_bruteforce(identity_channel(3), pi3, opts).value;
  CHECK(v <= 2 * std::log(3.0) + 1e-9);
  CHECK(v > std::log(3.0));  // random sampling gets well past the halfway mark
}

TEST_CASE("channel_max_rel_entropy: replacer zero, identity 2 ln m, sampled oracle") {
  const DensityMatrix omega = random_density_matrix(2, 42);
  const Channel rep = replacer(omega, 2);
  CHECK(std::abs(channel_max_rel_entropy(rep, omega.as_operator()).value) < 1e-9);

  for (int m : {2, 3, 4}) {
    const HermitianOperator pim(Matrix::Identity(m, m) / double(m));
    const DivergenceReport r = channel_max_rel_entropy(identity_channel(m), pim);
    CHECK(r.value == doctest::Approx(2.0 * std::log(double(m))).epsilon(1e-10));
    CHECK(r.certificate == DivergenceReport::Certificate::exact);
  }

  // Sampled D_inf over pure inputs never exceeds the pencil value and reaches it.
  const ThermalContext ctx = two_level_bath();
  for (int i = 0; i < 5; ++i) {
    const Channel n = random_channel(2, 2, 2 + (i % 3), 8000 + i);
    const double formula = channel_max_rel_entropy(n, ctx.gamma.as_operator()).value;
    Rng rng(8100 + i);
    double best = -1e300;
    for (int s = 0; s < 500; ++s) {
      const Vector psi = random_unit_vector(4, rng);
      const Matrix joint = psi * psi.adjoint();
      const Matrix out = apply_with_reference(n, joint, 2);
      const Matrix sig = tensor_product(partial_trace(joint, {2, 2}, {0}), ctx.gamma.matrix());
      const double v = max_rel_entropy(out, sig);
      CHECK(v <= formula + 1e-8);
      best = std::max(best, v);
    }
    CHECK(best >= formula - 2e-2);
  }
}

TEST_CASE("channel max divergence is additive under tensor products") {
  const Channel n = random_channel(2, 2, 2, 8200);
  const Channel m = random_channel(2, 2, 3, 8201);
  const DensityMatrix w1 = random_density_matrix(2, 8202);
  const DensityMatrix w2 = random_density_matrix(2, 8203);
  const double dn = channel_max_rel_entropy(n, w1.as_operator()).value;
  const double dm = channel_max_rel_entropy(m, w2.as_operator()).value;
  const double dnm =
      channel_max_rel_entropy(tensor(n, m), tensor_product(w1, w2).as_operator()).value;
  CHECK(std::abs(dnm - dn - dm) < 1e-8);
}

TEST_CASE("channel_ht_rel_entropy: golden unit at eps 0, monotone in eps, max bound") {
  const HermitianOperator pi(Matrix::Identity(2, 2) / 2.0);
  SearchBudget budget;
  budget.restarts = 4;
  budget.max_iters = 250;
  const DivergenceReport r = channel_ht_rel_entropy(identity_channel(2), pi, 0.0, budget);
  CHECK(r.value == doctest::Approx(2 * kLn2).epsilon(1e-6));
  CHECK(r.certificate == DivergenceReport::Certificate::lower_bound);

  const ThermalContext ctx = two_level_bath();
  for (int i = 0; i < 3; ++i) {
    const Channel n = random_channel(2, 2, 2 + i, 9000 + i);
    const double v1 = channel_ht_rel_entropy(n, ctx.gamma.as_operator(), 0.05, budget).value;
    const double v2 = channel_ht_rel_entropy(n, ctx.gamma.as_operator(), 0.2, budget).value;
    CHECK(v1 <= v2 + 1e-9);

    const double dmax = channel_max_rel_entropy(n, ctx.gamma.as_operator()).value;
    CHECK(v1 <= dmax + std::log(1.0 / 0.95) + 1e-8);
  }
}

TEST_CASE("smoothed max divergence: degenerate ball, monotonicity, depolarizing bound") {
  const ThermalContext ctx = two_level_bath();
  const Channel n = random_channel(2, 2, 3, 9100);
  const double exact = channel_max_rel_entropy(n, ctx.gamma.as_operator()).value;
  const DivergenceReport at_zero = smoothed_channel_max_rel_entropy(n, ctx.gamma.as_operator(), 0.0);
  CHECK(std::abs(at_zero.value - exact) < 1e-6);

  double prev = exact;
  for (double eps : {0.05, 0.15, 0.3}) {
    const double v = smoothed_channel_max_rel_entropy(n, ctx.gamma.as_operator(), eps).value;
    CHECK(v <= prev + 1e-7);
    prev = v;
  }

  // One-parameter depolarized family gives an upper bound the SDP must not exceed:
  // (1-p) id + p R^pi stays within diamond distance 1.5 p and has pencil value 4 - 3p.
  const HermitianOperator pi(Matrix::Identity(2, 2) / 2.0);
  const double eps = 0.1;
  const double p_max = eps / 1.5;
  const double family_bound = std::log(4.0 - 3.0 * p_max);
  const DivergenceReport sm = smoothed_channel_max_rel_entropy(identity_channel(2), pi, eps);
  CHECK(sm.value <= family_bound + 1e-6);
  CHECK(sm.value >= 0.0);
  CHECK(sm.certificate == DivergenceReport::Certificate::upper_bound);
}

TEST_CASE("ordering chain at small eps") {
  const ThermalContext ctx = two_level_bath();
  SearchBudget budget;
  budget.restarts = 3;
  budget.max_iters = 200;
  for (int i = 0; i < 3; ++i) {
    const Channel n = random_channel(2, 2, 2 + i, 9300 + i);
    const double rel = channel_rel_entropy_replacer(n, ctx.gamma.as_operator(), fast_opts(i)).value;
    const double dmax = channel_max_rel_entropy(n, ctx.gamma.as_operator()).value;
    const double ht = channel_ht_rel_entropy(n, ctx.gamma.as_operator(), 1e-3, budget).value;
    CHECK(rel <= dmax + 1e-6);
    CHECK(ht <= dmax + std::log(1.0 / (1.0 - 1e-3)) + 1e-6);
  }
}
