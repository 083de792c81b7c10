#include <doctest.h>

#include <cmath>

#include "oracles/closed_forms.hpp"
#include "starkres/airy.hpp"
#include "starkres/branches.hpp"
#include "starkres/scattering.hpp"

using namespace starkres;

namespace {

const auto kInd = ProfileFunction::indicator(0.0, 1.0);
const auto kBump = ProfileFunction::polybump(0.0, 1.5, 2, {1.0, 0.0, 0.5});

PerturbationSpec rank_one(double c, const ProfileFunction& f = kInd) { return PerturbationSpec({{c, f}}); }
PerturbationSpec rank_two() { return PerturbationSpec({{-2.0, kInd}, {1.5, kBump}}); }

// Composite Simpson with one Richardson step, independent of the adaptive rule.
cplx simpson_richardson(const std::function<cplx(double)>& f, double a, double b, int n) {
  auto simpson = [&](int m) {
    const double h = (b - a) / m;
    cplx s = f(a) + f(b);
    for (int j = 1; j < m; ++j) s += (j % 2 ? 4.0 : 2.0) * f(a + j * h);
    return s * h / 3.0;
  };
  const cplx s1 = simpson(n), s2 = simpson(2 * n);
  return (16.0 * s2 - s1) / 15.0;
}

cplx secant(const std::function<cplx(cplx)>& f, cplx z0, cplx z1) {
  cplx f0 = f(z0), f1 = f(z1);
  for (int it = 0; it < 60 && std::abs(z1 - z0) > 1e-14 * std::abs(z1); ++it) {
    const cplx z2 = z1 - f1 * (z1 - z0) / (f1 - f0);
    z0 = z1;
    f0 = f1;
    z1 = z2;
    f1 = f(z1);
    if (f1 == cplx{}) break;
  }
  return z1;
}

CMatrix jump_residual(double eps, cplx zeta, const PerturbationSpec& spec) {
  const CMatrix qp = q_matrix(eps, zeta, Side::Plus, spec).entries;
  const CMatrix qm = q_matrix(eps, zeta, Side::Minus, spec).entries;
  const TraceMatrix ta = trace_matrix(eps, zeta, Factor::A, spec);
  const TraceMatrix tb = trace_adjoint_at_conj(eps, zeta, Factor::B, spec);
  return qp - qm - 2.0 * pi * I * tb.value() * ta.value();
}

}  // namespace

TEST_CASE("free trace matrix in closed form") {
  const TraceMatrix t = trace_matrix(0.0, 4.0, Factor::A, rank_one(-2.0));
  REQUIRE(t.entries.rows() == 2);
  REQUIRE(t.entries.cols() == 1);
  const double ref = std::sqrt(2.0 / pi) * std::sin(2.0) / 2.0 / 2.0;
  CHECK(std::abs(t.entries(0, 0) - ref) <= 1e-15);
  CHECK(std::abs(t.entries(1, 0) - ref) <= 1e-15);
  const TraceMatrix tb = trace_matrix(0.0, 4.0, Factor::B, rank_one(-2.0));
  CHECK(std::abs(tb.entries(0, 0) + 2.0 * ref) <= 1e-15);
  CHECK_THROWS_AS(trace_matrix(0.0, -1.0, Factor::A, rank_one(1.0)), DomainError);
}

TEST_CASE("Stark trace matrix") {
  const double eps = 0.5;
  const cplx zeta{1.0, -0.2};
  const TraceMatrix t = trace_matrix(eps, zeta, Factor::A, rank_two());
  REQUIRE(t.entries.rows() == 1);
  SUBCASE("independent Simpson quadrature of the defining integral") {
    const PerturbationSpec spec = rank_two();
    for (int k = 0; k < 2; ++k) {
      const ProfileFunction& f = spec.profile(k);
      const cplx ref = simpson_richardson([&](double x) { return airy::g_kernel(eps, zeta, x) * f.eval(x); },
                                          f.support_lo(), f.support_hi(), 400);
      CHECK(std::abs(t.value()(0, k) - ref) <= 1e-10 * std::abs(ref));
    }
  }
  SUBCASE("self-convergence under a tighter tolerance") {
    const TraceMatrix fine = trace_matrix(eps, zeta, Factor::A, rank_two(), QuadratureConfig{}.scaled(0.01));
    CHECK((fine.value() - t.value()).norm() <= 1e-10 * t.value().norm());
  }
  SUBCASE("adjoint path equals the direct path for real profiles") {
    const TraceMatrix adj = trace_adjoint_at_conj(eps, zeta, Factor::A, rank_two());
    CHECK((adj.value() - t.value().transpose()).norm() <= 1e-12 * t.value().norm());
  }
}

TEST_CASE("jump identity for both regimes") {
  for (double eps : {0.0, 0.5})
    for (cplx zeta : {cplx{0.9, -0.1}, cplx{1.5, 0.2}, cplx{2.0, -0.4}}) {
      CAPTURE(eps);
      CAPTURE(zeta);
      CHECK(jump_residual(eps, zeta, rank_one(-2.0)).norm() <= 1e-8);
      CHECK(jump_residual(eps, zeta, rank_two()).norm() <= 1e-8);
    }
}

TEST_CASE("plus matrix through the jump route") {
  for (double eps : {0.0, 0.5}) {
    const cplx zeta{2.0, -0.4};
    const CMatrix direct = q_matrix(eps, zeta, Side::Plus, rank_two()).entries;
    CHECK((q_plus_via_jump(eps, zeta, rank_two()) - direct).norm() <= 1e-8);
  }
}

TEST_CASE("S inverse recomposes from its parts") {
  for (double eps : {0.0, 0.5}) {
    const cplx zeta{1.2, -0.3};
    const PerturbationSpec spec = rank_two();
    const CMatrix s = s_inverse(eps, zeta, spec).entries();
    const CMatrix t = trace_matrix(eps, zeta, Factor::A, spec).value();
    const CMatrix tb = trace_adjoint_at_conj(eps, zeta, Factor::B, spec).value();
    const CMatrix gm = g_tilde(eps, zeta, Side::Minus, spec).entries;
    const CMatrix ref = CMatrix::Identity(s.rows(), s.cols()) + 2.0 * pi * I * t * gm.inverse() * tb;
    CHECK((s - ref).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("real-axis unitarity") {
  for (double eps : {0.0, 0.5})
    for (double lambda : {1.0, 2.0, 4.0})
      for (const PerturbationSpec& spec : {rank_one(-2.0), rank_two()}) {
        CAPTURE(eps);
        CAPTURE(lambda);
        const CMatrix s = s_matrix(eps, lambda, spec);
        const CMatrix si = s_inverse(eps, lambda, spec).entries();
        const auto n = s.rows();
        CHECK((s.adjoint() * s - CMatrix::Identity(n, n)).norm() <= 1e-8);
        CHECK((s * si - CMatrix::Identity(n, n)).norm() <= 1e-8);
      }
}

TEST_CASE("empty perturbation") {
  const PerturbationSpec empty;
  for (double eps : {0.0, 0.5}) {
    const auto n = eps == 0.0 ? 2 : 1;
    CHECK(s_matrix(eps, {1.5, -0.2}, empty) == CMatrix::Identity(n, n));
    CHECK(s_inverse(eps, {1.5, -0.2}, empty).entries() == CMatrix::Identity(n, n));
    CHECK(det_gtilde_plus(eps, {1.5, -0.2}, empty) == cplx{1.0});
  }
  CHECK(scaled_sinv_diagnostic(0.1, {1.5, -0.2}, empty) == cplx{0.0});
}

TEST_CASE("rank-one components") {
  SUBCASE("even profile gives a symmetric pattern") {
    const CMatrix m = rank_one_sinv_components({0.9, -0.1}, -2.0, kInd);
    CHECK(std::abs(m(0, 0) - m(1, 1)) <= 1e-14);
    CHECK(std::abs(m(0, 1) - m(1, 0)) <= 1e-14);
  }
  SUBCASE("agrees with the generic assembly") {
    for (const ProfileFunction& f : {kInd, kBump, ProfileFunction::polybump(0.2, 1.0, 1, {1.0, 1.5})}) {
      const cplx zeta{1.2, -0.3};
      const CMatrix m = rank_one_sinv_components(zeta, -2.0, f);
      const CMatrix s = s_inverse(0.0, zeta, rank_one(-2.0, f)).entries();
      CHECK((m - s).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("lower triangular at a zero of the transform") {
    const auto f = ProfileFunction::polybump(0.2, 1.0, 1, {1.0, 1.5});
    // Newton for a complex zero p0 of f^ near 5.25 - 0.9i; zeta0 = p0^2 is in the sector.
    cplx p{5.25, -0.9};
    for (int it = 0; it < 40; ++it) {
      const double h = 1e-6;
      const cplx d = (f.fourier_hat(p + h) - f.fourier_hat(p - h)) / (2 * h);
      p -= f.fourier_hat(p) / d;
    }
    const cplx zeta0 = p * p;
    REQUIRE(in_lower_sector(zeta0));
    REQUIRE(std::abs(f.fourier_hat(p)) <= 1e-13);
    const CMatrix m = rank_one_sinv_components(zeta0, -2.0, f);
    CHECK(std::abs(m(0, 0) - 1.0) <= 1e-12);
    CHECK(std::abs(m(1, 1) - 1.0) <= 1e-12);
    CHECK(std::abs(m(0, 1)) <= 1e-12);
    CHECK(std::abs(m(1, 0)) > 1e-3);
  }
  CHECK_THROWS_AS(rank_one_sinv_components({-1.0, -0.5}, 1.0, kInd), DomainError);
  CHECK_THROWS_AS(rank_one_sinv_components({1.0, 0.5}, 1.0, kInd), DomainError);
}

TEST_CASE("determinant of G tilde plus") {
  SUBCASE("closed form at zero field") {
    for (cplx zeta : {cplx{1.0, -0.5}, cplx{5.0, -1.0}, cplx{0.3, 0.2}})
      CHECK(std::abs(det_gtilde_plus(0.0, zeta, rank_one(-2.0)) - oracle::indicator_determinant(zeta, -2.0, 1.0)) <=
            1e-10);
  }
  SUBCASE("update form matches the direct determinant") {
    const PerturbationSpec spec = rank_two();
    for (cplx zeta : {cplx{1.0, -0.3}, cplx{2.0, 0.4}, cplx{3.0, -1.0}}) {
      const cplx direct = g_tilde(0.5, zeta, Side::Plus, spec).determinant();
      CHECK(std::abs(det_gtilde_plus(0.5, zeta, spec) - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
    }
  }
  SUBCASE("no zeros in the upper half-plane") {
    for (double re : {0.5, 2.0, 6.0})
      for (double im : {0.1, 1.0}) CHECK(std::abs(det_gtilde_plus(0.2, {re, im}, rank_two())) > 1e-3);
  }
  SUBCASE("indicator differs from the determinant by a zero-free factor") {
    const double eps = 0.1;
    const cplx zeta{2.0, -0.5};
    const Scaled d = det_gtilde_plus_scaled(eps, zeta, rank_one(-2.0));
    const cplx ratio = resonance_indicator(eps, zeta, rank_one(-2.0)) /
                       (d * Scaled::from_exp(4.0 * rho_three_halves_lower(zeta) / (3.0 * eps))).value();
    CHECK(std::abs(ratio - 1.0) <= 1e-12);
  }
}

TEST_CASE("poles of S sit at zeros of det G tilde plus") {
  const PerturbationSpec spec = rank_one(2.0);
  const cplx guess{5.32, -0.86};
  const cplx zero = secant([&](cplx z) { return det_gtilde_plus(0.0, z, spec); }, guess, guess + 1e-3);
  REQUIRE(in_lower_sector(zero));
  auto inv_s11 = [&](cplx z) -> cplx {
    try {
      return 1.0 / s_matrix(0.0, z, spec)(0, 0);
    } catch (const SingularMatrixError&) {
      return 0.0;
    }
  };
  const cplx pole = secant(inv_s11, guess, guess + cplx{0.0, 1e-3});
  CHECK(std::abs(pole - zero) <= 1e-8);
}

TEST_CASE("even rank-N trace rows coincide") {
  const PerturbationSpec spec = rank_two();
  for (cplx zeta : {cplx{0.9, -0.1}, cplx{3.0, -1.2}}) {
    const TraceRows r = trace_rows(zeta, spec);
    CHECK((r.r1 - r.r2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((r.s1 - r.s2).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("scaled diagnostic approaches its zero-field limit") {
  const PerturbationSpec spec = rank_one(-2.0, ProfileFunction::polybump(0.0, 1.0, 2, {1.0}));
  const cplx zeta{2.0, -0.5};
  const cplx target = scaled_sinv_diagnostic_limit(zeta, spec);
  REQUIRE(std::abs(target) > 1e-3);
  // Rank-one closed form of the limit.
  const cplx hat = spec.profile(0).fourier_hat(std::sqrt(zeta));
  const cplx g0 = 1.0 / g_tilde(0.0, zeta, Side::Minus, spec).entries(0, 0);
  CHECK(std::abs(target - pi * -2.0 / std::sqrt(zeta) * g0 * hat * hat) <= 1e-12);

  double prev = INFINITY;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const double dev = std::abs(scaled_sinv_diagnostic(eps, zeta, spec) / target - 1.0);
    CAPTURE(eps);
    CHECK(dev < prev);
    prev = dev;
    CHECK(std::abs(std::exp(4.0 * rho_three_halves(zeta) / (3.0 * eps))) < 1.0);
  }
  CHECK(prev <= 1e-2);
  CHECK_THROWS_AS(scaled_sinv_diagnostic(0.1, {1.0, 0.3}, spec), DomainError);
}
