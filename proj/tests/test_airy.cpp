#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "airy/kernels.hpp"
#include "oracles/series.hpp"
#include "starkres/airy.hpp"
#include "starkres/branches.hpp"
#include "starkres/simd.hpp"

using namespace starkres;
using namespace starkres::airy;

namespace {

struct RefRow {
  double zr, zi, air, aii, dair, daii, bir, bii, dbir, dbii;
};

const RefRow kReference[] = {
#include "oracles/airy_reference.inc"
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

std::vector<cplx> wronskian_grid() {
  // 200 points: 20 directions x 10 radii covering |z| <= 10.
  std::vector<cplx> g;
  for (int k = 0; k < 20; ++k) {
    const double th = -pi + (k + 0.25) * 2 * pi / 20;
    for (int j = 1; j <= 10; ++j) g.push_back(std::polar(j * 1.0, th));
  }
  return g;
}

}  // namespace

TEST_CASE("Ai(0) matches the series oracle") {
  const double ref = static_cast<double>(oracle::ai_zero());
  CHECK(std::abs(ai(0.0) - ref) <= 1e-12);
  CHECK(std::abs(ai(0.0) - 0.3550280538878172) <= 1e-16);
  CHECK(std::abs(ai_deriv(0.0) + 0.2588194037928068) <= 1e-16);
}

TEST_CASE("expansion coefficients") {
  CHECK(u_coefficient(0) == 1.0);
  CHECK(u_coefficient(1) == 5.0 / 72.0);
  CHECK(u_coefficient(2) == doctest::Approx(385.0 / 10368.0).epsilon(1e-15));
  CHECK_THROWS_AS(u_coefficient(max_asymptotic_terms() + 1), DomainError);
}

TEST_CASE("series region agrees with the long double oracle") {
  for (double r : {0.3, 1.0, 2.5, 4.0}) {
    for (int k = 0; k < 12; ++k) {
      const cplx z = std::polar(r, -pi + (k + 0.5) * pi / 6);
      const auto o = oracle::airy_series({z.real(), z.imag()});
      const cplx oa{static_cast<double>(o.ai.real()), static_cast<double>(o.ai.imag())};
      const cplx od{static_cast<double>(o.dai.real()), static_cast<double>(o.dai.imag())};
      CHECK(rel(ai(z), oa) <= 1e-13);
      CHECK(rel(ai_deriv(z), od) <= 1e-13);
    }
  }
}

TEST_CASE("reference table across all sectors up to |z| = 29") {
  for (const auto& r : kReference) {
    const cplx z{r.zr, r.zi};
    INFO("z = " << z);
    CHECK(rel(ai(z), {r.air, r.aii}) <= 1e-11);
    CHECK(rel(ai_deriv(z), {r.dair, r.daii}) <= 1e-11);
    CHECK(rel(bi(z), {r.bir, r.bii}) <= 1e-11);
    CHECK(rel(bi_deriv(z), {r.dbir, r.dbii}) <= 1e-11);
  }
}

TEST_CASE("Wronskian on 200 points with |z| <= 10") {
  double worst = 0, worst_literal = 0;
  for (cplx z : wronskian_grid()) {
    worst = std::max(worst, std::abs(wronskian(z) - 1.0 / pi));
    // The literal form is only good relative to the size of its two products.
    const cplx p1 = ai(z) * bi_deriv(z), p2 = ai_deriv(z) * bi(z);
    worst_literal = std::max(worst_literal, std::abs(p1 - p2 - 1.0 / pi) / (std::abs(p1) + std::abs(p2)));
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_literal <= 1e-13);
}

TEST_CASE("Airy equation by finite differences at z = -5") {
  const cplx z = -5.0;
  const double h = 1e-3;
  const cplx d2 = (-ai(z + 2 * h) + 16.0 * ai(z + h) - 30.0 * ai(z) + 16.0 * ai(z - h) - ai(z - 2 * h)) / (12 * h * h);
  CHECK(std::abs(d2 - z * ai(z)) <= 1e-8);
  CHECK(std::abs(ai(z) - 0.35076100902411431979) <= 1e-14);
}

TEST_CASE("Bi +- iAi combinations") {
  for (cplx z : {cplx{1.0, 0.5}, cplx{-7.0, 2.0}, cplx{12.0, -3.0}, cplx{-3.0, -9.0}}) {
    // Direct sums cancel where the combination is recessive; compare on the
    // scale of the summands.
    const double scale = std::abs(bi(z)) + std::abs(ai(z));
    CHECK(std::abs(bi_pm_iai(z, +1).value() - (bi(z) + I * ai(z))) <= 1e-13 * scale);
    CHECK(std::abs(bi_pm_iai(z, -1).value() - (bi(z) - I * ai(z))) <= 1e-13 * scale);
  }
}

TEST_CASE("scaled values survive far outside the double range") {
  const Scaled big = ai_scaled(cplx{-2000.0, 1500.0});
  CHECK(std::isfinite(big.log_abs()));
  CHECK(big.log_abs() > 800.0);
  CHECK_THROWS_AS(ai(cplx{-2000.0, 1500.0}), RangeError);
  // Leading-order magnitude: |Ai| ~ |exp(-xi)| / (2 sqrt(pi) |z|^{1/4}).
  const Scaled s = ai_scaled(cplx{300.0, 0.0});
  const cplx x300 = 2.0 / 3.0 * std::pow(300.0, 1.5);
  CHECK(s.log_abs() == doctest::Approx(-x300.real() - std::log(2 * std::sqrt(pi)) - 0.25 * std::log(300.0)).epsilon(1e-8));
}

TEST_CASE("no overlap-annulus disagreements on a sweep") {
  const std::size_t before = overlap_warning_count();
  for (int k = 0; k < 64; ++k) {
    for (double r : {8.1, 8.4, 8.79}) (void)ai_pair(std::polar(r, -pi + (k + 0.5) * pi / 32));
  }
  CHECK(overlap_warning_count() == before);
}

TEST_CASE("scalar and AVX2 kernels are bit-identical") {
  if (!simd::available(simd::Backend::Avx2)) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  namespace k = starkres::airy::kernels;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-9.0, 9.0);
  for (std::size_t n : {1u, 3u, 4u, 7u, 33u, 257u}) {
    std::vector<double> zr(n), zi(n);
    for (std::size_t i = 0; i < n; ++i) {
      zr[i] = u(rng);
      zi[i] = u(rng);
    }
    zr[0] = 0.0;
    zi[0] = 0.0;
    std::vector<double> a(4 * n), b(4 * n);
    k::maclaurin_scalar(zr.data(), zi.data(), n, &a[0], &a[n], &a[2 * n], &a[3 * n]);
    k::maclaurin_avx2(zr.data(), zi.data(), n, &b[0], &b[n], &b[2 * n], &b[3 * n]);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);

    // Expansion variable t = -1/xi for |z| between 8 and 40.
    for (std::size_t i = 0; i < n; ++i) {
      const cplx z = std::polar(8.0 + std::abs(u(rng)) * 3.5, u(rng) * 0.23);
      const cplx t = -1.0 / (2.0 / 3.0 * z * std::sqrt(z));
      zr[i] = t.real();
      zi[i] = t.imag();
    }
    k::asymptotic_scalar(zr.data(), zi.data(), n, &a[0], &a[n], &a[2 * n], &a[3 * n]);
    k::asymptotic_avx2(zr.data(), zi.data(), n, &b[0], &b[n], &b[2 * n], &b[3 * n]);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("public results do not depend on the backend") {
  if (!simd::available(simd::Backend::Avx2)) return;
  const simd::Backend saved = simd::active();
  std::vector<cplx> z;
  for (int k = 0; k < 50; ++k) z.push_back(std::polar(0.4 * k, 0.37 * k));
  std::vector<AiryPair> a(z.size()), b(z.size());
  REQUIRE(simd::set_active(simd::Backend::Scalar));
  ai_batch(z, a);
  REQUIRE(simd::set_active(simd::Backend::Avx2));
  ai_batch(z, b);
  simd::set_active(saved);
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(a[i].ai.mant == b[i].ai.mant);
    CHECK(a[i].ai.log_scale == b[i].ai.log_scale);
    CHECK(a[i].dai.mant == b[i].dai.mant);
  }
}

TEST_CASE("backend names") {
  CHECK(simd::parse("scalar") == simd::Backend::Scalar);
  CHECK(simd::parse("avx2") == simd::Backend::Avx2);
  CHECK_FALSE(simd::parse("neon").has_value());
  CHECK(simd::name(simd::Backend::Avx2) == "avx2");
  CHECK(simd::set_active(simd::Backend::Scalar));
  CHECK(simd::active() == simd::Backend::Scalar);
  simd::set_active(simd::available(simd::Backend::Avx2) ? simd::Backend::Avx2 : simd::Backend::Scalar);
}

// ---------------------------------------------------------------------------
// Stark kernel G(eps; zeta, x)

TEST_CASE("g_kernel basic values") {
  CHECK(std::abs(g_kernel(1.0, 0.0, 0.0) - static_cast<double>(oracle::ai_zero())) <= 1e-15);
  CHECK_THROWS_AS(g_kernel(0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(g_kernel(-1.0, 1.0, 0.0), DomainError);
  const AiryArgument a = AiryArgument::make(0.5, {2.0, -0.5}, 1.0);
  CHECK(std::abs(a.xi - 2.0 / 3.0 * a.omega * std::sqrt(a.omega)) <= 1e-15 * std::abs(a.xi));
  CHECK(a.rho == cplx{-2.0, 0.5});
}

TEST_CASE("g_kernel conjugation symmetry") {
  const cplx z{1.0, -0.4};
  CHECK(std::abs(std::conj(g_kernel(0.3, std::conj(z), 0.7)) - g_kernel(0.3, z, 0.7)) <= 1e-12);
  for (double eps : {0.01, 0.1, 1.0})
    for (double x : {-2.0, 0.0, 1.5}) {
      const cplx g = g_kernel(eps, z, x);
      CHECK(std::abs(std::conj(g_kernel(eps, std::conj(z), x)) - g) <= 1e-12 * std::max(1.0, std::abs(g)));
    }
}

TEST_CASE("g_kernel satisfies the Stark equation") {
  const double h = 1e-3;
  double worst = 0;
  for (double eps : {0.1, 0.5, 1.0}) {
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) {
        const cplx zeta = std::polar(0.5 + 0.6 * a, -pi / 3 * (b + 0.5) / 5);
        for (double x = -2.0; x <= 2.0; x += 0.5) {
          auto g = [&](double t) { return g_kernel(eps, zeta, t); };
          const cplx d2 = (-g(x + 2 * h) + 16.0 * g(x + h) - 30.0 * g(x) + 16.0 * g(x - h) - g(x - 2 * h)) / (12 * h * h);
          const cplx lhs = -d2 + (eps * x - zeta) * g(x);
          const double scale = std::abs(d2) + std::abs((eps * x - zeta) * g(x));
          worst = std::max(worst, std::abs(lhs) / scale);
        }
      }
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("asymptotic target and first-order coefficient") {
  const cplx t1 = g_asymptotic_target(1.0, 0.0);
  CHECK(std::abs(t1 - std::polar(1.0, -pi / 4) / (2 * std::sqrt(pi))) <= 1e-15);
  const cplx zeta = std::polar(1.0, -pi / 6);
  const cplx sq = principal_sqrt(zeta);
  CHECK(std::abs(g_asymptotic_target(zeta, 1.0)) ==
        doctest::Approx(std::exp(sq.imag()) / (2 * std::sqrt(pi) * std::abs(quarter_root(zeta)))).epsilon(1e-14));
  const cplx rho = -zeta;
  CHECK(std::abs(g_first_order_coeff(zeta, 0.0) + 5.0 / 48.0 / rho_three_halves(zeta)) <= 1e-15);
  CHECK_THROWS_AS(g_asymptotic_target({1.0, 0.5}, 0.0), DomainError);
  CHECK_THROWS_AS(g_first_order_coeff(std::polar(1.0, -1.2), 0.0), DomainError);
}

TEST_CASE("scaled kernel approaches the target at rate eps") {
  const cplx zeta = std::polar(1.0, -pi / 6);
  const cplx r32 = rho_three_halves(zeta);
  for (double x : {-1.0, 0.0, 1.0}) {
    std::vector<double> le, lr;
    for (double eps : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
      const Scaled g = g_kernel_scaled(eps, zeta, x) * Scaled::from_exp(2.0 * r32 / (3.0 * eps));
      const cplx ratio = g.value() / g_asymptotic_target(zeta, x);
      le.push_back(std::log(eps));
      lr.push_back(std::log(std::abs(ratio - 1.0)));
      CHECK(std::abs((ratio - 1.0) / eps - g_first_order_coeff(zeta, x)) <= 0.1 * std::abs(g_first_order_coeff(zeta, x)) + 10 * eps);
    }
    // Least-squares slope.
    const double n = le.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < le.size(); ++i) {
      sx += le[i];
      sy += lr[i];
      sxx += le[i] * le[i];
      sxy += le[i] * lr[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    INFO("x = " << x);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.1));
  }
}
