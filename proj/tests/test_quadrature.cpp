#include <doctest.h>

#include <cmath>

#include "oracles/closed_forms.hpp"
#include "oracles/series.hpp"
#include "starkres/airy.hpp"
#include "starkres/quadrature.hpp"

using namespace starkres;

namespace {

BatchKernel exp_abs_kernel(cplx k) {
  return [k](double x, std::span<const double> ys, std::span<cplx> out) {
    for (std::size_t i = 0; i < ys.size(); ++i) out[i] = std::exp(I * k * std::abs(x - ys[i]));
  };
}

}  // namespace

TEST_CASE("config validation") {
  QuadratureConfig c;
  CHECK(c.abs_tol == 1e-11);
  CHECK(c.rel_tol == 1e-11);
  CHECK(c.max_depth == 30);
  CHECK(c.order == 15);
  CHECK_NOTHROW(c.validate());
  c.abs_tol = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = {};
  c.max_depth = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = {};
  c.order = 21;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("one-dimensional closed forms") {
  const auto r1 = integrate_1d([](double x) -> cplx { return x; }, 0.0, 1.0);
  CHECK(std::abs(r1.value - 0.5) <= 1e-15);
  const auto r2 = integrate_1d([](double x) { return std::exp(3.0 * I * x); }, -1.0, 1.0);
  const cplx exact = 2.0 * std::sin(3.0) / 3.0;
  CHECK(std::abs(r2.value - exact) <= 1e-11);
  CHECK(std::abs(r2.value - exact) <= std::max(r2.error, 1e-15));
  CHECK(integrate_1d([](double) -> cplx { return 1.0; }, 2.0, 2.0).value == cplx{});
}

TEST_CASE("integral of Ai against the termwise series oracle") {
  const auto r = integrate_1d([](double x) { return airy::ai(x); }, -1.0, 1.0);
  const double ref = static_cast<double>(oracle::ai_integral(-1.0L, 1.0L));
  CHECK(std::abs(r.value - ref) <= 1e-10);
}

TEST_CASE("kink-aware double integrals") {
  const auto one = integrate_2d_kink(
      [](double, std::span<const double> ys, std::span<cplx> out) {
        for (std::size_t i = 0; i < ys.size(); ++i) out[i] = 1.0;
      },
      {-1, 1}, {-1, 1}, true);
  CHECK(std::abs(one.value - 4.0) <= 1e-13);

  const auto r = integrate_2d_kink(exp_abs_kernel(I), {-1, 1}, {-1, 1}, true);
  const double exact = 2.0 * (1.0 + std::exp(-2.0));
  CHECK(std::abs(r.value - exact) <= 1e-10);
  CHECK(std::abs(r.value - exact) <= r.error);

  const cplx k{2.0, 0.1};
  const auto r2 = integrate_2d_kink(exp_abs_kernel(k), {-1, 1}, {-1, 1}, true);
  const cplx exact2 = oracle::exp_abs_square(k, 2.0);
  CHECK(std::abs(r2.value - exact2) <= 1e-10);
  CHECK(std::abs(r2.value - exact2) <= r2.error);
}

TEST_CASE("overlapping supports split the outer integral") {
  // X = [0, 2], Y = [-1, 1]: int_0^1 int_{-1}^{1} + int_1^2 int_{-1}^{1} of e^{ik|x-y|}.
  const cplx k{1.5, 0.3};
  const auto r = integrate_2d_kink(exp_abs_kernel(k), {0, 2}, {-1, 1}, true);
  // Reference by inclusion-exclusion on squares of the closed form:
  // [0,1]x[-1,1] part + [1,2]x[-1,1] part, computed with a fine brute-force sum.
  const auto ref = integrate_1d(
      [&](double x) {
        // inner integral in closed form: int_{-1}^{1} e^{ik|x-y|} dy
        auto prim = [&](double d) { return (std::exp(I * k * d) - 1.0) / (I * k); };  // int_0^d e^{iku} du
        if (x >= 1.0) return std::exp(I * k * (x - 1.0)) * prim(2.0);
        return prim(x + 1.0) + prim(1.0 - x);
      },
      0.0, 2.0);
  CHECK(std::abs(r.value - ref.value) <= 1e-10);
}

TEST_CASE("tighter tolerances do not increase the error") {
  const cplx k{2.0, 0.1};
  const cplx exact = oracle::exp_abs_square(k, 2.0);
  double prev = 1.0;
  for (double tol : {1e-6, 1e-8, 1e-10, 1e-12}) {
    QuadratureConfig c;
    c.abs_tol = c.rel_tol = tol;
    const auto r = integrate_2d_kink(exp_abs_kernel(k), {-1, 1}, {-1, 1}, true, c);
    const double err = std::abs(r.value - exact);
    CHECK(err <= std::max(prev, 1e-14));
    CHECK(err <= r.error);
    prev = err;
  }
  prev = 1.0;
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
    QuadratureConfig c;
    c.abs_tol = c.rel_tol = tol;
    const auto r = integrate_1d([](double x) { return std::exp(7.0 * I * x) * std::sqrt(x + 1.0); }, -1.0, 1.0, c);
    const auto ref = integrate_1d([](double x) { return std::exp(7.0 * I * x) * std::sqrt(x + 1.0); }, -1.0, 1.0,
                                  QuadratureConfig{1e-13, 1e-13});
    const double err = std::abs(r.value - ref.value);
    CHECK(err <= std::max(prev, 1e-14));
    CHECK(err <= r.error);
    prev = err;
  }
}

TEST_CASE("non-convergence carries the best estimate") {
  QuadratureConfig c;
  c.max_depth = 2;
  try {
    (void)integrate_1d([](double x) -> cplx { return 1.0 / std::sqrt(std::abs(x) + 1e-12); }, -1.0, 1.0, c);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(std::abs(e.best().value) > 1.0);
    CHECK(e.best().error > 0.0);
  }
}
