#pragma once

// Independent Airy oracle: plain Maclaurin summation in long double with the
// constants taken from the gamma function. Only meant for moderate |z|
// (cancellation grows like exp(2|xi|)).

#include <cmath>
#include <complex>

namespace oracle {

using lcplx = std::complex<long double>;

struct AiryValues {
  lcplx ai, dai;
};

inline AiryValues airy_series(lcplx z) {
  const long double c1 = std::pow(3.0L, -2.0L / 3.0L) / std::tgamma(2.0L / 3.0L);
  const long double c2 = std::pow(3.0L, -1.0L / 3.0L) / std::tgamma(1.0L / 3.0L);
  // f = sum a_n z^n over n = 0 mod 3, g over n = 1 mod 3, with a_{n+3} = a_n / ((n+2)(n+3)).
  if (z == lcplx{0}) return {c1, -c2};
  lcplx f = 0, g = 0, fp = 0, gp = 0;
  lcplx tf = 1, tg = z;  // current terms
  for (int k = 0; k < 400; ++k) {
    const long double n = 3.0L * k;
    f += tf;
    g += tg;
    if (k > 0) fp += tf * n / z;
    gp += tg * (n + 1) / z;
    const lcplx z3 = z * z * z;
    tf *= z3 / ((n + 2) * (n + 3));
    tg *= z3 / ((n + 3) * (n + 4));
    if (std::abs(tf) + std::abs(tg) < 1e-24L * (std::abs(f) + std::abs(g)) && k > 3) break;
  }
  return {c1 * f - c2 * g, c1 * fp - c2 * gp};
}

inline long double ai_zero() { return std::pow(3.0L, -2.0L / 3.0L) / std::tgamma(2.0L / 3.0L); }

}  // namespace oracle

namespace oracle {

/// int_a^b Ai(x) dx by termwise integration of the Maclaurin series.
inline long double ai_integral(long double a, long double b) {
  const long double c1 = std::pow(3.0L, -2.0L / 3.0L) / std::tgamma(2.0L / 3.0L);
  const long double c2 = std::pow(3.0L, -1.0L / 3.0L) / std::tgamma(1.0L / 3.0L);
  // Coefficients a_n of f (n = 3k) and g (n = 3k + 1).
  long double af = 1, ag = 1, sum = 0;
  for (int k = 0; k < 60; ++k) {
    const int nf = 3 * k, ng = 3 * k + 1;
    sum += c1 * af * (std::pow(b, nf + 1) - std::pow(a, nf + 1)) / (nf + 1);
    sum -= c2 * ag * (std::pow(b, ng + 1) - std::pow(a, ng + 1)) / (ng + 1);
    af /= (nf + 2.0L) * (nf + 3.0L);
    ag /= (ng + 2.0L) * (ng + 3.0L);
  }
  return sum;
}

}  // namespace oracle
