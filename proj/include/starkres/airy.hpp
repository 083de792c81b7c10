#pragma once

// Complex Airy functions and the Stark eigenfunction kernel
//   G(eps; zeta, x) = eps^{-1/6} Ai(eps^{1/3} x - eps^{-2/3} zeta).
//
// Evaluation: Maclaurin series (double-double) for |z| <= kSeriesRadius,
// the large-argument expansion in xi = (2/3) z^{3/2} beyond, with the
// connection formula covering |arg z| > 2pi/3. Values that would leave the
// double range are available in Scaled form.

#include <cstddef>
#include <functional>
#include <span>

#include "starkres/common.hpp"
#include "starkres/scaled.hpp"

namespace starkres::airy {

inline constexpr double kSeriesRadius = 8.0;
/// Outer radius of the overlap annulus where both methods are cross-checked.
inline constexpr double kOverlapRadius = 8.8;
/// Relative disagreement in the annulus that triggers an accuracy warning.
inline constexpr double kOverlapTolerance = 1e-10;

/// Coefficient u_k of the large-argument expansion (u_0 = 1, u_1 = 5/72).
double u_coefficient(int k);
int max_asymptotic_terms();

struct AiryPair {
  Scaled ai;
  Scaled dai;
};

/// Ai and Ai' at every z, in Scaled form. Uses the active SIMD backend.
void ai_batch(std::span<const cplx> z, std::span<AiryPair> out);
AiryPair ai_pair(cplx z);

// Plain values. Throw RangeError when the result is not a finite double.
cplx ai(cplx z);
cplx ai_deriv(cplx z);
cplx bi(cplx z);
cplx bi_deriv(cplx z);

Scaled ai_scaled(cplx z);
Scaled bi_scaled(cplx z);

/// Bi(z) + i Ai(z) (sign = +1) or Bi(z) - i Ai(z) (sign = -1), computed as a
/// single rotated Ai so it stays accurate where Bi and Ai differ in size.
Scaled bi_pm_iai(cplx z, int sign);

/// Ai Bi' - Ai' Bi, evaluated as W(Ai, Bi +- iAi) with the sign giving the
/// smaller combination. The two forms are algebraically identical; the
/// literal one cancels catastrophically where |Ai| and |Bi| are both large.
cplx wronskian(cplx z);

/// Number of overlap-annulus disagreements seen so far (process-wide).
std::size_t overlap_warning_count();

/// Called on every overlap disagreement with z and the relative difference.
/// Pass an empty function to restore the default (silent counting).
void set_overlap_handler(std::function<void(cplx, double)> handler);

/// The triple (omega, xi, rho) for given field strength, energy and position.
struct AiryArgument {
  cplx omega;
  cplx xi;   // (2/3) omega^{3/2}, principal branch
  cplx rho;  // -zeta

  static AiryArgument make(double epsilon, cplx zeta, double x);
};

/// eps^{1/3} x - eps^{-2/3} zeta.
cplx stark_argument(double epsilon, cplx zeta, double x);

/// G(eps; zeta, x). Throws DomainError for eps <= 0, RangeError when the value
/// is outside the double range (use g_kernel_scaled then).
cplx g_kernel(double epsilon, cplx zeta, double x);
Scaled g_kernel_scaled(double epsilon, cplx zeta, double x);
void g_kernel_batch(double epsilon, cplx zeta, std::span<const double> x, std::span<Scaled> out);

/// Small-field limit of G * exp(2 rho^{3/2} / (3 eps)):
///   exp(-x rho^{1/2}) / (2 sqrt(pi) rho^{1/4}),  rho = -zeta.
/// zeta must lie in the closed sector -pi/3 <= arg zeta <= 0, zeta != 0.
cplx g_asymptotic_target(cplx zeta, double x);

/// First-order correction c1 in G * exp(2 rho^{3/2}/(3 eps)) / target = 1 + c1 eps + O(eps^2):
///   c1 = -(1/4) (x^2 / rho^{1/2} + x / rho + 6 u_1 / rho^{3/2}).
cplx g_first_order_coeff(cplx zeta, double x);

}  // namespace starkres::airy
