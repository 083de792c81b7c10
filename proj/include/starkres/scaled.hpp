#pragma once

#include <cmath>
#include <limits>

#include "starkres/common.hpp"

namespace starkres {

/// Complex number stored as mantissa * exp(log_scale).
///
/// Used wherever Airy-type factors over- or underflow a double; products add
/// log scales, and only balanced final quantities are collapsed with value().
struct Scaled {
  cplx mant{0.0, 0.0};
  double log_scale = 0.0;

  Scaled() = default;
  Scaled(cplx m, double s = 0.0) : mant(m), log_scale(s) {}

  /// factor * exp(exponent), keeping Re(exponent) in the scale.
  static Scaled from_exp(cplx exponent, cplx factor = 1.0) {
    return {factor * std::polar(1.0, exponent.imag()), exponent.real()};
  }

  cplx value() const { return mant * std::exp(log_scale); }

  /// log |value|; -inf for zero.
  double log_abs() const {
    const double a = std::abs(mant);
    return a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a) + log_scale;
  }

  /// Value multiplied by exp(-s); s is usually a common reference scale.
  cplx relative_to(double s) const { return mant * std::exp(log_scale - s); }

  /// Absorb |mant| into the scale so that |mant| == 1 (or mant == 0).
  Scaled normalized() const {
    const double a = std::abs(mant);
    if (a == 0.0 || !std::isfinite(a)) return *this;
    return {mant / a, log_scale + std::log(a)};
  }

  friend Scaled operator*(const Scaled& a, const Scaled& b) {
    return {a.mant * b.mant, a.log_scale + b.log_scale};
  }
  friend Scaled operator*(const Scaled& a, cplx b) { return {a.mant * b, a.log_scale}; }
  friend Scaled operator*(cplx b, const Scaled& a) { return {a.mant * b, a.log_scale}; }

  friend Scaled operator+(const Scaled& a, const Scaled& b) {
    if (a.mant == cplx{}) return b;
    if (b.mant == cplx{}) return a;
    const double s = std::max(a.log_scale, b.log_scale);
    return {a.relative_to(s) + b.relative_to(s), s};
  }
  friend Scaled operator-(const Scaled& a, const Scaled& b) { return a + Scaled{-b.mant, b.log_scale}; }
};

}  // namespace starkres
