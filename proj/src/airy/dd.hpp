#pragma once

// Minimal double-double arithmetic (hi + lo, ~106-bit significand) for the
// Maclaurin Airy kernel. Only the operations the kernel needs.
//
// Every product uses std::fma so that the scalar kernel and the AVX2 kernel
// round identically.

#include <cmath>

namespace starkres::airy::dd {

struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  const double e = b - (s - a);
  return {s, e};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  const DD t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD neg(DD a) { return {-a.hi, -a.lo}; }

inline DD mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DD mul(DD a, double b) {
  DD p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

inline DD div(DD a, double b) {
  const double q1 = a.hi / b;
  const DD p = two_prod(q1, b);
  DD s = two_sum(a.hi, -p.hi);
  s.lo -= p.lo;
  s.lo += a.lo;
  const double q2 = (s.hi + s.lo) / b;
  return quick_two_sum(q1, q2);
}

struct CDD {
  DD re;
  DD im;
};

inline CDD add(CDD a, CDD b) { return {add(a.re, b.re), add(a.im, b.im)}; }

inline CDD mul(CDD a, CDD b) {
  return {add(mul(a.re, b.re), neg(mul(a.im, b.im))), add(mul(a.re, b.im), mul(a.im, b.re))};
}

inline CDD mul(CDD a, double b) { return {mul(a.re, b), mul(a.im, b)}; }
inline CDD mul(CDD a, DD b) { return {mul(a.re, b), mul(a.im, b)}; }
inline CDD div(CDD a, double b) { return {div(a.re, b), div(a.im, b)}; }

}  // namespace starkres::airy::dd
