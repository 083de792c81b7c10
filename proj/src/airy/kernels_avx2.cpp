// AVX2+FMA variants of the Airy batch kernels. Four complex points per
// iteration, structure-of-arrays. The operation sequence mirrors
// kernels_scalar.cpp exactly; finished lanes are frozen with blends so that
// each lane reproduces the scalar result bit for bit.

#include <immintrin.h>

#include <algorithm>
#include <cstring>

#include "airy/kernels.hpp"

namespace starkres::airy::kernels {

namespace {

struct VDD {
  __m256d hi;
  __m256d lo;
};

struct VCDD {
  VDD re;
  VDD im;
};

inline VDD two_sum(__m256d a, __m256d b) {
  const __m256d s = _mm256_add_pd(a, b);
  const __m256d bb = _mm256_sub_pd(s, a);
  const __m256d e = _mm256_add_pd(_mm256_sub_pd(a, _mm256_sub_pd(s, bb)), _mm256_sub_pd(b, bb));
  return {s, e};
}

inline VDD quick_two_sum(__m256d a, __m256d b) {
  const __m256d s = _mm256_add_pd(a, b);
  const __m256d e = _mm256_sub_pd(b, _mm256_sub_pd(s, a));
  return {s, e};
}

inline VDD two_prod(__m256d a, __m256d b) {
  const __m256d p = _mm256_mul_pd(a, b);
  const __m256d neg_p = _mm256_xor_pd(p, _mm256_set1_pd(-0.0));
  return {p, _mm256_fmadd_pd(a, b, neg_p)};
}

inline VDD add(VDD a, VDD b) {
  VDD s = two_sum(a.hi, b.hi);
  const VDD t = two_sum(a.lo, b.lo);
  s.lo = _mm256_add_pd(s.lo, t.hi);
  s = quick_two_sum(s.hi, s.lo);
  s.lo = _mm256_add_pd(s.lo, t.lo);
  return quick_two_sum(s.hi, s.lo);
}

inline __m256d vneg(__m256d a) { return _mm256_xor_pd(a, _mm256_set1_pd(-0.0)); }
inline VDD neg(VDD a) { return {vneg(a.hi), vneg(a.lo)}; }

inline VDD mul(VDD a, VDD b) {
  VDD p = two_prod(a.hi, b.hi);
  const __m256d cross = _mm256_add_pd(_mm256_mul_pd(a.hi, b.lo), _mm256_mul_pd(a.lo, b.hi));
  p.lo = _mm256_add_pd(p.lo, cross);
  return quick_two_sum(p.hi, p.lo);
}

inline VDD mul(VDD a, __m256d b) {
  VDD p = two_prod(a.hi, b);
  p.lo = _mm256_add_pd(p.lo, _mm256_mul_pd(a.lo, b));
  return quick_two_sum(p.hi, p.lo);
}

inline VDD div(VDD a, __m256d b) {
  const __m256d q1 = _mm256_div_pd(a.hi, b);
  const VDD p = two_prod(q1, b);
  VDD s = two_sum(a.hi, vneg(p.hi));
  s.lo = _mm256_sub_pd(s.lo, p.lo);
  s.lo = _mm256_add_pd(s.lo, a.lo);
  const __m256d q2 = _mm256_div_pd(_mm256_add_pd(s.hi, s.lo), b);
  return quick_two_sum(q1, q2);
}

inline VCDD add(const VCDD& a, const VCDD& b) { return {add(a.re, b.re), add(a.im, b.im)}; }

inline VCDD mul(const VCDD& a, const VCDD& b) {
  return {add(mul(a.re, b.re), neg(mul(a.im, b.im))), add(mul(a.re, b.im), mul(a.im, b.re))};
}

inline VCDD mul(const VCDD& a, VDD b) { return {mul(a.re, b), mul(a.im, b)}; }
inline VCDD mul(const VCDD& a, __m256d b) { return {mul(a.re, b), mul(a.im, b)}; }
inline VCDD div(const VCDD& a, __m256d b) { return {div(a.re, b), div(a.im, b)}; }

inline __m256d vabs(__m256d a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }
inline __m256d mag(const VCDD& a) { return _mm256_add_pd(vabs(a.re.hi), vabs(a.im.hi)); }

inline VDD blend(VDD old_v, VDD new_v, __m256d mask) {
  return {_mm256_blendv_pd(old_v.hi, new_v.hi, mask), _mm256_blendv_pd(old_v.lo, new_v.lo, mask)};
}
inline VCDD blend(const VCDD& old_v, const VCDD& new_v, __m256d mask) {
  return {blend(old_v.re, new_v.re, mask), blend(old_v.im, new_v.im, mask)};
}

inline VCDD step(const VCDD& term, const VCDD& z3, double denom) {
  return div(mul(term, z3), _mm256_set1_pd(denom));
}

void maclaurin_block(const double* zr, const double* zi, double* ai_r, double* ai_i, double* dai_r,
                     double* dai_i) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const VDD c1{_mm256_set1_pd(kAi0Hi), _mm256_set1_pd(kAi0Lo)};
  const VDD c2{_mm256_set1_pd(kMinusDAi0Hi), _mm256_set1_pd(kMinusDAi0Lo)};

  const VCDD z{{_mm256_loadu_pd(zr), zero}, {_mm256_loadu_pd(zi), zero}};
  const VCDD z2 = mul(z, z);
  const VCDD z3 = mul(z2, z);

  VCDD tf{{one, zero}, {zero, zero}};
  VCDD tg = z;
  VCDD tfp = mul(z2, _mm256_set1_pd(0.5));
  VCDD tgp{{one, zero}, {zero, zero}};
  VCDD f = tf, g = tg, fp{{zero, zero}, {zero, zero}}, gp = tgp;

  const __m256d tol = _mm256_set1_pd(kMaclaurinRelTol);
  __m256d active = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));

  for (int k = 1; k <= kMaxMaclaurinTerms; ++k) {
    const double kk = k;
    const VCDD ntf = step(tf, z3, (3 * kk) * (3 * kk - 1));
    const VCDD ntg = step(tg, z3, (3 * kk + 1) * (3 * kk));
    const VCDD ntfp = k >= 2 ? step(tfp, z3, 3 * (kk - 1) * (3 * kk - 1)) : tfp;
    const VCDD ntgp = step(tgp, z3, (3 * kk) * (3 * kk - 2));
    const VCDD nf = add(f, ntf);
    const VCDD ng = add(g, ntg);
    const VCDD nfp = add(fp, ntfp);
    const VCDD ngp = add(gp, ntgp);

    tf = blend(tf, ntf, active);
    tg = blend(tg, ntg, active);
    tfp = blend(tfp, ntfp, active);
    tgp = blend(tgp, ntgp, active);
    f = blend(f, nf, active);
    g = blend(g, ng, active);
    fp = blend(fp, nfp, active);
    gp = blend(gp, ngp, active);

    const __m256d term =
        _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(mag(ntf), mag(ntg)), mag(ntfp)), mag(ntgp));
    const __m256d acc =
        _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(mag(nf), mag(ng)), mag(nfp)), mag(ngp));
    const __m256d done = _mm256_cmp_pd(term, _mm256_mul_pd(tol, acc), _CMP_LE_OQ);
    active = _mm256_andnot_pd(done, active);
    if (_mm256_movemask_pd(active) == 0) break;
  }

  const VCDD ai = add(mul(f, c1), mul(g, neg(c2)));
  const VCDD dai = add(mul(fp, c1), mul(gp, neg(c2)));
  _mm256_storeu_pd(ai_r, _mm256_add_pd(ai.re.hi, ai.re.lo));
  _mm256_storeu_pd(ai_i, _mm256_add_pd(ai.im.hi, ai.im.lo));
  _mm256_storeu_pd(dai_r, _mm256_add_pd(dai.re.hi, dai.re.lo));
  _mm256_storeu_pd(dai_i, _mm256_add_pd(dai.im.hi, dai.im.lo));
}

void asymptotic_block(const double* trp, const double* tip, double* su_r, double* su_i,
                      double* sv_r, double* sv_i) {
  const AsymptoticTable& tab = asymptotic_table();
  const __m256d tr = _mm256_loadu_pd(trp);
  const __m256d ti = _mm256_loadu_pd(tip);
  const __m256d tol2 = _mm256_set1_pd(1e-34);
  __m256d pr = _mm256_set1_pd(1.0), pi_ = _mm256_setzero_pd();
  __m256d ur = pr, ui = pi_, vr = pr, vi = pi_;
  __m256d prev = _mm256_set1_pd(1.0);
  __m256d active = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));

  for (int k = 1; k <= kMaxAsymptoticTerms; ++k) {
    const __m256d nr = _mm256_sub_pd(_mm256_mul_pd(pr, tr), _mm256_mul_pd(pi_, ti));
    const __m256d ni = _mm256_add_pd(_mm256_mul_pd(pr, ti), _mm256_mul_pd(pi_, tr));
    const __m256d uk = _mm256_set1_pd(tab.u[k]);
    const __m256d vk = _mm256_set1_pd(tab.v[k]);
    const __m256d m = _mm256_mul_pd(_mm256_mul_pd(uk, uk),
                                    _mm256_add_pd(_mm256_mul_pd(nr, nr), _mm256_mul_pd(ni, ni)));
    const __m256d grows = _mm256_cmp_pd(m, prev, _CMP_GT_OQ);
    active = _mm256_andnot_pd(grows, active);

    pr = _mm256_blendv_pd(pr, nr, active);
    pi_ = _mm256_blendv_pd(pi_, ni, active);
    ur = _mm256_blendv_pd(ur, _mm256_add_pd(ur, _mm256_mul_pd(uk, nr)), active);
    ui = _mm256_blendv_pd(ui, _mm256_add_pd(ui, _mm256_mul_pd(uk, ni)), active);
    vr = _mm256_blendv_pd(vr, _mm256_add_pd(vr, _mm256_mul_pd(vk, nr)), active);
    vi = _mm256_blendv_pd(vi, _mm256_add_pd(vi, _mm256_mul_pd(vk, ni)), active);
    prev = _mm256_blendv_pd(prev, m, active);

    const __m256d norm_u = _mm256_add_pd(_mm256_mul_pd(ur, ur), _mm256_mul_pd(ui, ui));
    const __m256d small = _mm256_cmp_pd(m, _mm256_mul_pd(tol2, norm_u), _CMP_LT_OQ);
    active = _mm256_andnot_pd(small, active);
    if (_mm256_movemask_pd(active) == 0) break;
  }
  _mm256_storeu_pd(su_r, ur);
  _mm256_storeu_pd(su_i, ui);
  _mm256_storeu_pd(sv_r, vr);
  _mm256_storeu_pd(sv_i, vi);
}

template <class Block>
void run_blocked(Block block, const double* ar, const double* ai, std::size_t n, double pad_r,
                 double* o0, double* o1, double* o2, double* o3) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) block(ar + i, ai + i, o0 + i, o1 + i, o2 + i, o3 + i);
  if (i == n) return;
  const std::size_t rem = n - i;
  alignas(32) double in_r[4] = {pad_r, pad_r, pad_r, pad_r};
  alignas(32) double in_i[4] = {0.0, 0.0, 0.0, 0.0};
  alignas(32) double out[4][4];
  std::copy_n(ar + i, rem, in_r);
  std::copy_n(ai + i, rem, in_i);
  block(in_r, in_i, out[0], out[1], out[2], out[3]);
  std::copy_n(out[0], rem, o0 + i);
  std::copy_n(out[1], rem, o1 + i);
  std::copy_n(out[2], rem, o2 + i);
  std::copy_n(out[3], rem, o3 + i);
}

}  // namespace

void maclaurin_avx2(const double* zr, const double* zi, std::size_t n, double* ai_r, double* ai_i,
                    double* dai_r, double* dai_i) {
  run_blocked(maclaurin_block, zr, zi, n, 0.0, ai_r, ai_i, dai_r, dai_i);
}

void asymptotic_avx2(const double* tr, const double* ti, std::size_t n, double* su_r,
                     double* su_i, double* sv_r, double* sv_i) {
  run_blocked(asymptotic_block, tr, ti, n, 0.0, su_r, su_i, sv_r, sv_i);
}

}  // namespace starkres::airy::kernels
