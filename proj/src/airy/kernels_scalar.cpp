// Scalar reference kernels. Compiled with -ffp-contract=off so that the
// arithmetic sequence matches the AVX2 variant operation for operation.

#include <cmath>

#include "airy/dd.hpp"
#include "airy/kernels.hpp"

namespace starkres::airy::kernels {

const AsymptoticTable& asymptotic_table() {
  static const AsymptoticTable table = [] {
    AsymptoticTable t;
    t.u[0] = 1.0;
    t.v[0] = 1.0;
    for (int k = 1; k <= kMaxAsymptoticTerms; ++k) {
      const double kk = k;
      t.u[k] = t.u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
      t.v[k] = -(6 * kk + 1) / (6 * kk - 1) * t.u[k];
    }
    return t;
  }();
  return table;
}

namespace {

using dd::CDD;
using dd::DD;

double mag(const CDD& a) { return std::fabs(a.re.hi) + std::fabs(a.im.hi); }

CDD step(const CDD& term, const CDD& z3, double denom) { return dd::div(dd::mul(term, z3), denom); }

}  // namespace

void maclaurin_scalar(const double* zr, const double* zi, std::size_t n, double* ai_r,
                      double* ai_i, double* dai_r, double* dai_i) {
  const DD c1{kAi0Hi, kAi0Lo};
  const DD c2{kMinusDAi0Hi, kMinusDAi0Lo};
  for (std::size_t i = 0; i < n; ++i) {
    const CDD z{{zr[i], 0.0}, {zi[i], 0.0}};
    const CDD z2 = dd::mul(z, z);
    const CDD z3 = dd::mul(z2, z);

    // f = sum 3^k (1/3)_k z^{3k}/(3k)!,  g = sum 3^k (2/3)_k z^{3k+1}/(3k+1)!
    CDD tf{{1.0, 0.0}, {0.0, 0.0}};
    CDD tg = z;
    CDD tfp = dd::mul(z2, 0.5);
    CDD tgp{{1.0, 0.0}, {0.0, 0.0}};
    CDD f = tf, g = tg, fp{}, gp = tgp;

    for (int k = 1; k <= kMaxMaclaurinTerms; ++k) {
      const double kk = k;
      tf = step(tf, z3, (3 * kk) * (3 * kk - 1));
      tg = step(tg, z3, (3 * kk + 1) * (3 * kk));
      if (k >= 2) tfp = step(tfp, z3, 3 * (kk - 1) * (3 * kk - 1));
      tgp = step(tgp, z3, (3 * kk) * (3 * kk - 2));
      f = dd::add(f, tf);
      g = dd::add(g, tg);
      fp = dd::add(fp, tfp);
      gp = dd::add(gp, tgp);
      const double term = ((mag(tf) + mag(tg)) + mag(tfp)) + mag(tgp);
      const double acc = ((mag(f) + mag(g)) + mag(fp)) + mag(gp);
      if (term <= kMaclaurinRelTol * acc) break;
    }

    const CDD ai = dd::add(dd::mul(f, c1), dd::mul(g, dd::neg(c2)));
    const CDD dai = dd::add(dd::mul(fp, c1), dd::mul(gp, dd::neg(c2)));
    ai_r[i] = ai.re.hi + ai.re.lo;
    ai_i[i] = ai.im.hi + ai.im.lo;
    dai_r[i] = dai.re.hi + dai.re.lo;
    dai_i[i] = dai.im.hi + dai.im.lo;
  }
}

void asymptotic_scalar(const double* tr, const double* ti, std::size_t n, double* su_r,
                       double* su_i, double* sv_r, double* sv_i) {
  const AsymptoticTable& tab = asymptotic_table();
  constexpr double kTol2 = 1e-34;  // (1e-17)^2
  for (std::size_t i = 0; i < n; ++i) {
    double pr = 1.0, pi_ = 0.0;  // t^k
    double ur = 1.0, ui = 0.0;
    double vr = 1.0, vi = 0.0;
    double prev = 1.0;
    for (int k = 1; k <= kMaxAsymptoticTerms; ++k) {
      const double nr = pr * tr[i] - pi_ * ti[i];
      const double ni = pr * ti[i] + pi_ * tr[i];
      const double uk = tab.u[k];
      const double m = (uk * uk) * (nr * nr + ni * ni);
      if (m > prev) break;
      pr = nr;
      pi_ = ni;
      ur = ur + uk * pr;
      ui = ui + uk * pi_;
      vr = vr + tab.v[k] * pr;
      vi = vi + tab.v[k] * pi_;
      prev = m;
      if (m < kTol2 * (ur * ur + ui * ui)) break;
    }
    su_r[i] = ur;
    su_i[i] = ui;
    sv_r[i] = vr;
    sv_i[i] = vi;
  }
}

}  // namespace starkres::airy::kernels
