#include "starkres/scattering.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "starkres/airy.hpp"
#include "starkres/branches.hpp"

namespace starkres {

namespace {

constexpr cplx kTwoPiI{0.0, 2.0 * pi};

Eigen::Index channels(double epsilon) { return epsilon == 0.0 ? 2 : 1; }

void check_epsilon(double epsilon) {
  if (epsilon < 0.0 || !std::isfinite(epsilon)) throw DomainError("field strength must be non-negative");
}

// Phi_k(zeta) = int G(eps; zeta, x) psi_k(x) dx, normalised by G at the
// centre of the support so that the quadrature sees O(1) values.
Scaled stark_trace(double epsilon, cplx zeta, const ProfileFunction& f, const QuadratureConfig& cfg) {
  double ref = airy::g_kernel_scaled(epsilon, zeta, f.center()).log_abs();
  if (!std::isfinite(ref)) ref = 0.0;
  const QuadratureResult r = integrate_1d(
      [&](std::span<const double> xs, std::span<cplx> out) {
        thread_local std::vector<Scaled> g;
        g.resize(xs.size());
        airy::g_kernel_batch(epsilon, zeta, xs, g);
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = g[i].relative_to(ref) * f.eval(xs[i]);
      },
      f.support_lo(), f.support_hi(), cfg);
  return {r.value, ref};
}

// conj-hat of a real profile at p: (2 pi)^{-1/2} int e^{-ipx} conj(psi(x)) dx.
cplx conj_hat(const ProfileFunction& f, cplx p) { return std::conj(f.fourier_hat(-std::conj(p))); }

cplx collapse(const Scaled& s) {
  const cplx v = s.value();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw RangeError("scaled value outside the double range");
  return v;
}

// u G~_-^{-1} v for eps > 0, together with det G~_- and the log scale of u v.
struct RankOneUpdate {
  cplx det_minus;
  cplx w;
  double log_scale;
};

RankOneUpdate rank_one_update(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  const TraceMatrix u = trace_matrix(epsilon, zeta, Factor::A, spec, cfg);
  const TraceMatrix v = trace_adjoint_at_conj(epsilon, zeta, Factor::B, spec, cfg);
  const GTilde gm = g_tilde(epsilon, zeta, Side::Minus, spec, cfg);
  const Eigen::PartialPivLU<CMatrix> lu(gm.entries);
  const cplx w = (u.entries * lu.solve(v.entries))(0, 0);
  return {lu.determinant(), w, u.log_scale + v.log_scale};
}

}  // namespace

TraceMatrix trace_matrix(double epsilon, cplx zeta, Factor which, const PerturbationSpec& spec,
                         const QuadratureConfig& cfg) {
  check_epsilon(epsilon);
  const auto n = static_cast<Eigen::Index>(spec.rank());
  TraceMatrix t{epsilon, zeta, which, CMatrix::Zero(channels(epsilon), n), 0.0};
  if (n == 0) return t;

  if (epsilon == 0.0) {
    const cplx k = principal_sqrt(zeta);
    const cplx norm = 1.0 / (std::sqrt(2.0) * quarter_root(zeta));
    for (Eigen::Index j = 0; j < n; ++j) {
      const ProfileFunction& f = spec.profile(j);
      const double c = which == Factor::B ? spec.coupling(j) : 1.0;
      t.entries(0, j) = c * norm * f.fourier_hat(k);
      t.entries(1, j) = c * norm * f.fourier_hat(-k);
    }
    return t;
  }

  std::vector<Scaled> phi(n);
  double scale = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    phi[j] = stark_trace(epsilon, zeta, spec.profile(j), cfg);
    scale = std::max(scale, phi[j].log_scale);
  }
  t.log_scale = scale;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double c = which == Factor::B ? spec.coupling(j) : 1.0;
    t.entries(0, j) = c * phi[j].relative_to(scale);
  }
  return t;
}

TraceMatrix trace_adjoint_at_conj(double epsilon, cplx zeta, Factor which, const PerturbationSpec& spec,
                                  const QuadratureConfig& cfg) {
  const TraceMatrix t = trace_matrix(epsilon, std::conj(zeta), which, spec, cfg);
  return {epsilon, zeta, which, t.entries.adjoint(), t.log_scale};
}

CMatrix SMatrixInv::entries() const {
  const auto d = correction.rows();
  if (correction.size() == 0) return CMatrix::Identity(d, d);
  CMatrix out = CMatrix::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) += collapse(Scaled{correction(i, j), log_scale});
  return out;
}

SMatrixInv s_inverse(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  check_epsilon(epsilon);
  const Eigen::Index d = channels(epsilon);
  SMatrixInv s{epsilon, zeta, CMatrix::Zero(d, d), 0.0, 1.0};
  if (spec.empty()) return s;
  const TraceMatrix ta = trace_matrix(epsilon, zeta, Factor::A, spec, cfg);
  const TraceMatrix tb = trace_adjoint_at_conj(epsilon, zeta, Factor::B, spec, cfg);
  const Inverse inv = checked_inverse(g_tilde(epsilon, zeta, Side::Minus, spec, cfg).entries);
  s.correction = kTwoPiI * ta.entries * inv.inverse * tb.entries;
  s.log_scale = ta.log_scale + tb.log_scale;
  s.rcond = inv.rcond;
  return s;
}

CMatrix s_matrix(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  check_epsilon(epsilon);
  const Eigen::Index d = channels(epsilon);
  if (spec.empty()) return CMatrix::Identity(d, d);
  GTilde gp;
  try {
    gp = g_tilde(epsilon, zeta, Side::Plus, spec, cfg);
  } catch (const RangeError&) {
    // Deep in the sector the plus kernel overflows; there S is the scalar
    // reciprocal of S^{-1}, which stays representable.
    if (epsilon == 0.0) throw;
    const CMatrix sinv = s_inverse(epsilon, zeta, spec, cfg).entries();
    if (std::abs(sinv(0, 0)) == 0.0) throw SingularMatrixError("S^{-1} vanishes", INFINITY);
    return CMatrix::Constant(1, 1, 1.0 / sinv(0, 0));
  }
  const TraceMatrix ta = trace_matrix(epsilon, zeta, Factor::A, spec, cfg);
  const TraceMatrix tb = trace_adjoint_at_conj(epsilon, zeta, Factor::B, spec, cfg);
  const Inverse inv = checked_inverse(gp.entries);
  const CMatrix corr = -kTwoPiI * ta.entries * inv.inverse * tb.entries;
  CMatrix out = CMatrix::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) += collapse(Scaled{corr(i, j), ta.log_scale + tb.log_scale});
  return out;
}

CMatrix rank_one_sinv_components(cplx zeta, double coupling, const ProfileFunction& profile,
                                 const QuadratureConfig& cfg) {
  if (!(zeta.real() > 0.0) || zeta.imag() > 0.0)
    throw DomainError("rank-one components need Re zeta > 0 and Im zeta <= 0");
  const PerturbationSpec spec({{coupling, profile}});
  const cplx q = q_matrix(0.0, zeta, Side::Minus, spec, cfg).entries(0, 0);
  if (std::abs(1.0 + q) == 0.0) throw SingularMatrixError("1 + Q_-^0 vanishes", INFINITY);
  const cplx g = 1.0 / (1.0 + q);
  const cplx k = principal_sqrt(zeta);
  const cplx pref = I * pi * coupling / k * g;
  const cplx hp = profile.fourier_hat(k), hm = profile.fourier_hat(-k);
  const cplx bp = conj_hat(profile, k), bm = conj_hat(profile, -k);
  CMatrix m(2, 2);
  m << 1.0 + pref * hp * bm, pref * hp * bp, pref * hm * bm, 1.0 + pref * hm * bp;
  return m;
}

Scaled det_gtilde_plus_scaled(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  check_epsilon(epsilon);
  if (spec.empty()) return Scaled{1.0};
  if (epsilon == 0.0) return Scaled{g_tilde(0.0, zeta, Side::Plus, spec, cfg).determinant()};
  // det(G_- + 2 pi i v u) = det G_- (1 + 2 pi i u G_-^{-1} v).
  const RankOneUpdate r = rank_one_update(epsilon, zeta, spec, cfg);
  return Scaled{r.det_minus} * (Scaled{1.0} + Scaled{kTwoPiI * r.w, r.log_scale});
}

cplx det_gtilde_plus(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  return collapse(det_gtilde_plus_scaled(epsilon, zeta, spec, cfg));
}

cplx resonance_indicator(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  check_epsilon(epsilon);
  if (epsilon == 0.0 || spec.empty()) return det_gtilde_plus(epsilon, zeta, spec, cfg);
  if (!(zeta.imag() < 0.0)) throw DomainError("the balanced indicator needs Im zeta < 0");
  const Scaled balance = Scaled::from_exp(4.0 * rho_three_halves_lower(zeta) / (3.0 * epsilon));
  return collapse(det_gtilde_plus_scaled(epsilon, zeta, spec, cfg) * balance);
}

cplx scaled_sinv_diagnostic(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  if (!(epsilon > 0.0)) throw DomainError("the scaled diagnostic needs a positive field strength");
  if (!in_lower_sector(zeta)) throw DomainError("the scaled diagnostic needs zeta in the lower sector");
  if (spec.empty()) return 0.0;
  const SMatrixInv s = s_inverse(epsilon, zeta, spec, cfg);
  const Scaled factor = Scaled::from_exp(4.0 * rho_three_halves(zeta) / (3.0 * epsilon));
  return collapse(Scaled{s.correction(0, 0), s.log_scale} * factor);
}

TraceRows trace_rows(cplx zeta, const PerturbationSpec& spec) {
  const cplx norm = std::sqrt(2.0) * quarter_root(zeta);
  const TraceMatrix ta = trace_matrix(0.0, zeta, Factor::A, spec);
  const TraceMatrix tb = trace_adjoint_at_conj(0.0, zeta, Factor::B, spec);
  return {ta.entries.row(0).transpose() * norm, ta.entries.row(1).transpose() * norm, tb.entries.col(0) * norm,
          tb.entries.col(1) * norm};
}

cplx scaled_sinv_diagnostic_limit(cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  if (spec.empty()) return 0.0;
  const TraceRows rows = trace_rows(zeta, spec);
  const Inverse inv = checked_inverse(g_tilde(0.0, zeta, Side::Minus, spec, cfg).entries);
  const cplx rgs = (rows.r1.transpose() * inv.inverse * rows.s2)(0, 0);
  return pi / principal_sqrt(zeta) * rgs;
}

CMatrix q_plus_via_jump(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  const QMatrix qm = q_matrix(epsilon, zeta, Side::Minus, spec, cfg);
  if (spec.empty()) return qm.entries;
  const TraceMatrix ta = trace_matrix(epsilon, zeta, Factor::A, spec, cfg);
  const TraceMatrix tb = trace_adjoint_at_conj(epsilon, zeta, Factor::B, spec, cfg);
  const CMatrix jump = kTwoPiI * tb.entries * ta.entries;
  CMatrix out = qm.entries;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += collapse(Scaled{jump(i, j), ta.log_scale + tb.log_scale});
  return out;
}

}  // namespace starkres
