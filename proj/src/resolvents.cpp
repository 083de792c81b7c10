#include "starkres/resolvents.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "starkres/airy.hpp"
#include "starkres/branches.hpp"

namespace starkres {

namespace {

const cplx kRotPlus = std::polar(1.0, 2.0 * pi / 3.0);
const cplx kRotMinus = std::polar(1.0, -2.0 * pi / 3.0);

cplx free_momentum(cplx zeta, Side side) {
  const cplx k = principal_sqrt(zeta);
  return side == Side::Plus ? k : -k;
}

cplx finite_or_throw(const Scaled& s) {
  const cplx v = s.value();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw RangeError("resolvent kernel value outside the double range");
  return v;
}

// pi eps^{-1/3} Ai(w>) * 2 e^{+-i pi/6} Ai(w< e^{+-2 pi i/3}) for one x and many y.
struct StarkBatch {
  double epsilon;
  cplx zeta;
  Side side;

  void operator()(double x, std::span<const double> ys, std::span<Scaled> out) const {
    const cplx rot = side == Side::Plus ? kRotPlus : kRotMinus;
    const cplx phase = 2.0 * std::polar(1.0, side == Side::Plus ? pi / 6.0 : -pi / 6.0);
    const double pref = pi / std::cbrt(epsilon);
    const std::size_t n = ys.size();
    thread_local std::vector<cplx> w;
    thread_local std::vector<airy::AiryPair> a;
    w.resize(n + 2);
    a.resize(n + 2);
    const cplx wx = airy::stark_argument(epsilon, zeta, x);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx wy = airy::stark_argument(epsilon, zeta, ys[i]);
      w[i] = ys[i] < x ? wy * rot : wy;
    }
    w[n] = wx;
    w[n + 1] = wx * rot;
    airy::ai_batch(w, a);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = ys[i] < x ? a[n].ai * a[i].ai * (pref * phase) : a[i].ai * a[n + 1].ai * (pref * phase);
    }
  }
};

}  // namespace

const char* side_name(Side s) noexcept { return s == Side::Plus ? "plus" : "minus"; }

cplx free_kernel(cplx zeta, Side side, double x, double y) {
  const cplx k = free_momentum(zeta, side);
  return I * std::exp(I * k * std::abs(x - y)) / (2.0 * k);
}

Scaled stark_kernel_scaled(double epsilon, cplx zeta, Side side, double x, double y) {
  if (!(epsilon > 0.0)) throw DomainError("stark_kernel needs a positive field strength");
  Scaled out;
  StarkBatch{epsilon, zeta, side}(x, std::span<const double>(&y, 1), std::span<Scaled>(&out, 1));
  return out;
}

cplx stark_kernel(double epsilon, cplx zeta, Side side, double x, double y) {
  return finite_or_throw(stark_kernel_scaled(epsilon, zeta, side, x, y));
}

BatchKernel resolvent_kernel(double epsilon, cplx zeta, Side side) {
  if (epsilon < 0.0 || !std::isfinite(epsilon)) throw DomainError("field strength must be non-negative");
  if (epsilon == 0.0) {
    const cplx k = free_momentum(zeta, side);
    const cplx pref = I / (2.0 * k);
    return [k, pref](double x, std::span<const double> ys, std::span<cplx> out) {
      for (std::size_t i = 0; i < ys.size(); ++i) out[i] = pref * std::exp(I * k * std::abs(x - ys[i]));
    };
  }
  return [batch = StarkBatch{epsilon, zeta, side}](double x, std::span<const double> ys, std::span<cplx> out) {
    thread_local std::vector<Scaled> s;
    s.resize(ys.size());
    batch(x, ys, s);
    for (std::size_t i = 0; i < ys.size(); ++i) out[i] = finite_or_throw(s[i]);
  };
}

namespace {

QuadratureResult pairing_result(const BatchKernel& k, const ProfileFunction& f, const ProfileFunction& g,
                                const QuadratureConfig& cfg) {
  // The kernel has a derivative jump on x = y for every eps (it is a Green's
  // function), so the diagonal split is always on.
  return integrate_2d_kink(
      [&](double x, std::span<const double> ys, std::span<cplx> out) {
        k(x, ys, out);
        const double fx = f.eval(x);
        for (std::size_t i = 0; i < ys.size(); ++i) out[i] *= fx * g.eval(ys[i]);
      },
      {f.support_lo(), f.support_hi()}, {g.support_lo(), g.support_hi()}, true, cfg);
}

}  // namespace

cplx free_pairing(double epsilon, cplx zeta, Side side, const ProfileFunction& f, const ProfileFunction& g,
                  const QuadratureConfig& cfg) {
  return pairing_result(resolvent_kernel(epsilon, zeta, side), f, g, cfg).value;
}

QMatrix q_matrix(double epsilon, cplx zeta, Side side, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  const std::size_t n = spec.rank();
  QMatrix q{epsilon, zeta, side, CMatrix::Zero(n, n), 0.0};
  if (n == 0) return q;
  const BatchKernel k = resolvent_kernel(epsilon, zeta, side);
  // <psi_k, R0 psi_l> is symmetric in (k, l) because K(x, y) = K(y, x).
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const QuadratureResult r = pairing_result(k, spec.profile(a), spec.profile(b), cfg);
      q.entries(a, b) = spec.coupling(a) * r.value;
      q.entries(b, a) = spec.coupling(b) * r.value;
      q.error += r.error * (std::abs(spec.coupling(a)) + (a == b ? 0.0 : std::abs(spec.coupling(b))));
    }
  }
  return q;
}

cplx GTilde::determinant() const {
  if (entries.size() == 0) return 1.0;
  return entries.determinant();
}

GTilde g_tilde(const QMatrix& q) {
  const auto n = q.entries.rows();
  return {q.epsilon, q.zeta, q.side, CMatrix::Identity(n, n) + q.entries};
}

GTilde g_tilde(double epsilon, cplx zeta, Side side, const PerturbationSpec& spec, const QuadratureConfig& cfg) {
  return g_tilde(q_matrix(epsilon, zeta, side, spec, cfg));
}

Inverse checked_inverse(const CMatrix& m, double min_rcond) {
  if (m.size() == 0) return {m, 1.0};
  const Eigen::PartialPivLU<CMatrix> lu(m);
  // G~ = 1 + Q has a natural unit scale, so a uniformly small matrix counts
  // as singular too (plain rcond would call a tiny 1x1 matrix perfect).
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  const double rc = lu.rcond() * std::min(1.0, norm1);
  if (!(rc >= min_rcond)) throw SingularMatrixError("matrix is numerically singular", rc > 0 ? 1.0 / rc : INFINITY);
  return {lu.inverse(), rc};
}

ResolventElement full_resolvent_matrix_element(double epsilon, cplx zeta, Side side, const ProfileFunction& f,
                                               const ProfileFunction& g, const PerturbationSpec& spec,
                                               const QuadratureConfig& cfg) {
  const BatchKernel k = resolvent_kernel(epsilon, zeta, side);
  const cplx base = pairing_result(k, f, g, cfg).value;
  const std::size_t n = spec.rank();
  if (n == 0) return {base, 1.0};

  const Inverse inv = checked_inverse(g_tilde(epsilon, zeta, side, spec, cfg).entries);
  // A = (c_k <psi_k, .>)_k and B* e_l = psi_l, so that Q = A R0 B*.
  CVector row(n), col(n);
  for (std::size_t a = 0; a < n; ++a) {
    row(a) = pairing_result(k, f, spec.profile(a), cfg).value;
    col(a) = spec.coupling(a) * pairing_result(k, spec.profile(a), g, cfg).value;
  }
  return {base - (row.transpose() * inv.inverse * col)(0, 0), inv.rcond};
}

}  // namespace starkres
