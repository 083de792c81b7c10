#pragma once

// Trace operators, scattering matrices and resonance indicators.
//
// Trace matrices T(zeta; A) have 2 rows at eps = 0 (the two momenta
// +-sqrt(zeta)) and one row at eps > 0. The eps > 0 entries grow like
// exp(-2 rho^{3/2}/(3 eps)), so they carry a common natural-log scale.

#include "starkres/resolvents.hpp"

namespace starkres {

enum class Factor { A, B };

struct TraceMatrix {
  double epsilon = 0.0;
  cplx zeta;
  Factor which = Factor::A;
  CMatrix entries;  // rows x N
  double log_scale = 0.0;

  CMatrix value() const { return entries * std::exp(log_scale); }
};

/// T(zeta; A) or T(zeta; B) = T(zeta; A) diag(c).
///   eps = 0: column k = (psi_k^(sqrt zeta), psi_k^(-sqrt zeta))^T / (sqrt 2 zeta^{1/4})
///   eps > 0: column k = Phi_k(zeta) = int G(eps; zeta, x) psi_k(x) dx
TraceMatrix trace_matrix(double epsilon, cplx zeta, Factor which, const PerturbationSpec& spec,
                         const QuadratureConfig& cfg = {});

/// T(conj zeta; which)^*, formed literally: evaluate at conj(zeta), then take
/// the conjugate transpose. Result is N x rows.
TraceMatrix trace_adjoint_at_conj(double epsilon, cplx zeta, Factor which, const PerturbationSpec& spec,
                                  const QuadratureConfig& cfg = {});

/// S(zeta)^{-1} = 1 + 2 pi i T(zeta; A) G~_-^{-1} T(conj zeta; B)^*, stored as
/// identity + correction * exp(log_scale).
struct SMatrixInv {
  double epsilon = 0.0;
  cplx zeta;
  CMatrix correction;
  double log_scale = 0.0;
  double rcond = 1.0;

  CMatrix entries() const;
  Eigen::Index dim() const { return correction.rows(); }
};

/// Throws SingularMatrixError when G~_- is singular (zeta is then a candidate
/// pole of S^{-1}).
SMatrixInv s_inverse(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});

/// S(zeta) = 1 - 2 pi i T(zeta; A) G~_+^{-1} T(conj zeta; B)^*.
/// Throws SingularMatrixError at zeros of det G~_+ (resonances).
CMatrix s_matrix(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});

/// The four components of S^0(zeta)^{-1} for a rank-one perturbation written
/// out through psi^(+-sqrt zeta) and G_-^0 = (1 + Q_-^0)^{-1}. Requires
/// Re zeta > 0, Im zeta <= 0.
CMatrix rank_one_sinv_components(cplx zeta, double coupling, const ProfileFunction& profile,
                                 const QuadratureConfig& cfg = {});

/// det G~_+(zeta). At eps > 0 this is det G~_- (1 + 2 pi i u G~_-^{-1} v), the
/// rank-one update form, because G~_+ itself overflows in the sector.
Scaled det_gtilde_plus_scaled(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});
cplx det_gtilde_plus(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});

/// Zero-preserving rescaling used for root finding:
///   eps = 0: det G~_+^0(zeta)
///   eps > 0: det G~_+(zeta) exp(4 rho^{3/2} / (3 eps)), Im zeta < 0,
/// analytic in the lower half-plane and O(1) in the sector.
cplx resonance_indicator(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});

/// exp(4 rho^{3/2}/(3 eps)) (S(zeta)^{-1} - 1) for eps > 0, zeta in the lower sector.
cplx scaled_sinv_diagnostic(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});

/// Small-field limit of the diagnostic: (pi / sqrt zeta) r1 G_-^0 s2, which
/// for rank one is (pi c / sqrt zeta) G_-^0 psi^(sqrt zeta)^2.
cplx scaled_sinv_diagnostic_limit(cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});

/// Rows r1, r2 of sqrt(2) zeta^{1/4} T^0(zeta; A) and columns s1, s2 of
/// sqrt(2) zeta^{1/4} T^0(conj zeta; B)^*.
struct TraceRows {
  CVector r1, r2, s1, s2;
};
TraceRows trace_rows(cplx zeta, const PerturbationSpec& spec);

/// Cross-check route for the continued plus matrix:
///   Q_+ = Q_- + 2 pi i T(conj zeta; B)^* T(zeta; A).
/// Only usable where both trace factors fit in a double.
CMatrix q_plus_via_jump(double epsilon, cplx zeta, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});

}  // namespace starkres
