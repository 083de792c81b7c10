#pragma once

// Free resolvent kernels (eps = 0 and the Stark case eps > 0), their
// continuations from either half-plane, and the matrices
//   Q_kl = c_k <psi_k, R0 psi_l>,   G~ = 1 + Q.

#include <Eigen/Dense>
#include <span>

#include "starkres/common.hpp"
#include "starkres/model.hpp"
#include "starkres/quadrature.hpp"
#include "starkres/scaled.hpp"

namespace starkres {

/// Continuation from the upper (Plus) or lower (Minus) half-plane.
enum class Side { Plus, Minus };

const char* side_name(Side s) noexcept;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// eps = 0 kernel i e^{ik|x-y|}/(2k), k = sqrt(zeta) (Plus) or -sqrt(zeta) (Minus).
/// Throws DomainError when zeta is on (-inf, 0].
cplx free_kernel(cplx zeta, Side side, double x, double y);

/// eps > 0 kernel pi eps^{-1/3} Ai(w(x>)) [Bi +- iAi](w(x<)),
/// w(t) = eps^{1/3} t - eps^{-2/3} zeta. Entire in zeta.
Scaled stark_kernel_scaled(double epsilon, cplx zeta, Side side, double x, double y);
cplx stark_kernel(double epsilon, cplx zeta, Side side, double x, double y);

/// Batch kernel K(x, ys) for either regime (eps == 0 selects the free one).
/// Values outside the double range raise RangeError.
BatchKernel resolvent_kernel(double epsilon, cplx zeta, Side side);

/// <f, R0 g> = int int f(x) K(x, y) g(y) dy dx for real profiles.
cplx free_pairing(double epsilon, cplx zeta, Side side, const ProfileFunction& f, const ProfileFunction& g,
                  const QuadratureConfig& cfg = {});

struct QMatrix {
  double epsilon = 0.0;
  cplx zeta;
  Side side = Side::Plus;
  CMatrix entries;
  double error = 0.0;  // sum of quadrature error estimates
};

struct GTilde {
  double epsilon = 0.0;
  cplx zeta;
  Side side = Side::Plus;
  CMatrix entries;

  /// det of an empty matrix is 1.
  cplx determinant() const;
};

QMatrix q_matrix(double epsilon, cplx zeta, Side side, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});
GTilde g_tilde(double epsilon, cplx zeta, Side side, const PerturbationSpec& spec, const QuadratureConfig& cfg = {});
GTilde g_tilde(const QMatrix& q);

/// Inverse with a reciprocal condition estimate taken relative to the
/// identity scale, 1 / (|M^{-1}|_1 max(1, |M|_1)); throws SingularMatrixError
/// below min_rcond.
struct Inverse {
  CMatrix inverse;
  double rcond = 1.0;
};
Inverse checked_inverse(const CMatrix& m, double min_rcond = 1e-14);

struct ResolventElement {
  cplx value;
  double rcond;  // reciprocal condition estimate of G~
};

/// <f, R(zeta) g> continued from the given side, through
///   R = R0 - R0 B* G~^{-1} A R0.
ResolventElement full_resolvent_matrix_element(double epsilon, cplx zeta, Side side, const ProfileFunction& f,
                                               const ProfileFunction& g, const PerturbationSpec& spec,
                                               const QuadratureConfig& cfg = {});

}  // namespace starkres
