#pragma once

// Branch-aware complex scalar functions.
//
// All roots use the principal determination with the cut on (-inf, 0]:
// sqrt(l) > 0 for l > 0. Points within kCutTolerance of the cut are rejected
// rather than resolved to one side.

#include "starkres/common.hpp"

namespace starkres {

inline constexpr double kCutTolerance = 1e-300;

enum class SectorTag {
  UpperHalf,     // Im z > 0
  LowerSector,   // -pi/3 < arg z < 0
  RealPositive,  // z in (0, inf)
  Other,
};

/// A spectral parameter together with its region classification.
struct SectorPoint {
  cplx zeta;
  SectorTag tag;

  static SectorPoint classify(cplx zeta);
};

bool on_cut(cplx z) noexcept;

/// True when -pi/3 + margin < arg z < -margin.
bool in_lower_sector(cplx z, double margin = 0.0) noexcept;

/// Principal square root; throws DomainError on the cut.
cplx principal_sqrt(cplx z);

/// Principal fourth root, arg in (-pi/4, pi/4); throws DomainError on the cut.
cplx quarter_root(cplx z);

/// rho^{3/2} with rho = -z, principal branch. Only defined in the lower
/// sector, where Re rho^{3/2} < 0.
cplx rho_three_halves(cplx z);

/// rho^{3/2} with rho = -z for any z with Im z < 0 (arg rho in (0, pi)).
/// Analytic in the open lower half-plane.
cplx rho_three_halves_lower(cplx z);

}  // namespace starkres
