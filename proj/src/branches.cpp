#include "starkres/branches.hpp"

#include <cmath>

namespace starkres {

SectorPoint SectorPoint::classify(cplx zeta) {
  SectorTag tag = SectorTag::Other;
  if (zeta.imag() > 0.0) {
    tag = SectorTag::UpperHalf;
  } else if (zeta.imag() == 0.0 && zeta.real() > 0.0) {
    tag = SectorTag::RealPositive;
  } else if (in_lower_sector(zeta)) {
    tag = SectorTag::LowerSector;
  }
  return {zeta, tag};
}

bool on_cut(cplx z) noexcept {
  return std::abs(z.imag()) <= kCutTolerance && z.real() <= kCutTolerance;
}

bool in_lower_sector(cplx z, double margin) noexcept {
  if (!(z.imag() < 0.0) || !(z.real() > 0.0)) return false;
  const double a = std::arg(z);
  return a > -pi / 3.0 + margin && a < -margin;
}

cplx principal_sqrt(cplx z) {
  if (on_cut(z)) throw DomainError("principal_sqrt: argument on the cut (-inf, 0]");
  // Normalise a signed zero imaginary part so that real positive input stays real.
  if (z.imag() == 0.0) return {std::sqrt(z.real()), 0.0};
  return std::sqrt(z);
}

cplx quarter_root(cplx z) {
  if (on_cut(z)) throw DomainError("quarter_root: argument on the cut (-inf, 0]");
  return principal_sqrt(principal_sqrt(z));
}

cplx rho_three_halves(cplx z) {
  if (!in_lower_sector(z))
    throw DomainError("rho_three_halves: argument outside -pi/3 < arg z < 0");
  return rho_three_halves_lower(z);
}

cplx rho_three_halves_lower(cplx z) {
  if (!(z.imag() < 0.0))
    throw DomainError("rho_three_halves_lower: requires Im z < 0");
  const cplx rho = -z;
  return rho * std::sqrt(rho);
}

}  // namespace starkres
