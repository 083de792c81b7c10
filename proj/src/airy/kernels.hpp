#pragma once

// Batch inner loops of the Airy evaluator. Each kernel has a scalar reference
// implementation and (on x86-64) an AVX2+FMA variant; the active variant is
// chosen once at runtime (see starkres/simd.hpp). Arrays are structure-of-
// arrays and must not alias.

#include <array>
#include <cstddef>

namespace starkres::airy::kernels {

/// Truncation order of the large-argument expansion.
inline constexpr int kMaxAsymptoticTerms = 20;

/// Hard cap on Maclaurin iterations (reached only for |z| well beyond the
/// series radius the evaluator uses).
inline constexpr int kMaxMaclaurinTerms = 90;

/// Coefficients u_k and v_k of the large-argument expansions (k = 0..Kmax).
struct AsymptoticTable {
  std::array<double, kMaxAsymptoticTerms + 1> u{};
  std::array<double, kMaxAsymptoticTerms + 1> v{};
};
const AsymptoticTable& asymptotic_table();

/// Ai(z) and Ai'(z) by Maclaurin series summed in double-double arithmetic.
using MaclaurinFn = void (*)(const double* zr, const double* zi, std::size_t n, double* ai_r,
                             double* ai_i, double* dai_r, double* dai_i);

/// Truncated sums S_u = sum u_k t^k and S_v = sum v_k t^k for t = -1/xi,
/// stopped per element at the smallest term (or at Kmax).
using AsymptoticFn = void (*)(const double* tr, const double* ti, std::size_t n, double* su_r,
                              double* su_i, double* sv_r, double* sv_i);

void maclaurin_scalar(const double* zr, const double* zi, std::size_t n, double* ai_r,
                      double* ai_i, double* dai_r, double* dai_i);
void asymptotic_scalar(const double* tr, const double* ti, std::size_t n, double* su_r,
                       double* su_i, double* sv_r, double* sv_i);

#if defined(STARKRES_HAVE_AVX2)
void maclaurin_avx2(const double* zr, const double* zi, std::size_t n, double* ai_r,
                    double* ai_i, double* dai_r, double* dai_i);
void asymptotic_avx2(const double* tr, const double* ti, std::size_t n, double* su_r,
                     double* su_i, double* sv_r, double* sv_i);
#endif

struct KernelTable {
  MaclaurinFn maclaurin;
  AsymptoticFn asymptotic;
};

/// Kernels for the currently selected backend.
const KernelTable& active();

// Ai(0) and -Ai'(0) as double-double (hi, lo) pairs.
inline constexpr double kAi0Hi = 0.3550280538878172;
inline constexpr double kAi0Lo = 2.05233632436212e-17;
inline constexpr double kMinusDAi0Hi = 0.2588194037928068;
inline constexpr double kMinusDAi0Lo = -2.522243111610832e-17;

// Per-element stopping thresholds shared by all backends.
inline constexpr double kMaclaurinRelTol = 7.7e-34;  // ~2^-110

}  // namespace starkres::airy::kernels
