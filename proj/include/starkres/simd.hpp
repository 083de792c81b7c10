#pragma once

// Runtime selection of the vector backend used by the batch Airy kernels.
//
// The default is the widest backend the CPU supports. STARKRES_SIMD=scalar|avx2
// in the environment (or --simd on the command line) overrides it. Every
// backend produces bit-identical results; the choice only affects speed.

#include <optional>
#include <string_view>

namespace starkres::simd {

enum class Backend { Scalar, Avx2 };

/// Compiled in and supported by this CPU.
bool available(Backend b) noexcept;

Backend active() noexcept;

/// Select a backend; returns false (and changes nothing) if unavailable.
bool set_active(Backend b) noexcept;

std::string_view name(Backend b) noexcept;
std::optional<Backend> parse(std::string_view s) noexcept;

}  // namespace starkres::simd
