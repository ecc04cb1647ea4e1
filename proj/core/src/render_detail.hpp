// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rowsplat/half.hpp"
#include "rowsplat/image.hpp"
#include "rowsplat/pfs_blend.hpp"

#include <cmath>

namespace rowsplat::detail {

// Arithmetic policies. The shade/skip decision is always made on a double
// exponent so the shaded fragment set cannot differ across precisions or
// dataflows; the policy governs the alpha/blend arithmetic only.

struct ArithFp32 {
  using Real = float;
  static constexpr bool kSequentialRow = false;
  static Real round(Real x) { return x; }
};

struct ArithFp64 {
  using Real = double;
  static constexpr bool kSequentialRow = false;
  static Real round(Real x) { return x; }
};

// Models the row PE number format: every arithmetic result is rounded to
// binary16, and row state advances by true sequential increments.
struct ArithFp16 {
  using Real = float;
  static constexpr bool kSequentialRow = true;
  static Real round(Real x) { return round_to_half(x); }
};

template <class F>
decltype(auto) dispatch_precision(Precision precision, F&& f) {
  switch (precision) {
    case Precision::kFp64Accum:
      return f(ArithFp64{});
    case Precision::kFp16Emulated:
      return f(ArithFp16{});
    case Precision::kFp32:
    default:
      return f(ArithFp32{});
  }
}

template <class A>
typename A::Real alpha_from_exponent(typename A::Real q, float opacity,
                                     const RenderConfig& config) {
  using R = typename A::Real;
  const R e = A::round(std::exp(A::round(static_cast<R>(-0.5) * q)));
  const R a = A::round(static_cast<R>(opacity) * e);
  return std::min(a, static_cast<R>(config.alpha_clamp));
}

/// Blends one fragment into a pixel. Returns true when the fragment was
/// actually accumulated (transmittance still above the stop threshold).
template <class A>
bool blend_fragment(ImageBuffer& image, std::size_t pixel, typename A::Real alpha,
                    const Eigen::Vector3f& color, const RenderConfig& config) {
  using R = typename A::Real;
  const R t = static_cast<R>(image.transmittance[pixel]);
  if (t < static_cast<R>(config.transmittance_stop)) {
    return false;
  }
  const R w = A::round(t * alpha);
  double* rgb = image.rgb.data() + 3 * pixel;
  rgb[0] = A::round(static_cast<R>(rgb[0]) + A::round(w * static_cast<R>(color[0])));
  rgb[1] = A::round(static_cast<R>(rgb[1]) + A::round(w * static_cast<R>(color[1])));
  rgb[2] = A::round(static_cast<R>(rgb[2]) + A::round(w * static_cast<R>(color[2])));
  image.transmittance[pixel] = A::round(t * A::round(static_cast<R>(1) - alpha));
  return true;
}

// Direct quadratic-form exponent at the requested type.
template <class T>
T exponent_direct_value(T px, T py, const Splat2D& s) {
  const T dx = px - static_cast<T>(s.mean2d[0]);
  const T dy = py - static_cast<T>(s.mean2d[1]);
  const T a = static_cast<T>(s.inv_cov2d(0, 0));
  const T b = static_cast<T>(s.inv_cov2d(0, 1));
  const T c = static_cast<T>(s.inv_cov2d(1, 1));
  return dx * (a * dx + b * dy) + dy * (b * dx + c * dy);
}

inline constexpr std::uint64_t kDirectExponentFlops = 11;
inline constexpr std::uint64_t kSharedExponentFlops = 2;
inline constexpr std::uint64_t kTransform1ExponentFlops = 3;
inline constexpr std::uint64_t kBlendFlops = 9;

}  // namespace rowsplat::detail
