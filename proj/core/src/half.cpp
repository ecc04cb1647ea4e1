// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/half.hpp"

#include <bit>
#include <cstring>

namespace rowsplat {

std::uint16_t float_to_half_bits(float value) {
  const std::uint32_t f = std::bit_cast<std::uint32_t>(value);
  const std::uint32_t sign = (f >> 16) & 0x8000u;
  const std::uint32_t exp = (f >> 23) & 0xffu;
  std::uint32_t mant = f & 0x007fffffu;

  if (exp == 0xffu) {  // inf / NaN
    return static_cast<std::uint16_t>(sign | 0x7c00u | (mant ? 0x0200u : 0u));
  }

  // Unbiased exponent; half bias is 15, float bias 127.
  const int e = static_cast<int>(exp) - 127 + 15;
  if (e >= 0x1f) {  // overflow -> inf
    return static_cast<std::uint16_t>(sign | 0x7c00u);
  }
  if (e <= 0) {
    // Subnormal half or zero. Shift the implicit leading 1 into the mantissa.
    if (e < -10) {
      return static_cast<std::uint16_t>(sign);  // rounds to +-0
    }
    mant |= 0x00800000u;
    const int shift = 14 - e;  // in [14, 24]
    const std::uint32_t half_mant = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1u);
    const std::uint32_t halfway = 1u << (shift - 1);
    std::uint32_t result = half_mant;
    if (rem > halfway || (rem == halfway && (half_mant & 1u))) {
      ++result;  // may carry into the exponent; that is the correct value
    }
    return static_cast<std::uint16_t>(sign | result);
  }

  // Normal case: keep 10 mantissa bits, round to nearest even on the 13 lost.
  std::uint32_t result = (static_cast<std::uint32_t>(e) << 10) | (mant >> 13);
  const std::uint32_t rem = mant & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (result & 1u))) {
    ++result;  // carry propagates into exponent correctly, may hit inf
  }
  return static_cast<std::uint16_t>(sign | result);
}

float half_bits_to_float(std::uint16_t bits) {
  const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
  const std::uint32_t exp = (bits >> 10) & 0x1fu;
  std::uint32_t mant = bits & 0x03ffu;

  std::uint32_t f;
  if (exp == 0) {
    if (mant == 0) {
      f = sign;  // zero
    } else {
      // Subnormal: normalize.
      int e = -1;
      do {
        ++e;
        mant <<= 1;
      } while ((mant & 0x0400u) == 0);
      f = sign | (static_cast<std::uint32_t>(127 - 15 - e) << 23) | ((mant & 0x03ffu) << 13);
    }
  } else if (exp == 0x1f) {
    f = sign | 0x7f800000u | (mant << 13);
  } else {
    f = sign | ((exp - 15 + 127) << 23) | (mant << 13);
  }
  return std::bit_cast<float>(f);
}

}  // namespace rowsplat
