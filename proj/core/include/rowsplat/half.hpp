// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace rowsplat {

// IEEE 754 binary16 conversion helpers used by the fp16-emulated render
// precision. Round-to-nearest-even, with overflow to infinity and gradual
// underflow to subnormals.

std::uint16_t float_to_half_bits(float value);
float half_bits_to_float(std::uint16_t bits);

/// Rounds a float through binary16 and back. Every arithmetic result on the
/// emulated fp16 path goes through this.
inline float round_to_half(float value) {
  return half_bits_to_float(float_to_half_bits(value));
}

}  // namespace rowsplat
