#pragma once

#include <cstdint>
#include <stdexcept>

namespace ska {

// The family of space bounds base * ratio^i indexed by level i. One ratio
// plays the role of every constant blow-up factor; only the ordering of the
// levels matters at desk scale.
struct SpaceSchedule {
  uint32_t base_space = 8;
  uint32_t ratio_num = 2;  // rational ratio > 1
  uint32_t ratio_den = 1;
  int i_min = -1;
  int i_max = 6;
  uint32_t cap = 1u << 20;  // clamp for very high levels

  void validate() const {
    if (base_space == 0) throw std::invalid_argument("SpaceSchedule: base_space must be positive");
    if (ratio_den == 0 || ratio_num <= ratio_den)
      throw std::invalid_argument("SpaceSchedule: ratio must be > 1");
    if (i_min > 0 || i_max < 0 || i_min > i_max)
      throw std::invalid_argument("SpaceSchedule: level range must contain 0");
  }

  // ceil(base * ratio^i), clamped to cap; strictly non-decreasing in i.
  uint32_t space_at(int level) const {
    if (level < i_min || level > i_max)
      throw std::out_of_range("SpaceSchedule::space_at: level outside range");
    // numerator^|i| or denominator^|i| with saturation
    unsigned __int128 num = base_space, den = 1;
    int k = level >= 0 ? level : -level;
    for (int j = 0; j < k; ++j) {
      if (level >= 0) {
        num *= ratio_num;
        den *= ratio_den;
      } else {
        num *= ratio_den;
        den *= ratio_num;
      }
      if (num / den > cap) return cap;
    }
    unsigned __int128 v = (num + den - 1) / den;
    if (v > cap) return cap;
    if (v == 0) v = 1;
    return uint32_t(v);
  }
};

}  // namespace ska
