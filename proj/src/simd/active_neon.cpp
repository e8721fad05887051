#if defined(__aarch64__)
#include <arm_neon.h>

#include "hakernel/simd/active_count.hpp"

namespace hakernel::simd {

void active_histogram_neon(const KnotPanel& knots, const double* mins, std::uint32_t* hist) {
  for (Eigen::Index i = 0; i < knots.stride; i += 2) {
    uint64x2_t count = vdupq_n_u64(0);
    for (int j = 0; j < knots.d; ++j) {
      const float64x2_t k = vld1q_f64(knots.coord(j) + i);
      count = vsubq_u64(count, vcleq_f64(k, vdupq_n_f64(mins[j])));
    }
    ++hist[vgetq_lane_u64(count, 0)];
    ++hist[vgetq_lane_u64(count, 1)];
  }
  hist[0] -= static_cast<std::uint32_t>(knots.stride - knots.n);
}

}  // namespace hakernel::simd
#endif
