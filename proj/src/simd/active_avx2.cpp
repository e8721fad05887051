// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <array>

#include "hakernel/simd/active_count.hpp"

namespace hakernel::simd {
namespace {

// Per-lane active counts for four knots starting at i. Masks are all-ones (-1)
// where active, so subtracting them counts up.
inline __m256i lane_counts(const KnotPanel& knots, const __m256d* mins, int d, Eigen::Index i) {
  __m256i count = _mm256_setzero_si256();
  for (int j = 0; j < d; ++j) {
    const __m256d k = _mm256_loadu_pd(knots.coord(j) + i);
    count = _mm256_sub_epi64(count, _mm256_castpd_si256(_mm256_cmp_pd(k, mins[j], _CMP_LE_OQ)));
  }
  return count;
}

inline std::uint64_t hsum(__m256i v) {
  alignas(32) std::array<std::uint64_t, 4> lanes;
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.data()), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

// Register-resident per-level accumulators for small fixed d.
template <int D>
void histogram_fixed(const KnotPanel& knots, const __m256d* mins, std::uint32_t* hist) {
  __m256i acc[D + 1];
  __m256i level[D + 1];
  for (int t = 0; t <= D; ++t) {
    acc[t] = _mm256_setzero_si256();
    level[t] = _mm256_set1_epi64x(t);
  }
  for (Eigen::Index i = 0; i < knots.stride; i += 4) {
    const __m256i count = lane_counts(knots, mins, D, i);
    for (int t = 1; t <= D; ++t) acc[t] = _mm256_sub_epi64(acc[t], _mm256_cmpeq_epi64(count, level[t]));
  }
  std::uint64_t nonzero = 0;
  for (int t = 1; t <= D; ++t) {
    const auto c = hsum(acc[t]);
    hist[t] += static_cast<std::uint32_t>(c);
    nonzero += c;
  }
  hist[0] += static_cast<std::uint32_t>(static_cast<std::uint64_t>(knots.n) - nonzero);
}

void histogram_generic(const KnotPanel& knots, const __m256d* mins, std::uint32_t* hist) {
  alignas(32) std::array<std::int64_t, 4> lanes;
  for (Eigen::Index i = 0; i < knots.stride; i += 4) {
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.data()), lane_counts(knots, mins, knots.d, i));
    for (auto t : lanes) ++hist[t];
  }
  hist[0] -= static_cast<std::uint32_t>(knots.stride - knots.n);
}

}  // namespace

void active_histogram_avx2(const KnotPanel& knots, const double* mins, std::uint32_t* hist) {
  constexpr int kMaxD = 64;
  __m256d broadcast[kMaxD];
  const int d = knots.d;
  if (d > kMaxD) {
    active_histogram_scalar(knots, mins, hist);
    return;
  }
  for (int j = 0; j < d; ++j) broadcast[j] = _mm256_set1_pd(mins[j]);
  switch (d) {
    case 1: return histogram_fixed<1>(knots, broadcast, hist);
    case 2: return histogram_fixed<2>(knots, broadcast, hist);
    case 3: return histogram_fixed<3>(knots, broadcast, hist);
    case 4: return histogram_fixed<4>(knots, broadcast, hist);
    case 5: return histogram_fixed<5>(knots, broadcast, hist);
    case 6: return histogram_fixed<6>(knots, broadcast, hist);
    case 7: return histogram_fixed<7>(knots, broadcast, hist);
    case 8: return histogram_fixed<8>(knots, broadcast, hist);
    default: return histogram_generic(knots, broadcast, hist);
  }
}

}  // namespace hakernel::simd
