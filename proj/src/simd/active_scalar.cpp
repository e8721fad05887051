#include "hakernel/simd/active_count.hpp"

namespace hakernel::simd {

void active_histogram_scalar(const KnotPanel& knots, const double* mins, std::uint32_t* hist) {
  for (Eigen::Index i = 0; i < knots.n; ++i) {
    int active = 0;
    for (int j = 0; j < knots.d; ++j) active += knots.coord(j)[i] <= mins[j] ? 1 : 0;
    ++hist[active];
  }
}

}  // namespace hakernel::simd
