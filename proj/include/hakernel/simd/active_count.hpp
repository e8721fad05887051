#pragma once

// Inner kernel of the HA Gram: for a pair minimum m = min(u, v) and every knot,
// count the coordinates j with knot_j <= m_j and histogram those counts.
//
// The scalar kernel is the reference. Vector variants must produce identical
// histograms; they are selected once at runtime from the host CPU.

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hakernel::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

/// Knots in coordinate-major layout. Each coordinate row holds `stride` values,
/// the tail past `n` padded with +inf so padded knots are never active.
struct KnotPanel {
  int d = 0;
  Eigen::Index n = 0;
  Eigen::Index stride = 0;
  std::vector<double> values;

  const double* coord(int j) const { return values.data() + static_cast<std::size_t>(j) * stride; }
};

inline constexpr Eigen::Index kPanelAlign = 8;

KnotPanel make_knot_panel(const Eigen::MatrixXd& knots);

/// hist must hold d+1 counters; hist[t] is incremented once per knot with
/// exactly t active coordinates. Padding knots are not counted.
using HistogramKernel = void (*)(const KnotPanel& knots, const double* mins, std::uint32_t* hist);

void active_histogram_scalar(const KnotPanel& knots, const double* mins, std::uint32_t* hist);
#if defined(__x86_64__) || defined(_M_X64)
void active_histogram_avx2(const KnotPanel& knots, const double* mins, std::uint32_t* hist);
#endif
#if defined(__aarch64__)
void active_histogram_neon(const KnotPanel& knots, const double* mins, std::uint32_t* hist);
#endif

/// Whether this build and this CPU can run `isa`.
bool isa_available(Isa isa);

/// Best available ISA, unless HAKERNEL_SIMD=scalar|avx2|neon names another available one.
Isa detect_isa();

/// ISA used by the Gram routines. Defaults to detect_isa().
Isa active_isa();

/// Forces the ISA for subsequent Gram computations; throws if unavailable.
void set_active_isa(Isa isa);

HistogramKernel histogram_kernel(Isa isa);

}  // namespace hakernel::simd
