#include <atomic>
#include <cstdlib>
#include <limits>
#include <string>

#include "hakernel/errors.hpp"
#include "hakernel/simd/active_count.hpp"

namespace hakernel::simd {
namespace {

std::atomic<int> g_active{-1};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

KnotPanel make_knot_panel(const Eigen::MatrixXd& knots) {
  KnotPanel panel;
  panel.d = static_cast<int>(knots.cols());
  panel.n = knots.rows();
  panel.stride = (panel.n + kPanelAlign - 1) / kPanelAlign * kPanelAlign;
  panel.values.assign(static_cast<std::size_t>(panel.stride) * static_cast<std::size_t>(panel.d),
                      std::numeric_limits<double>::infinity());
  for (int j = 0; j < panel.d; ++j)
    for (Eigen::Index i = 0; i < panel.n; ++i)
      panel.values[static_cast<std::size_t>(j) * panel.stride + i] = knots(i, j);
  return panel;
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* env = std::getenv("HAKERNEL_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
      if (want == isa_name(isa) && isa_available(isa)) return isa;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() {
  int current = g_active.load(std::memory_order_relaxed);
  if (current < 0) {
    current = static_cast<int>(detect_isa());
    g_active.store(current, std::memory_order_relaxed);
  }
  return static_cast<Isa>(current);
}

void set_active_isa(Isa isa) {
  if (!isa_available(isa))
    throw UsageError("ha_kernel: instruction set '" + std::string(isa_name(isa)) + "' not available");
  g_active.store(static_cast<int>(isa), std::memory_order_relaxed);
}

HistogramKernel histogram_kernel(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return &active_histogram_avx2;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return &active_histogram_neon;
#endif
    default: return &active_histogram_scalar;
  }
}

}  // namespace hakernel::simd
