#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and
// vectorized variants (AVX2 on x86-64, NEON on AArch64) selected at runtime.
// Variants perform the same floating-point operations in the same order per
// element, so their outputs are bitwise identical to the scalar reference;
// reductions use four interleaved partial sums in every variant for the same
// reason.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace raycam::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

/// Best supported ISA, unless RAYCAM_SIMD=scalar|avx2|neon overrides it.
Isa active_isa();

/// raw = base + sum_k basis[k] * coeffs[k]; out = raw / |raw|, valid = |raw| >= 1e-6.
struct CombineRaysArgs {
  std::size_t n = 0;
  const double* base_x = nullptr;
  const double* base_y = nullptr;
  const double* base_z = nullptr;
  const double* basis = nullptr;   // k-th plane starts at basis + k * n
  std::size_t terms = 0;
  const double* coeffs = nullptr;  // terms x 3, row-major
  double* out_x = nullptr;
  double* out_y = nullptr;
  double* out_z = nullptr;
  std::uint8_t* valid = nullptr;
};

/// Dot product and cross-product norm of paired 3-vectors.
struct DotCrossArgs {
  std::size_t n = 0;
  const double* ax = nullptr;
  const double* ay = nullptr;
  const double* az = nullptr;
  const double* bx = nullptr;
  const double* by = nullptr;
  const double* bz = nullptr;
  double* dot = nullptr;
  double* cross_norm = nullptr;
};

/// Pinball loss over differences d = pred - gt. Writes the per-element
/// subgradient (scaled by `weight`, 0 on masked or tied entries) and returns
/// the unscaled sum of alpha * d (d > 0) or (1 - alpha) * (-d) (d <= 0).
struct PinballArgs {
  std::size_t n = 0;
  const double* diff = nullptr;
  const std::uint8_t* mask = nullptr;
  double alpha = 0.5;
  double weight = 1;
  double* grad = nullptr;
};

/// Minimum squared Euclidean distance from a query to a set of points.
struct MinSqDistArgs {
  double qx = 0, qy = 0, qz = 0;
  const double* px = nullptr;
  const double* py = nullptr;
  const double* pz = nullptr;
  std::size_t n = 0;
};

struct KernelTable {
  Isa isa;
  void (*combine_rays)(const CombineRaysArgs&);
  void (*dot_cross)(const DotCrossArgs&);
  double (*pinball)(const PinballArgs&);
  double (*min_sq_dist)(const MinSqDistArgs&);
};

/// Table for a specific ISA; throws Error(Input) when it is not supported here.
const KernelTable& kernels(Isa isa);

/// Table for active_isa().
const KernelTable& kernels();

namespace scalar {
void combine_rays(const CombineRaysArgs& a);
void dot_cross(const DotCrossArgs& a);
double pinball(const PinballArgs& a);
double min_sq_dist(const MinSqDistArgs& a);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void combine_rays(const CombineRaysArgs& a);
void dot_cross(const DotCrossArgs& a);
double pinball(const PinballArgs& a);
double min_sq_dist(const MinSqDistArgs& a);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void combine_rays(const CombineRaysArgs& a);
void dot_cross(const DotCrossArgs& a);
double pinball(const PinballArgs& a);
double min_sq_dist(const MinSqDistArgs& a);
}  // namespace neon
#endif

}  // namespace raycam::simd
