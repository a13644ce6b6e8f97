#include <raycam/simd.hpp>

#include <raycam/error.hpp>

#include <cstdlib>
#include <string>

namespace raycam::simd {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::combine_rays, &scalar::dot_cross, &scalar::pinball,
                              &scalar::min_sq_dist};
#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::combine_rays, &avx2::dot_cross, &avx2::pinball, &avx2::min_sq_dist};
#endif
#if defined(__aarch64__)
constexpr KernelTable kNeon{Isa::Neon, &neon::combine_rays, &neon::dot_cross, &neon::pinball, &neon::min_sq_dist};
#endif

Isa detect() {
  if (const char* env = std::getenv("RAYCAM_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
      if (want == isa_name(isa) && isa_supported(isa)) return isa;
  }
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
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

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa)) fail(ErrorKind::Input, "SIMD variant '" + std::string(isa_name(isa)) + "' unsupported");
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& kernels() { return kernels(active_isa()); }

}  // namespace raycam::simd
