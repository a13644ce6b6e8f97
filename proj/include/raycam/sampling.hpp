#pragma once

// Randomized camera generation for augmentation and distorted validation sets.

#include <raycam/camera.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace raycam {

struct ParamRange {
  std::string name;
  double lo = 0;
  double hi = 0;
};

struct FamilySpec {
  Family family = Family::Pinhole;
  double probability = 1;
  std::vector<ParamRange> ranges;
};

struct CameraSamplingSpec {
  std::vector<FamilySpec> families;
  std::uint64_t seed = 0;

  /// Throws Error(Input): empty spec ("no camera families"), weights not
  /// summing to 1 within 1e-9, lo > hi, or parameters the family lacks.
  void validate() const;
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

/// Draws a family by weight, then every listed parameter uniformly from its
/// range. Intrinsics and image size come from `base`; unlisted distortion
/// parameters keep their identity value.
CameraModel sample_camera(const CameraSamplingSpec& spec, const CameraModel& base, std::mt19937_64& rng);

/// Same as above with a generator seeded from spec.seed.
CameraModel sample_camera(const CameraSamplingSpec& spec, const CameraModel& base);

/// Camera table used to build the distorted small-FoV validation set (seed 13).
CameraSamplingSpec distorted_validation_spec();

/// Camera table used for training-time camera augmentation.
CameraSamplingSpec augmentation_spec();

}  // namespace raycam
