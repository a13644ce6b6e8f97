#pragma once

// Evaluation metrics for depth/radius maps, point clouds and ray fields.

#include <raycam/fields.hpp>

#include <array>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace raycam {

struct EvalConfig {
  double max_distance = 80.0;  // meters; also caps the classical depth metrics
  double rho_t_max_deg = 15.0;
  int curve_samples = 128;

  double f_tau_max() const { return max_distance / 20.0; }
  /// Throws Error(Input) for non-positive thresholds or fewer than 2 samples.
  void validate() const;
};

struct MetricsReport {
  double delta1 = 0, delta2 = 0, delta3 = 0;  // percent
  double delta1_ssi = 0;                      // percent
  double a_rel = 0;                           // percent
  double rmse = 0;                            // meters
  double rmse_log = 0;
  double log10 = 0;
  double f_auc = 0;    // percent
  double rho_auc = 0;  // percent
  std::size_t valid_pixels = 0;
  EvalConfig config;
};

/// Least-squares (s, t) with s * pred + t ~ gt over pixels valid in both maps
/// and in `mask` (empty = all). Throws Error(Input) with fewer than 2 pixels
/// and Error(Numerical) "alignment singular" when pred is constant.
std::pair<double, double> ssi_align(const ScalarMap& pred, const ScalarMap& gt, std::span<const std::uint8_t> mask = {});

struct DeltaScores {
  double delta1 = 0, delta2 = 0, delta3 = 0;
};

/// Percent of valid pixels with max(p/g, g/p) < 1.25^i. With aligned = true
/// the prediction is mapped by ssi_align first and clamped below at 1e-6.
/// Pixels with gt <= 0 are ignored; pred <= 0 counts as a miss.
DeltaScores delta_metrics(const ScalarMap& pred, const ScalarMap& gt, std::span<const std::uint8_t> mask,
                          bool aligned);

struct StandardScores {
  double a_rel = 0;
  double rmse = 0;
  double rmse_log = 0;
  double log10 = 0;
  std::size_t count = 0;
};

/// A.Rel, RMSE, RMSE_log and log10 over pixels with 0 < gt <= max_distance.
/// Log terms clamp the prediction below at 1e-6.
StandardScores standard_suite(const ScalarMap& pred, const ScalarMap& gt, std::span<const std::uint8_t> mask,
                              double max_distance);

/// Exact nearest-neighbor distances backed by a uniform spatial hash.
class NearestNeighborIndex {
 public:
  explicit NearestNeighborIndex(std::span<const Vec3> points);

  double nearest_sq(const Vec3& q) const;
  double cell_size() const { return cell_; }

 private:
  using Key = std::array<long long, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  struct Cell {
    std::size_t begin, count;
  };
  std::vector<double> x_, y_, z_;  // points grouped by cell
  std::unordered_map<Key, Cell, KeyHash> cells_;
  Key lo_{}, hi_{};
  Vec3 origin_ = Vec3::Zero();
  double cell_ = 1;

  Key key_of(const Vec3& p) const;
  double scan(std::size_t begin, std::size_t count, const Vec3& q) const;
};

enum class NeighborSearch { Hash, BruteForce };

/// Distance from every query point to its nearest reference point.
std::vector<double> nearest_distances(std::span<const Vec3> queries, std::span<const Vec3> reference,
                                      NeighborSearch method = NeighborSearch::Hash);

struct FScore {
  double precision = 0, recall = 0, f1 = 0;
};

/// A point counts when its nearest neighbor in the other cloud is within
/// tau (inclusive). Throws Error(Input) for an empty cloud.
FScore fscore(std::span<const Vec3> pred, std::span<const Vec3> gt, double tau,
              NeighborSearch method = NeighborSearch::Hash);

/// Trapezoidal AUC of f1(tau) on curve_samples thresholds evenly spaced over
/// [0, f_tau_max], normalized to percent.
double f_auc(std::span<const Vec3> pred, std::span<const Vec3> gt, const EvalConfig& cfg,
             NeighborSearch method = NeighborSearch::Hash);

/// Trapezoidal AUC of the fraction of rays with angular error below t over
/// [0, rho_t_max], in percent. The curve at t = 0 counts exact matches.
double rho_auc(const RayField& pred, const RayField& gt, const EvalConfig& cfg);

/// Per-pixel angle between corresponding rays (radians); -1 where either is invalid.
std::vector<double> ray_angular_errors(const RayField& pred, const RayField& gt);

struct EvalInputs {
  RayField pred_rays;
  RayField gt_rays;
  RadiusMap pred_radius;
  RadiusMap gt_radius;
};

/// Full report. Depth-style metrics are computed on radius.
MetricsReport evaluate(const EvalInputs& in, const EvalConfig& cfg);

}  // namespace raycam
