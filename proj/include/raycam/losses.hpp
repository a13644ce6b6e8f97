#pragma once

// Training objectives as plain functions with analytic (sub)gradients.
// Every loss is a mean over the masked pixels.

#include <raycam/fields.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace raycam {

struct LossConfig {
  double alpha_theta = 0.7;  // quantile of the polar-angle loss
  double alpha_phi = 0.5;    // azimuth loss is symmetric
  double beta = 0.75;        // polar vs azimuth mix
  double eta = 2.0;          // radial weight
  double gamma = 0.1;        // confidence weight

  void validate() const;
};

struct LossValue {
  double value = 0;
  std::vector<double> grad;  // same layout as the differentiated input
};

/// Wraps an angle difference into (-pi, pi].
double wrap_angle(double a);

/// mean of alpha (p - g) where p > g, (1 - alpha) (g - p) otherwise.
/// Subgradient is +alpha/N, -(1 - alpha)/N, or 0 at exact ties and masked pixels.
/// Throws Error(Input) "no valid pixels" for an empty mask.
LossValue asymmetric_angular_loss(std::span<const double> pred, std::span<const double> gt, double alpha,
                                  std::span<const std::uint8_t> mask);

/// beta L^alpha_theta(theta) + (1 - beta) L^alpha_phi(wrap(phi_pred - phi_gt)).
/// grad holds the theta plane followed by the phi plane.
LossValue combined_angular_loss(const AngularField& pred, const AngularField& gt, const LossConfig& cfg,
                                std::span<const std::uint8_t> mask);

/// mean |log R_pred - log R_gt|.
LossValue radial_loss(std::span<const double> pred_log, std::span<const double> gt_log,
                      std::span<const std::uint8_t> mask);

/// mean | |log R_pred - log R_gt| - sigma |. The radial inputs are constants:
/// grad is with respect to sigma only.
LossValue confidence_loss(std::span<const double> pred_log, std::span<const double> gt_log,
                          std::span<const double> sigma, std::span<const std::uint8_t> mask);

struct TotalLossValue {
  double value = 0;
  double angular = 0;
  double radial = 0;
  double confidence = 0;
  // Four planes of N values: theta, phi, log-radius, sigma.
  std::vector<double> grad;
};

struct LossInputs {
  AngularField pred_angles;
  AngularField gt_angles;
  std::vector<double> pred_log_radius;
  std::vector<double> gt_log_radius;
  std::vector<double> sigma;
  Mask mask;

  std::size_t size() const { return mask.size(); }
  /// Throws Error(Shape) if the planes disagree in length.
  void check() const;
};

/// angular + eta radial + gamma confidence; gradient is the same combination.
TotalLossValue total_loss(const LossInputs& in, const LossConfig& cfg);

/// Probability of feeding the ground-truth camera at an optimization step:
/// 1 - tanh(step / 1e5).
double curriculum_probability(std::uint64_t step);

/// A scalar function of a flat parameter vector with its analytic gradient
/// and, per coordinate, the distance to the nearest non-differentiable point.
struct Differentiable {
  std::function<LossValue(std::span<const double>)> eval;
  std::function<double(std::span<const double>, std::size_t)> kink_distance;
};

struct GradCheckReport {
  double max_deviation = 0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
};

/// Central finite differences against the analytic gradient, skipping
/// coordinates within 10 * epsilon of a kink.
GradCheckReport fd_gradcheck(const Differentiable& f, std::span<const double> x, double epsilon);

/// total_loss over the packed vector [theta, phi, log-radius, sigma] with the
/// confidence term reading the log-radius values frozen in `in`.
Differentiable total_loss_objective(const LossInputs& in, const LossConfig& cfg);
std::vector<double> pack_predictions(const LossInputs& in);

}  // namespace raycam
