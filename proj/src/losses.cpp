#include <raycam/losses.hpp>

#include <raycam/error.hpp>
#include <raycam/simd.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace raycam {

namespace {

std::size_t masked_count(std::span<const std::uint8_t> mask) {
  std::size_t n = 0;
  for (auto m : mask) n += m != 0;
  if (n == 0) fail(ErrorKind::Input, "no valid pixels");
  return n;
}

void require_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    fail(ErrorKind::Shape, std::string(what) + ": length " + std::to_string(got) + " != " + std::to_string(want));
}

// Pinball over precomputed differences; fills grad with weight-scaled subgradients.
double pinball(std::span<const double> diff, std::span<const std::uint8_t> mask, double alpha, double weight,
               double* grad) {
  simd::PinballArgs args;
  args.n = diff.size();
  args.diff = diff.data();
  args.mask = mask.data();
  args.alpha = alpha;
  args.weight = weight;
  args.grad = grad;
  return simd::kernels().pinball(args);
}

}  // namespace

void LossConfig::validate() const {
  auto unit = [](double v) { return v >= 0 && v <= 1; };
  if (!unit(alpha_theta) || !unit(alpha_phi)) fail(ErrorKind::Input, "quantile alpha must lie in [0, 1]");
  if (!unit(beta)) fail(ErrorKind::Input, "beta must lie in [0, 1]");
  if (!(eta >= 0) || !(gamma >= 0)) fail(ErrorKind::Input, "loss weights must be non-negative");
}

double wrap_angle(double a) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double w = std::remainder(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

LossValue asymmetric_angular_loss(std::span<const double> pred, std::span<const double> gt, double alpha,
                                  std::span<const std::uint8_t> mask) {
  require_len(pred.size(), mask.size(), "prediction");
  require_len(gt.size(), mask.size(), "ground truth");
  if (!(alpha >= 0 && alpha <= 1)) fail(ErrorKind::Input, "quantile alpha must lie in [0, 1]");
  const std::size_t n = masked_count(mask);
  std::vector<double> diff(pred.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = mask[i] ? pred[i] - gt[i] : 0.0;
  LossValue out;
  out.grad.assign(pred.size(), 0.0);
  out.value = pinball(diff, mask, alpha, 1.0 / n, out.grad.data()) / n;
  return out;
}

LossValue combined_angular_loss(const AngularField& pred, const AngularField& gt, const LossConfig& cfg,
                                std::span<const std::uint8_t> mask) {
  cfg.validate();
  const std::size_t len = mask.size();
  require_len(pred.size(), len, "prediction");
  require_len(gt.size(), len, "ground truth");
  const std::size_t n = masked_count(mask);

  std::vector<double> d_theta(len, 0.0), d_phi(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    if (!mask[i]) continue;
    d_theta[i] = pred.theta[i] - gt.theta[i];
    d_phi[i] = wrap_angle(pred.phi[i] - gt.phi[i]);
  }
  LossValue out;
  out.grad.assign(2 * len, 0.0);
  const double w = 1.0 / n;
  const double lt = pinball(d_theta, mask, cfg.alpha_theta, w, out.grad.data()) / n;
  const double lp = pinball(d_phi, mask, cfg.alpha_phi, w, out.grad.data() + len) / n;
  out.value = cfg.beta * lt + (1 - cfg.beta) * lp;
  for (std::size_t i = 0; i < len; ++i) {
    out.grad[i] *= cfg.beta;
    out.grad[len + i] *= 1 - cfg.beta;
  }
  return out;
}

LossValue radial_loss(std::span<const double> pred_log, std::span<const double> gt_log,
                      std::span<const std::uint8_t> mask) {
  require_len(pred_log.size(), mask.size(), "prediction");
  require_len(gt_log.size(), mask.size(), "ground truth");
  const std::size_t n = masked_count(mask);
  std::vector<double> diff(mask.size(), 0.0);
  for (std::size_t i = 0; i < diff.size(); ++i)
    if (mask[i]) diff[i] = pred_log[i] - gt_log[i];
  LossValue out;
  out.grad.assign(mask.size(), 0.0);
  // |d| = 2 * pinball_0.5(d)
  out.value = 2 * pinball(diff, mask, 0.5, 2.0 / n, out.grad.data()) / n;
  return out;
}

LossValue confidence_loss(std::span<const double> pred_log, std::span<const double> gt_log,
                          std::span<const double> sigma, std::span<const std::uint8_t> mask) {
  require_len(pred_log.size(), mask.size(), "prediction");
  require_len(gt_log.size(), mask.size(), "ground truth");
  require_len(sigma.size(), mask.size(), "sigma");
  const std::size_t n = masked_count(mask);
  std::vector<double> diff(mask.size(), 0.0);
  for (std::size_t i = 0; i < diff.size(); ++i)
    if (mask[i]) diff[i] = std::abs(pred_log[i] - gt_log[i]) - sigma[i];
  LossValue out;
  out.grad.assign(mask.size(), 0.0);
  out.value = 2 * pinball(diff, mask, 0.5, 2.0 / n, out.grad.data()) / n;
  for (double& g : out.grad) g = -g;
  return out;
}

void LossInputs::check() const {
  const std::size_t n = mask.size();
  require_len(pred_angles.size(), n, "predicted angles");
  require_len(gt_angles.size(), n, "ground-truth angles");
  require_len(pred_log_radius.size(), n, "predicted log radius");
  require_len(gt_log_radius.size(), n, "ground-truth log radius");
  require_len(sigma.size(), n, "sigma");
}

TotalLossValue total_loss(const LossInputs& in, const LossConfig& cfg) {
  in.check();
  const std::size_t n = in.size();
  const LossValue ang = combined_angular_loss(in.pred_angles, in.gt_angles, cfg, in.mask);
  const LossValue rad = radial_loss(in.pred_log_radius, in.gt_log_radius, in.mask);
  const LossValue conf = confidence_loss(in.pred_log_radius, in.gt_log_radius, in.sigma, in.mask);

  TotalLossValue out;
  out.angular = ang.value;
  out.radial = rad.value;
  out.confidence = conf.value;
  out.value = ang.value + cfg.eta * rad.value + cfg.gamma * conf.value;
  out.grad.assign(4 * n, 0.0);
  std::copy(ang.grad.begin(), ang.grad.end(), out.grad.begin());
  for (std::size_t i = 0; i < n; ++i) {
    out.grad[2 * n + i] = cfg.eta * rad.grad[i];
    out.grad[3 * n + i] = cfg.gamma * conf.grad[i];
  }
  return out;
}

double curriculum_probability(std::uint64_t step) { return 1.0 - std::tanh(static_cast<double>(step) / 1e5); }

GradCheckReport fd_gradcheck(const Differentiable& f, std::span<const double> x, double epsilon) {
  if (!(epsilon > 0)) fail(ErrorKind::Input, "epsilon must be positive");
  const LossValue at = f.eval(x);
  require_len(at.grad.size(), x.size(), "gradient");
  GradCheckReport report;
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (f.kink_distance && f.kink_distance(x, i) < 10 * epsilon) {
      ++report.skipped_kinks;
      continue;
    }
    probe[i] = x[i] + epsilon;
    const double up = f.eval(probe).value;
    probe[i] = x[i] - epsilon;
    const double down = f.eval(probe).value;
    probe[i] = x[i];
    const double fd = (up - down) / (2 * epsilon);
    report.max_deviation = std::max(report.max_deviation, std::abs(fd - at.grad[i]));
    ++report.checked;
  }
  return report;
}

std::vector<double> pack_predictions(const LossInputs& in) {
  in.check();
  const std::size_t n = in.size();
  std::vector<double> x(4 * n);
  std::copy(in.pred_angles.theta.begin(), in.pred_angles.theta.end(), x.begin());
  std::copy(in.pred_angles.phi.begin(), in.pred_angles.phi.end(), x.begin() + n);
  std::copy(in.pred_log_radius.begin(), in.pred_log_radius.end(), x.begin() + 2 * n);
  std::copy(in.sigma.begin(), in.sigma.end(), x.begin() + 3 * n);
  return x;
}

Differentiable total_loss_objective(const LossInputs& in, const LossConfig& cfg) {
  in.check();
  const std::size_t n = in.size();
  auto frozen = std::make_shared<const LossInputs>(in);

  Differentiable f;
  f.eval = [frozen, cfg, n](std::span<const double> x) {
    require_len(x.size(), 4 * n, "packed predictions");
    const LossInputs& base = *frozen;
    AngularField pred = base.pred_angles;
    std::copy(x.begin(), x.begin() + n, pred.theta.begin());
    std::copy(x.begin() + n, x.begin() + 2 * n, pred.phi.begin());
    std::span<const double> logr = x.subspan(2 * n, n);
    std::span<const double> sigma = x.subspan(3 * n, n);

    const LossValue ang = combined_angular_loss(pred, base.gt_angles, cfg, base.mask);
    const LossValue rad = radial_loss(logr, base.gt_log_radius, base.mask);
    const LossValue conf = confidence_loss(base.pred_log_radius, base.gt_log_radius, sigma, base.mask);
    LossValue out;
    out.value = ang.value + cfg.eta * rad.value + cfg.gamma * conf.value;
    out.grad.assign(4 * n, 0.0);
    std::copy(ang.grad.begin(), ang.grad.end(), out.grad.begin());
    for (std::size_t i = 0; i < n; ++i) {
      out.grad[2 * n + i] = cfg.eta * rad.grad[i];
      out.grad[3 * n + i] = cfg.gamma * conf.grad[i];
    }
    return out;
  };
  f.kink_distance = [frozen, n](std::span<const double> x, std::size_t k) {
    const LossInputs& base = *frozen;
    const std::size_t i = k % n;
    if (!base.mask[i]) return std::numeric_limits<double>::infinity();
    switch (k / n) {
      case 0:
        return std::abs(x[k] - base.gt_angles.theta[i]);
      case 1: {
        const double w = std::abs(wrap_angle(x[k] - base.gt_angles.phi[i]));
        return std::min(w, std::numbers::pi - w);
      }
      case 2:
        return std::abs(x[k] - base.gt_log_radius[i]);
      default:
        return std::abs(std::abs(base.pred_log_radius[i] - base.gt_log_radius[i]) - x[k]);
    }
  };
  return f;
}

}  // namespace raycam
