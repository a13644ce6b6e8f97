#include <raycam/metrics.hpp>

#include <raycam/error.hpp>
#include <raycam/simd.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

namespace raycam {

namespace {

void require_same(GridSize a, GridSize b) {
  if (!(a == b)) fail(ErrorKind::Shape, "prediction and ground truth grids differ");
}

bool usable(const ScalarMap& pred, const ScalarMap& gt, std::span<const std::uint8_t> mask, std::size_t i) {
  return pred.valid[i] && gt.valid[i] && (mask.empty() || mask[i]);
}

void check_mask(std::span<const std::uint8_t> mask, std::size_t n) {
  if (!mask.empty() && mask.size() != n) fail(ErrorKind::Shape, "mask size does not match the grid");
}

// Trapezoid rule over samples at t_i = i * t_max / (n - 1), normalized by t_max.
double normalized_trapezoid(const std::vector<double>& curve) {
  double area = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) area += 0.5 * (curve[i - 1] + curve[i]);
  return area / static_cast<double>(curve.size() - 1);
}

// Fraction of sorted values with v <= t (inclusive) or v < t.
double fraction_below(const std::vector<double>& sorted, double t, bool inclusive) {
  const auto it = inclusive ? std::upper_bound(sorted.begin(), sorted.end(), t)
                            : std::lower_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double f1_of(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

}  // namespace

void EvalConfig::validate() const {
  if (!(max_distance > 0)) fail(ErrorKind::Input, "max_distance must be positive");
  if (!(rho_t_max_deg > 0)) fail(ErrorKind::Input, "rho_t_max must be positive");
  if (curve_samples < 2) fail(ErrorKind::Input, "curve_samples must be >= 2");
}

std::pair<double, double> ssi_align(const ScalarMap& pred, const ScalarMap& gt, std::span<const std::uint8_t> mask) {
  require_same(pred.grid(), gt.grid());
  check_mask(mask, pred.size());
  std::size_t n = 0;
  double mp = 0, mg = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!usable(pred, gt, mask, i)) continue;
    ++n;
    mp += pred.values[i];
    mg += gt.values[i];
  }
  if (n < 2) fail(ErrorKind::Input, "alignment needs at least 2 valid pixels");
  mp /= n;
  mg /= n;
  double sxx = 0, sxy = 0, scale = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!usable(pred, gt, mask, i)) continue;
    const double dp = pred.values[i] - mp;
    sxx += dp * dp;
    sxy += dp * (gt.values[i] - mg);
    scale = std::max(scale, std::abs(pred.values[i]));
  }
  if (!(sxx > 1e-24 * scale * scale * n)) fail(ErrorKind::Numerical, "alignment singular");
  const double s = sxy / sxx;
  return {s, mg - s * mp};
}

DeltaScores delta_metrics(const ScalarMap& pred, const ScalarMap& gt, std::span<const std::uint8_t> mask,
                          bool aligned) {
  require_same(pred.grid(), gt.grid());
  check_mask(mask, pred.size());
  double s = 1, t = 0;
  if (aligned) std::tie(s, t) = ssi_align(pred, gt, mask);
  const double thr[3] = {1.25, 1.25 * 1.25, 1.25 * 1.25 * 1.25};
  std::size_t n = 0, hit[3] = {0, 0, 0};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!usable(pred, gt, mask, i)) continue;
    const double g = gt.values[i];
    if (!(g > 0)) continue;
    ++n;
    double p = pred.values[i];
    if (aligned) p = std::max(s * p + t, 1e-6);
    if (!(p > 0)) continue;
    const double ratio = std::max(p / g, g / p);
    for (int k = 0; k < 3; ++k) hit[k] += ratio < thr[k];
  }
  if (n == 0) fail(ErrorKind::Input, "no valid pixels");
  const double scale = 100.0 / n;
  return {hit[0] * scale, hit[1] * scale, hit[2] * scale};
}

StandardScores standard_suite(const ScalarMap& pred, const ScalarMap& gt, std::span<const std::uint8_t> mask,
                              double max_distance) {
  require_same(pred.grid(), gt.grid());
  check_mask(mask, pred.size());
  StandardScores out;
  double rel = 0, sq = 0, sq_log = 0, l10 = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!usable(pred, gt, mask, i)) continue;
    const double g = gt.values[i];
    if (!(g > 0) || g > max_distance) continue;
    const double p = pred.values[i];
    const double pl = std::max(p, 1e-6);
    ++out.count;
    rel += std::abs(p - g) / g;
    sq += (p - g) * (p - g);
    const double dl = std::log(pl) - std::log(g);
    sq_log += dl * dl;
    l10 += std::abs(std::log10(pl) - std::log10(g));
  }
  if (out.count == 0) fail(ErrorKind::Input, "no valid pixels");
  const double n = static_cast<double>(out.count);
  out.a_rel = 100.0 * rel / n;
  out.rmse = std::sqrt(sq / n);
  out.rmse_log = std::sqrt(sq_log / n);
  out.log10 = l10 / n;
  return out;
}

// ---------------------------------------------------------------------------

std::size_t NearestNeighborIndex::KeyHash::operator()(const Key& k) const {
  std::size_t h = 1469598103934665603ull;
  for (long long v : k) {
    h ^= static_cast<std::size_t>(v);
    h *= 1099511628211ull;
  }
  return h;
}

NearestNeighborIndex::NearestNeighborIndex(std::span<const Vec3> points) {
  if (points.empty()) fail(ErrorKind::Input, "empty point cloud");
  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    if (!p.allFinite()) fail(ErrorKind::Input, "non-finite point");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = (hi - lo).maxCoeff();
  cell_ = extent > 0 ? extent / std::max(1.0, std::sqrt(static_cast<double>(points.size()))) : 1.0;
  origin_ = lo;

  std::vector<std::pair<Key, std::size_t>> keyed(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) keyed[i] = {key_of(points[i]), i};
  std::sort(keyed.begin(), keyed.end());
  lo_ = keyed.front().first;
  hi_ = lo_;
  x_.resize(points.size());
  y_.resize(points.size());
  z_.resize(points.size());
  for (std::size_t j = 0; j < keyed.size(); ++j) {
    const Vec3& p = points[keyed[j].second];
    x_[j] = p.x();
    y_[j] = p.y();
    z_[j] = p.z();
    const Key& k = keyed[j].first;
    for (int a = 0; a < 3; ++a) {
      lo_[a] = std::min(lo_[a], k[a]);
      hi_[a] = std::max(hi_[a], k[a]);
    }
    auto [it, inserted] = cells_.try_emplace(k, Cell{j, 0});
    ++it->second.count;
  }
}

NearestNeighborIndex::Key NearestNeighborIndex::key_of(const Vec3& p) const {
  const Vec3 c = (p - origin_) / cell_;
  return {static_cast<long long>(std::floor(c.x())), static_cast<long long>(std::floor(c.y())),
          static_cast<long long>(std::floor(c.z()))};
}

double NearestNeighborIndex::scan(std::size_t begin, std::size_t count, const Vec3& q) const {
  simd::MinSqDistArgs args;
  args.qx = q.x();
  args.qy = q.y();
  args.qz = q.z();
  args.px = x_.data() + begin;
  args.py = y_.data() + begin;
  args.pz = z_.data() + begin;
  args.n = count;
  return simd::kernels().min_sq_dist(args);
}

double NearestNeighborIndex::nearest_sq(const Vec3& q) const {
  constexpr long long kMaxRing = 24;
  const Key c = key_of(q);
  long long reach = 0;
  for (int a = 0; a < 3; ++a) reach = std::max({reach, c[a] - lo_[a], hi_[a] - c[a]});

  double best = std::numeric_limits<double>::infinity();
  for (long long r = 0; r <= reach; ++r) {
    if (r > kMaxRing) return std::min(best, scan(0, x_.size(), q));
    for (long long dx = -r; dx <= r; ++dx) {
      const long long kx = c[0] + dx;
      if (kx < lo_[0] || kx > hi_[0]) continue;
      for (long long dy = -r; dy <= r; ++dy) {
        const long long ky = c[1] + dy;
        if (ky < lo_[1] || ky > hi_[1]) continue;
        const bool shell = std::abs(dx) == r || std::abs(dy) == r;
        // Interior of the ring in z is already visited unless x or y is on the shell.
        const long long step = shell ? 1 : 2 * r;
        for (long long dz = -r; dz <= r; dz += std::max(step, 1LL)) {
          const long long kz = c[2] + dz;
          if (kz < lo_[2] || kz > hi_[2]) continue;
          const auto it = cells_.find({kx, ky, kz});
          if (it == cells_.end()) continue;
          best = std::min(best, scan(it->second.begin, it->second.count, q));
        }
      }
    }
    // Unvisited cells are at least r cells away from q's cell.
    const double bound = static_cast<double>(r) * cell_;
    if (best <= bound * bound) break;
  }
  return best;
}

std::vector<double> nearest_distances(std::span<const Vec3> queries, std::span<const Vec3> reference,
                                      NeighborSearch method) {
  if (queries.empty() || reference.empty()) fail(ErrorKind::Input, "empty point cloud");
  std::vector<double> out(queries.size());
  if (method == NeighborSearch::Hash) {
    const NearestNeighborIndex index(reference);
    for (std::size_t i = 0; i < queries.size(); ++i) out[i] = std::sqrt(index.nearest_sq(queries[i]));
    return out;
  }
  std::vector<double> x(reference.size()), y(reference.size()), z(reference.size());
  for (std::size_t j = 0; j < reference.size(); ++j) {
    x[j] = reference[j].x();
    y[j] = reference[j].y();
    z[j] = reference[j].z();
  }
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    simd::MinSqDistArgs args{queries[i].x(), queries[i].y(), queries[i].z(), x.data(), y.data(), z.data(),
                             reference.size()};
    out[i] = std::sqrt(k.min_sq_dist(args));
  }
  return out;
}

FScore fscore(std::span<const Vec3> pred, std::span<const Vec3> gt, double tau, NeighborSearch method) {
  if (!(tau >= 0)) fail(ErrorKind::Input, "tau must be non-negative");
  const std::vector<double> dp = nearest_distances(pred, gt, method);
  const std::vector<double> dg = nearest_distances(gt, pred, method);
  FScore s;
  s.precision = static_cast<double>(std::count_if(dp.begin(), dp.end(), [&](double d) { return d <= tau; })) /
                static_cast<double>(dp.size());
  s.recall = static_cast<double>(std::count_if(dg.begin(), dg.end(), [&](double d) { return d <= tau; })) /
             static_cast<double>(dg.size());
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

double f_auc(std::span<const Vec3> pred, std::span<const Vec3> gt, const EvalConfig& cfg, NeighborSearch method) {
  cfg.validate();
  std::vector<double> dp = nearest_distances(pred, gt, method);
  std::vector<double> dg = nearest_distances(gt, pred, method);
  std::sort(dp.begin(), dp.end());
  std::sort(dg.begin(), dg.end());
  const int n = cfg.curve_samples;
  const double tmax = cfg.f_tau_max();
  std::vector<double> curve(n);
  for (int i = 0; i < n; ++i) {
    const double tau = tmax * i / (n - 1);
    curve[i] = f1_of(fraction_below(dp, tau, true), fraction_below(dg, tau, true));
  }
  return 100.0 * normalized_trapezoid(curve);
}

std::vector<double> ray_angular_errors(const RayField& pred, const RayField& gt) {
  require_same(pred.grid(), gt.grid());
  const std::size_t n = pred.size();
  std::vector<double> dot(n), cross(n), err(n, -1.0);
  simd::DotCrossArgs args{n, pred.x.data(), pred.y.data(), pred.z.data(), gt.x.data(), gt.y.data(), gt.z.data(),
                          dot.data(), cross.data()};
  simd::kernels().dot_cross(args);
  for (std::size_t i = 0; i < n; ++i)
    if (pred.valid[i] && gt.valid[i]) err[i] = std::atan2(cross[i], dot[i]);
  return err;
}

double rho_auc(const RayField& pred, const RayField& gt, const EvalConfig& cfg) {
  cfg.validate();
  std::vector<double> err = ray_angular_errors(pred, gt);
  std::erase_if(err, [](double e) { return e < 0; });
  if (err.empty()) fail(ErrorKind::Input, "no valid pixels");
  std::sort(err.begin(), err.end());
  const int n = cfg.curve_samples;
  const double tmax = cfg.rho_t_max_deg * std::numbers::pi / 180.0;
  std::vector<double> curve(n);
  curve[0] = fraction_below(err, 0.0, true);
  for (int i = 1; i < n; ++i) curve[i] = fraction_below(err, tmax * i / (n - 1), false);
  return 100.0 * normalized_trapezoid(curve);
}

MetricsReport evaluate(const EvalInputs& in, const EvalConfig& cfg) {
  cfg.validate();
  const GridSize g = in.gt_radius.grid();
  require_same(in.pred_radius.grid(), g);
  require_same(in.pred_rays.grid(), g);
  require_same(in.gt_rays.grid(), g);

  Mask mask(g.count(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = in.pred_rays.valid[i] && in.gt_rays.valid[i] && in.pred_radius.valid[i] && in.gt_radius.valid[i] &&
              in.gt_radius.values[i] > 0 && in.gt_radius.values[i] <= cfg.max_distance;

  MetricsReport r;
  r.config = cfg;
  r.valid_pixels = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
  if (r.valid_pixels == 0) fail(ErrorKind::Input, "no valid pixels");

  const DeltaScores d = delta_metrics(in.pred_radius, in.gt_radius, mask, false);
  r.delta1 = d.delta1;
  r.delta2 = d.delta2;
  r.delta3 = d.delta3;
  r.delta1_ssi = delta_metrics(in.pred_radius, in.gt_radius, mask, true).delta1;
  const StandardScores s = standard_suite(in.pred_radius, in.gt_radius, mask, cfg.max_distance);
  r.a_rel = s.a_rel;
  r.rmse = s.rmse;
  r.rmse_log = s.rmse_log;
  r.log10 = s.log10;

  std::vector<Vec3> pp, gp;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    pp.push_back(in.pred_rays.dir(i) * in.pred_radius.values[i]);
    gp.push_back(in.gt_rays.dir(i) * in.gt_radius.values[i]);
  }
  r.f_auc = f_auc(pp, gp, cfg);
  r.rho_auc = rho_auc(in.pred_rays, in.gt_rays, cfg);
  return r;
}

}  // namespace raycam
