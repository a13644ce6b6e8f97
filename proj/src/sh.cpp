#include <raycam/sh.hpp>

#include <raycam/error.hpp>
#include <raycam/simd.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <tuple>

namespace raycam {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial_ratio(int l, int m) {
  // (l - m)! / (l + m)!
  double r = 1;
  for (int i = l - m + 1; i <= l + m; ++i) r /= i;
  return r;
}

// Writes Y_lm for l = 1..degree, m = -l..l into out (SHBasis order).
void eval_all(int degree, double theta, double phi, double* out) {
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  // Associated Legendre P_l^m(x), m >= 0, without Condon-Shortley phase.
  std::vector<double> p((degree + 1) * (degree + 1), 0.0);
  auto at = [&](int l, int m) -> double& { return p[l * (degree + 1) + m]; };
  at(0, 0) = 1;
  for (int m = 0; m <= degree; ++m) {
    if (m > 0) at(m, m) = at(m - 1, m - 1) * (2 * m - 1) * s;
    if (m + 1 <= degree) at(m + 1, m) = x * (2 * m + 1) * at(m, m);
    for (int l = m + 2; l <= degree; ++l)
      at(l, m) = ((2 * l - 1) * x * at(l - 1, m) - (l + m - 1) * at(l - 2, m)) / (l - m);
  }
  std::size_t k = 0;
  for (int l = 1; l <= degree; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      const double norm = std::sqrt((2 * l + 1) / (4 * kPi) * factorial_ratio(l, am));
      if (m == 0)
        out[k++] = norm * at(l, 0);
      else if (m > 0)
        out[k++] = std::numbers::sqrt2 * norm * at(l, am) * std::cos(am * phi);
      else
        out[k++] = std::numbers::sqrt2 * norm * at(l, am) * std::sin(am * phi);
    }
  }
}

void check_angle(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) fail(ErrorKind::Input, "angle out of range");
}

// Streaming Householder QR of the augmented system [A | B].
class StreamingQR {
 public:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  StreamingQR(Eigen::Index cols, Eigen::Index rhs)
      : cols_(cols), rhs_(rhs), rows_(0, cols + rhs), chunk_(kChunk, cols + rhs) {}

  Eigen::Ref<Eigen::RowVectorXd> next_row() {
    if (fill_ == kChunk) flush();
    return chunk_.row(fill_++);
  }

  void flush() {
    if (fill_ == 0) return;
    Eigen::MatrixXd stacked(rows_.rows() + fill_, cols_ + rhs_);
    stacked << rows_, chunk_.topRows(fill_);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
    const Eigen::Index keep = std::min<Eigen::Index>(stacked.rows(), cols_ + rhs_);
    rows_ = qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>();
    fill_ = 0;
  }

  /// Solves min |A C - B| column by column with a column-pivoted QR of the
  /// reduced factor.
  std::pair<Eigen::MatrixXd, Eigen::Index> solve() {
    flush();
    const Eigen::Index n = std::min(rows_.rows(), cols_);
    Eigen::MatrixXd r = rows_.topLeftCorner(n, cols_);
    Eigen::MatrixXd y = rows_.block(0, cols_, n, rhs_);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(r);
    return {qr.solve(y), qr.rank()};
  }

 private:
  static constexpr Eigen::Index kChunk = 4096;
  Eigen::Index cols_;
  Eigen::Index rhs_;
  Eigen::MatrixXd rows_;
  RowMatrix chunk_;
  Eigen::Index fill_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------

void SHDomain::validate() const {
  if (width < 1 || height < 1) fail(ErrorKind::Input, "domain width and height must be >= 1");
  if (!(hfov > 0 && hfov <= 2 * kPi)) fail(ErrorKind::Input, "domain hfov must lie in (0, 2pi]");
  if (!(vfov() <= kPi * (1 + 1e-12))) fail(ErrorKind::Input, "domain vfov = hfov * height / width exceeds pi");
  if (!(cx >= 0 && cx <= width && cy >= 0 && cy <= height)) fail(ErrorKind::Input, "domain pole outside the image");
}

SHBasis::SHBasis(int degree) : degree_(degree) {
  if (degree < 1) fail(ErrorKind::Input, "degree must be >= 1");
  for (int l = 1; l <= degree; ++l)
    for (int m = -l; m <= l; ++m) terms_.emplace_back(l, m);
}

double real_sh(int l, int m, double theta, double phi) {
  check_angle(theta);
  if (l < 0 || std::abs(m) > l) fail(ErrorKind::Input, "invalid harmonic index");
  if (l == 0) return 0.5 / std::sqrt(kPi);
  std::vector<double> all((l + 1) * (l + 1) - 1);
  eval_all(l, theta, phi, all.data());
  return all[SHBasis::index_of(l, m)];
}

std::vector<double> eval_basis(const SHBasis& basis, double theta, double phi) {
  check_angle(theta);
  std::vector<double> out(basis.count());
  eval_all(basis.degree(), theta, phi, out.data());
  return out;
}

std::vector<double> eval_basis(const SHBasis& basis, const AngularField& angles) {
  const std::size_t n = angles.size();
  const std::size_t terms = basis.count();
  std::vector<double> planes(terms * n, 0.0);
  std::vector<double> buf(terms);
  for (std::size_t i = 0; i < n; ++i) {
    if (!angles.valid[i]) continue;
    check_angle(angles.theta[i]);
    eval_all(basis.degree(), angles.theta[i], angles.phi[i], buf.data());
    for (std::size_t k = 0; k < terms; ++k) planes[k * n + i] = buf[k];
  }
  return planes;
}

std::size_t SHCoefficients::parameter_count() const {
  const std::size_t channels = mode == ChannelMode::Tied ? 1 : 3;
  return coeffs.size() * channels + 3;
}

void SHCoefficients::validate() const {
  const SHBasis basis(degree);
  domain.validate();
  if (coeffs.size() != basis.count())
    fail(ErrorKind::Input, "expected " + std::to_string(basis.count()) + " coefficient rows for degree " +
                               std::to_string(degree));
  for (const auto& row : coeffs)
    for (double c : row)
      if (!std::isfinite(c)) fail(ErrorKind::Input, "non-finite coefficient");
}

Vec3 base_ray(const SHDomain& domain, double u, double v) {
  const double a = (u - domain.cx) / domain.width * domain.hfov;
  const double b = (v - domain.cy) / domain.height * domain.vfov();
  return Vec3(std::sin(a) * std::cos(b), std::sin(b), std::cos(a) * std::cos(b)).normalized();
}

AngularField base_grid(const SHDomain& domain) {
  domain.validate();
  AngularField out(domain.width, domain.height);
  for (int v = 0; v < domain.height; ++v) {
    for (int u = 0; u < domain.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * domain.width + u;
      const Vec3 r = base_ray(domain, u + 0.5, v + 0.5);
      out.theta[i] = std::atan2(std::hypot(r.x(), r.y()), r.z());
      double phi = std::atan2(r.y(), r.x());
      out.phi[i] = phi <= -kPi ? kPi : phi;
      out.valid[i] = 1;
    }
  }
  return out;
}

SHTable make_sh_table(const SHDomain& domain, int degree) {
  const SHBasis basis(degree);
  SHTable table;
  table.domain = domain;
  table.degree = degree;
  table.terms = basis.count();
  const AngularField angles = base_grid(domain);
  table.base = RayField(domain.width, domain.height);
  for (int v = 0; v < domain.height; ++v)
    for (int u = 0; u < domain.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * domain.width + u;
      table.base.set(i, base_ray(domain, u + 0.5, v + 0.5));
      table.base.valid[i] = 1;
    }
  table.basis = eval_basis(basis, angles);
  return table;
}

std::shared_ptr<const SHTable> cached_sh_table(const SHDomain& domain, int degree) {
  using Key = std::tuple<int, double, double, double, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const SHTable>> cache;
  const Key key{degree, domain.cx, domain.cy, domain.hfov, domain.width, domain.height};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // Built outside the lock; concurrent builders produce identical tables.
  auto table = std::make_shared<const SHTable>(make_sh_table(domain, degree));
  std::lock_guard lock(mutex);
  if (cache.size() >= 16) cache.clear();
  return cache.emplace(key, std::move(table)).first->second;
}

RayField reconstruct(const SHTable& table, const std::vector<std::array<double, 3>>& coeffs) {
  if (coeffs.size() != table.terms) fail(ErrorKind::Shape, "coefficient count does not match the basis");
  const bool zero = std::all_of(coeffs.begin(), coeffs.end(),
                                [](const auto& c) { return c[0] == 0 && c[1] == 0 && c[2] == 0; });
  if (zero) return table.base;
  RayField out(table.base.width, table.base.height);
  simd::CombineRaysArgs args;
  args.n = out.size();
  args.base_x = table.base.x.data();
  args.base_y = table.base.y.data();
  args.base_z = table.base.z.data();
  args.basis = table.basis.data();
  args.terms = table.terms;
  args.coeffs = coeffs.empty() ? nullptr : coeffs.front().data();
  args.out_x = out.x.data();
  args.out_y = out.y.data();
  args.out_z = out.z.data();
  args.valid = out.valid.data();
  simd::kernels().combine_rays(args);
  return out;
}

RayField reconstruct(const SHCoefficients& h) {
  h.validate();
  return reconstruct(*cached_sh_table(h.domain, h.degree), h.coeffs);
}

std::pair<double, double> angular_error_stats(const RayField& a, const RayField& b) {
  if (!(a.grid() == b.grid())) fail(ErrorKind::Shape, "ray fields differ in size");
  const std::size_t n = a.size();
  std::vector<double> dot(n), cross(n);
  simd::DotCrossArgs args{n, a.x.data(), a.y.data(), a.z.data(), b.x.data(), b.y.data(), b.z.data(),
                          dot.data(), cross.data()};
  simd::kernels().dot_cross(args);
  double sum = 0, worst = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!a.valid[i] || !b.valid[i]) continue;
    const double e = std::atan2(cross[i], dot[i]);
    sum += e;
    worst = std::max(worst, e);
    ++count;
  }
  return {count ? sum / count : 0.0, worst};
}

FitResult fit_coeffs(const RayField& target, const SHDomain& domain, int degree, ChannelMode mode) {
  const SHBasis basis(degree);
  domain.validate();
  if (!(target.grid() == domain.grid())) fail(ErrorKind::Shape, "domain size does not match the target ray field");
  const std::size_t terms = basis.count();
  const std::size_t valid = target.valid_count();
  if (valid < terms) fail(ErrorKind::Numerical, "underdetermined fit");

  const auto table = cached_sh_table(domain, degree);
  const std::size_t n = target.size();
  const bool tied = mode == ChannelMode::Tied;
  const auto cols = static_cast<Eigen::Index>(terms);

  // Per-channel mode shares one design matrix across the three channels; tied
  // mode stacks the channels as separate rows of a single problem.
  StreamingQR qr(cols, tied ? 1 : 3);
  for (std::size_t i = 0; i < n; ++i) {
    if (!target.valid[i]) continue;
    const Vec3 delta = target.dir(i) - table->base.dir(i);
    if (tied) {
      for (int c = 0; c < 3; ++c) {
        auto row = qr.next_row();
        for (std::size_t k = 0; k < terms; ++k) row(static_cast<Eigen::Index>(k)) = table->basis[k * n + i];
        row(cols) = delta(c);
      }
    } else {
      auto row = qr.next_row();
      for (std::size_t k = 0; k < terms; ++k) row(static_cast<Eigen::Index>(k)) = table->basis[k * n + i];
      row.tail(3) = delta.transpose();
    }
  }
  const auto [solution, rank] = qr.solve();

  FitResult result;
  result.coeffs.degree = degree;
  result.coeffs.domain = domain;
  result.coeffs.mode = mode;
  result.coeffs.coeffs.assign(terms, {0.0, 0.0, 0.0});
  for (std::size_t k = 0; k < terms; ++k)
    for (Eigen::Index c = 0; c < 3; ++c)
      result.coeffs.coeffs[k][c] = solution(static_cast<Eigen::Index>(k), tied ? 0 : c);
  result.rank = static_cast<std::size_t>(rank);
  result.valid_pixels = valid;

  double sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!target.valid[i]) continue;
    Vec3 raw = table->base.dir(i);
    for (std::size_t k = 0; k < terms; ++k)
      raw += table->basis[k * n + i] * Vec3(result.coeffs.coeffs[k][0], result.coeffs.coeffs[k][1], result.coeffs.coeffs[k][2]);
    sq += (raw - target.dir(i)).squaredNorm();
  }
  result.residual_rms = std::sqrt(sq / static_cast<double>(valid));

  RayField recon = reconstruct(*table, result.coeffs.coeffs);
  for (std::size_t i = 0; i < n; ++i) recon.valid[i] = recon.valid[i] && target.valid[i];
  std::tie(result.mean_angular_error, result.max_angular_error) = angular_error_stats(recon, target);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<Vec3> sample_ray(const RayField& f, double x, double y) {
  const double fx = x - 0.5, fy = y - 0.5;
  const int u0 = static_cast<int>(std::floor(fx)), v0 = static_cast<int>(std::floor(fy));
  const double du = fx - u0, dv = fy - v0;
  Vec3 acc = Vec3::Zero();
  double wsum = 0;
  for (int dy = 0; dy <= 1; ++dy)
    for (int dx = 0; dx <= 1; ++dx) {
      const int u = u0 + dx, v = v0 + dy;
      if (u < 0 || v < 0 || u >= f.width || v >= f.height) continue;
      const std::size_t i = static_cast<std::size_t>(v) * f.width + u;
      if (!f.valid[i]) continue;
      const double w = (dx ? du : 1 - du) * (dy ? dv : 1 - dv);
      acc += w * f.dir(i);
      wsum += w;
    }
  if (!(wsum > 0) || !(acc.norm() > 0)) return std::nullopt;
  return acc.normalized();
}

double parabola_offset(double left, double mid, double right) {
  const double den = left - 2 * mid + right;
  if (!(den < 0)) return 0;
  return std::clamp(0.5 * (left - right) / den, -0.5, 0.5);
}

}  // namespace

SHDomain estimate_domain(const RayField& target) {
  const int w = target.width, h = target.height;
  std::ptrdiff_t best = -1;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (!target.valid[i] || !(target.z[i] > 0)) continue;
    if (best < 0 || target.z[i] > target.z[static_cast<std::size_t>(best)]) best = static_cast<std::ptrdiff_t>(i);
  }
  if (best < 0) fail(ErrorKind::Numerical, "pole not found");

  const int bu = static_cast<int>(best % w), bv = static_cast<int>(best / w);
  auto z_at = [&](int u, int v) -> std::optional<double> {
    if (u < 0 || v < 0 || u >= w || v >= h) return std::nullopt;
    const std::size_t i = static_cast<std::size_t>(v) * w + u;
    if (!target.valid[i]) return std::nullopt;
    return target.z[i];
  };
  const double z0 = *z_at(bu, bv);
  double du = 0, dv = 0;
  if (auto l = z_at(bu - 1, bv), r = z_at(bu + 1, bv); l && r) du = parabola_offset(*l, z0, *r);
  if (auto t = z_at(bu, bv - 1), b = z_at(bu, bv + 1); t && b) dv = parabola_offset(*t, z0, *b);

  SHDomain domain;
  domain.width = w;
  domain.height = h;
  domain.cx = bu + 0.5 + du;
  domain.cy = bv + 0.5 + dv;

  const Vec3 pole = sample_ray(target, domain.cx, domain.cy).value_or(target.dir(static_cast<std::size_t>(best)));
  const int row = std::clamp(static_cast<int>(std::floor(domain.cy)), 0, h - 1);
  int left = -1, right = -1;
  for (int u = 0; u < w; ++u) {
    if (!target.valid[static_cast<std::size_t>(row) * w + u]) continue;
    if (left < 0) left = u;
    right = u;
  }
  double hfov = 0;
  for (int u : {left, right}) {
    if (u < 0) continue;
    const double dist = std::abs(u + 0.5 - domain.cx);
    if (dist < 0.5) continue;
    const Vec3 ray = target.dir(static_cast<std::size_t>(row) * w + u);
    const double angle = std::atan2(ray.cross(pole).norm(), ray.dot(pole));
    hfov = std::max(hfov, 2 * angle * (0.5 * w) / dist);
  }
  if (!(hfov > 0)) fail(ErrorKind::Numerical, "cannot estimate field of view");
  domain.hfov = std::min({hfov, 2 * kPi, kPi * w / h});
  return domain;
}

}  // namespace raycam
