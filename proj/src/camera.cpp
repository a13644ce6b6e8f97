#include <raycam/camera.hpp>

#include <raycam/error.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace raycam {

namespace {

constexpr double kPi = std::numbers::pi;

// Residual bound that counts as a converged inverse solve.
constexpr double kSolveTol = 1e-10;
constexpr int kMaxIterations = 50;

struct NamedRef {
  const char* name;
  double* value;
};

std::vector<NamedRef> named_refs(Projection& model) {
  return std::visit(
      [](auto& m) -> std::vector<NamedRef> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Equirectangular>) {
          return {{"hfov", &m.hfov}, {"vfov", &m.vfov}};
        } else {
          std::vector<NamedRef> refs = {{"fx", &m.fx}, {"fy", &m.fy}, {"cx", &m.cx}, {"cy", &m.cy}};
          if constexpr (std::is_same_v<T, KannalaBrandt>) {
            static constexpr const char* k[] = {"k1", "k2", "k3", "k4"};
            for (int i = 0; i < 4; ++i) refs.push_back({k[i], &m.k[i]});
          } else if constexpr (std::is_same_v<T, UCM>) {
            refs.push_back({"xi", &m.xi});
          } else if constexpr (std::is_same_v<T, EUCM>) {
            refs.push_back({"alpha", &m.alpha});
            refs.push_back({"beta", &m.beta});
          } else if constexpr (std::is_same_v<T, DoubleSphere>) {
            refs.push_back({"xi", &m.xi});
            refs.push_back({"alpha", &m.alpha});
          } else if constexpr (std::is_same_v<T, Mei>) {
            refs.push_back({"xi", &m.xi});
            refs.push_back({"k1", &m.k1});
            refs.push_back({"k2", &m.k2});
            refs.push_back({"t1", &m.t1});
            refs.push_back({"t2", &m.t2});
          } else if constexpr (std::is_same_v<T, Fisheye624>) {
            static constexpr const char* k[] = {"k1", "k2", "k3", "k4", "k5", "k6"};
            static constexpr const char* t[] = {"t1", "t2"};
            static constexpr const char* s[] = {"s1", "s2", "s3", "s4"};
            for (int i = 0; i < 6; ++i) refs.push_back({k[i], &m.k[i]});
            for (int i = 0; i < 2; ++i) refs.push_back({t[i], &m.t[i]});
            for (int i = 0; i < 4; ++i) refs.push_back({s[i], &m.s[i]});
          }
          return refs;
        }
      },
      model);
}

bool inside_image(const Vec2& p, int width, int height) {
  return p.x() >= 0.0 && p.x() <= width && p.y() >= 0.0 && p.y() <= height;
}

// Fisheye624 tangential + thin-prism map on radially distorted coordinates.
Vec2 tangential_prism(const Fisheye624& m, const Vec2& q, Eigen::Matrix2d* jac) {
  const double u = q.x(), v = q.y();
  const double r2 = u * u + v * v;
  const auto& t = m.t;
  const auto& s = m.s;
  Vec2 out(u + t[0] * (r2 + 2 * u * u) + 2 * t[1] * u * v + s[0] * r2 + s[1] * r2 * r2,
           v + t[1] * (r2 + 2 * v * v) + 2 * t[0] * u * v + s[2] * r2 + s[3] * r2 * r2);
  if (jac) {
    (*jac)(0, 0) = 1 + 6 * t[0] * u + 2 * t[1] * v + 2 * s[0] * u + 4 * s[1] * r2 * u;
    (*jac)(0, 1) = 2 * t[0] * v + 2 * t[1] * u + 2 * s[0] * v + 4 * s[1] * r2 * v;
    (*jac)(1, 0) = 2 * t[1] * u + 2 * t[0] * v + 2 * s[2] * u + 4 * s[3] * r2 * u;
    (*jac)(1, 1) = 1 + 6 * t[1] * v + 2 * t[0] * u + 2 * s[2] * v + 4 * s[3] * r2 * v;
  }
  return out;
}

// Mei radial-tangential distortion on the normalized plane.
Vec2 radtan(const Mei& m, const Vec2& q, Eigen::Matrix2d* jac) {
  const double x = q.x(), y = q.y();
  const double r2 = x * x + y * y;
  const double radial = 1 + m.k1 * r2 + m.k2 * r2 * r2;
  Vec2 out(x * radial + 2 * m.t1 * x * y + m.t2 * (r2 + 2 * x * x),
           y * radial + m.t1 * (r2 + 2 * y * y) + 2 * m.t2 * x * y);
  if (jac) {
    const double dr = 2 * (m.k1 + 2 * m.k2 * r2);
    (*jac)(0, 0) = radial + x * x * dr + 2 * m.t1 * y + 6 * m.t2 * x;
    (*jac)(0, 1) = x * y * dr + 2 * m.t1 * x + 2 * m.t2 * y;
    (*jac)(1, 0) = x * y * dr + 2 * m.t1 * x + 2 * m.t2 * y;
    (*jac)(1, 1) = radial + y * y * dr + 6 * m.t1 * y + 2 * m.t2 * x;
  }
  return out;
}

// Newton solve of f(q) = target starting from q0.
template <class F>
std::optional<Vec2> solve_2d(F&& f, const Vec2& target, Vec2 q) {
  Eigen::Matrix2d jac;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Vec2 r = f(q, &jac) - target;
    if (r.cwiseAbs().maxCoeff() < 1e-15) break;
    const double det = jac.determinant();
    if (!(std::abs(det) > 1e-300)) return std::nullopt;
    const Vec2 step = jac.inverse() * r;
    q -= step;
    if (!q.allFinite()) return std::nullopt;
    if (step.cwiseAbs().maxCoeff() < 1e-17) break;
  }
  Eigen::Matrix2d jac_end;
  const Vec2 r = f(q, &jac_end) - target;
  if (!(r.cwiseAbs().maxCoeff() < kSolveTol) || !(jac_end.determinant() > 0)) return std::nullopt;
  return q;
}

// Inverse of the unified projection m = (x, y) / (z + xi |X|); unit ray.
std::optional<Vec3> ucm_lift(double xi, const Vec2& m) {
  const double r2 = m.squaredNorm();
  const double disc = 1 + (1 - xi * xi) * r2;
  if (disc < 0) return std::nullopt;
  const double factor = (xi + std::sqrt(disc)) / (1 + r2);
  Vec3 ray(factor * m.x(), factor * m.y(), factor - xi);
  // The root must lie on the side the forward model accepts.
  const double w = xi > 1 ? 1 / xi : xi;
  if (!(ray.z() > -w * ray.norm())) return std::nullopt;
  return ray.normalized();
}

std::optional<Vec2> ucm_project(double xi, const Vec3& p) {
  const double d = p.norm();
  const double w = xi > 1 ? 1 / xi : xi;
  if (!(p.z() > -w * d)) return std::nullopt;
  const double den = p.z() + xi * d;
  if (!(den > 0)) return std::nullopt;
  return Vec2(p.x() / den, p.y() / den);
}

}  // namespace

// ---------------------------------------------------------------------------
// Family names and parameters

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Pinhole: return "pinhole";
    case Family::KannalaBrandt: return "kannala_brandt";
    case Family::UCM: return "ucm";
    case Family::EUCM: return "eucm";
    case Family::DoubleSphere: return "double_sphere";
    case Family::Mei: return "mei";
    case Family::Fisheye624: return "fisheye624";
    case Family::Equirectangular: return "equirectangular";
  }
  return "unknown";
}

Family family_from_name(std::string_view name) {
  for (Family f : kAllFamilies)
    if (family_name(f) == name) return f;
  fail(ErrorKind::Input, "unknown camera model '" + std::string(name) + "'");
}

bool is_iterative(Family f) {
  return f == Family::KannalaBrandt || f == Family::Mei || f == Family::Fisheye624;
}

CameraModel make_camera(Family family, int width, int height) {
  CameraModel cam;
  cam.width = width;
  cam.height = height;
  switch (family) {
    case Family::Pinhole: cam.model = Pinhole{}; break;
    case Family::KannalaBrandt: cam.model = KannalaBrandt{}; break;
    case Family::UCM: cam.model = UCM{}; break;
    case Family::EUCM: cam.model = EUCM{}; break;
    case Family::DoubleSphere: cam.model = DoubleSphere{}; break;
    case Family::Mei: cam.model = Mei{}; break;
    case Family::Fisheye624: cam.model = Fisheye624{}; break;
    case Family::Equirectangular: cam.model = Equirectangular{2 * kPi, kPi}; break;
  }
  return cam;
}

std::vector<std::string> param_names(Family family) {
  CameraModel cam = make_camera(family, 1, 1);
  std::vector<std::string> names;
  for (const auto& ref : named_refs(cam.model)) names.emplace_back(ref.name);
  return names;
}

std::vector<std::pair<std::string, double>> CameraModel::params() const {
  Projection copy = model;
  std::vector<std::pair<std::string, double>> out;
  for (const auto& ref : named_refs(copy)) out.emplace_back(ref.name, *ref.value);
  return out;
}

std::optional<double> CameraModel::param(std::string_view name) const {
  Projection copy = model;
  for (const auto& ref : named_refs(copy))
    if (name == ref.name) return *ref.value;
  return std::nullopt;
}

void CameraModel::set_param(std::string_view name, double value) {
  for (const auto& ref : named_refs(model)) {
    if (name == ref.name) {
      *ref.value = value;
      return;
    }
  }
  fail(ErrorKind::Input,
       "camera model '" + std::string(family_name(family())) + "' has no parameter '" + std::string(name) + "'");
}

bool CameraModel::operator==(const CameraModel& other) const {
  return width == other.width && height == other.height && family() == other.family() &&
         params() == other.params();
}

void CameraModel::validate() const {
  if (width < 1 || height < 1) fail(ErrorKind::Input, "camera width and height must be >= 1");
  for (const auto& [name, value] : params())
    if (!std::isfinite(value)) fail(ErrorKind::Input, "camera parameter '" + name + "' is not finite");

  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Equirectangular>) {
          if (!(m.hfov > 0 && m.hfov <= 2 * kPi)) fail(ErrorKind::Input, "equirectangular hfov must lie in (0, 2pi]");
          if (!(m.vfov > 0 && m.vfov <= kPi)) fail(ErrorKind::Input, "equirectangular vfov must lie in (0, pi]");
        } else {
          if (!(m.fx > 0 && m.fy > 0)) fail(ErrorKind::Input, "focal lengths must be positive");
          if constexpr (std::is_same_v<T, EUCM>) {
            if (!(m.alpha >= 0 && m.alpha <= 1)) fail(ErrorKind::Input, "eucm alpha must lie in [0, 1]");
            if (!(m.beta > 0)) fail(ErrorKind::Input, "eucm beta must be positive");
          }
          if constexpr (std::is_same_v<T, DoubleSphere>) {
            if (!(m.alpha >= 0 && m.alpha <= 1)) fail(ErrorKind::Input, "double sphere alpha must lie in [0, 1]");
            if (!(m.xi > -1 && m.xi <= 1)) fail(ErrorKind::Input, "double sphere xi must lie in (-1, 1]");
          }
          if constexpr (std::is_same_v<T, UCM> || std::is_same_v<T, Mei>) {
            if (!(m.xi >= 0)) fail(ErrorKind::Input, "xi must be non-negative");
          }
        }
      },
      model);
}

// ---------------------------------------------------------------------------
// Odd polynomial inversion

namespace detail {

double OddPolynomial::eval(double x) const {
  const double x2 = x * x;
  double acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * x2;
  return x * (1 + acc);
}

double OddPolynomial::derivative(double x) const {
  const double x2 = x * x;
  double acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = (acc + static_cast<double>(2 * i + 3) * coeffs[i]) * x2;
  return 1 + acc;
}

double OddPolynomial::first_stationary(double upper) const {
  if (coeffs.size() <= 2) {
    // 1 + 3 c1 s + 5 c2 s^2 = 0 with s = x^2.
    const double a = coeffs.size() > 1 ? 5 * coeffs[1] : 0.0;
    const double b = coeffs.empty() ? 0.0 : 3 * coeffs[0];
    double s = std::numeric_limits<double>::infinity();
    if (a == 0) {
      if (b < 0) s = -1 / b;
    } else {
      const double disc = b * b - 4 * a;
      if (disc >= 0) {
        const double sq = std::sqrt(disc);
        for (double root : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)})
          if (root > 0) s = std::min(s, root);
      }
    }
    return std::min(upper, std::sqrt(s));
  }

  constexpr int kSteps = 4096;
  const double h = upper / kSteps;
  double prev = derivative(0.0);
  for (int i = 1; i <= kSteps; ++i) {
    const double x = h * i;
    const double d = derivative(x);
    if (d <= 0 && prev > 0) {
      double lo = x - h, hi = x;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (derivative(mid) > 0 ? lo : hi) = mid;
      }
      return lo;
    }
    prev = d;
  }
  return upper;
}

std::optional<double> OddPolynomial::invert(double target, double upper) const {
  if (!(target >= 0) || !std::isfinite(target)) return std::nullopt;
  if (target == 0) return 0.0;
  if (target > eval(upper) + kSolveTol) return std::nullopt;

  double lo = 0, hi = upper;
  double x = std::min(target, upper);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double f = eval(x) - target;
    if (std::abs(f) <= 1e-16 * std::max(1.0, target)) break;
    (f > 0 ? hi : lo) = x;
    const double d = derivative(x);
    double next = x - f / d;
    if (!(d > 0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, x)) {
      x = next;
      break;
    }
    x = next;
  }
  if (!(std::abs(eval(x) - target) < kSolveTol)) return std::nullopt;
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Projector

namespace {

detail::OddPolynomial kb_poly(const KannalaBrandt& m) { return {{m.k.begin(), m.k.end()}}; }
detail::OddPolynomial f624_poly(const Fisheye624& m) { return {{m.k.begin(), m.k.end()}}; }
detail::OddPolynomial mei_poly(const Mei& m) { return {{m.k1, m.k2}}; }

double mei_upper(const Mei& m) { return m.xi > 1 ? 1 / std::sqrt(m.xi * m.xi - 1) : 1e6; }

}  // namespace

Projector::Projector(CameraModel camera) : camera_(std::move(camera)) {
  camera_.validate();
  if (const auto* kb = std::get_if<KannalaBrandt>(&camera_.model)) {
    const auto poly = kb_poly(*kb);
    max_theta_ = poly.first_stationary(kPi);
    max_radius_ = poly.eval(max_theta_);
  } else if (const auto* f = std::get_if<Fisheye624>(&camera_.model)) {
    const auto poly = f624_poly(*f);
    max_theta_ = poly.first_stationary(kPi);
    max_radius_ = poly.eval(max_theta_);
  } else if (const auto* mei = std::get_if<Mei>(&camera_.model)) {
    const auto poly = mei_poly(*mei);
    max_theta_ = poly.first_stationary(mei_upper(*mei));
    max_radius_ = poly.eval(max_theta_);
  } else if (const auto* eq = std::get_if<Equirectangular>(&camera_.model)) {
    max_theta_ = std::min(kPi, std::hypot(eq->hfov / 2, eq->vfov / 2));
  } else {
    max_theta_ = kPi;
  }
}

std::optional<Vec2> Projector::project(const Vec3& p) const {
  const auto pix = project_unbounded(p);
  if (!pix || !inside_image(*pix, camera_.width, camera_.height)) return std::nullopt;
  return pix;
}

std::optional<Vec2> Projector::project_unbounded(const Vec3& p) const {
  if (!p.allFinite()) return std::nullopt;

  auto finish = [&](double fx, double fy, double cx, double cy, const Vec2& m) -> std::optional<Vec2> {
    const Vec2 pix(fx * m.x() + cx, fy * m.y() + cy);
    if (!pix.allFinite()) return std::nullopt;
    return pix;
  };

  return std::visit(
      [&](const auto& m) -> std::optional<Vec2> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Pinhole>) {
          if (!(p.z() > 0)) return std::nullopt;
          return finish(m.fx, m.fy, m.cx, m.cy, Vec2(p.x() / p.z(), p.y() / p.z()));
        } else if constexpr (std::is_same_v<T, KannalaBrandt> || std::is_same_v<T, Fisheye624>) {
          const double rxy = std::hypot(p.x(), p.y());
          if (rxy == 0) {
            if (!(p.z() > 0)) return std::nullopt;
            return finish(m.fx, m.fy, m.cx, m.cy, Vec2(0, 0));
          }
          const double theta = std::atan2(rxy, p.z());
          if (theta > max_theta_) return std::nullopt;
          double rd = 0;
          if constexpr (std::is_same_v<T, KannalaBrandt>)
            rd = kb_poly(m).eval(theta);
          else
            rd = f624_poly(m).eval(theta);
          Vec2 q(rd * p.x() / rxy, rd * p.y() / rxy);
          if constexpr (std::is_same_v<T, Fisheye624>) q = tangential_prism(m, q, nullptr);
          return finish(m.fx, m.fy, m.cx, m.cy, q);
        } else if constexpr (std::is_same_v<T, UCM>) {
          const auto q = ucm_project(m.xi, p);
          if (!q) return std::nullopt;
          return finish(m.fx, m.fy, m.cx, m.cy, *q);
        } else if constexpr (std::is_same_v<T, Mei>) {
          const auto q = ucm_project(m.xi, p);
          if (!q || q->norm() > max_theta_) return std::nullopt;
          return finish(m.fx, m.fy, m.cx, m.cy, radtan(m, *q, nullptr));
        } else if constexpr (std::is_same_v<T, EUCM>) {
          const double rho = std::sqrt(m.beta * (p.x() * p.x() + p.y() * p.y()) + p.z() * p.z());
          const double w = m.alpha <= 0.5 ? m.alpha / (1 - m.alpha) : (1 - m.alpha) / m.alpha;
          if (!(p.z() > -w * rho)) return std::nullopt;
          const double den = m.alpha * rho + (1 - m.alpha) * p.z();
          if (!(den > 0)) return std::nullopt;
          return finish(m.fx, m.fy, m.cx, m.cy, Vec2(p.x() / den, p.y() / den));
        } else if constexpr (std::is_same_v<T, DoubleSphere>) {
          const double d1 = p.norm();
          const double w1 = m.alpha <= 0.5 ? m.alpha / (1 - m.alpha) : (1 - m.alpha) / m.alpha;
          const double w2 = (w1 + m.xi) / std::sqrt(2 * w1 * m.xi + m.xi * m.xi + 1);
          if (!(p.z() > -w2 * d1)) return std::nullopt;
          const double zz = m.xi * d1 + p.z();
          const double d2 = std::sqrt(p.x() * p.x() + p.y() * p.y() + zz * zz);
          const double den = m.alpha * d2 + (1 - m.alpha) * zz;
          if (!(den > 0)) return std::nullopt;
          return finish(m.fx, m.fy, m.cx, m.cy, Vec2(p.x() / den, p.y() / den));
        } else {
          static_assert(std::is_same_v<T, Equirectangular>);
          const double norm = p.norm();
          if (!(norm > 0)) return std::nullopt;
          const double lon = std::atan2(p.x(), p.z());
          const double lat = std::atan2(p.y(), std::hypot(p.x(), p.z()));
          const double width = camera_.width, height = camera_.height;
          return Vec2(lon / m.hfov * width + 0.5 * width, lat / m.vfov * height + 0.5 * height);
        }
      },
      camera_.model);
}

std::optional<Vec3> Projector::unproject(const Vec2& pix) const {
  if (!pix.allFinite()) return std::nullopt;

  return std::visit(
      [&](const auto& m) -> std::optional<Vec3> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Equirectangular>) {
          const double lon = (pix.x() - 0.5 * camera_.width) / camera_.width * m.hfov;
          const double lat = (pix.y() - 0.5 * camera_.height) / camera_.height * m.vfov;
          if (std::abs(lon) > kPi || std::abs(lat) > kPi / 2) return std::nullopt;
          return Vec3(std::cos(lat) * std::sin(lon), std::sin(lat), std::cos(lat) * std::cos(lon));
        } else {
          const Vec2 q((pix.x() - m.cx) / m.fx, (pix.y() - m.cy) / m.fy);
          if constexpr (std::is_same_v<T, Pinhole>) {
            return Vec3(q.x(), q.y(), 1.0).normalized();
          } else if constexpr (std::is_same_v<T, KannalaBrandt> || std::is_same_v<T, Fisheye624>) {
            Vec2 radial = q;
            if constexpr (std::is_same_v<T, Fisheye624>) {
              const auto solved = solve_2d(
                  [&](const Vec2& x, Eigen::Matrix2d* jac) { return tangential_prism(m, x, jac); }, q, q);
              if (!solved) return std::nullopt;
              radial = *solved;
            }
            const double rd = radial.norm();
            if (rd == 0) return Vec3(0, 0, 1);
            if (rd > max_radius_) return std::nullopt;
            std::optional<double> theta;
            if constexpr (std::is_same_v<T, KannalaBrandt>)
              theta = kb_poly(m).invert(rd, max_theta_);
            else
              theta = f624_poly(m).invert(rd, max_theta_);
            if (!theta) return std::nullopt;
            const double s = std::sin(*theta) / rd;
            return Vec3(s * radial.x(), s * radial.y(), std::cos(*theta));
          } else if constexpr (std::is_same_v<T, UCM>) {
            return ucm_lift(m.xi, q);
          } else if constexpr (std::is_same_v<T, Mei>) {
            // Radial-only inverse seeds the full Newton solve.
            Vec2 seed = q;
            const double rd = q.norm();
            if (rd > 0) {
              if (const auto ru = mei_poly(m).invert(rd, max_theta_)) seed = q * (*ru / rd);
            }
            const auto solved =
                solve_2d([&](const Vec2& x, Eigen::Matrix2d* jac) { return radtan(m, x, jac); }, q, seed);
            if (!solved || solved->norm() > max_theta_) return std::nullopt;
            return ucm_lift(m.xi, *solved);
          } else if constexpr (std::is_same_v<T, EUCM>) {
            const double r2 = q.squaredNorm();
            const double a = m.alpha, b = m.beta;
            if (a > 0.5 && r2 > 1 / (b * (2 * a - 1))) return std::nullopt;
            const double mz = (1 - b * a * a * r2) / (a * std::sqrt(1 - (2 * a - 1) * b * r2) + (1 - a));
            return Vec3(q.x(), q.y(), mz).normalized();
          } else {
            static_assert(std::is_same_v<T, DoubleSphere>);
            const double r2 = q.squaredNorm();
            const double a = m.alpha, xi = m.xi;
            if (a > 0.5 && r2 > 1 / (2 * a - 1)) return std::nullopt;
            const double mz = (1 - a * a * r2) / (a * std::sqrt(1 - (2 * a - 1) * r2) + 1 - a);
            const double disc = mz * mz + (1 - xi * xi) * r2;
            if (disc < 0) return std::nullopt;
            const double k = (mz * xi + std::sqrt(disc)) / (mz * mz + r2);
            return Vec3(k * q.x(), k * q.y(), k * mz - xi).normalized();
          }
        }
      },
      camera_.model);
}

// ---------------------------------------------------------------------------
// Batch entry points

std::vector<ProjectedPoint> project(const CameraModel& camera, std::span<const Vec3> points) {
  const Projector projector(camera);
  std::vector<ProjectedPoint> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (const auto pix = projector.project_unbounded(points[i]))
      out[i] = {*pix, inside_image(*pix, camera.width, camera.height)};
  }
  return out;
}

std::vector<UnprojectedRay> unproject(const CameraModel& camera, std::span<const Vec2> pixels) {
  const Projector projector(camera);
  std::vector<UnprojectedRay> out(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (const auto ray = projector.unproject(pixels[i])) out[i] = {*ray, true};
  }
  return out;
}

RayField ray_field(const CameraModel& camera) {
  const Projector projector(camera);
  RayField field(camera.width, camera.height);
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * camera.width + u;
      if (const auto ray = projector.unproject(Vec2(u + 0.5, v + 0.5))) {
        field.set(i, *ray);
        field.valid[i] = 1;
      }
    }
  }
  return field;
}

std::size_t RayField::valid_count() const { return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1)); }

}  // namespace raycam
