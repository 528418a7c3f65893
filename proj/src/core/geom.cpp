#include "spechol/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

namespace spechol {

namespace {

constexpr double kCoincident = 1e-12;

Vec3 checked_unit(const Vec3& v, const char* what) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a nonzero finite vector");
  }
  return v / n;
}

HostSample query_field(const FieldHost& f, const Vec3& s) {
  HostSample h;
  try {
    h = f.query(s);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::HostEvaluation, std::string("host normal field query failed: ") + e.what());
  }
  if (!is_finite(h.point) || !is_finite(h.normal) || norm(h.normal) == 0.0) {
    throw Error(ErrorCode::HostEvaluation, "host normal field returned a non-finite sample");
  }
  h.normal = normalized(h.normal);
  return h;
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::DegenerateAxis: return "degenerate-axis";
    case ErrorCode::SingularConfiguration: return "singular-configuration";
    case ErrorCode::HostEvaluation: return "host-evaluation";
    case ErrorCode::Miss: return "miss";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::DegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::ShellTooThin: return "shell-too-thin";
    case ErrorCode::Resolution: return "resolution";
    case ErrorCode::Collision: return "collision";
    case ErrorCode::Pole: return "pole";
    case ErrorCode::Unmachinable: return "unmachinable";
    case ErrorCode::Envelope: return "envelope";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// LightSource

LightSource LightSource::point(const Vec3& position) {
  if (!is_finite(position)) throw Error(ErrorCode::InvalidArgument, "light position must be finite");
  LightSource l;
  l.v_ = PointLight{position};
  return l;
}

LightSource LightSource::from_alpha(double alpha) {
  LightSource l;
  l.v_ = DirectionalLight{{0.0, std::cos(alpha), std::sin(alpha)}, alpha};
  return l;
}

LightSource LightSource::directional(const Vec3& direction) {
  const Vec3 d = checked_unit(direction, "light direction");
  LightSource l;
  l.v_ = DirectionalLight{d, std::atan2(d.z, d.y)};
  return l;
}

const Vec3& LightSource::position() const {
  if (const auto* p = std::get_if<PointLight>(&v_)) return p->position;
  throw Error(ErrorCode::InvalidArgument, "directional light has no position");
}

const Vec3& LightSource::direction() const {
  if (const auto* d = std::get_if<DirectionalLight>(&v_)) return d->direction;
  throw Error(ErrorCode::InvalidArgument, "point light has no fixed direction");
}

double LightSource::alpha() const {
  if (const auto* d = std::get_if<DirectionalLight>(&v_)) return d->alpha;
  throw Error(ErrorCode::InvalidArgument, "point light has no alpha");
}

Vec3 LightSource::direction_from(const Vec3& s) const {
  if (const auto* d = std::get_if<DirectionalLight>(&v_)) return d->direction;
  const Vec3 r = std::get<PointLight>(v_).position - s;
  const double n = norm(r);
  if (n < kCoincident) throw Error(ErrorCode::SingularConfiguration, "surface point coincides with the light");
  return r / n;
}

// ---------------------------------------------------------------------------
// Views

Vec3 view_direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(phi), std::cos(theta) * std::cos(phi)};
}

std::pair<double, double> view_angles(const Vec3& direction) {
  const Vec3 d = normalized(direction);
  return {std::atan2(d.x, d.z), std::asin(std::clamp(d.y, -1.0, 1.0))};
}

ViewPath::ViewPath(Shape shape, int samples) : shape_(std::move(shape)), samples_(samples) {
  if (samples_ < 1) throw Error(ErrorCode::InvalidArgument, "view path needs at least one sample");
  std::visit(
      [](auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, OrbitPath>) {
          if (!(s.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "orbit radius must be positive");
          if (!(s.theta_min < s.theta_max)) throw Error(ErrorCode::InvalidArgument, "orbit needs theta_min < theta_max");
        } else if constexpr (std::is_same_v<T, InfinityPath>) {
          if (!(s.theta_min < s.theta_max)) throw Error(ErrorCode::InvalidArgument, "view needs theta_min < theta_max");
        } else {
          s.direction = checked_unit(s.direction, "line view direction");
          if (!(s.range > 0.0)) throw Error(ErrorCode::InvalidArgument, "line view range must be positive");
        }
      },
      shape_);
}

double ViewPath::param_min() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinePath>) return -0.5 * s.range;
        else return s.theta_min;
      },
      shape_);
}

double ViewPath::param_max() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinePath>) return 0.5 * s.range;
        else return s.theta_max;
      },
      shape_);
}

Eye ViewPath::eye_at(double param) const {
  return std::visit(
      [param](const auto& s) -> Eye {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, OrbitPath>) {
          return Eye::at(s.center + s.radius * view_direction(param, s.elevation));
        } else if constexpr (std::is_same_v<T, InfinityPath>) {
          return Eye::toward(view_direction(param, s.elevation));
        } else {
          return Eye::at(s.origin + param * s.direction);
        }
      },
      shape_);
}

double ViewPath::sample_param(int i) const {
  const double a = param_min(), b = param_max();
  if (samples_ == 1) return 0.5 * (a + b);
  if (i == samples_ - 1) return b;
  return a + (b - a) * static_cast<double>(i) / static_cast<double>(samples_ - 1);
}

// ---------------------------------------------------------------------------
// Host

HostSurface HostSurface::plane(const Vec3& origin, const Vec3& normal) {
  return HostSurface(PlaneHost{origin, checked_unit(normal, "plane normal")});
}

HostSurface HostSurface::sphere(const Vec3& center, double radius, bool outside) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere radius must be positive");
  return HostSurface(SphereHost{center, radius, outside});
}

HostSurface HostSurface::field(std::function<HostSample(const Vec3&)> query) {
  if (!query) throw Error(ErrorCode::InvalidArgument, "empty host normal field");
  return HostSurface(FieldHost{std::move(query)});
}

HostSample HostSurface::project(const Vec3& s) const {
  return std::visit(
      [&s](const auto& h) -> HostSample {
        using T = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<T, PlaneHost>) {
          return {s - h.normal * dot(s - h.origin, h.normal), h.normal};
        } else if constexpr (std::is_same_v<T, SphereHost>) {
          const Vec3 r = s - h.center;
          const double n = norm(r);
          const Vec3 u = n > 0.0 ? r / n : Vec3{0, 0, 1};
          return {h.center + u * h.radius, h.outside ? u : -u};
        } else {
          return query_field(h, s);
        }
      },
      shape_);
}

double HostSurface::signed_distance(const Vec3& s) const {
  const HostSample h = project(s);
  return dot(s - h.point, h.normal);
}

// ---------------------------------------------------------------------------
// Residuals

Vec3 reflection_axis(const Vec3& dir_to_light, const Vec3& dir_to_eye) {
  const Vec3 h = dir_to_light + dir_to_eye;
  const double n = norm(h);
  if (n < 1e-12) throw Error(ErrorCode::DegenerateAxis, "light and eye directions are antiparallel");
  return h / n;
}

Vec3 optical_axis(const Vec3& s, const LightSource& light, const Eye& eye, const Media& media) {
  const Vec3 to_light = light.direction_from(s);
  if (!eye.at_infinity() && distance(eye.position(), s) < kCoincident) {
    throw Error(ErrorCode::SingularConfiguration, "surface point coincides with the eye");
  }
  return media.eta1 * to_light + media.eta2 * eye.direction_from(s);
}

std::pair<double, double> normality_residual(const TangentBasis& basis, const LightSource& light,
                                             const Eye& eye, const Media& media) {
  const Vec3 a = optical_axis(basis.s, light, eye, media);
  return {dot(basis.t1, a), dot(basis.t2, a)};
}

std::pair<Vec3, Vec3> nullspace_basis(const Vec3& d) {
  const Vec3 u = normalized(d);
  const double ax = std::fabs(u.x), ay = std::fabs(u.y), az = std::fabs(u.z);
  const Vec3 e = ax <= ay && ax <= az ? Vec3{1, 0, 0} : (ay <= az ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
  const Vec3 b1 = normalized(e - u * dot(e, u));
  return {b1, cross(u, b1)};
}

std::pair<double, double> colinearity_residual(const Vec3& s, const Vec3& p, const Eye& eye) {
  Vec3 d;
  if (eye.at_infinity()) {
    d = eye.direction();
  } else {
    d = eye.position() - p;
    if (norm(d) < kCoincident) throw Error(ErrorCode::SingularConfiguration, "eye coincides with the virtual point");
  }
  const auto [b1, b2] = nullspace_basis(d);
  return {dot(b1, s - p), dot(b2, s - p)};
}

double conformance_distance(const Vec3& s, const HostSurface& host) {
  return distance(s, host.project(s).point);
}

Vec3 sightline_host_intersection(const Eye& eye, const Vec3& p, const HostSurface& host) {
  // Line x(t) = o + t u, oriented from the eye toward p; the answer is the
  // smallest admissible t (t > 0 for a finite eye).
  Vec3 o, u;
  const bool finite = !eye.at_infinity();
  if (finite) {
    o = eye.position();
    const Vec3 d = p - o;
    if (norm(d) < kCoincident) throw Error(ErrorCode::SingularConfiguration, "eye coincides with the virtual point");
    u = normalized(d);
  } else {
    o = p;
    u = -eye.direction();
  }
  const double t_floor = finite ? 0.0 : -std::numeric_limits<double>::infinity();

  const auto miss = [] { return Error(ErrorCode::Miss, "sightline does not intersect the host"); };

  if (const auto* pl = std::get_if<PlaneHost>(&host.shape())) {
    const double den = dot(u, pl->normal);
    if (std::fabs(den) < 1e-15) throw miss();
    const double t = dot(pl->origin - o, pl->normal) / den;
    if (!(t > t_floor)) throw miss();
    return o + t * u;
  }
  if (const auto* sp = std::get_if<SphereHost>(&host.shape())) {
    const Vec3 oc = o - sp->center;
    const double b = dot(oc, u);
    const double c = dot(oc, oc) - sp->radius * sp->radius;
    const double disc = b * b - c;
    if (disc < 0.0) throw miss();
    const double sq = std::sqrt(disc);
    const double t0 = -b - sq, t1 = -b + sq;
    if (t0 > t_floor) return o + t0 * u;
    if (t1 > t_floor) return o + t1 * u;
    throw miss();
  }

  // General normal field: march the signed distance, then bisect.
  const double scale = finite ? 4.0 * distance(o, p) + 1e3 : 1e4;
  const double start = finite ? 0.0 : -scale;
  const int steps = 8192;
  const double h = (scale - start) / steps;
  const auto f = [&](double t) { return host.signed_distance(o + t * u); };
  double ta = start, fa = f(ta);
  for (int k = 1; k <= steps; ++k) {
    double tb = start + h * k;
    const double fb = f(tb);
    if (fa == 0.0) return o + ta * u;
    if ((fa < 0.0) != (fb < 0.0)) {
      for (int it = 0; it < 200 && tb - ta > 1e-13 * (1.0 + std::fabs(tb)); ++it) {
        const double tm = 0.5 * (ta + tb);
        const double fm = f(tm);
        if ((fa < 0.0) == (fm < 0.0)) { ta = tm; fa = fm; } else { tb = tm; }
      }
      return o + 0.5 * (ta + tb) * u;
    }
    ta = tb;
    fa = fb;
  }
  throw miss();
}

}  // namespace spechol
