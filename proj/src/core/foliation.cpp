#include "spechol/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace spechol {

namespace {

constexpr double kRootTol = 1e-12;
constexpr int kMaxRefine = 64;
constexpr double kOnSurface = 1e-9;

double light_term(const std::optional<Vec3>& dir, const Vec3& i, const Vec3& p, const Vec3& s) {
  return dir ? -dot(*dir, s - p) : distance(s, i);
}

// Safeguarded Newton inside a sign-change bracket [a, b].
double refine_root(const LevelFunction& f, const Vec3& o, const Vec3& u, double a, double b) {
  double ga = f.value(o + a * u);
  double t = 0.5 * (a + b);
  for (int it = 0; it < kMaxRefine; ++it) {
    const Vec3 s = o + t * u;
    const double g = f.value(s);
    if (g == 0.0) return t;
    if ((g < 0.0) == (ga < 0.0)) { a = t; ga = g; } else { b = t; }
    const double dg = dot(f.gradient(s), u);
    double next = dg != 0.0 ? t - g / dg : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::fabs(next - t);
    t = next;
    if (step < kRootTol || b - a < kRootTol) break;
  }
  return t;
}

}  // namespace

const char* member_kind_name(MemberKind kind) {
  switch (kind) {
    case MemberKind::Ellipsoid: return "ellipsoid";
    case MemberKind::Hyperboloid: return "hyperboloid";
    case MemberKind::Paraboloid: return "paraboloid";
    case MemberKind::Sphere: return "sphere";
  }
  return "unknown";
}

bool ViewWindow::contains_direction(const Vec3& d) const {
  const auto [az, el] = view_angles(d);
  return contains(az, el);
}

ViewWindow ViewWindow::intersect(const ViewWindow& o) const {
  return {std::max(az_min, o.az_min), std::min(az_max, o.az_max), std::max(el_min, o.el_min),
          std::min(el_max, o.el_max)};
}

// ---------------------------------------------------------------------------

LevelFunction::LevelFunction(const FoliationMember& member) {
  std::visit(
      [this](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        i_ = m.focus_i;
        p_ = m.focus_p;
        dir_ = m.light_direction;
        if constexpr (std::is_same_v<T, ConicSurface>) {
          switch (m.kind) {
            case MemberKind::Ellipsoid:
            case MemberKind::Sphere:
              w_point_ = 1.0;
              level_ = m.k;
              break;
            case MemberKind::Hyperboloid:
              w_point_ = -1.0;
              level_ = m.sheet == Sheet::TowardPoint ? m.k : -m.k;
              break;
            case MemberKind::Paraboloid:
              w_point_ = m.point_in_front ? 1.0 : -1.0;
              level_ = m.point_in_front ? m.k : -m.k;
              break;
          }
        } else {
          w_light_ = m.eta1;
          w_point_ = m.branch == OvalBranch::RealImage ? m.eta2 : -m.eta2;
          level_ = m.k;
        }
      },
      member);
  const double focal = dir_ ? 0.0 : distance(i_, p_);
  if (dir_) axis_ = normalized(*dir_);
  else if (focal > 1e-12) axis_ = (i_ - p_) / focal;
  scale_ = std::max({focal, std::fabs(level_), 1e-3});
}

double LevelFunction::value(const Vec3& s) const {
  return w_light_ * light_term(dir_, i_, p_, s) + w_point_ * distance(s, p_) - level_;
}

Vec3 LevelFunction::gradient(const Vec3& s) const {
  Vec3 gl;
  if (dir_) {
    gl = -*dir_;
  } else {
    const double d = distance(s, i_);
    if (d > 0.0) gl = (s - i_) / d;
  }
  Vec3 gp;
  const double dp = distance(s, p_);
  if (dp > 0.0) gp = (s - p_) / dp;
  return w_light_ * gl + w_point_ * gp;
}

Vec3 LevelFunction::normal(const Vec3& s) const {
  const Vec3 g = gradient(s);
  const double n = norm(g);
  if (n < 1e-15) throw Error(ErrorCode::DegenerateGeometry, "member normal is undefined at this point");
  return -g / n;
}

// ---------------------------------------------------------------------------

MemberKind classify_member(const Vec3& p, const HostSurface& host, const LightSource& light) {
  if (!light.is_directional() && distance(p, light.position()) < kOnSurface) return MemberKind::Sphere;
  const double side = host.signed_distance(p);
  if (std::fabs(side) < kOnSurface) return MemberKind::Paraboloid;
  if (light.is_directional()) return MemberKind::Paraboloid;
  return side > 0.0 ? MemberKind::Ellipsoid : MemberKind::Hyperboloid;
}

FoliationMember member_through(const Vec3& p, const LightSource& light, const Vec3& s0,
                               const Media& media, const HostSurface& host) {
  if (!is_finite(p)) throw Error(ErrorCode::Unsupported, "virtual point must be finite");
  if (!(media.eta1 > 0.0) || !(media.eta2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "refractive indices must be positive");
  }
  if (distance(s0, p) < kOnSurface) {
    throw Error(ErrorCode::SingularConfiguration, "seed point coincides with the virtual point");
  }
  std::optional<Vec3> dir;
  Vec3 i;
  if (light.is_directional()) {
    dir = light.direction();
  } else {
    i = light.position();
    if (distance(s0, i) < kOnSurface) {
      throw Error(ErrorCode::SingularConfiguration, "seed point coincides with the light");
    }
  }

  if (!media.reflection()) {
    const double p_side = host.signed_distance(p);
    const double light_side = dir ? dot(*dir, host.project(s0).normal) : host.signed_distance(i);
    CartesianOval oval;
    oval.focus_i = i;
    oval.focus_p = p;
    oval.light_direction = dir;
    oval.eta1 = media.eta1;
    oval.eta2 = media.eta2;
    oval.branch = (p_side < 0.0) != (light_side < 0.0) ? OvalBranch::VirtualImage : OvalBranch::RealImage;
    const double sign = oval.branch == OvalBranch::RealImage ? 1.0 : -1.0;
    oval.k = media.eta1 * light_term(dir, i, p, s0) + sign * media.eta2 * distance(s0, p);
    return oval;
  }

  const double side = host.signed_distance(p);
  if (std::fabs(side) < kOnSurface) {
    throw Error(ErrorCode::DegenerateGeometry, "virtual point lies on the host (degenerate needle)");
  }

  ConicSurface c;
  c.focus_i = i;
  c.focus_p = p;
  c.light_direction = dir;
  c.kind = classify_member(p, host, light);
  const double to_p = distance(s0, p);
  switch (c.kind) {
    case MemberKind::Sphere:
      c.k = 2.0 * distance(s0, i);
      c.eccentricity = 0.0;
      break;
    case MemberKind::Ellipsoid:
      c.k = distance(s0, i) + to_p;
      c.eccentricity = distance(i, p) / c.k;
      break;
    case MemberKind::Hyperboloid: {
      const double diff = distance(s0, i) - to_p;
      if (std::fabs(diff) < kOnSurface) {
        throw Error(ErrorCode::DegenerateGeometry, "seed lies on the degenerate (planar) hyperboloid");
      }
      c.k = std::fabs(diff);
      c.sheet = diff > 0.0 ? Sheet::TowardPoint : Sheet::TowardLight;
      c.eccentricity = distance(i, p) / c.k;
      break;
    }
    case MemberKind::Paraboloid: {
      c.point_in_front = side > 0.0;
      const double along = dot(*dir, s0 - p);
      c.k = c.point_in_front ? to_p - along : to_p + along;
      if (c.k < kOnSurface) {
        throw Error(ErrorCode::DegenerateGeometry, "seed lies on the paraboloid axis ray (zero-width member)");
      }
      c.eccentricity = 1.0;
      break;
    }
  }
  return c;
}

std::optional<double> line_solve(const LevelFunction& f, const Vec3& origin, const Vec3& direction,
                                 double t_lo, double t_hi, double step) {
  const Vec3 u = normalized(direction);
  const auto g = [&](double t) { return f.value(origin + t * u); };
  const double g0 = g(std::clamp(0.0, t_lo, t_hi));
  if (g0 == 0.0) return std::clamp(0.0, t_lo, t_hi);

  double up_a = std::max(0.0, t_lo), up_ga = g(up_a);
  double dn_a = std::min(0.0, t_hi), dn_ga = g(dn_a);
  bool up_open = up_a < t_hi, dn_open = dn_a > t_lo;
  while (up_open || dn_open) {
    if (up_open) {
      const double b = std::min(up_a + step, t_hi);
      const double gb = g(b);
      if (gb == 0.0) return b;
      if ((up_ga < 0.0) != (gb < 0.0)) return refine_root(f, origin, u, up_a, b);
      up_a = b;
      up_ga = gb;
      up_open = up_a < t_hi;
    }
    if (dn_open) {
      const double b = std::max(dn_a - step, t_lo);
      const double gb = g(b);
      if (gb == 0.0) return b;
      if ((dn_ga < 0.0) != (gb < 0.0)) return refine_root(f, origin, u, b, dn_a);
      dn_a = b;
      dn_ga = gb;
      dn_open = dn_a > t_lo;
    }
  }
  return std::nullopt;
}

Vec3 radial_solve(const FoliationMember& member, const Vec3& direction_from_p) {
  const LevelFunction f(member);
  const Vec3 u = normalized(direction_from_p);
  const auto t = line_solve(f, f.focus_p(), u, 0.0, 64.0 * f.scale(), f.scale() / 64.0);
  if (!t) throw Error(ErrorCode::Miss, "ray from the virtual point does not meet the member");
  return f.focus_p() + *t * u;
}

std::pair<Vec3, Vec3> surface_point_and_normal(const FoliationMember& member, double azimuth,
                                               double latitude) {
  const LevelFunction f(member);
  const auto [e1, e2] = nullspace_basis(f.axis());
  const Vec3 u = std::cos(latitude) * f.axis() +
                 std::sin(latitude) * (std::cos(azimuth) * e1 + std::sin(azimuth) * e2);
  Vec3 s;
  try {
    s = radial_solve(member, u);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Miss) throw;
    throw Error(ErrorCode::Domain, "parameters fall outside the member's sheet");
  }
  return {s, f.normal(s)};
}

double snell_residual(const CartesianOval& oval, const Vec3& s) {
  const LevelFunction f{FoliationMember{oval}};
  const Vec3 n = f.normal(s);
  const Vec3 to_light = oval.light_direction ? *oval.light_direction : normalized(oval.focus_i - s);
  const Vec3 to_point = normalized(oval.focus_p - s);
  return std::fabs(oval.eta1 * norm(cross(to_light, n)) - oval.eta2 * norm(cross(to_point, n)));
}

}  // namespace spechol
