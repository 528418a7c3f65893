#pragma once

// Exact single-point optical surfaces. For reflection the members are
// revolute conics with one focus at the light and one at the virtual point;
// for a single refracting interface they are revolute Cartesian ovals.
//
// Every member is handled through one implicit form
//     F(s) = w_light * L(s) + w_point * |s - p| = level
// where L(s) = |s - i| for a point light and L(s) = -<d, s - p> for a light
// at infinity in direction d. The optical normal is -grad F, which is the
// eta-weighted axis u(i - s) + tau * u(p - s) with the eye slid onto p.

#include <numbers>
#include <optional>
#include <utility>
#include <variant>

#include "spechol/geom.hpp"

namespace spechol {

enum class MemberKind { Ellipsoid, Hyperboloid, Paraboloid, Sphere };
enum class Sheet { TowardLight, TowardPoint };
enum class OvalBranch { RealImage, VirtualImage };

const char* member_kind_name(MemberKind kind);

struct ConicSurface {
  Vec3 focus_i;                        // light position; unused when light_direction is set
  Vec3 focus_p;                        // virtual point
  std::optional<Vec3> light_direction;  // light at infinity (paraboloids)
  MemberKind kind = MemberKind::Ellipsoid;
  // Focal sum for ellipsoids and spheres, |focal difference| for
  // hyperboloids, |distance - directrix distance| for paraboloids.
  double k = 0.0;
  double eccentricity = 0.0;
  Sheet sheet = Sheet::TowardPoint;  // hyperboloid branch
  bool point_in_front = true;        // paraboloid orientation
};

struct CartesianOval {
  Vec3 focus_i;
  Vec3 focus_p;
  std::optional<Vec3> light_direction;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double k = 0.0;  // optical path constant
  OvalBranch branch = OvalBranch::RealImage;
};

using FoliationMember = std::variant<ConicSurface, CartesianOval>;

// Azimuth x elevation visibility interval, radians.
struct ViewWindow {
  double az_min = -std::numbers::pi;
  double az_max = std::numbers::pi;
  double el_min = -std::numbers::pi / 2;
  double el_max = std::numbers::pi / 2;

  bool empty() const { return !(az_min < az_max) || !(el_min < el_max); }
  bool contains(double az, double el) const {
    return az >= az_min && az <= az_max && el >= el_min && el <= el_max;
  }
  bool contains_direction(const Vec3& d) const;
  ViewWindow intersect(const ViewWindow& o) const;
  bool operator==(const ViewWindow&) const = default;
};

struct SurfacePatch {
  FoliationMember surface;
  ViewWindow crop;
};

// Implicit evaluation of any foliation member.
class LevelFunction {
 public:
  explicit LevelFunction(const FoliationMember& member);

  // F(s) - level.
  double value(const Vec3& s) const;
  Vec3 gradient(const Vec3& s) const;
  // Unit optical normal, -grad F normalized.
  Vec3 normal(const Vec3& s) const;

  const Vec3& focus_p() const { return p_; }
  // Revolution axis (unit), pointing from p toward the light.
  const Vec3& axis() const { return axis_; }
  // Characteristic length used for root bracketing.
  double scale() const { return scale_; }
  double level() const { return level_; }

 private:
  Vec3 i_;
  Vec3 p_;
  std::optional<Vec3> dir_;
  double w_light_ = 1.0;
  double w_point_ = 1.0;
  double level_ = 0.0;
  Vec3 axis_{0, 0, 1};
  double scale_ = 1.0;
};

// Which conic kind a reflection hologram of p needs.
MemberKind classify_member(const Vec3& p, const HostSurface& host, const LightSource& light);

// The unique member through s0. The host decides whether p is in front of or
// behind the optical surface (and, for refraction, the oval branch).
FoliationMember member_through(const Vec3& p, const LightSource& light, const Vec3& s0,
                               const Media& media, const HostSurface& host);

// Nearest zero of the member along the ray from the virtual point. Throws a
// miss error when the ray never crosses the member.
Vec3 radial_solve(const FoliationMember& member, const Vec3& direction_from_p);

inline Vec3 oval_radial_solve(const CartesianOval& oval, const Vec3& direction_from_p) {
  return radial_solve(FoliationMember{oval}, direction_from_p);
}

// Nearest zero of the member along the line origin + t * direction, t in
// [t_lo, t_hi], searching outward from t = 0. Returns nullopt when none.
std::optional<double> line_solve(const LevelFunction& f, const Vec3& origin, const Vec3& direction,
                                 double t_lo, double t_hi, double step);

// Point and optical normal at revolution azimuth and polar angle measured
// from the axis at the virtual point. Throws a domain error off the sheet.
std::pair<Vec3, Vec3> surface_point_and_normal(const FoliationMember& member, double azimuth,
                                               double latitude);

// |eta1 sin(theta_i) - eta2 sin(theta_p)| measured against the member normal.
double snell_residual(const CartesianOval& oval, const Vec3& s);

}  // namespace spechol
