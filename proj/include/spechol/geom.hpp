#pragma once

// Scene primitives and the constraint residuals every other module is
// checked against.
//
// Frame convention: the host is wall mounted. +z is the host normal pointing
// at the viewer, +y is up, +x is to the viewer's right. A directional light
// with parameter alpha sits in direction (0, cos alpha, sin alpha), so
// alpha = 0 is light grazing from straight above. All lengths are mm and all
// angles radians.

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "spechol/error.hpp"
#include "spechol/vec3.hpp"

namespace spechol {

struct PointLight {
  Vec3 position;
};

struct DirectionalLight {
  Vec3 direction;  // unit, pointing from the scene toward the light
  double alpha = 0.0;
};

class LightSource {
 public:
  static LightSource point(const Vec3& position);
  // Light at infinity in direction (0, cos alpha, sin alpha).
  static LightSource from_alpha(double alpha);
  static LightSource directional(const Vec3& direction);

  bool is_directional() const { return std::holds_alternative<DirectionalLight>(v_); }
  const Vec3& position() const;       // point lights only
  const Vec3& direction() const;      // directional lights only
  double alpha() const;               // directional lights only

  // Unit vector from s toward the light.
  Vec3 direction_from(const Vec3& s) const;

 private:
  std::variant<PointLight, DirectionalLight> v_;
};

// An eye is either a finite position or a direction at infinity.
class Eye {
 public:
  static Eye at(const Vec3& position) { return Eye(position, false); }
  static Eye toward(const Vec3& direction) { return Eye(normalized(direction), true); }

  bool at_infinity() const { return infinite_; }
  const Vec3& position() const { return v_; }
  const Vec3& direction() const { return v_; }

  // Unit vector from s toward the eye.
  Vec3 direction_from(const Vec3& s) const { return infinite_ ? v_ : normalized(v_ - s); }

 private:
  Eye(const Vec3& v, bool inf) : v_(v), infinite_(inf) {}
  Vec3 v_;
  bool infinite_;
};

// Direction of view azimuth theta, elevation phi: (sin t cos p, sin p, cos t cos p).
Vec3 view_direction(double theta, double phi);
// Inverse of view_direction: {theta, phi}.
std::pair<double, double> view_angles(const Vec3& direction);

struct OrbitPath {
  Vec3 center;
  double radius = 1000.0;
  double elevation = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
};

struct LinePath {
  Vec3 origin;
  Vec3 direction{1, 0, 0};
  double range = 0.0;  // eyes span origin + [-range/2, range/2] * direction
};

struct InfinityPath {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double elevation = 0.0;
};

class ViewPath {
 public:
  using Shape = std::variant<OrbitPath, LinePath, InfinityPath>;

  ViewPath(Shape shape, int samples);

  const Shape& shape() const { return shape_; }
  int samples() const { return samples_; }

  // Scalar parameter of the path: azimuth for orbits and infinity paths,
  // signed distance along the line for line paths.
  double param_min() const;
  double param_max() const;
  Eye eye_at(double param) const;
  // Parameter of sample i in [0, samples).
  double sample_param(int i) const;

 private:
  Shape shape_;
  int samples_;
};

struct HostSample {
  Vec3 point;   // nearest host point
  Vec3 normal;  // unit, viewer side
};

struct PlaneHost {
  Vec3 origin;
  Vec3 normal{0, 0, 1};
};

struct SphereHost {
  Vec3 center;
  double radius = 1.0;
  bool outside = true;  // viewer outside the sphere (convex host)
};

struct FieldHost {
  std::function<HostSample(const Vec3&)> query;
};

class HostSurface {
 public:
  using Shape = std::variant<PlaneHost, SphereHost, FieldHost>;

  static HostSurface plane(const Vec3& origin, const Vec3& normal);
  static HostSurface sphere(const Vec3& center, double radius, bool outside = true);
  static HostSurface field(std::function<HostSample(const Vec3&)> query);

  const Shape& shape() const { return shape_; }
  bool is_plane() const { return std::holds_alternative<PlaneHost>(shape_); }

  HostSample project(const Vec3& s) const;
  // Signed distance from the host, positive on the viewer side.
  double signed_distance(const Vec3& s) const;

 private:
  explicit HostSurface(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
};

struct Media {
  double eta1 = 1.0;
  double eta2 = 1.0;

  bool reflection() const { return eta1 == eta2; }
};

struct TangentBasis {
  Vec3 t1;
  Vec3 t2;
  Vec3 s;

  bool nondeficient() const { return norm(cross(t1, t2)) > 1e-9; }
};

// Normalized half vector of two unit directions.
Vec3 reflection_axis(const Vec3& dir_to_light, const Vec3& dir_to_eye);

// eta-weighted axis eta1 * u(i - s) + eta2 * u(e - s), unnormalized.
Vec3 optical_axis(const Vec3& s, const LightSource& light, const Eye& eye, const Media& media);

// (<t1, a>, <t2, a>) for the optical axis a at the basis point.
std::pair<double, double> normality_residual(const TangentBasis& basis, const LightSource& light,
                                             const Eye& eye, const Media& media);

// Deterministic orthonormal basis of the plane orthogonal to d.
std::pair<Vec3, Vec3> nullspace_basis(const Vec3& d);

// Offset of s from the line through p and the eye, in the nullspace basis of
// the sightline direction.
std::pair<double, double> colinearity_residual(const Vec3& s, const Vec3& p, const Eye& eye);

double conformance_distance(const Vec3& s, const HostSurface& host);

// Where the sightline from the eye through p meets the host, nearest the eye.
Vec3 sightline_host_intersection(const Eye& eye, const Vec3& p, const HostSurface& host);

}  // namespace spechol
