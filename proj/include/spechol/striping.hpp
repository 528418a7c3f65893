#pragma once

// Horizontal-parallax stripings. The conforming tangent t1 = n x N of the
// ideal optical surface is integrated along the specularity curve into
// toolpaths; a profiled bit swept along a toolpath supplies the orthogonal
// tangent t2 = t1 x n.

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "spechol/fabrication.hpp"
#include "spechol/geom.hpp"

namespace spechol {

struct Stipple {
  Vec3 p;
  double weight = 1.0;
  double theta_min = -std::numbers::pi / 4;
  double theta_max = std::numbers::pi / 4;
  int priority = 0;
};

struct ToolpathSample {
  double theta = 0.0;  // view azimuth served by this sample
  Vec3 position;
  Vec3 t1;  // unit conforming tangent
  double param = 0.0;  // view path parameter of the serving eye
};

struct Toolpath {
  std::vector<ToolpathSample> samples;
  double c0 = 0.0;
  double c1 = 0.0;
  // Index of the first sample of every continuous piece (always starts with 0).
  std::vector<std::size_t> piece_starts{0};
  // Sample where the offsets (c0, c1) were applied.
  std::size_t anchor = 0;
  std::vector<std::string> warnings;
};

struct StripeArc {
  Toolpath path;  // samples restricted to [theta_a, theta_b]
  double theta_a = 0.0;
  double theta_b = 0.0;
  std::size_t stipple = 0;
};

struct Rejection {
  std::size_t stipple = 0;
  std::string reason;
};

struct Striping {
  std::vector<StripeArc> arcs;  // in acceptance order
  std::vector<Rejection> rejected;
  FabricationParams fab;
};

struct ProfilePoint {
  double depth = 0.0;
  double radius = 0.0;
};

struct BitProfile {
  std::vector<ProfilePoint> points;  // increasing depth, nonincreasing radius
  std::vector<double> segment_angles;  // tangent-to-axis angle of each segment, radians
  double angle_min = 0.0;
  double angle_max = 0.0;

  // True when some profile segment is within half a degree of the angle.
  bool covers(double angle) const;
};

struct CircleFit {
  Vec3 center;
  Vec3 normal;
  double radius = 0.0;
  double max_deviation = 0.0;
  bool is_line = false;
};

struct ConformingTangent {
  Vec3 t;  // (cos a, -sin t, 0) up to scale in the local frame; zero when degenerate
  bool degenerate = false;
};

// t1 for a distant eye at azimuth theta and the light at parameter alpha.
ConformingTangent conforming_tangent(double theta, double alpha, const Vec3& host_normal);
// Same construction for arbitrary light and eye directions.
ConformingTangent conforming_tangent(const Vec3& dir_to_light, const Vec3& dir_to_eye, const Vec3& host_normal);

// Closed-form flat-host toolpath: x = -p_z tan(theta), y = p_z sec(alpha) sec(theta) + c0.
Toolpath hyperbolic_toolpath(double p_z, double alpha, double c0, double theta_min, double theta_max,
                             double step);

// Fixed-step RK4 integration of the conforming tangent field along the
// specularity curve of the stipple. c0 and c1 offset the path from the
// specularity point at the centre of the integrated range.
Toolpath integrate_toolpath(const HostSurface& host, const Stipple& stipple, const LightSource& light,
                            const ViewPath& view, double c0, double c1, double step);

Striping make_striping(const std::vector<Stipple>& stipples, const LightSource& light, const HostSurface& host,
                       const ViewPath& view, const FabricationParams& fab);

// Minimum distance between two polylines.
double polyline_distance(const std::vector<ToolpathSample>& a, const std::vector<ToolpathSample>& b);

// t2 = t1 x n scaled to (-sin t, -cos a, (cos^2 a + sin^2 t) / (cos t + sin a)).
Vec3 orthogonal_tangent(double theta, double alpha);
// Angle between the host normal and t2.
double orthogonal_tangent_angle(double theta, double alpha);

BitProfile bit_profile_for(double theta_min, double theta_max, double alpha, double tool_radius);
BitProfile bit_profile_for(const Striping& striping, double alpha);

CircleFit circular_arc_fit(const Toolpath& path, double theta_min, double theta_max);

}  // namespace spechol
