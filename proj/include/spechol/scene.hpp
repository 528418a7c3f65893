#pragma once

// Scene documents: a sectioned key-value text format.
//
//   [light]   type = point | directional; position = x y z; direction = x y z; alpha = deg
//   [host]    type = plane | sphere; origin, normal | center, radius, outside
//   [view]    type = orbit | line | infinity; samples; center, radius, elevation,
//             theta_min, theta_max | origin, direction, range
//   [media]   eta1, eta2                      (optional)
//   [fab]     delta, pitch, standoff, ...     (optional)
//   [stipples] one per line: x y z weight theta_min theta_max priority
//
// Angles are degrees in the document and radians everywhere else.

#include <optional>
#include <string>
#include <vector>

#include "spechol/fabrication.hpp"
#include "spechol/geom.hpp"
#include "spechol/striping.hpp"

namespace spechol {

enum class LightKind { Point, Directional };
enum class HostKind { Plane, Sphere };
enum class ViewKind { Orbit, Line, Infinity };

struct LightSpec {
  LightKind kind = LightKind::Point;
  Vec3 position;
  Vec3 direction{0, 0, 1};
  std::optional<double> alpha_deg;  // directional light given by its elevation
  bool operator==(const LightSpec&) const = default;
};

struct HostSpec {
  HostKind kind = HostKind::Plane;
  Vec3 origin;
  Vec3 normal{0, 0, 1};
  Vec3 center;
  double radius = 0.0;
  bool outside = true;
  bool operator==(const HostSpec&) const = default;
};

struct ViewSpec {
  ViewKind kind = ViewKind::Infinity;
  int samples = 2;
  Vec3 center;
  double radius = 1000.0;
  double elevation_deg = 0.0;
  double theta_min_deg = -45.0;
  double theta_max_deg = 45.0;
  Vec3 origin;
  Vec3 direction{1, 0, 0};
  double range = 0.0;
  bool operator==(const ViewSpec&) const = default;
};

struct StippleSpec {
  Vec3 p;
  double weight = 1.0;
  double theta_min_deg = -45.0;
  double theta_max_deg = 45.0;
  int priority = 0;
  bool operator==(const StippleSpec&) const = default;
};

struct SceneSpec {
  Media media;
  LightSpec light;
  HostSpec host;
  ViewSpec view;
  FabricationParams fab;  // fab.step is ignored; the document step is step_deg
  double step_deg = 0.1;
  std::vector<StippleSpec> stipples;
  bool operator==(const SceneSpec& o) const;
};

// Throws a parse error carrying "line:column" on malformed input.
SceneSpec parse_scene(const std::string& text);
std::string print_scene(const SceneSpec& scene);

FabricationParams scene_fab(const SceneSpec& scene);
LightSource scene_light(const SceneSpec& scene);
HostSurface scene_host(const SceneSpec& scene);
ViewPath scene_view(const SceneSpec& scene);
std::vector<Stipple> scene_stipples(const SceneSpec& scene);

}  // namespace spechol
