#pragma once

// Fresnel-like ridged surfaces. The host is split into annular bands around
// the foot of the foliation axis; each band carries the member that passes
// through its midline, trimmed by the cones from a common apex in front of
// the host. The cone segments between adjacent bands are the backfaces.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spechol/fabrication.hpp"
#include "spechol/foliation.hpp"

namespace spechol {

struct Ridge {
  FoliationMember member;
  double rho_inner = 0.0;  // footprint radii on the host, mm
  double rho_outer = 0.0;
  double level = 0.0;      // member constant k
};

struct RidgedSurface {
  Vec3 p;
  LightSource light = LightSource::from_alpha(0.0);
  HostSurface host = HostSurface::plane({0, 0, 0}, {0, 0, 1});
  Media media;
  FabricationParams fab;
  Vec3 foot;               // axis foot-point on the host
  Vec3 normal{0, 0, 1};    // host normal at the foot
  Vec3 e1{1, 0, 0}, e2{0, 1, 0};
  Vec3 apex;
  bool point_in_front = false;
  std::vector<Ridge> ridges;  // ordered by increasing radius
  ViewWindow crop;
  std::vector<std::string> warnings;

  bool empty() const { return ridges.empty(); }
};

enum class FaceTag : std::uint8_t { Imaging, Backface };

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;  // unit, per vertex
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<FaceTag> tags;  // per triangle

  double area(FaceTag tag) const;
};

RidgedSurface build_ridging(const Vec3& p, const LightSource& light, const HostSurface& host,
                            const FabricationParams& fab, const ViewWindow& crop = {}, const Media& media = {});

// Narrows the crop window. An empty window leaves an empty surface with a warning.
RidgedSurface crop_ridging(const RidgedSurface& rs, double az_min, double az_max, double el_min, double el_max);

Mesh mesh_ridging(const RidgedSurface& rs, const FabricationParams& fab);

// Host point at polar coordinates around the foot.
Vec3 ridge_host_point(const RidgedSurface& rs, double rho, double psi);
// Imaging-face point and optical normal of a band above host point (rho, psi).
HostSample ridge_face_point(const RidgedSurface& rs, std::size_t band, double rho, double psi);
// Direction from s toward the eyes that see p reflected at s.
Vec3 ridge_exit_direction(const RidgedSurface& rs, const Vec3& s);
// True when the crop window keeps the imaging point s.
bool ridge_retains(const RidgedSurface& rs, const Vec3& s);

// Throws a collision error when two surfaces' footprints overlap on the host.
void check_footprint_collisions(const std::vector<RidgedSurface>& surfaces);

}  // namespace spechol
