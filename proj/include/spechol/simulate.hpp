#pragma once

// Specular glint finder and stereo triangulation. Glints are points where
// the surface normal is parallel to the optical axis for a given eye and
// light; pairs of glints seen by two eyes triangulate the perceived point.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spechol/foliation.hpp"
#include "spechol/ridging.hpp"
#include "spechol/striping.hpp"

namespace spechol {

enum class GlintTag : std::uint8_t { Imaging, BackfaceStray };

struct Glint {
  Eye eye = Eye::toward({0, 0, 1});
  Vec3 point;
  Vec3 normal;
  double normality = 0.0;    // |n x unit axis|
  double colinearity = 0.0;  // distance of the point from the intended sightline, mm; 0 when unknown
  GlintTag tag = GlintTag::Imaging;
  std::size_t source = 0;    // stipple, band or triangle the glint came from
};

struct GlintOptions {
  double tol = 1e-10;
  double dedupe_radius = 0.2;  // glints closer than this merge
  double seed_angle = 5.0 * std::numbers::pi / 180.0;
};

std::vector<Glint> find_glints(const RidgedSurface& rs, const Eye& eye, const GlintOptions& opt = {});
std::vector<Glint> find_glints(const Mesh& mesh, const Eye& eye, const LightSource& light, const Media& media,
                               const GlintOptions& opt = {}, const std::optional<Vec3>& intended = std::nullopt);
// Glints on the grooves swept along each arc of a striping.
std::vector<Glint> find_glints(const Striping& striping, const std::vector<Stipple>& stipples, const Eye& eye,
                               const LightSource& light, const Media& media, const GlintOptions& opt = {});
// Glints on one full foliation member, kept only where the crop admits the eye.
std::vector<Glint> find_glints(const SurfacePatch& patch, const Eye& eye, const LightSource& light,
                               const Media& media, const GlintOptions& opt = {});

struct TriangulationResult {
  Vec3 point;
  double residual = 0.0;  // gap between the two sightlines, mm
  double baseline = 0.0;  // angle between the sightlines, radians
  bool at_infinity = false;
};

TriangulationResult triangulate(const Glint& left, const Glint& right);

struct RasterParams {
  int width = 64;
  int height = 64;
  double pixels_per_mm = 4.0;  // image scale at the look-at point
};

struct GlintView {
  double param = 0.0;
  double theta = 0.0;
  Eye eye = Eye::toward({0, 0, 1});
  std::vector<Glint> glints;
};

struct GlintMap {
  int width = 0;
  int height = 0;
  std::vector<GlintView> views;                // ordered by theta
  std::vector<std::vector<std::uint8_t>> frames;  // row-major, top row first
  std::vector<std::string> warnings;
};

// Everything that can glint in a simulated scene.
struct SimulationScene {
  LightSource light = LightSource::from_alpha(0.0);
  Media media;
  std::vector<Stipple> stipples;
  std::optional<Striping> striping;
  std::vector<RidgedSurface> ridgings;
  GlintOptions options;
};

std::vector<Glint> scene_glints(const SimulationScene& scene, const Eye& eye);

// Orbit paths use a pinhole at the eye aimed at the orbit centre, line paths a
// pinhole looking along the host normal at the origin, and paths at infinity
// an orthographic projection along the view direction through the origin.
GlintMap render_glintmap(const SimulationScene& scene, const ViewPath& view, const RasterParams& raster);

// Intensity-weighted centroid of a frame, nullopt for an all-black frame.
std::optional<std::pair<double, double>> frame_centroid(const GlintMap& map, std::size_t frame);

}  // namespace spechol
