#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "doctest.h"
#include "spechol/ridging.hpp"

using namespace spechol;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
const HostSurface kWall = HostSurface::plane({0, 0, 0}, {0, 0, 1});

double point_segment(const Vec3& q, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp(dot(q - a, ab) / std::max(dot(ab, ab), 1e-300), 0.0, 1.0);
  return distance(q, a + t * ab);
}

double point_triangle(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = cross(b - a, c - a);
  const double nn = dot(n, n);
  if (nn > 0.0) {
    const Vec3 proj = q - (dot(q - a, n) / nn) * n;
    const bool inside = dot(cross(b - a, proj - a), n) >= 0 && dot(cross(c - b, proj - b), n) >= 0 &&
                        dot(cross(a - c, proj - c), n) >= 0;
    if (inside) return distance(q, proj);
  }
  return std::min({point_segment(q, a, b), point_segment(q, b, c), point_segment(q, c, a)});
}

// One-sided Hausdorff distance from the vertices of `from` to the surface of `to`.
double vertex_to_mesh(const Mesh& from, const Mesh& to, double cell) {
  std::map<std::pair<long, long>, std::vector<std::size_t>> grid;
  const auto key = [cell](const Vec3& v) {
    return std::pair{static_cast<long>(std::floor(v.x / cell)), static_cast<long>(std::floor(v.y / cell))};
  };
  for (std::size_t t = 0; t < to.triangles.size(); ++t) {
    const auto& tri = to.triangles[t];
    const Vec3 c = (to.vertices[tri[0]] + to.vertices[tri[1]] + to.vertices[tri[2]]) / 3.0;
    grid[key(c)].push_back(t);
  }
  double worst = 0.0;
  for (const auto& v : from.vertices) {
    const auto [kx, ky] = key(v);
    double best = std::numeric_limits<double>::infinity();
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({kx + dx, ky + dy});
        if (it == grid.end()) continue;
        for (std::size_t t : it->second) {
          const auto& tri = to.triangles[t];
          best = std::min(best, point_triangle(v, to.vertices[tri[0]], to.vertices[tri[1]], to.vertices[tri[2]]));
        }
      }
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("point light ellipsoid ridging: focal sums per band and conformance") {
  const Vec3 i{0, 0, 20}, p{0, 0, 5};
  const RidgedSurface rs = build_ridging(p, LightSource::point(i), kWall, FabricationParams{});
  REQUIRE(rs.ridges.size() == 2);
  for (std::size_t b = 0; b < rs.ridges.size(); ++b) {
    const Ridge& r = rs.ridges[b];
    CHECK(std::get<ConicSurface>(r.member).kind == MemberKind::Ellipsoid);
    for (int j = 0; j <= 10; ++j) {
      const double rho = r.rho_inner + (r.rho_outer - r.rho_inner) * j / 10;
      for (int m = 0; m < 36; ++m) {
        const Vec3 s = ridge_face_point(rs, b, rho, m * 10 * kDeg).point;
        CHECK(std::fabs(distance(s, i) + distance(s, p) - r.level) < 1e-6);
        CHECK(conformance_distance(s, kWall) <= 0.5);
      }
    }
  }
  CHECK(rs.ridges[1].level > rs.ridges[0].level);
  const Mesh mesh = mesh_ridging(rs, FabricationParams{});
  for (const auto& v : mesh.vertices) CHECK(conformance_distance(v, kWall) <= 0.5);
}

TEST_CASE("band constants increase outward for ellipsoids") {
  FabricationParams fab;
  fab.pitch = 0.5;
  fab.extent = 3.0;
  fab.delta = 1.0;  // the oblique axis tilts the members against the bands
  const RidgedSurface rs = build_ridging({1, -1, 8}, LightSource::point({0, 3, 30}), kWall, fab);
  REQUIRE(rs.ridges.size() == 6);
  for (std::size_t b = 1; b < rs.ridges.size(); ++b) CHECK(rs.ridges[b].level > rs.ridges[b - 1].level);
}

TEST_CASE("mesh normals are unit and windings agree with them") {
  const RidgedSurface rs = build_ridging({0, 0, 5}, LightSource::point({0, 0, 20}), kWall, FabricationParams{});
  const Mesh mesh = mesh_ridging(rs, FabricationParams{});
  CHECK(mesh.triangles.size() == mesh.tags.size());
  for (const auto& n : mesh.normals) CHECK(std::fabs(norm(n) - 1.0) < 1e-12);
  for (const auto& t : mesh.triangles) {
    const Vec3 geo = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    CHECK(dot(geo, mesh.normals[t[0]] + mesh.normals[t[1]] + mesh.normals[t[2]]) >= 0.0);
  }
}

TEST_CASE("Fresnel paraboloidal reflector from a directional light at normal incidence") {
  const Vec3 d{0, 0, 1}, p{0, 0, -10};
  const RidgedSurface rs = build_ridging(p, LightSource::directional(d), kWall, FabricationParams{});
  REQUIRE(rs.ridges.size() >= 2);
  CHECK(distance(rs.foot, {0, 0, 0}) < 1e-12);
  for (std::size_t b = 0; b < rs.ridges.size(); ++b) {
    const auto& c = std::get<ConicSurface>(rs.ridges[b].member);
    CHECK(c.kind == MemberKind::Paraboloid);
    CHECK(!c.point_in_front);
    for (int m = 0; m < 12; ++m) {
      const double rho = rs.ridges[b].rho_inner + 0.1 * m / 12.0 * 10;
      const Vec3 s = ridge_face_point(rs, b, std::min(rho, rs.ridges[b].rho_outer), m * 30 * kDeg).point;
      CHECK(std::fabs(distance(s, p) + dot(d, s - p) - c.k) <= 1e-9 * c.k);
    }
  }
  const Mesh mesh = mesh_ridging(rs, FabricationParams{});
  CHECK(mesh.area(FaceTag::Backface) > 0.0);
  CHECK(mesh.area(FaceTag::Imaging) > 0.0);
}

TEST_CASE("unconstrained limit gives one uncropped member") {
  FabricationParams fab;
  fab.delta = 1e3;
  fab.pitch = 1e3;
  const RidgedSurface rs = build_ridging({0, 0, 5}, LightSource::point({0, 0, 20}), kWall, fab);
  CHECK(rs.ridges.size() == 1);
  CHECK(rs.crop == ViewWindow{});
}

TEST_CASE("single spherical ridge puts every vertex at k/2 from the centre") {
  const Vec3 c{0, 0, 20};
  FabricationParams fab;
  fab.pitch = 4.0;
  const RidgedSurface rs = build_ridging(c, LightSource::point(c), kWall, fab);
  REQUIRE(rs.ridges.size() == 1);
  const double k = rs.ridges[0].level;
  const Mesh mesh = mesh_ridging(rs, fab);
  CHECK(mesh.area(FaceTag::Backface) == 0.0);
  for (const auto& v : mesh.vertices) CHECK(std::fabs(distance(v, c) - k / 2) < 1e-6);
}

TEST_CASE("doubling the mesh resolution moves the surface less than pitch/100") {
  FabricationParams fab;
  fab.delta = 1.0;
  const RidgedSurface rs = build_ridging({0, 0, -6}, LightSource::point({0, 2, 25}), kWall, fab);
  const Mesh coarse = mesh_ridging(rs, fab);
  fab.resolution *= 2;
  const Mesh fine = mesh_ridging(rs, fab);
  const double h = std::max(vertex_to_mesh(coarse, fine, 0.5), vertex_to_mesh(fine, coarse, 0.5));
  CHECK(h < fab.pitch / 100);
}

TEST_CASE("ridging error paths") {
  try {
    build_ridging({1, 1, 0}, LightSource::point({0, 0, 20}), kWall, FabricationParams{});
    FAIL("expected degenerate geometry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateGeometry);
  }
  FabricationParams thin;
  thin.delta = 0.01;
  try {
    build_ridging({0, 0, 5}, LightSource::point({0, 0, 20}), kWall, thin);
    FAIL("expected shell too thin");
  } catch (const ShellTooThinError& e) {
    CHECK(e.code() == ErrorCode::ShellTooThin);
    CHECK(e.required_delta() > thin.delta);
    CHECK(e.required_delta() < 0.5);
  }
  FabricationParams coarse;
  coarse.resolution = 1.0;
  const RidgedSurface rs = build_ridging({0, 0, 5}, LightSource::point({0, 0, 20}), kWall, FabricationParams{});
  try {
    mesh_ridging(rs, coarse);
    FAIL("expected resolution error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Resolution);
  }
}

TEST_CASE("cropping: identity, empty and narrowing") {
  FabricationParams fab;
  fab.delta = 1.5;
  const RidgedSurface rs = build_ridging({0, 0, -8}, LightSource::point({0, 5, 30}), kWall, fab);
  const Mesh full = mesh_ridging(rs, FabricationParams{});
  const RidgedSurface same = crop_ridging(rs, -kPi, kPi, -kPi / 2, kPi / 2);
  const Mesh same_mesh = mesh_ridging(same, FabricationParams{});
  CHECK(same_mesh.triangles.size() == full.triangles.size());
  CHECK(same_mesh.vertices.size() == full.vertices.size());

  const RidgedSurface none = crop_ridging(rs, 0.1, 0.1, -kPi / 2, kPi / 2);
  CHECK(none.empty());
  CHECK_FALSE(none.warnings.empty());

  const RidgedSurface narrow = crop_ridging(rs, -5 * kDeg, 5 * kDeg, -kPi / 2, kPi / 2);
  const Mesh narrow_mesh = mesh_ridging(narrow, FabricationParams{});
  CHECK(narrow_mesh.area(FaceTag::Imaging) > 0.0);
  CHECK(narrow_mesh.area(FaceTag::Imaging) < full.area(FaceTag::Imaging));
  for (const auto& t : narrow_mesh.triangles) {
    for (auto v : t) {
      const auto [az, el] = view_angles(ridge_exit_direction(narrow, narrow_mesh.vertices[v]));
      CHECK(az >= -5 * kDeg - 1e-12);
      CHECK(az <= 5 * kDeg + 1e-12);
    }
  }
}

TEST_CASE("imaging faces satisfy normality for eyes on the sightline") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0, 1), far(5, 500);
  const LightSource light = LightSource::point({2, 6, 35});
  for (const Vec3 p : {Vec3{1, 0, -7}, Vec3{0, 1, 6}}) {
    FabricationParams fab;
    fab.delta = 1.5;
    const RidgedSurface rs = build_ridging(p, light, kWall, fab);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t b = static_cast<std::size_t>(unit(rng) * rs.ridges.size()) % rs.ridges.size();
      const Ridge& r = rs.ridges[b];
      const double rho = r.rho_inner + (r.rho_outer - r.rho_inner) * unit(rng);
      const HostSample hs = ridge_face_point(rs, b, rho, 2 * kPi * unit(rng));
      const Vec3 exit = ridge_exit_direction(rs, hs.point);
      Vec3 eye = hs.point + far(rng) * exit;
      if (rs.point_in_front && distance(eye, hs.point) < distance(p, hs.point)) eye = p + exit;
      const Vec3 t1 = any_orthogonal(hs.normal);
      const auto [r1, r2] = normality_residual({t1, cross(hs.normal, t1), hs.point}, light, Eye::at(eye), Media{});
      CHECK(std::hypot(r1, r2) < 1e-6);
    }
  }
}

TEST_CASE("ridging on a sphere host conforms") {
  const HostSurface ball = HostSurface::sphere({0, 0, -60}, 60.0);
  const RidgedSurface rs = build_ridging({0, 1, -6}, LightSource::point({0, 4, 30}), ball, FabricationParams{});
  const Mesh mesh = mesh_ridging(rs, FabricationParams{});
  for (const auto& v : mesh.vertices) CHECK(conformance_distance(v, ball) <= 0.5);
}

TEST_CASE("overlapping footprints are reported as collisions") {
  const LightSource light = LightSource::directional({0, 0, 1});
  const auto a = build_ridging({0, 0, -10}, light, kWall, FabricationParams{});
  const auto b = build_ridging({5, 0, -10}, light, kWall, FabricationParams{});
  const auto c = build_ridging({9, 0, -10}, light, kWall, FabricationParams{});
  CHECK_NOTHROW(check_footprint_collisions({a, c}));
  try {
    check_footprint_collisions({a, b});
    FAIL("expected collision");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Collision);
  }
}
