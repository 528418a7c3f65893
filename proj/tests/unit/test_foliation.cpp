#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "spechol/foliation.hpp"

using namespace spechol;

namespace {

constexpr double kPi = std::numbers::pi;
const HostSurface kWall = HostSurface::plane({0, 0, 0}, {0, 0, 1});

double focal_sum(const Vec3& s, const Vec3& i, const Vec3& p) { return distance(s, i) + distance(s, p); }
double focal_diff(const Vec3& s, const Vec3& i, const Vec3& p) { return distance(s, i) - distance(s, p); }

// Eye on the sightline through p that actually sees s: beyond p for points in
// front, beyond s for points behind.
Eye eye_on_sightline(const Vec3& s, const Vec3& p, bool point_in_front, double lambda) {
  return point_in_front ? Eye::at(p + lambda * (p - s)) : Eye::at(s + lambda * (s - p));
}

TangentBasis basis_from_normal(const Vec3& s, const Vec3& n) {
  const Vec3 t1 = any_orthogonal(n);
  return {t1, cross(n, t1), s};
}

// Test-side bisection of the implicit function along a ray.
Vec3 bisect_along(const FoliationMember& m, const Vec3& origin, const Vec3& u, double hi) {
  const LevelFunction f(m);
  double a = 0.0, b = hi;
  const double fa = f.value(origin + a * u);
  for (int k = 0; k < 200; ++k) {
    const double c = 0.5 * (a + b);
    if ((f.value(origin + c * u) < 0.0) == (fa < 0.0)) a = c; else b = c;
  }
  return origin + 0.5 * (a + b) * u;
}

}  // namespace

TEST_CASE("classify_member front, behind and degenerate cases") {
  const LightSource light = LightSource::point({0, 0, 20});
  CHECK(classify_member({0, 0, 5}, kWall, light) == MemberKind::Ellipsoid);
  CHECK(classify_member({0, 0, -5}, kWall, light) == MemberKind::Hyperboloid);
  CHECK(classify_member({0, 0, 20}, kWall, light) == MemberKind::Sphere);
  CHECK(classify_member({1, 2, 0}, kWall, light) == MemberKind::Paraboloid);
  CHECK(classify_member({0, 0, -5}, kWall, LightSource::from_alpha(0.2)) == MemberKind::Paraboloid);
}

TEST_CASE("member_through ellipsoid and hyperboloid constants") {
  const LightSource light = LightSource::point({0, 0, 20});
  const Vec3 s0{3, 0, 0};
  // Oracle: direct focal distance sums.
  const double sum = std::sqrt(409.0) + std::sqrt(34.0);
  const double diff = std::sqrt(409.0) - std::sqrt(34.0);
  CHECK(sum == doctest::Approx(26.0547).epsilon(1e-5));
  CHECK(diff == doctest::Approx(14.3927).epsilon(1e-5));

  const auto e = std::get<ConicSurface>(member_through({0, 0, 5}, light, s0, Media{}, kWall));
  CHECK(e.kind == MemberKind::Ellipsoid);
  CHECK(e.k == doctest::Approx(sum).epsilon(1e-14));
  CHECK(e.eccentricity == doctest::Approx(15.0 / sum));
  CHECK(e.eccentricity < 1.0);

  const auto h = std::get<ConicSurface>(member_through({0, 0, -5}, light, s0, Media{}, kWall));
  CHECK(h.kind == MemberKind::Hyperboloid);
  CHECK(h.k == doctest::Approx(diff).epsilon(1e-14));
  CHECK(h.sheet == Sheet::TowardPoint);
  CHECK(h.eccentricity > 1.0);
}

TEST_CASE("member_through Cartesian oval with virtual image branch") {
  const auto m = member_through({0, 0, -10}, LightSource::point({0, 0, 30}), {0, 0, 0}, Media{1.0, 1.5}, kWall);
  const auto& oval = std::get<CartesianOval>(m);
  CHECK(oval.branch == OvalBranch::VirtualImage);
  CHECK(oval.k == doctest::Approx(15.0).epsilon(1e-14));
}

TEST_CASE("member_through error paths") {
  const LightSource light = LightSource::point({0, 0, 20});
  CHECK_THROWS_AS(member_through({1, 1, 0}, light, {3, 0, 0}, Media{}, kWall), Error);
  CHECK_THROWS_AS(member_through({0, 0, 5}, light, {0, 0, 5}, Media{}, kWall), Error);
  try {
    member_through({0, 0, INFINITY}, LightSource::from_alpha(0), {3, 0, 0}, Media{}, kWall);
    FAIL("expected unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unsupported);
  }
}

TEST_CASE("sphere member points are at k/2 with radial normals") {
  const Vec3 c{0, 0, 20};
  const auto m = member_through(c, LightSource::point(c), {3, 0, 0}, Media{}, kWall);
  const auto& sph = std::get<ConicSurface>(m);
  CHECK(sph.kind == MemberKind::Sphere);
  for (double az : {0.0, 1.0, 2.5}) {
    for (double lat : {0.1, 1.2, 2.9}) {
      const auto [s, n] = surface_point_and_normal(m, az, lat);
      CHECK(distance(s, c) == doctest::Approx(sph.k / 2).epsilon(1e-12));
      CHECK(norm(n - normalized(c - s)) < 1e-12);
    }
  }
}

TEST_CASE("ellipsoid normal at the seed is the focal half vector") {
  const Vec3 i{0, 0, 20}, p{0, 0, 5}, s0{3, 0, 0};
  const auto m = member_through(p, LightSource::point(i), s0, Media{}, kWall);
  const double lat = std::acos(dot(normalized(s0 - p), Vec3{0, 0, 1}));
  const auto [s, n] = surface_point_and_normal(m, 0.0, lat);
  CHECK(distance(s, s0) < 1e-10);
  CHECK(norm(n - normalized(normalized(i - s0) + normalized(p - s0))) < 1e-10);
}

TEST_CASE("hyperboloid normal at the seed uses the virtual point sign") {
  const Vec3 i{0, 0, 20}, p{0, 0, -5}, s0{3, 0, 0};
  const auto m = member_through(p, LightSource::point(i), s0, Media{}, kWall);
  const LevelFunction f(m);
  const Vec3 n = f.normal(s0);
  CHECK(norm(n - normalized(normalized(i - s0) - normalized(p - s0))) < 1e-12);
  const auto [r1, r2] = normality_residual(basis_from_normal(s0, n), LightSource::point(i),
                                           eye_on_sightline(s0, p, false, 10.0), Media{});
  CHECK(std::fabs(r1) < 1e-12);
  CHECK(std::fabs(r2) < 1e-12);
}

TEST_CASE("randomized conic members: focal constancy, normality and eccentricity") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> xy(-10, 10), zi(5, 40), zp(-30, 30), ang(0, 2 * kPi), lat(0, kPi);
  int samples = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 i{xy(rng), xy(rng), zi(rng)};
    Vec3 p{xy(rng), xy(rng), zp(rng)};
    if (std::fabs(p.z) < 0.5) continue;
    const Vec3 s0{xy(rng), xy(rng), 0.0};
    const LightSource light = LightSource::point(i);
    FoliationMember m;
    try {
      m = member_through(p, light, s0, Media{}, kWall);
    } catch (const Error&) {
      continue;
    }
    const auto& c = std::get<ConicSurface>(m);
    const MemberKind kind = classify_member(p, kWall, light);
    CHECK(c.kind == kind);
    CHECK((c.eccentricity < 1.0) == (kind == MemberKind::Ellipsoid));
    CHECK((c.eccentricity > 1.0) == (kind == MemberKind::Hyperboloid));
    for (int k = 0; k < 20; ++k) {
      Vec3 s, n;
      try {
        std::tie(s, n) = surface_point_and_normal(m, ang(rng), lat(rng));
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Domain);
        continue;
      }
      ++samples;
      if (c.kind == MemberKind::Ellipsoid) {
        CHECK(std::fabs(focal_sum(s, i, p) - c.k) <= 1e-9 * c.k);
      } else {
        CHECK(std::fabs(std::fabs(focal_diff(s, i, p)) - c.k) <= 1e-9 * c.k);
      }
      const auto [r1, r2] = normality_residual(basis_from_normal(s, n), light,
                                               eye_on_sightline(s, p, c.kind == MemberKind::Ellipsoid, 3.0),
                                               Media{});
      CHECK(std::hypot(r1, r2) < 1e-9);
    }
  }
  CHECK(samples > 1000);
}

TEST_CASE("oval reduces to the conic when indices match") {
  const Vec3 i{1, 2, 25}, p{-1, 0, 6}, s0{4, -2, 0};
  const auto conic = member_through(p, LightSource::point(i), s0, Media{}, kWall);
  CartesianOval oval{i, p, std::nullopt, 1.0, 1.0, std::get<ConicSurface>(conic).k, OvalBranch::RealImage};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), lat(0, kPi);
  for (int k = 0; k < 200; ++k) {
    const Vec3 u = view_direction(ang(rng), lat(rng) - kPi / 2);
    CHECK(distance(oval_radial_solve(oval, u), radial_solve(conic, u)) < 1e-9);
  }
}

TEST_CASE("oval radial solve: on-axis root and Snell check off axis") {
  const auto m = member_through({0, 0, -10}, LightSource::point({0, 0, 30}), {0, 0, 0}, Media{1.0, 1.5}, kWall);
  const auto& oval = std::get<CartesianOval>(m);
  CHECK(norm(oval_radial_solve(oval, {0, 0, 1})) < 1e-12);

  const double ten = 10.0 * kPi / 180.0;
  const Vec3 u{std::sin(ten), 0, std::cos(ten)};
  const Vec3 s = oval_radial_solve(oval, u);
  CHECK(distance(s, bisect_along(m, oval.focus_p, u, 100.0)) < 1e-10);
  CHECK(snell_residual(oval, s) < 1e-9);
}

TEST_CASE("oval points are Fermat stationary") {
  for (double ratio : {1.3, 1.5, 1.7}) {
    const auto m = member_through({0, 0, -10}, LightSource::point({0, 0, 30}), {2, 1, 0}, Media{1.0, ratio}, kWall);
    const auto& oval = std::get<CartesianOval>(m);
    const LevelFunction f(m);
    for (double lat : {0.05, 0.2, 0.35}) {
      const auto [s, n] = surface_point_and_normal(m, 0.7, lat);
      const Vec3 t = any_orthogonal(n);
      const double h = 1e-4;
      const double change = std::fabs(f.value(s + h * t) - f.value(s));
      CHECK(change < 10.0 * h * h * oval.eta2);
    }
  }
}

TEST_CASE("surface_point_and_normal rejects parameters off the sheet") {
  const auto m = member_through({0, 0, -5}, LightSource::point({0, 0, 20}), {3, 0, 0}, Media{}, kWall);
  // Pointing straight away from the light never meets the sheet around p.
  try {
    surface_point_and_normal(m, 0.0, kPi);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
}

TEST_CASE("directional light paraboloid satisfies the directrix property") {
  const LightSource light = LightSource::directional({0, 0, 1});
  const Vec3 p{0, 0, -10};
  const auto m = member_through(p, light, {4, 0, 0}, Media{}, kWall);
  const auto& c = std::get<ConicSurface>(m);
  CHECK(c.kind == MemberKind::Paraboloid);
  CHECK(!c.point_in_front);
  for (double lat : {0.1, 0.5, 1.0}) {
    const auto [s, n] = surface_point_and_normal(m, 0.3, lat);
    CHECK(std::fabs(distance(s, p) + dot(Vec3{0, 0, 1}, s - p) - c.k) < 1e-9 * c.k);
  }
}
