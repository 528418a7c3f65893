#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "spechol/geom.hpp"

using namespace spechol;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    if (norm(v) > 1e-3) return normalized(v);
  }
}

void check_vec(const Vec3& a, const Vec3& b, double tol) {
  CHECK(std::fabs(a.x - b.x) <= tol);
  CHECK(std::fabs(a.y - b.y) <= tol);
  CHECK(std::fabs(a.z - b.z) <= tol);
}

}  // namespace

TEST_CASE("reflection_axis examples") {
  check_vec(reflection_axis({0, 0, 1}, {0, 0, 1}), {0, 0, 1}, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  // Light at alpha = 0, eye at theta = 0 and theta = pi/2.
  check_vec(reflection_axis({0, 1, 0}, {0, 0, 1}), {0, r, r}, 1e-15);
  check_vec(reflection_axis({0, 1, 0}, {1, 0, 0}), {r, r, 0}, 1e-15);
}

TEST_CASE("reflection_axis rejects antiparallel directions") {
  try {
    reflection_axis({0, 0, 1}, {0, 0, -1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateAxis);
  }
}

TEST_CASE("reflection_axis is symmetric and round-trips the reflection law") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 2000; ++k) {
    const Vec3 l = random_unit(rng), v = random_unit(rng);
    if (norm(l + v) < 1e-3) continue;
    const Vec3 n = reflection_axis(l, v);
    check_vec(n, reflection_axis(v, l), 0.0);
    const Vec3 mirrored = v - 2.0 * dot(v, n) * n;
    CHECK(norm(mirrored + l) < 1e-12);
  }
}

TEST_CASE("normality residual vanishes on a retroreflecting sphere") {
  const Vec3 c{1, 2, 3};
  const LightSource light = LightSource::point(c);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const Vec3 u = random_unit(rng);
    const Vec3 s = c + 5.0 * u;
    const Vec3 t1 = any_orthogonal(u);
    const TangentBasis basis{t1, cross(u, t1), s};
    const auto [r1, r2] = normality_residual(basis, light, Eye::at(c), Media{});
    CHECK(std::fabs(r1) < 1e-12);
    CHECK(std::fabs(r2) < 1e-12);
  }
}

TEST_CASE("normality residual of a tangent along the axis is |a|^2") {
  const Vec3 s{0, 0, 0};
  const LightSource light = LightSource::point({0, 3, 4});
  const Eye eye = Eye::at({0, 0, 10});
  const Media media{};
  const Vec3 a = optical_axis(s, light, eye, media);
  const Vec3 t2{1, 0, 0};
  const auto [r1, r2] = normality_residual({a, t2, s}, light, eye, media);
  CHECK(r1 == doctest::Approx(dot(a, a)));
  CHECK(r1 > 0.1);
  CHECK(r2 == doctest::Approx(dot(t2, a)));
}

TEST_CASE("normality zero set is invariant under basis rescaling") {
  const Vec3 s{0, 0, 0};
  const LightSource light = LightSource::from_alpha(0.3);
  const Eye eye = Eye::toward(view_direction(0.4, 0.0));
  const Vec3 n = normalized(optical_axis(s, light, eye, Media{}));
  const Vec3 t1 = any_orthogonal(n), t2 = cross(n, t1);
  for (double k1 : {-3.0, 0.5, 7.0}) {
    for (double k2 : {-0.1, 2.0}) {
      const auto [r1, r2] = normality_residual({k1 * t1, k2 * t2, s}, light, eye, Media{});
      CHECK(std::fabs(r1) < 1e-12);
      CHECK(std::fabs(r2) < 1e-12);
    }
  }
}

TEST_CASE("normality residual rejects a point on the light or eye") {
  const LightSource light = LightSource::point({0, 0, 5});
  CHECK_THROWS_AS(normality_residual({{1, 0, 0}, {0, 1, 0}, {0, 0, 5}}, light, Eye::at({0, 0, 9}), Media{}),
                  Error);
  CHECK_THROWS_AS(normality_residual({{1, 0, 0}, {0, 1, 0}, {0, 0, 9}}, light, Eye::at({0, 0, 9}), Media{}),
                  Error);
}

TEST_CASE("colinearity residual examples") {
  const Vec3 p{0, 0, -10};
  const Eye eye = Eye::at({3, 4, 50});
  auto [a, b] = colinearity_residual(p, p, eye);
  CHECK(a == 0.0);
  CHECK(b == 0.0);
  const Vec3 mid = 0.5 * (p + eye.position());
  std::tie(a, b) = colinearity_residual(mid, p, eye);
  CHECK(std::hypot(a, b) < 1e-12);
  const Vec3 perp = any_orthogonal(eye.position() - p);
  std::tie(a, b) = colinearity_residual(mid + perp, p, eye);
  CHECK(std::hypot(a, b) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("colinearity residual norm equals perpendicular distance") {
  // Norm is independent of which nullspace basis is used.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int k = 0; k < 500; ++k) {
    const Vec3 p{u(rng), u(rng), u(rng)}, e{u(rng), u(rng), u(rng) + 50}, s{u(rng), u(rng), u(rng)};
    const auto [a, b] = colinearity_residual(s, p, Eye::at(e));
    const double perp = norm(cross(s - p, normalized(e - p)));
    CHECK(std::hypot(a, b) == doctest::Approx(perp).epsilon(1e-10));
  }
}

TEST_CASE("nullspace basis is orthonormal and deterministic") {
  const auto [b1, b2] = nullspace_basis({0.2, -3, 1});
  CHECK(std::fabs(dot(b1, b2)) < 1e-15);
  CHECK(norm(b1) == doctest::Approx(1.0));
  CHECK(norm(b2) == doctest::Approx(1.0));
  CHECK(std::fabs(dot(b1, Vec3{0.2, -3, 1})) < 1e-14);
  const auto [c1, c2] = nullspace_basis({0.2, -3, 1});
  CHECK(b1 == c1);
  CHECK(b2 == c2);
}

TEST_CASE("conformance distance examples") {
  const HostSurface plane = HostSurface::plane({0, 0, 0}, {0, 0, 1});
  CHECK(conformance_distance({4, -2, 0}, plane) == 0.0);
  CHECK(conformance_distance({0, 0, 0.2}, plane) == doctest::Approx(0.2));
  const Vec3 c{1, 1, 1};
  const HostSurface sphere = HostSurface::sphere(c, 3.0);
  CHECK(conformance_distance(c + 3.5 * normalized(Vec3{1, 2, 3}), sphere) == doctest::Approx(0.5));
}

TEST_CASE("host field query failure is a host-evaluation error") {
  const HostSurface bad = HostSurface::field([](const Vec3&) -> HostSample { throw std::runtime_error("boom"); });
  try {
    conformance_distance({0, 0, 0}, bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HostEvaluation);
  }
}

TEST_CASE("sightline host intersection examples") {
  const HostSurface plane = HostSurface::plane({0, 0, 0}, {0, 0, 1});
  const Vec3 p{0, 0, -10};
  check_vec(sightline_host_intersection(Eye::toward(view_direction(0, 0)), p, plane), {0, 0, 0}, 1e-12);
  // x(theta) = -p_z tan(theta) for a distant eye.
  check_vec(sightline_host_intersection(Eye::toward(view_direction(kPi / 4, 0)), p, plane), {10, 0, 0}, 1e-6);
  check_vec(sightline_host_intersection(Eye::at({0, 0, 100}), p, plane), {0, 0, 0}, 1e-12);
}

TEST_CASE("finite eye sightline converges to the distant eye formula") {
  const HostSurface plane = HostSurface::plane({0, 0, 0}, {0, 0, 1});
  const double pz = -10.0;
  for (double theta : {0.1, 0.4, 0.7}) {
    const Vec3 far = sightline_host_intersection(Eye::at(1e6 * std::fabs(pz) * view_direction(theta, 0)),
                                                 {0, 0, pz}, plane);
    const double expected = -pz * std::tan(theta);
    CHECK(std::fabs(far.x - expected) / std::fabs(expected) < 1e-4);
  }
}

TEST_CASE("sightline host intersection on sphere and field hosts") {
  const HostSurface sphere = HostSurface::sphere({0, 0, -50}, 50.0);
  const Vec3 hit = sightline_host_intersection(Eye::toward({0, 0, 1}), {0, 0, -10}, sphere);
  check_vec(hit, {0, 0, 0}, 1e-12);

  const HostSurface field = HostSurface::field([](const Vec3& s) {
    return HostSample{{s.x, s.y, 0.0}, {0, 0, 1}};
  });
  const Vec3 a = sightline_host_intersection(Eye::toward(view_direction(0.3, 0.1)), {1, 2, -7}, field);
  const Vec3 b = sightline_host_intersection(Eye::toward(view_direction(0.3, 0.1)), {1, 2, -7},
                                             HostSurface::plane({0, 0, 0}, {0, 0, 1}));
  check_vec(a, b, 1e-9);
}

TEST_CASE("sightline that misses the host is reported") {
  const HostSurface sphere = HostSurface::sphere({100, 0, 0}, 1.0);
  try {
    sightline_host_intersection(Eye::toward({0, 0, 1}), {0, 0, -10}, sphere);
    FAIL("expected a miss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Miss);
  }
}

TEST_CASE("view path sampling") {
  const ViewPath orbit(OrbitPath{{0, 0, 0}, 500.0, 0.0, -kPi / 4, kPi / 4}, 5);
  CHECK(orbit.sample_param(0) == -kPi / 4);
  CHECK(orbit.sample_param(4) == kPi / 4);
  CHECK(norm(orbit.eye_at(0.0).position() - Vec3{0, 0, 500}) < 1e-12);
  CHECK_THROWS_AS(ViewPath(OrbitPath{{0, 0, 0}, -1.0, 0.0, 0.0, 1.0}, 3), Error);
  CHECK_THROWS_AS(ViewPath(InfinityPath{1.0, 0.0, 0.0}, 3), Error);
  const auto [theta, phi] = view_angles(view_direction(0.3, -0.2));
  CHECK(theta == doctest::Approx(0.3));
  CHECK(phi == doctest::Approx(-0.2));
}
