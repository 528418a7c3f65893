#include "spechol/ridging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spechol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void validate(const FabricationParams& fab) {
  if (!(fab.delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "shell half-thickness must be positive");
  if (!(fab.pitch > 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge pitch must be positive");
  if (!(fab.extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "ridging extent must be positive");
}

// Search window along an apex ray, measured from the host point.
double reach(const FabricationParams& fab) { return 4.0 * (std::min(fab.delta, fab.extent) + fab.extent); }

Vec3 cone_normal(const RidgedSurface& rs, const Vec3& q, double rho, double psi) {
  const double h = 1e-6;
  const Vec3 along_psi = ridge_host_point(rs, rho, psi + h) - ridge_host_point(rs, rho, psi - h);
  Vec3 n = normalized(cross(q - rs.apex, along_psi));
  if (dot(n, rs.normal) < 0.0) n = -1.0 * n;
  return n;
}

}  // namespace

double Mesh::area(FaceTag tag) const {
  double total = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    if (tags[t] != tag) continue;
    const auto& [a, b, c] = triangles[t];
    total += 0.5 * norm(cross(vertices[b] - vertices[a], vertices[c] - vertices[a]));
  }
  return total;
}

Vec3 ridge_host_point(const RidgedSurface& rs, double rho, double psi) {
  const Vec3 flat = rs.foot + rho * (std::cos(psi) * rs.e1 + std::sin(psi) * rs.e2);
  return rs.host.is_plane() ? flat : rs.host.project(flat).point;
}

HostSample ridge_face_point(const RidgedSurface& rs, std::size_t band, double rho, double psi) {
  if (band >= rs.ridges.size()) throw Error(ErrorCode::InvalidArgument, "ridge band out of range");
  const LevelFunction f(rs.ridges[band].member);
  const Vec3 h = ridge_host_point(rs, rho, psi);
  const Vec3 dir = normalized(h - rs.apex);
  const double r = reach(rs.fab);
  const auto t = line_solve(f, h, dir, -r, r, r / 256.0);
  if (!t) {
    throw ShellTooThinError("no foliation member crosses the apex ray within reach of the host",
                            std::numeric_limits<double>::infinity());
  }
  const Vec3 s = h + *t * dir;
  return {s, f.normal(s)};
}

Vec3 ridge_exit_direction(const RidgedSurface& rs, const Vec3& s) {
  return rs.point_in_front ? normalized(rs.p - s) : normalized(s - rs.p);
}

bool ridge_retains(const RidgedSurface& rs, const Vec3& s) { return rs.crop.contains_direction(ridge_exit_direction(rs, s)); }

RidgedSurface build_ridging(const Vec3& p, const LightSource& light, const HostSurface& host,
                            const FabricationParams& fab, const ViewWindow& crop, const Media& media) {
  validate(fab);
  const double height = host.signed_distance(p);
  if (std::fabs(height) < 1e-9) throw Error(ErrorCode::DegenerateGeometry, "virtual point lies on the host");
  classify_member(p, host, light);

  RidgedSurface rs;
  rs.p = p;
  rs.light = light;
  rs.host = host;
  rs.media = media;
  rs.fab = fab;
  rs.crop = crop;
  rs.point_in_front = height > 0.0;

  bool on_axis = false;
  if (light.is_directional() || distance(light.position(), p) > 1e-9) {
    try {
      rs.foot = sightline_host_intersection(Eye::toward(light.direction_from(p)), p, host);
      on_axis = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Miss) throw;
    }
  }
  if (!on_axis) {
    rs.foot = host.project(p).point;
    if (light.is_directional() || distance(light.position(), p) > 1e-9) {
      rs.warnings.push_back("foliation axis misses the host; bands are centred below the virtual point");
    }
  }
  rs.normal = host.project(rs.foot).normal;
  rs.e1 = any_orthogonal(rs.normal);
  rs.e2 = cross(rs.normal, rs.e1);
  rs.apex = rs.foot + fab.standoff() * rs.normal;

  if (crop.empty()) {
    rs.warnings.push_back("crop window is empty; surface is empty");
    return rs;
  }

  const int bands = std::max(1, static_cast<int>(std::ceil(fab.extent / fab.pitch - 1e-9)));
  for (int b = 0; b < bands; ++b) {
    Ridge ridge;
    ridge.rho_inner = b * fab.pitch;
    ridge.rho_outer = std::min((b + 1) * fab.pitch, fab.extent);
    // Oblique axes tilt the members against the bands, so the midline point
    // used is the one with the median constant around the circle.
    const double rho_mid = 0.5 * (ridge.rho_inner + ridge.rho_outer);
    std::vector<std::pair<double, FoliationMember>> around;
    const int n_mid = rho_mid > 0.0 ? 36 : 1;
    for (int m = 0; m < n_mid; ++m) {
      FoliationMember member = member_through(p, light, ridge_host_point(rs, rho_mid, kTwoPi * m / n_mid), media, host);
      const double k = std::visit([](const auto& c) { return c.k; }, member);
      around.emplace_back(k, std::move(member));
    }
    std::nth_element(around.begin(), around.begin() + n_mid / 2, around.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    ridge.member = around[n_mid / 2].second;
    ridge.level = around[n_mid / 2].first;
    rs.ridges.push_back(std::move(ridge));
  }

  // Conformance over a check grid that includes both band edges.
  double worst = 0.0;
  for (std::size_t b = 0; b < rs.ridges.size(); ++b) {
    const Ridge& ridge = rs.ridges[b];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j <= 8; ++j) {
      const double rho = ridge.rho_inner + (ridge.rho_outer - ridge.rho_inner) * j / 8;
      for (int m = 0; m < 72; ++m) {
        const Vec3 s = ridge_face_point(rs, b, rho, kTwoPi * m / 72).point;
        const double d = host.signed_distance(s);
        worst = std::max(worst, std::fabs(d));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
    if (ridge.rho_outer - ridge.rho_inner <= 2.0 * (hi - lo)) {
      rs.warnings.push_back("band " + std::to_string(b) + " sag exceeds half the pitch");
    }
  }
  if (worst > fab.delta) {
    throw ShellTooThinError("ridged surface leaves the shell; half-thickness " + std::to_string(worst) + " mm required",
                            worst);
  }
  return rs;
}

RidgedSurface crop_ridging(const RidgedSurface& rs, double az_min, double az_max, double el_min, double el_max) {
  RidgedSurface out = rs;
  out.crop = rs.crop.intersect(ViewWindow{az_min, az_max, el_min, el_max});
  if (out.crop.empty()) {
    out.ridges.clear();
    out.warnings.push_back("crop window is empty; surface is empty");
  }
  return out;
}

Mesh mesh_ridging(const RidgedSurface& rs, const FabricationParams& fab) {
  if (rs.empty()) throw Error(ErrorCode::InvalidArgument, "cannot mesh an empty ridged surface");
  if (rs.fab.pitch * fab.resolution < 4.0) {
    throw Error(ErrorCode::Resolution, "mesh resolution gives fewer than 4 samples across a ridge");
  }
  const int n_psi = std::max(24, static_cast<int>(std::ceil(kTwoPi * rs.fab.extent * fab.resolution)));
  const auto psi_at = [&](int m) { return kTwoPi * m / n_psi; };

  Mesh mesh;
  std::vector<bool> keep;
  const auto add = [&](const Vec3& v, const Vec3& n, bool retained) {
    mesh.vertices.push_back(v);
    mesh.normals.push_back(n);
    keep.push_back(retained);
    return static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  };
  const auto add_tri = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, FaceTag tag) {
    if (!keep[a] || !keep[b] || !keep[c]) return;
    // Wind counter-clockwise about the vertex normals.
    const Vec3 geo = cross(mesh.vertices[b] - mesh.vertices[a], mesh.vertices[c] - mesh.vertices[a]);
    if (dot(geo, mesh.normals[a] + mesh.normals[b] + mesh.normals[c]) < 0.0) std::swap(b, c);
    mesh.triangles.push_back({a, b, c});
    mesh.tags.push_back(tag);
  };

  std::vector<std::uint32_t> prev_outer;  // outer ring of the previous band
  std::vector<Vec3> prev_outer_points;
  for (std::size_t b = 0; b < rs.ridges.size(); ++b) {
    const Ridge& ridge = rs.ridges[b];
    const int n_rho = std::max(4, static_cast<int>(std::ceil((ridge.rho_outer - ridge.rho_inner) * fab.resolution)));
    std::vector<std::vector<std::uint32_t>> rings;
    const auto face = [&](double rho, double psi) {
      const HostSample hs = ridge_face_point(rs, b, rho, psi);
      return add(hs.point, hs.normal, ridge_retains(rs, hs.point));
    };
    std::uint32_t centre = 0;
    const bool fan = ridge.rho_inner <= 0.0;
    if (fan) centre = face(0.0, 0.0);
    for (int j = fan ? 1 : 0; j <= n_rho; ++j) {
      const double rho = ridge.rho_inner + (ridge.rho_outer - ridge.rho_inner) * j / n_rho;
      std::vector<std::uint32_t> ring;
      for (int m = 0; m < n_psi; ++m) ring.push_back(face(rho, psi_at(m)));
      rings.push_back(std::move(ring));
    }
    if (fan) {
      for (int m = 0; m < n_psi; ++m) add_tri(centre, rings[0][m], rings[0][(m + 1) % n_psi], FaceTag::Imaging);
    }
    for (std::size_t j = 0; j + 1 < rings.size(); ++j) {
      for (int m = 0; m < n_psi; ++m) {
        const int m1 = (m + 1) % n_psi;
        add_tri(rings[j][m], rings[j + 1][m], rings[j + 1][m1], FaceTag::Imaging);
        add_tri(rings[j][m], rings[j + 1][m1], rings[j][m1], FaceTag::Imaging);
      }
    }

    // Backface strip on the cone between the previous band's outer edge and this band's inner edge.
    if (!prev_outer.empty()) {
      std::vector<std::uint32_t> lower, upper;
      for (int m = 0; m < n_psi; ++m) {
        const Vec3 a = mesh.vertices[prev_outer[m]];
        const Vec3 c = mesh.vertices[rings[0][m]];
        lower.push_back(add(a, cone_normal(rs, a, ridge.rho_inner, psi_at(m)), keep[prev_outer[m]]));
        upper.push_back(add(c, cone_normal(rs, c, ridge.rho_inner, psi_at(m)), keep[rings[0][m]]));
      }
      for (int m = 0; m < n_psi; ++m) {
        const int m1 = (m + 1) % n_psi;
        add_tri(lower[m], upper[m], upper[m1], FaceTag::Backface);
        add_tri(lower[m], upper[m1], lower[m1], FaceTag::Backface);
      }
    }
    prev_outer = rings.back();
  }

  // Drop vertices no kept triangle references.
  std::vector<std::int64_t> remap(mesh.vertices.size(), -1);
  for (const auto& t : mesh.triangles)
    for (auto v : t) remap[v] = 0;
  Mesh out;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (remap[v] < 0) continue;
    remap[v] = static_cast<std::int64_t>(out.vertices.size());
    out.vertices.push_back(mesh.vertices[v]);
    out.normals.push_back(mesh.normals[v]);
  }
  for (const auto& t : mesh.triangles) {
    out.triangles.push_back({static_cast<std::uint32_t>(remap[t[0]]), static_cast<std::uint32_t>(remap[t[1]]),
                             static_cast<std::uint32_t>(remap[t[2]])});
  }
  out.tags = mesh.tags;

  double worst = 0.0;
  for (const auto& v : out.vertices) worst = std::max(worst, conformance_distance(v, rs.host));
  if (worst > rs.fab.delta) {
    throw ShellTooThinError("mesh leaves the shell; half-thickness " + std::to_string(worst) + " mm required", worst);
  }
  return out;
}

void check_footprint_collisions(const std::vector<RidgedSurface>& surfaces) {
  for (std::size_t a = 0; a < surfaces.size(); ++a) {
    if (surfaces[a].empty()) continue;
    for (std::size_t b = a + 1; b < surfaces.size(); ++b) {
      if (surfaces[b].empty()) continue;
      const double reach_ab = surfaces[a].ridges.back().rho_outer + surfaces[b].ridges.back().rho_outer;
      if (distance(surfaces[a].foot, surfaces[b].foot) < reach_ab) {
        throw Error(ErrorCode::Collision, "ridged footprints of stipples " + std::to_string(a) + " and " +
                                              std::to_string(b) + " overlap on the host");
      }
    }
  }
}

}  // namespace spechol
