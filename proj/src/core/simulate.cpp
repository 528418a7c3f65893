#include "spechol/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace spechol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Eval2 = std::function<std::optional<HostSample>(double, double)>;
using AxisFn = std::function<Vec3(const Vec3&)>;

struct Solved {
  double u = 0.0, v = 0.0;
  HostSample hs;
  double residual = 0.0;
};

double angle_between(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(dot(normalized(a), normalized(b)), -1.0, 1.0));
}

// Levenberg-Marquardt on n x unit(axis) = 0 over a 2D patch with finite-difference Jacobian.
std::optional<Solved> refine2(const Eval2& eval, double u, double v, double hu, double hv, const AxisFn& axis,
                              double tol) {
  struct State {
    Vec3 c;
    HostSample hs;
  };
  const auto state = [&](double a, double b) -> std::optional<State> {
    const auto hs = eval(a, b);
    if (!hs) return std::nullopt;
    return State{cross(hs->normal, normalized(axis(hs->point))), *hs};
  };
  auto cur = state(u, v);
  if (!cur) return std::nullopt;
  double lambda = 1e-6;
  for (int it = 0; it < 80 && norm(cur->c) >= tol; ++it) {
    const auto up = state(u + hu, v), um = state(u - hu, v), vp = state(u, v + hv), vm = state(u, v - hv);
    if (!up || !um || !vp || !vm) return std::nullopt;
    const Vec3 cu = (up->c - um->c) / (2 * hu), cv = (vp->c - vm->c) / (2 * hv);
    const double a11 = dot(cu, cu), a12 = dot(cu, cv), a22 = dot(cv, cv);
    const double g1 = dot(cu, cur->c), g2 = dot(cv, cur->c);
    bool stepped = false;
    while (lambda < 1e12) {
      const double m11 = a11 * (1 + lambda) + 1e-300, m22 = a22 * (1 + lambda) + 1e-300;
      const double det = m11 * m22 - a12 * a12;
      if (!(std::fabs(det) > 0.0)) {
        lambda *= 10;
        continue;
      }
      const double du = -(m22 * g1 - a12 * g2) / det;
      const double dv = -(m11 * g2 - a12 * g1) / det;
      const auto trial = state(u + du, v + dv);
      if (trial && dot(trial->c, trial->c) < dot(cur->c, cur->c)) {
        u += du;
        v += dv;
        cur = trial;
        lambda = std::max(lambda / 10, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 10;
    }
    if (!stepped) break;
  }
  if (norm(cur->c) >= tol) return std::nullopt;
  if (dot(cur->hs.normal, axis(cur->hs.point)) <= 0.0) return std::nullopt;
  return Solved{u, v, cur->hs, norm(cur->c)};
}

void push_unique(std::vector<Glint>& out, Glint g, double radius) {
  for (const auto& k : out) {
    if (k.tag == g.tag && distance(k.point, g.point) < radius) return;
  }
  out.push_back(std::move(g));
}

double colinearity_of(const Vec3& s, const Vec3& p, const Eye& eye) {
  const auto [a, b] = colinearity_residual(s, p, eye);
  return std::hypot(a, b);
}

// Seeds a (u, v) grid, refines every seed within the seed angle, and reports solutions in the domain.
template <typename Accept>
void search_patch(const Eval2& eval, double u0, double u1, int nu, double v0, double v1, int nv, bool v_periodic,
                  const AxisFn& axis, const GlintOptions& opt, Accept&& accept) {
  const double hu = 1e-7 * std::max(u1 - u0, 1e-3), hv = 1e-7 * std::max(v1 - v0, 1e-3);
  for (int i = 0; i <= nu; ++i) {
    const double u = nu == 0 ? 0.5 * (u0 + u1) : u0 + (u1 - u0) * i / nu;
    for (int j = 0; j < (v_periodic ? nv : nv + 1); ++j) {
      const double v = v0 + (v1 - v0) * j / nv;
      const auto hs = eval(u, v);
      if (!hs || angle_between(hs->normal, axis(hs->point)) >= opt.seed_angle) continue;
      const auto sol = refine2(eval, u, v, hu, hv, axis, opt.tol);
      if (!sol) continue;
      const double eps = 1e-9 * std::max(1.0, std::fabs(u1 - u0));
      if (sol->u < u0 - eps || sol->u > u1 + eps) continue;
      if (!v_periodic && (sol->v < v0 - eps || sol->v > v1 + eps)) continue;
      accept(*sol);
    }
  }
}

}  // namespace

std::vector<Glint> find_glints(const RidgedSurface& rs, const Eye& eye, const GlintOptions& opt) {
  std::vector<Glint> out;
  if (rs.empty()) return out;
  const AxisFn axis = [&](const Vec3& s) { return optical_axis(s, rs.light, eye, rs.media); };

  for (std::size_t b = 0; b < rs.ridges.size(); ++b) {
    const Ridge& r = rs.ridges[b];
    const Eval2 face = [&](double rho, double psi) -> std::optional<HostSample> {
      try {
        return ridge_face_point(rs, b, rho, psi);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    const int n_rho = std::max(4, static_cast<int>(std::ceil((r.rho_outer - r.rho_inner) * 4)));
    search_patch(face, r.rho_inner, r.rho_outer, n_rho, 0.0, kTwoPi, 72, true, axis, opt, [&](const Solved& sol) {
      if (!ridge_retains(rs, sol.hs.point)) return;
      Glint g{eye, sol.hs.point, sol.hs.normal, sol.residual, colinearity_of(sol.hs.point, rs.p, eye),
              GlintTag::Imaging, b};
      push_unique(out, std::move(g), opt.dedupe_radius);
    });
  }

  // Cone backfaces between adjacent bands.
  for (std::size_t b = 0; b + 1 < rs.ridges.size(); ++b) {
    const double rho = rs.ridges[b].rho_outer;
    const auto strip = [&](double lambda, double psi) -> std::optional<Vec3> {
      try {
        const Vec3 a = ridge_face_point(rs, b, rho, psi).point;
        const Vec3 c = ridge_face_point(rs, b + 1, rho, psi).point;
        return a + lambda * (c - a);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    const Eval2 back = [&](double lambda, double psi) -> std::optional<HostSample> {
      const double h = 1e-6;
      const auto q = strip(lambda, psi), l0 = strip(0.0, psi), l1 = strip(1.0, psi), pp = strip(lambda, psi + h),
                 pm = strip(lambda, psi - h);
      if (!q || !l0 || !l1 || !pp || !pm || distance(*l0, *l1) < 1e-12) return std::nullopt;
      Vec3 n = cross(*l1 - *l0, *pp - *pm);
      if (norm(n) == 0.0) return std::nullopt;
      n = normalized(n);
      if (dot(n, rs.normal) < 0.0) n = -1.0 * n;
      return HostSample{*q, n};
    };
    search_patch(back, 0.0, 1.0, 4, 0.0, kTwoPi, 72, true, axis, opt, [&](const Solved& sol) {
      Glint g{eye, sol.hs.point, sol.hs.normal, sol.residual, colinearity_of(sol.hs.point, rs.p, eye),
              GlintTag::BackfaceStray, b};
      push_unique(out, std::move(g), opt.dedupe_radius);
    });
  }
  return out;
}

std::vector<Glint> find_glints(const Mesh& mesh, const Eye& eye, const LightSource& light, const Media& media,
                               const GlintOptions& opt, const std::optional<Vec3>& intended) {
  std::vector<Glint> out;
  const AxisFn axis = [&](const Vec3& s) { return optical_axis(s, light, eye, media); };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& [ia, ib, ic] = mesh.triangles[t];
    const Vec3 &A = mesh.vertices[ia], &B = mesh.vertices[ib], &C = mesh.vertices[ic];
    const Vec3 &nA = mesh.normals[ia], &nB = mesh.normals[ib], &nC = mesh.normals[ic];
    // Phong-interpolated normals over barycentric (u, v).
    const Eval2 tri = [&](double u, double v) -> std::optional<HostSample> {
      const Vec3 n = (1 - u - v) * nA + u * nB + v * nC;
      if (norm(n) < 1e-12) return std::nullopt;
      return HostSample{(1 - u - v) * A + u * B + v * C, normalized(n)};
    };
    const double centre = 1.0 / 3.0;
    const Vec3 mid = (A + B + C) / 3.0;
    double best = std::min({angle_between(nA, axis(A)), angle_between(nB, axis(B)), angle_between(nC, axis(C))});
    best = std::min(best, angle_between(tri(centre, centre)->normal, axis(mid)));
    if (best >= opt.seed_angle) continue;
    const auto sol = refine2(tri, centre, centre, 1e-7, 1e-7, axis, opt.tol);
    if (!sol || sol->u < -1e-9 || sol->v < -1e-9 || sol->u + sol->v > 1 + 1e-9) continue;
    const GlintTag tag = mesh.tags[t] == FaceTag::Imaging ? GlintTag::Imaging : GlintTag::BackfaceStray;
    Glint g{eye, sol->hs.point, sol->hs.normal, sol->residual,
            intended ? colinearity_of(sol->hs.point, *intended, eye) : 0.0, tag, t};
    push_unique(out, std::move(g), opt.dedupe_radius);
  }
  return out;
}

std::vector<Glint> find_glints(const Striping& striping, const std::vector<Stipple>& stipples, const Eye& eye,
                               const LightSource& light, const Media& media, const GlintOptions& opt) {
  std::vector<Glint> out;
  for (const StripeArc& arc : striping.arcs) {
    const auto& s = arc.path.samples;
    if (s.size() < 2) continue;
    std::vector<Vec3> tangent(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const std::size_t a = k == 0 ? 0 : k - 1, b = k + 1 == s.size() ? k : k + 1;
      tangent[k] = normalized(s[b].position - s[a].position);
    }
    const auto unit_axis = [&](const Vec3& x) { return normalized(optical_axis(x, light, eye, media)); };
    const auto g = [&](std::size_t k, double lambda, Vec3* x_out, Vec3* t_out) {
      const std::size_t k1 = std::min(k + 1, s.size() - 1);
      const Vec3 x = s[k].position + lambda * (s[k1].position - s[k].position);
      const Vec3 t = normalized(tangent[k] + lambda * (tangent[k1] - tangent[k]));
      if (x_out) *x_out = x;
      if (t_out) *t_out = t;
      return dot(t, unit_axis(x));
    };
    const Vec3 p = arc.stipple < stipples.size() ? stipples[arc.stipple].p : Vec3{};
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const double ga = g(k, 0.0, nullptr, nullptr), gb = g(k, 1.0, nullptr, nullptr);
      if (ga == 0.0 && k > 0) continue;  // already reported as the end of the previous segment
      if (ga * gb > 0.0) continue;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (lo + hi);
        if ((g(k, m, nullptr, nullptr) > 0.0) == (ga > 0.0)) lo = m; else hi = m;
      }
      Vec3 x, t;
      g(k, 0.5 * (lo + hi), &x, &t);
      const Vec3 a = unit_axis(x);
      const Vec3 perp = a - dot(a, t) * t;
      if (norm(perp) < 1e-12) continue;
      const Vec3 n = normalized(perp);
      Glint gl{eye, x, n, norm(cross(n, a)), colinearity_of(x, p, eye), GlintTag::Imaging, arc.stipple};
      push_unique(out, std::move(gl), opt.dedupe_radius);
    }
  }
  return out;
}

std::vector<Glint> find_glints(const SurfacePatch& patch, const Eye& eye, const LightSource& light,
                               const Media& media, const GlintOptions& opt) {
  std::vector<Glint> out;
  const AxisFn axis = [&](const Vec3& s) { return optical_axis(s, light, eye, media); };
  const Eval2 eval = [&](double az, double lat) -> std::optional<HostSample> {
    try {
      const auto [s, n] = surface_point_and_normal(patch.surface, az, lat);
      return HostSample{s, n};
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  const Vec3 p = std::visit([](const auto& m) { return m.focus_p; }, patch.surface);
  const double eps = 1e-6;
  search_patch(eval, 0.0, kTwoPi, 72, eps, std::numbers::pi - eps, 36, false, axis, opt, [&](const Solved& sol) {
    if (!patch.crop.contains_direction(eye.direction_from(sol.hs.point))) return;
    Glint g{eye, sol.hs.point, sol.hs.normal, sol.residual, colinearity_of(sol.hs.point, p, eye), GlintTag::Imaging, 0};
    push_unique(out, std::move(g), opt.dedupe_radius);
  });
  return out;
}

TriangulationResult triangulate(const Glint& left, const Glint& right) {
  const auto line = [](const Glint& g) {
    const Vec3 d = g.eye.at_infinity() ? g.eye.direction() : normalized(g.eye.position() - g.point);
    return std::pair{g.point, d};
  };
  const auto [o1, d1] = line(left);
  const auto [o2, d2] = line(right);
  TriangulationResult r;
  r.baseline = std::acos(std::clamp(dot(d1, d2), -1.0, 1.0));
  const Vec3 w0 = o1 - o2;
  const double b = dot(d1, d2), d = dot(d1, w0), e = dot(d2, w0);
  const double denom = 1.0 - b * b;
  if (denom < 1e-14) {
    r.at_infinity = true;
    r.point = 0.5 * (o1 + o2);
    r.residual = norm(cross(w0, d1));
    return r;
  }
  const double sc = (b * e - d) / denom, tc = (e - b * d) / denom;
  const Vec3 p1 = o1 + sc * d1, p2 = o2 + tc * d2;
  r.point = 0.5 * (p1 + p2);
  r.residual = distance(p1, p2);
  return r;
}

std::vector<Glint> scene_glints(const SimulationScene& scene, const Eye& eye) {
  std::vector<Glint> out;
  if (scene.striping) {
    auto g = find_glints(*scene.striping, scene.stipples, eye, scene.light, scene.media, scene.options);
    out.insert(out.end(), g.begin(), g.end());
  }
  for (const auto& rs : scene.ridgings) {
    auto g = find_glints(rs, eye, scene.options);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

GlintMap render_glintmap(const SimulationScene& scene, const ViewPath& view, const RasterParams& raster) {
  if (raster.width <= 0 || raster.height <= 0 || !(raster.pixels_per_mm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "raster dimensions and scale must be positive");
  }
  GlintMap map;
  map.width = raster.width;
  map.height = raster.height;

  const auto* orbit = std::get_if<OrbitPath>(&view.shape());
  const Vec3 look = orbit ? orbit->center : Vec3{};
  for (int i = 0; i < view.samples(); ++i) {
    GlintView gv;
    gv.param = view.sample_param(i);
    gv.eye = view.eye_at(gv.param);
    gv.theta = view_angles(gv.eye.direction_from(look)).first;
    gv.glints = scene_glints(scene, gv.eye);
    map.views.push_back(std::move(gv));
  }
  std::stable_sort(map.views.begin(), map.views.end(),
                   [](const GlintView& a, const GlintView& b) { return a.theta < b.theta; });

  std::size_t clipped = 0;
  const Vec3 up{0, 1, 0};
  for (const GlintView& gv : map.views) {
    std::vector<std::uint8_t> frame(static_cast<std::size_t>(raster.width) * raster.height, 0);
    Vec3 forward;
    double focal = 0.0;  // pixels; zero means orthographic
    if (gv.eye.at_infinity()) {
      forward = -1.0 * gv.eye.direction();
    } else if (orbit) {
      forward = normalized(look - gv.eye.position());
      focal = raster.pixels_per_mm * distance(look, gv.eye.position());
    } else {
      forward = {0, 0, -1};
      focal = raster.pixels_per_mm * std::fabs(gv.eye.position().z);
    }
    Vec3 right = cross(forward, up);
    if (norm(right) < 1e-12) right = any_orthogonal(forward);
    right = normalized(right);
    const Vec3 cam_up = cross(right, forward);
    for (const Glint& g : gv.glints) {
      double x = 0.0, y = 0.0;
      if (focal == 0.0) {
        x = raster.pixels_per_mm * dot(g.point - look, right);
        y = raster.pixels_per_mm * dot(g.point - look, cam_up);
      } else {
        const Vec3 rel = g.point - gv.eye.position();
        const double depth = dot(rel, forward);
        if (depth <= 0.0) {
          ++clipped;
          continue;
        }
        x = focal * dot(rel, right) / depth;
        y = focal * dot(rel, cam_up) / depth;
      }
      const double px = std::floor(0.5 * raster.width + x), py = std::floor(0.5 * raster.height - y);
      if (px < 0 || py < 0 || px >= raster.width || py >= raster.height) {
        ++clipped;
        continue;
      }
      frame[static_cast<std::size_t>(py) * raster.width + static_cast<std::size_t>(px)] = 255;
    }
    map.frames.push_back(std::move(frame));
  }
  if (clipped > 0) {
    map.warnings.push_back("projection clipped: " + std::to_string(clipped) + " glints fell outside the raster");
  }
  return map;
}

std::optional<std::pair<double, double>> frame_centroid(const GlintMap& map, std::size_t frame) {
  const auto& f = map.frames.at(frame);
  double sx = 0.0, sy = 0.0, total = 0.0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const double w = f[static_cast<std::size_t>(y) * map.width + x];
      sx += w * (x + 0.5);
      sy += w * (y + 0.5);
      total += w;
    }
  }
  if (total == 0.0) return std::nullopt;
  return std::pair{sx / total, sy / total};
}

}  // namespace spechol
