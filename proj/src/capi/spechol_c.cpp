#include "spechol/spechol.h"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spechol/error.hpp"
#include "spechol/export.hpp"
#include "spechol/foliation.hpp"
#include "spechol/ridging.hpp"
#include "spechol/scene.hpp"
#include "spechol/simulate.hpp"
#include "spechol/striping.hpp"

using namespace spechol;

struct sh_scene {
  SceneSpec doc;
};

struct sh_striping {
  Striping striping;
  std::vector<Stipple> stipples;
};

struct sh_ridging {
  std::vector<RidgedSurface> surfaces;
  FabricationParams fab;
};

struct sh_glintmap {
  GlintMap map;
};

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

thread_local std::string g_last_error;

template <class F>
sh_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SH_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<sh_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SH_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SH_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SH_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

std::string printf_str(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string printf_str(const char* fmt, ...) {
  va_list ap, ap2;
  va_start(ap, fmt);
  va_copy(ap2, ap);
  const int n = std::vsnprintf(nullptr, 0, fmt, ap);
  va_end(ap);
  std::string out(static_cast<std::size_t>(std::max(n, 0)), '\0');
  std::vsnprintf(out.data(), out.size() + 1, fmt, ap2);
  va_end(ap2);
  return out;
}

std::string f6(double v) {
  std::string s = printf_str("%.6f", v);
  return s == "-0.000000" ? "0.000000" : s;
}

std::string vec_str(const Vec3& v) { return f6(v.x) + " " + f6(v.y) + " " + f6(v.z); }

void require_stipples(const SceneSpec& s) {
  if (s.stipples.empty()) throw Error(ErrorCode::InvalidArgument, "scene has no stipples");
}

bool angular(const ViewPath& view) { return !std::holds_alternative<LinePath>(view.shape()); }

// View parameter at the middle of what the stipple is meant to be seen from.
double centre_param(const ViewPath& view, const Stipple& st) {
  const double lo = view.param_min(), hi = view.param_max();
  if (!angular(view)) return 0.5 * (lo + hi);
  const double a = std::max(lo, st.theta_min), b = std::min(hi, st.theta_max);
  return a <= b ? 0.5 * (a + b) : 0.5 * (lo + hi);
}

std::string member_line(const FoliationMember& m) {
  if (const auto* c = std::get_if<ConicSurface>(&m)) {
    const char* ecc = c->kind == MemberKind::Ellipsoid   ? "\xce\xb5<1"
                      : c->kind == MemberKind::Hyperboloid ? "\xce\xb5>1"
                      : c->kind == MemberKind::Paraboloid  ? "\xce\xb5=1"
                                                            : "\xce\xb5=0";
    return printf_str("%s, %s (eccentricity %.6f, k %.6f)", member_kind_name(c->kind), ecc, c->eccentricity, c->k);
  }
  const auto& o = std::get<CartesianOval>(m);
  return printf_str("cartesian oval, %s image (eta2/eta1 %.6f, k %.6f)",
                    o.branch == OvalBranch::RealImage ? "real" : "virtual", o.eta2 / o.eta1, o.k);
}

FoliationMember member_for(const SceneSpec& doc, const Stipple& st) {
  const ViewPath view = scene_view(doc);
  const HostSurface host = scene_host(doc);
  const Vec3 s0 = sightline_host_intersection(view.eye_at(centre_param(view, st)), st.p, host);
  return member_through(st.p, scene_light(doc), s0, doc.media, host);
}

std::vector<RidgedSurface> build_ridgings(const SceneSpec& doc) {
  const FabricationParams fab = scene_fab(doc);
  const LightSource light = scene_light(doc);
  const HostSurface host = scene_host(doc);
  std::vector<RidgedSurface> out;
  for (const auto& st : scene_stipples(doc)) {
    const ViewWindow crop{st.theta_min, st.theta_max, -std::numbers::pi / 2, std::numbers::pi / 2};
    out.push_back(build_ridging(st.p, light, host, fab, crop, doc.media));
  }
  check_footprint_collisions(out);
  return out;
}

Striping build_striping(const SceneSpec& doc) {
  return make_striping(scene_stipples(doc), scene_light(doc), scene_host(doc), scene_view(doc),
                       scene_fab(doc));
}

const Glint* best(const std::vector<Glint>& glints, std::size_t source, bool by_source) {
  const Glint* pick = nullptr;
  for (const auto& g : glints) {
    if (g.tag != GlintTag::Imaging || (by_source && g.source != source)) continue;
    if (!pick || g.colinearity < pick->colinearity) pick = &g;
  }
  return pick;
}

TangentBasis basis_from_normal(const Vec3& s, const Vec3& n) {
  const Vec3 t1 = any_orthogonal(n);
  return {t1, cross(n, t1), s};
}

struct Suite {
  std::string report;
  std::size_t violations = 0;
  std::size_t checked = 0;

  void violation(const std::string& line) {
    ++violations;
    report += "FAIL " + line + "\n";
  }
};

void verify_foliation(const SceneSpec& doc, Suite& out) {
  const LightSource light = scene_light(doc);
  const HostSurface host = scene_host(doc);
  const auto stipples = scene_stipples(doc);
  std::size_t before = out.checked, bad = out.violations;
  for (std::size_t i = 0; i < stipples.size(); ++i) {
    const Vec3& p = stipples[i].p;
    FoliationMember member;
    try {
      member = member_for(doc, stipples[i]);
    } catch (const Error& e) {
      out.violation(printf_str("stipple %zu: no foliation member: %s", i, e.what()));
      continue;
    }
    const bool front = host.signed_distance(p) > 0.0;
    for (int a = 0; a < 24; ++a) {
      for (int b = 0; b < 12; ++b) {
        const double az = 2 * std::numbers::pi * a / 24, lat = std::numbers::pi * (b + 0.5) / 12;
        Vec3 s, n;
        try {
          std::tie(s, n) = surface_point_and_normal(member, az, lat);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::Domain) continue;
          throw;
        }
        ++out.checked;
        const Eye eye = front ? Eye::at(p + 3.0 * (p - s)) : Eye::at(s + 3.0 * (s - p));
        const auto [r1, r2] = normality_residual(basis_from_normal(s, n), light, eye, doc.media);
        const double r = std::hypot(r1, r2);
        if (!(r < 1e-9)) {
          out.violation(printf_str("constraint 1 (normality): stipple %zu member sample az %.3f lat %.3f at (%s): "
                                   "residual %.3g",
                                   i, az / kDeg, lat / kDeg, vec_str(s).c_str(), r));
        }
      }
    }
  }
  out.report += printf_str("foliation: %zu samples, %zu violations\n", out.checked - before, out.violations - bad);
}

void verify_striping(const SceneSpec& doc, Suite& out) {
  const Striping striping = build_striping(doc);
  const LightSource light = scene_light(doc);
  const HostSurface host = scene_host(doc);
  const ViewPath view = scene_view(doc);
  const auto stipples = scene_stipples(doc);
  const double delta = striping.fab.delta;
  std::size_t before = out.checked, bad = out.violations, skipped = 0;
  for (std::size_t a = 0; a < striping.arcs.size(); ++a) {
    const StripeArc& arc = striping.arcs[a];
    const Vec3& p = stipples[arc.stipple].p;
    for (std::size_t k = 0; k < arc.path.samples.size(); ++k) {
      const ToolpathSample& t = arc.path.samples[k];
      const Eye eye = view.eye_at(t.param);
      const std::string where = printf_str("arc %zu stipple %zu sample %zu theta %.4f at (%s)", a, arc.stipple, k,
                                           t.theta / kDeg, vec_str(t.position).c_str());
      ++out.checked;
      if (norm(t.t1) == 0.0) {
        ++skipped;
      } else {
        const Vec3 axis = normalized(optical_axis(t.position, light, eye, Media{}));
        const double r = std::fabs(dot(t.t1, axis));
        if (!(r < 1e-9)) out.violation(printf_str("constraint 1 (normality): %s: |t.axis| %.3g", where.c_str(), r));
      }
      try {
        const double miss = std::fabs(t.position.x - sightline_host_intersection(eye, p, host).x);
        if (!(miss < 1e-6)) {
          out.violation(printf_str("constraint 2 (colinearity): %s: off the sightline azimuth by %.3g mm",
                                   where.c_str(), miss));
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Miss) throw;
        out.violation(printf_str("constraint 2 (colinearity): %s: sightline misses the host", where.c_str()));
      }
      const double d = conformance_distance(t.position, host);
      if (!(d <= delta)) {
        out.violation(printf_str("constraint 3 (conformance): %s: %.6f mm from the host, limit %.6f", where.c_str(),
                                 d, delta));
      }
    }
  }
  out.report += printf_str("striping: %zu arcs, %zu stipples rejected, %zu samples (%zu with degenerate tangent), "
                           "%zu violations\n",
                           striping.arcs.size(), striping.rejected.size(), out.checked - before, skipped,
                           out.violations - bad);
}

void verify_ridging(const SceneSpec& doc, Suite& out) {
  std::size_t before = out.checked, bad = out.violations;
  std::vector<RidgedSurface> surfaces;
  try {
    surfaces = build_ridgings(doc);
  } catch (const Error& e) {
    out.violation(std::string("ridging could not be built: ") + e.what());
    return;
  }
  const FabricationParams fab = scene_fab(doc);
  const ViewPath view = scene_view(doc);
  const auto stipples = scene_stipples(doc);
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const RidgedSurface& rs = surfaces[i];
    if (rs.empty()) continue;
    const Mesh mesh = mesh_ridging(rs, fab);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      ++out.checked;
      const double d = conformance_distance(mesh.vertices[v], rs.host);
      if (!(d <= fab.delta)) {
        out.violation(printf_str("constraint 3 (conformance): stipple %zu vertex %zu at (%s): %.6f mm, limit %.6f", i,
                                 v, vec_str(mesh.vertices[v]).c_str(), d, fab.delta));
      }
    }
    const Eye eye = view.eye_at(centre_param(view, stipples[i]));
    for (const auto& g : find_glints(rs, eye)) {
      if (g.tag != GlintTag::Imaging) continue;
      ++out.checked;
      if (!(g.normality < 1e-9)) {
        out.violation(printf_str("constraint 1 (normality): stipple %zu glint at (%s): residual %.3g", i,
                                 vec_str(g.point).c_str(), g.normality));
      }
      if (!(g.colinearity < 1e-6 * std::max(1.0, norm(rs.p)))) {
        out.violation(printf_str("constraint 2 (colinearity): stipple %zu glint at (%s): %.3g mm off the sightline",
                                 i, vec_str(g.point).c_str(), g.colinearity));
      }
    }
  }
  out.report += printf_str("ridging: %zu checks, %zu violations\n", out.checked - before, out.violations - bad);
}

}  // namespace

extern "C" {

const char* sh_last_error(void) { return g_last_error.c_str(); }

const char* sh_status_name(sh_status status) {
  if (status == SH_OK) return "ok";
  if (status == SH_INTERNAL) return "internal";
  if (status >= SH_INVALID_ARGUMENT && status <= SH_IO) return error_code_name(static_cast<ErrorCode>(status));
  return "unknown";
}

void sh_string_free(char* s) { std::free(s); }

sh_status sh_scene_parse(const char* text, sh_scene** out) {
  return guard([&] {
    require(text && out, "null argument");
    *out = new sh_scene{parse_scene(text)};
  });
}

sh_status sh_scene_load(const char* path, sh_scene** out) {
  return guard([&] {
    require(path && out, "null argument");
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, std::string("cannot read ") + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
      *out = new sh_scene{parse_scene(ss.str())};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Parse) throw;
      throw Error(ErrorCode::Parse, std::string(path) + ":" + e.what());
    }
  });
}

sh_status sh_scene_print(const sh_scene* scene, char** out) {
  return guard([&] {
    require(scene && out, "null argument");
    *out = dup(print_scene(scene->doc));
  });
}

size_t sh_scene_stipple_count(const sh_scene* scene) { return scene ? scene->doc.stipples.size() : 0; }

void sh_scene_free(sh_scene* scene) { delete scene; }

sh_status sh_foliate_report(const sh_scene* scene, char** out) {
  return guard([&] {
    require(scene && out, "null argument");
    require_stipples(scene->doc);
    const auto stipples = scene_stipples(scene->doc);
    std::string r;
    for (std::size_t i = 0; i < stipples.size(); ++i) {
      r += printf_str("stipple %zu p (%s): ", i, vec_str(stipples[i].p).c_str());
      try {
        r += member_line(member_for(scene->doc, stipples[i])) + "\n";
      } catch (const Error& e) {
        r += std::string("no member (") + e.what() + ")\n";
      }
    }
    *out = dup(r);
  });
}

sh_status sh_stripe_build(const sh_scene* scene, sh_striping** out) {
  return guard([&] {
    require(scene && out, "null argument");
    require_stipples(scene->doc);
    *out = new sh_striping{build_striping(scene->doc), scene_stipples(scene->doc)};
  });
}

size_t sh_striping_arc_count(const sh_striping* s) { return s ? s->striping.arcs.size() : 0; }
size_t sh_striping_rejected_count(const sh_striping* s) { return s ? s->striping.rejected.size() : 0; }

sh_status sh_striping_report(const sh_striping* s, char** out) {
  return guard([&] {
    require(s && out, "null argument");
    std::string r = printf_str("arcs %zu rejected %zu\n", s->striping.arcs.size(), s->striping.rejected.size());
    for (std::size_t i = 0; i < s->striping.arcs.size(); ++i) {
      const StripeArc& a = s->striping.arcs[i];
      r += printf_str("arc %zu stipple %zu theta %.4f %.4f samples %zu\n", i, a.stipple, a.theta_a / kDeg,
                      a.theta_b / kDeg, a.path.samples.size());
      for (const auto& w : a.path.warnings) r += printf_str("warning arc %zu: %s\n", i, w.c_str());
    }
    for (const auto& rej : s->striping.rejected) r += printf_str("rejected stipple %zu: %s\n", rej.stipple, rej.reason.c_str());
    *out = dup(r);
  });
}

sh_status sh_striping_gcode(const sh_striping* s, char** out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = dup(striping_gcode(s->striping));
  });
}

sh_status sh_striping_csv(const sh_striping* s, char** out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = dup(striping_csv(s->striping));
  });
}

void sh_striping_free(sh_striping* s) { delete s; }

sh_status sh_profile_report(const sh_scene* scene, const sh_striping* s, char** out) {
  return guard([&] {
    require(scene && s && out, "null argument");
    // Cutter geometry assumes the light lies in the vertical plane of the wall normal.
    const Vec3 l = scene_light(scene->doc).direction_from(scene_host(scene->doc).project({0, 0, 0}).point);
    const double alpha = std::atan2(l.z, l.y);
    const BitProfile bp = bit_profile_for(s->striping, alpha);
    std::string r = printf_str("light elevation %.4f deg\nangle interval %.4f %.4f deg (span %.4f)\n", alpha / kDeg,
                               bp.angle_min / kDeg, bp.angle_max / kDeg, (bp.angle_max - bp.angle_min) / kDeg);
    if (std::fabs(l.x) > 1e-9) r += "warning: light has a sideways component; elevation taken in the y-z plane\n";
    for (const auto& p : bp.points) r += printf_str("depth %.4f radius %.4f\n", p.depth, p.radius);
    *out = dup(r);
  });
}

double sh_orthogonal_tangent_angle_deg(double theta_deg, double alpha_deg) {
  return orthogonal_tangent_angle(theta_deg * kDeg, alpha_deg * kDeg) / kDeg;
}

sh_status sh_ridge_build(const sh_scene* scene, sh_ridging** out) {
  return guard([&] {
    require(scene && out, "null argument");
    require_stipples(scene->doc);
    *out = new sh_ridging{build_ridgings(scene->doc), scene_fab(scene->doc)};
  });
}

sh_status sh_ridge_crop(sh_ridging* r, double az_min, double az_max, double el_min, double el_max) {
  return guard([&] {
    require(r, "null argument");
    for (auto& rs : r->surfaces) rs = crop_ridging(rs, az_min * kDeg, az_max * kDeg, el_min * kDeg, el_max * kDeg);
  });
}

size_t sh_ridging_count(const sh_ridging* r) { return r ? r->surfaces.size() : 0; }

sh_status sh_ridge_mesh_obj(const sh_ridging* r, char** out) {
  return guard([&] {
    require(r && out, "null argument");
    std::vector<Mesh> meshes;
    for (const auto& rs : r->surfaces) {
      if (!rs.empty()) meshes.push_back(mesh_ridging(rs, r->fab));
    }
    *out = dup(mesh_obj(merge_meshes(meshes)));
  });
}

sh_status sh_ridging_report(const sh_ridging* r, char** out) {
  return guard([&] {
    require(r && out, "null argument");
    std::string s;
    for (std::size_t i = 0; i < r->surfaces.size(); ++i) {
      const RidgedSurface& rs = r->surfaces[i];
      s += printf_str("ridging %zu p (%s) foot (%s) bands %zu\n", i, vec_str(rs.p).c_str(), vec_str(rs.foot).c_str(),
                      rs.ridges.size());
      for (const auto& w : rs.warnings) s += printf_str("warning ridging %zu: %s\n", i, w.c_str());
    }
    *out = dup(s);
  });
}

void sh_ridging_free(sh_ridging* r) { delete r; }

sh_status sh_simulate(const sh_scene* scene, const sh_striping* striping, const sh_ridging* ridging, int width,
                      int height, double pixels_per_mm, sh_glintmap** out) {
  return guard([&] {
    require(scene && out, "null argument");
    require(width > 0 && height > 0 && pixels_per_mm > 0.0, "raster dimensions must be positive");
    SimulationScene sim;
    sim.light = scene_light(scene->doc);
    sim.media = scene->doc.media;
    sim.stipples = scene_stipples(scene->doc);
    if (striping) sim.striping = striping->striping;
    if (ridging) sim.ridgings = ridging->surfaces;
    *out = new sh_glintmap{render_glintmap(sim, scene_view(scene->doc), RasterParams{width, height, pixels_per_mm})};
  });
}

size_t sh_glintmap_view_count(const sh_glintmap* m) { return m ? m->map.views.size() : 0; }

sh_status sh_glintmap_report(const sh_glintmap* m, char** out) {
  return guard([&] {
    require(m && out, "null argument");
    std::string r = printf_str("views %zu raster %d x %d\n", m->map.views.size(), m->map.width, m->map.height);
    for (std::size_t k = 0; k < m->map.views.size(); ++k) {
      const GlintView& v = m->map.views[k];
      r += printf_str("view %zu param %.6f theta %.4f glints %zu\n", k, v.param, v.theta / kDeg, v.glints.size());
    }
    for (const auto& w : m->map.warnings) r += "warning: " + w + "\n";
    *out = dup(r);
  });
}

sh_status sh_glintmap_write_frames(const sh_glintmap* m, const char* directory) {
  return guard([&] {
    require(m && directory, "null argument");
    write_frames(m->map, directory);
  });
}

void sh_glintmap_free(sh_glintmap* m) { delete m; }

sh_status sh_triangulate_report(const sh_scene* scene, const sh_striping* striping, const sh_ridging* ridging,
                                double baseline_deg, char** out) {
  return guard([&] {
    require(scene && out, "null argument");
    require(striping || ridging, "triangulation needs a striping or a ridging");
    require(baseline_deg > 0.0, "baseline must be positive");
    const SceneSpec& doc = scene->doc;
    const ViewPath view = scene_view(doc);
    const LightSource light = scene_light(doc);
    const auto stipples = scene_stipples(doc);
    const double half = 0.5 * baseline_deg * kDeg;
    std::string r = printf_str("baseline %.4f deg\n", baseline_deg);
    for (std::size_t i = 0; i < stipples.size(); ++i) {
      const Vec3& p = stipples[i].p;
      const double u = centre_param(view, stipples[i]);
      Eye left = Eye::toward({0, 0, 1}), right = left;
      if (std::holds_alternative<OrbitPath>(view.shape())) {
        left = view.eye_at(u - half);
        right = view.eye_at(u + half);
      } else {
        const auto [theta, phi] = view_angles(view.eye_at(u).direction_from(p));
        left = Eye::toward(view_direction(theta - half, phi));
        right = Eye::toward(view_direction(theta + half, phi));
      }
      std::vector<Glint> gl, gr;
      if (ridging && i < ridging->surfaces.size()) {
        gl = find_glints(ridging->surfaces[i], left);
        gr = find_glints(ridging->surfaces[i], right);
      } else if (striping) {
        gl = find_glints(striping->striping, stipples, left, light, doc.media);
        gr = find_glints(striping->striping, stipples, right, light, doc.media);
      }
      const Glint* a = best(gl, i, !ridging);
      const Glint* b = best(gr, i, !ridging);
      if (!a || !b) {
        r += printf_str("stipple %zu p %s: no glint pair\n", i, vec_str(p).c_str());
        continue;
      }
      const TriangulationResult t = triangulate(*a, *b);
      const double err = distance(t.point, p);
      r += printf_str("stipple %zu p %s phat %s error %.6g relative %.6g residual %.3g\n", i, vec_str(p).c_str(),
                      vec_str(t.point).c_str(), err, err / std::max(std::fabs(p.z), 1e-12), t.residual);
    }
    *out = dup(r);
  });
}

sh_status sh_verify(const sh_scene* scene, unsigned flags, char** report, size_t* violations) {
  return guard([&] {
    require(scene && report && violations, "null argument");
    require_stipples(scene->doc);
    Suite suite;
    if (flags & SH_VERIFY_FOLIATION) verify_foliation(scene->doc, suite);
    if (flags & SH_VERIFY_STRIPING) verify_striping(scene->doc, suite);
    if (flags & SH_VERIFY_RIDGING) verify_ridging(scene->doc, suite);
    suite.report += printf_str("total %zu checks, %zu violations\n", suite.checked, suite.violations);
    *report = dup(suite.report);
    *violations = suite.violations;
  });
}

}  // extern "C"
