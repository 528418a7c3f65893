#include "spechol/striping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace spechol {

namespace {

constexpr double kDegenerateTangent = 1e-12;
constexpr double kHalfDegree = 0.5 * std::numbers::pi / 180.0;

bool angular_path(const ViewPath& view) { return !std::holds_alternative<LinePath>(view.shape()); }

double azimuth_seen_from(const Eye& eye, const Vec3& p) { return view_angles(eye.direction_from(p)).first; }

struct DegenerateStage {};

// Closest distance between segments [p1, q1] and [p2, q2].
double segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-30 && e <= 1e-30) return distance(p1, p2);
  if (a <= 1e-30) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= 1e-30) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return distance(p1 + s * d1, p2 + t * d2);
}

// Segment i of a polyline; single-sample polylines are one degenerate segment.
std::size_t segment_count(const std::vector<ToolpathSample>& s) { return s.size() < 2 ? s.size() : s.size() - 1; }
std::pair<Vec3, Vec3> segment_at(const std::vector<ToolpathSample>& s, std::size_t i) {
  return s.size() < 2 ? std::pair{s[0].position, s[0].position} : std::pair{s[i].position, s[i + 1].position};
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Spatial hash of accepted arc segments used for the overlap test.
class SegmentGrid {
 public:
  explicit SegmentGrid(double cell) : cell_(cell) {}

  template <typename Fn>
  void for_cells(const Vec3& a, const Vec3& b, double pad, Fn&& fn) const {
    const auto lo = [&](double u, double v) { return static_cast<std::int64_t>(std::floor((std::min(u, v) - pad) / cell_)); };
    const auto hi = [&](double u, double v) { return static_cast<std::int64_t>(std::floor((std::max(u, v) + pad) / cell_)); };
    for (auto ix = lo(a.x, b.x); ix <= hi(a.x, b.x); ++ix)
      for (auto iy = lo(a.y, b.y); iy <= hi(a.y, b.y); ++iy)
        for (auto iz = lo(a.z, b.z); iz <= hi(a.z, b.z); ++iz) fn(CellKey{ix, iy, iz});
  }

  void insert(std::size_t arc, const std::vector<ToolpathSample>& s) {
    for (std::size_t i = 0; i < segment_count(s); ++i) {
      const auto [a, b] = segment_at(s, i);
      for_cells(a, b, 0.0, [&](const CellKey& k) { cells_[k].push_back({arc, i}); });
    }
  }

  // Smallest distance from any segment of s to an accepted segment, capped at limit.
  double nearest(const std::vector<ToolpathSample>& s, const std::vector<const std::vector<ToolpathSample>*>& arcs,
                 double limit) const {
    double best = limit;
    for (std::size_t i = 0; i < segment_count(s); ++i) {
      const auto [a, b] = segment_at(s, i);
      for_cells(a, b, limit, [&](const CellKey& k) {
        const auto it = cells_.find(k);
        if (it == cells_.end()) return;
        for (const auto& [arc, j] : it->second) {
          const auto [c, d] = segment_at(*arcs[arc], j);
          best = std::min(best, segment_distance(a, b, c, d));
        }
      });
    }
    return best;
  }

 private:
  double cell_;
  std::unordered_map<CellKey, std::vector<std::pair<std::size_t, std::size_t>>, CellHash> cells_;
};

// 3x3 linear solve by Cramer's rule.
std::array<double, 3> solve3(const std::array<std::array<double, 3>, 3>& m, const std::array<double, 3>& r) {
  const auto det = [](const std::array<std::array<double, 3>, 3>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det(m);
  std::array<double, 3> x{};
  for (int c = 0; c < 3; ++c) {
    auto mc = m;
    for (int row = 0; row < 3; ++row) mc[row][c] = r[row];
    x[c] = det(mc) / d;
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tangent fields

ConformingTangent conforming_tangent(const Vec3& dir_to_light, const Vec3& dir_to_eye, const Vec3& host_normal) {
  // n is proportional to i|e| + e|i|; for unit directions that is their sum.
  const Vec3 n = dir_to_light + dir_to_eye;
  const Vec3 t = cross(n, host_normal);
  if (norm(t) < kDegenerateTangent) return {{}, true};
  return {t, false};
}

ConformingTangent conforming_tangent(double theta, double alpha, const Vec3& host_normal) {
  return conforming_tangent(Vec3{0.0, std::cos(alpha), std::sin(alpha)}, view_direction(theta, 0.0), host_normal);
}

Vec3 orthogonal_tangent(double theta, double alpha) {
  const double pole = std::cos(theta) + std::sin(alpha);
  if (std::fabs(pole) < 1e-12) throw Error(ErrorCode::Pole, "orthogonal tangent has a pole at cos(theta) + sin(alpha) = 0");
  const double c = std::cos(alpha), s = std::sin(theta);
  return {-s, -c, (c * c + s * s) / pole};
}

double orthogonal_tangent_angle(double theta, double alpha) {
  const Vec3 t2 = orthogonal_tangent(theta, alpha);
  return std::acos(std::clamp(t2.z / norm(t2), -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Toolpaths

Toolpath hyperbolic_toolpath(double p_z, double alpha, double c0, double theta_min, double theta_max, double step) {
  if (p_z == 0.0) throw Error(ErrorCode::InvalidArgument, "virtual point depth must be nonzero");
  if (!(step > 0.0) || theta_max < theta_min) throw Error(ErrorCode::InvalidArgument, "bad toolpath range or step");
  const double limit = std::numbers::pi / 2 - 1e-12;
  if (std::fabs(theta_min) >= limit || std::fabs(theta_max) >= limit) {
    throw Error(ErrorCode::Domain, "hyperbolic toolpath range touches +-90 degrees");
  }
  const int n = std::max(1, static_cast<int>(std::ceil((theta_max - theta_min) / step - 1e-9)));
  Toolpath path;
  path.c0 = c0;
  path.samples.reserve(n + 1);
  const Vec3 up{0, 0, 1};
  for (int k = 0; k <= n; ++k) {
    const double theta = k == n ? theta_max : theta_min + (theta_max - theta_min) * k / n;
    const Vec3 pos{-p_z * std::tan(theta), p_z / (std::cos(alpha) * std::cos(theta)) + c0, 0.0};
    path.samples.push_back({theta, pos, normalized(conforming_tangent(theta, alpha, up).t)});
  }
  return path;
}

Toolpath integrate_toolpath(const HostSurface& host, const Stipple& stipple, const LightSource& light,
                            const ViewPath& view, double c0, double c1, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "integration step must be positive");
  double u_min = view.param_min(), u_max = view.param_max();
  if (angular_path(view)) {
    u_min = std::max(u_min, stipple.theta_min);
    u_max = std::min(u_max, stipple.theta_max);
    if (!(u_min <= u_max)) throw Error(ErrorCode::InvalidArgument, "stipple window lies outside the view path");
  }
  const Vec3& p = stipple.p;
  const auto curve = [&](double u) { return sightline_host_intersection(view.eye_at(u), p, host); };
  const double span = u_max - u_min;
  const double delta = 1e-3 * std::max(1.0, span);
  const auto curve_dx = [&](double u) {
    return (-curve(u + 2 * delta).x + 8 * curve(u + delta).x - 8 * curve(u - delta).x + curve(u - 2 * delta).x) /
           (12 * delta);
  };

  // Number of half-range steps so the view angle advances by at most `step`.
  double angle_span = span;
  if (!angular_path(view)) {
    angle_span = std::fabs(azimuth_seen_from(view.eye_at(u_max), p) - azimuth_seen_from(view.eye_at(u_min), p));
  }
  const int n_half = std::max(1, static_cast<int>(std::ceil(0.5 * angle_span / step - 1e-9)));
  const double u_ref = 0.5 * (u_min + u_max);
  const double h = 0.5 * span / n_half;

  const auto rate = [&](double u, const Vec3& x) {
    const Vec3 n_host = host.project(x).normal;
    const ConformingTangent ct = conforming_tangent(light.direction_from(x), view.eye_at(u).direction_from(x), n_host);
    if (ct.degenerate) throw DegenerateStage{};
    const Vec3 t = normalized(ct.t);
    if (std::fabs(t.x) < 1e-9) throw DegenerateStage{};
    return t * (curve_dx(u) / t.x);
  };
  const auto sample_at = [&](double u, const Vec3& x) {
    const Vec3 n_host = host.project(x).normal;
    const ConformingTangent ct = conforming_tangent(light.direction_from(x), view.eye_at(u).direction_from(x), n_host);
    return ToolpathSample{azimuth_seen_from(view.eye_at(u), p), x, ct.degenerate ? Vec3{} : normalized(ct.t), u};
  };
  const auto start_at = [&](double u) {
    Vec3 x = curve(u) + Vec3{0, c0, c1};
    if (!host.is_plane()) x = host.project(x).point;
    return x;
  };

  Toolpath path;
  path.c0 = c0;
  path.c1 = c1;

  struct Leg {
    std::vector<ToolpathSample> samples;
    std::vector<bool> break_before;
  };
  // Integrates from u_ref in direction dir for n_half steps.
  const auto run = [&](double dir, const Vec3& x0) {
    Leg leg;
    Vec3 x = x0;
    bool pending_break = false;
    for (int k = 0; k < n_half; ++k) {
      const double u = u_ref + dir * h * k;
      const double hs = dir * h;
      const double u_next = k + 1 == n_half ? (dir > 0 ? u_max : u_min) : u_ref + dir * h * (k + 1);
      try {
        if (pending_break) {
          x = start_at(u_next);
          rate(u_next, x);
        } else {
          const Vec3 k1 = rate(u, x);
          const Vec3 k2 = rate(u + 0.5 * hs, x + 0.5 * hs * k1);
          const Vec3 k3 = rate(u + 0.5 * hs, x + 0.5 * hs * k2);
          const Vec3 k4 = rate(u + hs, x + hs * k3);
          x = x + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        leg.samples.push_back(sample_at(u_next, x));
        leg.break_before.push_back(pending_break);
        pending_break = false;
      } catch (const DegenerateStage&) {
        if (!pending_break) {
          path.warnings.push_back("degenerate conforming tangent near view parameter " + std::to_string(u_next) +
                                  "; path split");
        }
        pending_break = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Miss) throw;
        path.warnings.push_back("sightline misses the host at view parameter " + std::to_string(u_next) +
                                "; path truncated");
        break;
      }
    }
    return leg;
  };

  const Vec3 x_ref = start_at(u_ref);
  const Leg back = run(-1.0, x_ref);
  const Leg fwd = run(+1.0, x_ref);

  path.piece_starts.clear();
  path.piece_starts.push_back(0);
  // Backward leg reversed: a break before sample j (in integration order)
  // separates it from the sample integrated just before it.
  const std::size_t nb = back.samples.size();
  for (std::size_t j = nb; j-- > 0;) {
    path.samples.push_back(back.samples[j]);
    if (back.break_before[j]) path.piece_starts.push_back(path.samples.size());
  }
  path.anchor = path.samples.size();
  path.samples.push_back(sample_at(u_ref, x_ref));
  for (std::size_t j = 0; j < fwd.samples.size(); ++j) {
    if (fwd.break_before[j]) path.piece_starts.push_back(path.samples.size());
    path.samples.push_back(fwd.samples[j]);
  }
  std::sort(path.piece_starts.begin(), path.piece_starts.end());
  path.piece_starts.erase(std::unique(path.piece_starts.begin(), path.piece_starts.end()), path.piece_starts.end());
  return path;
}

double polyline_distance(const std::vector<ToolpathSample>& a, const std::vector<ToolpathSample>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segment_count(a); ++i) {
    const auto [p, q] = segment_at(a, i);
    for (std::size_t j = 0; j < segment_count(b); ++j) {
      const auto [r, s] = segment_at(b, j);
      best = std::min(best, segment_distance(p, q, r, s));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Striping

Striping make_striping(const std::vector<Stipple>& stipples, const LightSource& light, const HostSurface& host,
                       const ViewPath& view, const FabricationParams& fab) {
  if (stipples.empty()) throw Error(ErrorCode::InvalidArgument, "striping needs at least one stipple");
  Striping out;
  out.fab = fab;

  std::vector<std::optional<StripeArc>> candidates(stipples.size());
  for (std::size_t i = 0; i < stipples.size(); ++i) {
    const Stipple& st = stipples[i];
    if (!(st.theta_min < st.theta_max) || st.weight < 0.0 || st.weight > 1.0) {
      out.rejected.push_back({i, "invalid stipple window or weight"});
      continue;
    }
    Toolpath tp;
    try {
      tp = integrate_toolpath(host, st, light, view, 0.0, 0.0, fab.step);
    } catch (const Error& e) {
      out.rejected.push_back({i, std::string("toolpath failed: ") + e.what()});
      continue;
    }
    // Clip to the stipple's piece, its window and the bar around the anchor.
    const std::size_t anchor = tp.anchor;
    std::size_t piece_lo = 0, piece_hi = tp.samples.size() - 1;
    for (std::size_t k = 0; k < tp.piece_starts.size(); ++k) {
      if (tp.piece_starts[k] <= anchor) piece_lo = tp.piece_starts[k];
      else { piece_hi = std::min(piece_hi, tp.piece_starts[k] - 1); break; }
    }
    const Vec3 centre = tp.samples[anchor].position;
    const auto inside = [&](std::size_t k) {
      const auto& s = tp.samples[k];
      return std::fabs(s.position.y - centre.y) <= 0.5 * fab.bar_height && s.theta >= st.theta_min - 1e-12 &&
             s.theta <= st.theta_max + 1e-12;
    };
    std::size_t lo = anchor, hi = anchor;
    while (lo > piece_lo && inside(lo - 1)) --lo;
    while (hi < piece_hi && inside(hi + 1)) ++hi;
    lo = anchor - static_cast<std::size_t>(std::llround(st.weight * static_cast<double>(anchor - lo)));
    hi = anchor + static_cast<std::size_t>(std::llround(st.weight * static_cast<double>(hi - anchor)));
    if (hi == lo) {
      out.rejected.push_back({i, "arc collapses to a point after clipping"});
      continue;
    }
    StripeArc arc;
    arc.stipple = i;
    arc.path.c0 = tp.c0;
    arc.path.c1 = tp.c1;
    arc.path.warnings = tp.warnings;
    arc.path.samples.assign(tp.samples.begin() + static_cast<std::ptrdiff_t>(lo),
                            tp.samples.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    arc.path.anchor = anchor - lo;
    arc.theta_a = arc.path.samples.front().theta;
    arc.theta_b = arc.path.samples.back().theta;
    candidates[i] = std::move(arc);
  }

  std::vector<std::size_t> order(stipples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (stipples[a].priority != stipples[b].priority) return stipples[a].priority > stipples[b].priority;
    return stipples[a].weight > stipples[b].weight;
  });

  const double clearance = 2.0 * fab.tool_radius;
  SegmentGrid grid(std::max(clearance, 1e-3));
  std::vector<const std::vector<ToolpathSample>*> accepted;
  std::vector<StripeArc> arcs;
  arcs.reserve(stipples.size());
  for (std::size_t i : order) {
    if (!candidates[i]) continue;
    const auto& samples = candidates[i]->path.samples;
    if (grid.nearest(samples, accepted, clearance) < clearance) {
      out.rejected.push_back({i, "footprint overlaps an accepted arc"});
      continue;
    }
    arcs.push_back(std::move(*candidates[i]));
    accepted.clear();
    for (const auto& a : arcs) accepted.push_back(&a.path.samples);
    grid.insert(arcs.size() - 1, arcs.back().path.samples);
  }
  out.arcs = std::move(arcs);
  std::sort(out.rejected.begin(), out.rejected.end(),
            [](const Rejection& a, const Rejection& b) { return a.stipple < b.stipple; });
  return out;
}

// ---------------------------------------------------------------------------
// Bit profile

bool BitProfile::covers(double angle) const {
  if (angle < angle_min - 1e-12 || angle > angle_max + 1e-12) return false;
  return std::any_of(segment_angles.begin(), segment_angles.end(),
                     [angle](double a) { return std::fabs(a - angle) <= kHalfDegree + 1e-12; });
}

namespace {

BitProfile profile_from_angles(double a_min, double a_max, double tool_radius) {
  if (a_max - a_min >= std::numbers::pi / 2) {
    throw Error(ErrorCode::Unmachinable, "required tangent-angle range spans 90 degrees or more");
  }
  if (!(a_min > 0.0) || !(a_max < std::numbers::pi / 2)) {
    throw Error(ErrorCode::Unmachinable, "required tangent angles leave the open quarter turn");
  }
  if (!(tool_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "tool radius must be positive");
  BitProfile prof;
  prof.angle_min = a_min;
  prof.angle_max = a_max;
  const int m = static_cast<int>(std::ceil((a_max - a_min) / kHalfDegree - 1e-9));
  // Tip segment is the flattest; angles decrease toward the shank.
  for (int k = 0; k <= m; ++k) prof.segment_angles.push_back(m == 0 ? a_max : a_max - (a_max - a_min) * k / m);
  double sin_sum = 0.0;
  for (double a : prof.segment_angles) sin_sum += std::sin(a);
  const double len = tool_radius / sin_sum;
  std::vector<ProfilePoint> from_tip{{0.0, 0.0}};
  for (double a : prof.segment_angles) {
    const ProfilePoint& last = from_tip.back();
    from_tip.push_back({last.depth + len * std::cos(a), last.radius + len * std::sin(a)});
  }
  const double height = from_tip.back().depth;
  for (auto it = from_tip.rbegin(); it != from_tip.rend(); ++it) prof.points.push_back({height - it->depth, it->radius});
  return prof;
}

void sweep_angles(double theta_min, double theta_max, double alpha, double& lo, double& hi) {
  const int n = std::max(1, static_cast<int>(std::ceil((theta_max - theta_min) / 1e-4)));
  for (int k = 0; k <= n; ++k) {
    const double theta = k == n ? theta_max : theta_min + (theta_max - theta_min) * k / n;
    const double a = orthogonal_tangent_angle(theta, alpha);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  // The angle is extremal at theta = 0 when the range straddles it.
  if (theta_min < 0.0 && theta_max > 0.0) {
    const double a = orthogonal_tangent_angle(0.0, alpha);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
}

}  // namespace

BitProfile bit_profile_for(double theta_min, double theta_max, double alpha, double tool_radius) {
  if (theta_max < theta_min) throw Error(ErrorCode::InvalidArgument, "theta range is reversed");
  // A sign change of cos(theta) + sin(alpha) inside the range crosses the pole.
  const double pole_lo = std::cos(theta_min) + std::sin(alpha);
  const double pole_hi = std::cos(theta_max) + std::sin(alpha);
  const double pole_mid = (theta_min < 0.0 && theta_max > 0.0 ? 1.0 : std::cos(theta_min)) + std::sin(alpha);
  if (pole_lo * pole_hi <= 0.0 || pole_lo * pole_mid <= 0.0) {
    throw Error(ErrorCode::Pole, "orthogonal tangent has a pole inside the theta range");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  sweep_angles(theta_min, theta_max, alpha, lo, hi);
  return profile_from_angles(lo, hi, tool_radius);
}

BitProfile bit_profile_for(const Striping& striping, double alpha) {
  if (striping.arcs.empty()) throw Error(ErrorCode::InvalidArgument, "striping has no arcs");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& arc : striping.arcs) sweep_angles(arc.theta_a, arc.theta_b, alpha, lo, hi);
  return profile_from_angles(lo, hi, striping.fab.tool_radius);
}

// ---------------------------------------------------------------------------
// Circle fit

CircleFit circular_arc_fit(const Toolpath& path, double theta_min, double theta_max) {
  std::vector<Vec3> pts;
  for (const auto& s : path.samples) {
    if (s.theta >= theta_min - 1e-12 && s.theta <= theta_max + 1e-12) pts.push_back(s.position);
  }
  if (pts.size() < 3) throw Error(ErrorCode::InvalidArgument, "circle fit needs at least three samples");

  const Vec3 first = pts.front(), last = pts.back(), mid = pts[pts.size() / 2];
  const double chord = distance(first, last);
  Vec3 normal = cross(last - first, mid - first);
  CircleFit fit;
  if (norm(normal) < 1e-12 * std::max(1.0, chord * chord)) {
    const Vec3 dir = chord > 0 ? (last - first) / chord : Vec3{1, 0, 0};
    fit.is_line = true;
    fit.radius = std::numeric_limits<double>::infinity();
    fit.center = 0.5 * (first + last);
    for (const auto& q : pts) fit.max_deviation = std::max(fit.max_deviation, norm(cross(q - first, dir)));
    return fit;
  }
  normal = normalized(normal);
  const Vec3 e1 = normalized(last - first), e2 = cross(normal, e1);
  Vec3 centroid;
  for (const auto& q : pts) centroid += q;
  centroid = centroid / static_cast<double>(pts.size());

  std::vector<std::pair<double, double>> uv;
  for (const auto& q : pts) uv.emplace_back(dot(q - centroid, e1), dot(q - centroid, e2));

  // Algebraic fit x^2 + y^2 + D x + E y + F = 0.
  std::array<std::array<double, 3>, 3> m{};
  std::array<double, 3> r{};
  for (const auto& [x, y] : uv) {
    const std::array<double, 3> row{x, y, 1.0};
    const double rhs = -(x * x + y * y);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += row[a] * row[b];
      r[a] += row[a] * rhs;
    }
  }
  const auto [dd, ee, ff] = solve3(m, r);
  double cx = -dd / 2, cy = -ee / 2;
  double rad = std::sqrt(std::max(0.0, cx * cx + cy * cy - ff));

  // Geometric refinement.
  for (int it = 0; it < 20; ++it) {
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (const auto& [x, y] : uv) {
      const double dx = x - cx, dy = y - cy, d = std::hypot(dx, dy);
      if (d == 0.0) continue;
      const std::array<double, 3> j{-dx / d, -dy / d, -1.0};
      const double res = d - rad;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
        jtr[a] -= j[a] * res;
      }
    }
    const auto [sx, sy, sr] = solve3(jtj, jtr);
    if (!std::isfinite(sx) || !std::isfinite(sy) || !std::isfinite(sr)) break;
    cx += sx;
    cy += sy;
    rad += sr;
    if (std::fabs(sx) + std::fabs(sy) + std::fabs(sr) < 1e-15 * std::max(1.0, rad)) break;
  }

  fit.normal = normal;
  fit.radius = rad;
  fit.center = centroid + cx * e1 + cy * e2;
  for (const auto& q : pts) {
    const double off = dot(q - fit.center, normal);
    const double in_plane = norm((q - fit.center) - off * normal) - rad;
    fit.max_deviation = std::max(fit.max_deviation, std::hypot(off, in_plane));
  }
  return fit;
}

}  // namespace spechol
