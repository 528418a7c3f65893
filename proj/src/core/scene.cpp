#include "spechol/scene.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>

namespace spechol {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Token {
  std::string text;
  int col = 0;  // 1-based
};

struct Location {
  int line = 0;
  int col = 0;
};

[[noreturn]] void fail(Location at, const std::string& msg) {
  throw Error(ErrorCode::Parse, std::to_string(at.line) + ":" + std::to_string(at.col) + ": " + msg);
}

std::vector<Token> split(const std::string& s, int col0) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    const std::size_t j = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    out.push_back({s.substr(j, i - j), col0 + static_cast<int>(j)});
  }
  return out;
}

double number(const Token& t, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.text.c_str(), &end);
  if (end == t.text.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    fail({line, t.col}, "malformed number '" + t.text + "'");
  }
  return v;
}

int integer(const Token& t, int line) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(t.text.c_str(), &end, 10);
  if (end == t.text.c_str() || *end != '\0' || errno == ERANGE || v < -1000000000L || v > 1000000000L) {
    fail({line, t.col}, "malformed integer '" + t.text + "'");
  }
  return static_cast<int>(v);
}

struct Entry {
  std::vector<Token> values;
  Location key_at;
  Location value_at;
};

// Key/value pairs of one section, consumed by the section readers.
class Section {
 public:
  Section(std::string name, Location at) : name_(std::move(name)), at_(at) {}

  void add(const std::string& key, Entry e) {
    if (!allowed(key)) fail(e.key_at, "unknown key '" + key + "' in [" + name_ + "]");
    if (entries_.count(key)) fail(e.key_at, "duplicate key '" + key + "' in [" + name_ + "]");
    order_.push_back(key);
    entries_.emplace(key, std::move(e));
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry& get(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) fail(at_, "[" + name_ + "] is missing key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  double scalar(const std::string& key) {
    const Entry& e = get(key);
    if (e.values.size() != 1) fail(e.value_at, "'" + key + "' takes one number");
    return number(e.values[0], e.value_at.line);
  }
  double scalar_or(const std::string& key, double fallback) { return has(key) ? scalar(key) : fallback; }

  int whole(const std::string& key) {
    const Entry& e = get(key);
    if (e.values.size() != 1) fail(e.value_at, "'" + key + "' takes one integer");
    return integer(e.values[0], e.value_at.line);
  }

  Vec3 vec(const std::string& key) {
    const Entry& e = get(key);
    if (e.values.size() != 3) fail(e.value_at, "'" + key + "' takes three numbers");
    const int line = e.value_at.line;
    return {number(e.values[0], line), number(e.values[1], line), number(e.values[2], line)};
  }
  Vec3 vec_or(const std::string& key, const Vec3& fallback) { return has(key) ? vec(key) : fallback; }

  Vec3 nonzero_vec(const std::string& key) {
    const Vec3 v = vec(key);
    if (!(norm(v) > 0.0)) fail(get(key).value_at, "'" + key + "' must be a nonzero vector");
    return v;
  }

  bool flag(const std::string& key) {
    const Entry& e = get(key);
    if (e.values.size() != 1 || (e.values[0].text != "true" && e.values[0].text != "false")) {
      fail(e.value_at, "'" + key + "' takes true or false");
    }
    return e.values[0].text == "true";
  }

  std::string word(const std::string& key, const std::set<std::string>& allowed) {
    const Entry& e = get(key);
    if (e.values.size() != 1 || !allowed.count(e.values[0].text)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(e.value_at, "'" + key + "' must be one of: " + list);
    }
    return e.values[0].text;
  }

  double positive(const std::string& key, double fallback) {
    const double v = scalar_or(key, fallback);
    if (has(key) && !(v > 0.0)) fail(get(key).value_at, "'" + key + "' must be positive");
    return v;
  }

  // Every key must have been read by the section reader.
  void finish() const {
    for (const auto& key : order_) {
      if (!used_.count(key)) fail(entries_.at(key).key_at, "key '" + key + "' does not apply here in [" + name_ + "]");
    }
  }

  Location at() const { return at_; }

 private:
  bool allowed(const std::string& key) const {
    static const std::map<std::string, std::set<std::string>> keys{
        {"media", {"eta1", "eta2"}},
        {"light", {"type", "position", "direction", "alpha"}},
        {"host", {"type", "origin", "normal", "center", "radius", "outside"}},
        {"view", {"type", "samples", "center", "radius", "elevation", "theta_min", "theta_max", "origin",
                  "direction", "range"}},
        {"fab", {"delta", "pitch", "standoff", "resolution", "tool_radius", "bar_height", "step", "extent",
                 "safe_height", "feed", "plunge_feed", "envelope"}},
    };
    const auto it = keys.find(name_);
    return it != keys.end() && it->second.count(key);
  }

  std::string name_;
  Location at_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::set<std::string> used_;
};

void read_media(Section& s, SceneSpec& out) {
  out.media.eta1 = s.positive("eta1", 1.0);
  out.media.eta2 = s.positive("eta2", 1.0);
}

void read_light(Section& s, SceneSpec& out) {
  LightSpec& l = out.light;
  l.kind = s.word("type", {"point", "directional"}) == "point" ? LightKind::Point : LightKind::Directional;
  if (l.kind == LightKind::Point) {
    l.position = s.vec("position");
    return;
  }
  if (s.has("alpha") == s.has("direction")) fail(s.at(), "directional [light] needs exactly one of 'alpha' or 'direction'");
  if (s.has("alpha")) {
    l.alpha_deg = s.scalar("alpha");
  } else {
    l.direction = s.nonzero_vec("direction");
  }
}

void read_host(Section& s, SceneSpec& out) {
  HostSpec& h = out.host;
  h.kind = s.word("type", {"plane", "sphere"}) == "plane" ? HostKind::Plane : HostKind::Sphere;
  if (h.kind == HostKind::Plane) {
    h.origin = s.vec_or("origin", {});
    h.normal = s.has("normal") ? s.nonzero_vec("normal") : Vec3{0, 0, 1};
    return;
  }
  h.center = s.vec("center");
  h.radius = s.scalar("radius");
  if (!(h.radius > 0.0)) fail(s.get("radius").value_at, "'radius' must be positive");
  h.outside = s.has("outside") ? s.flag("outside") : true;
}

void read_view(Section& s, SceneSpec& out) {
  ViewSpec& v = out.view;
  const std::string type = s.word("type", {"orbit", "line", "infinity"});
  v.kind = type == "orbit" ? ViewKind::Orbit : type == "line" ? ViewKind::Line : ViewKind::Infinity;
  v.samples = s.whole("samples");
  if (v.samples < 1) fail(s.get("samples").value_at, "'samples' must be at least 1");
  if (v.kind == ViewKind::Line) {
    v.origin = s.vec("origin");
    v.direction = s.nonzero_vec("direction");
    v.range = s.scalar("range");
    return;
  }
  if (v.kind == ViewKind::Orbit) {
    v.center = s.vec_or("center", {});
    v.radius = s.scalar("radius");
  }
  v.elevation_deg = s.scalar_or("elevation", 0.0);
  v.theta_min_deg = s.scalar("theta_min");
  v.theta_max_deg = s.scalar("theta_max");
}

void read_fab(Section& s, SceneSpec& out) {
  FabricationParams& f = out.fab;
  const FabricationParams d;
  f.delta = s.positive("delta", d.delta);
  f.pitch = s.positive("pitch", d.pitch);
  f.cone_standoff = s.scalar_or("standoff", d.cone_standoff);
  f.resolution = s.positive("resolution", d.resolution);
  f.tool_radius = s.positive("tool_radius", d.tool_radius);
  f.bar_height = s.positive("bar_height", d.bar_height);
  out.step_deg = s.positive("step", 0.1);
  f.extent = s.positive("extent", d.extent);
  f.safe_height = s.scalar_or("safe_height", d.safe_height);
  f.feed = s.positive("feed", d.feed);
  f.plunge_feed = s.positive("plunge_feed", d.plunge_feed);
  if (s.has("envelope")) {
    const Entry& e = s.get("envelope");
    if (e.values.size() != 4) fail(e.value_at, "'envelope' takes x_min x_max y_min y_max");
    const int line = e.value_at.line;
    f.envelope = {number(e.values[0], line), number(e.values[1], line), number(e.values[2], line),
                  number(e.values[3], line)};
    if (!(f.envelope.x_min < f.envelope.x_max) || !(f.envelope.y_min < f.envelope.y_max)) {
      fail(e.value_at, "'envelope' ranges must be increasing");
    }
  }
}

StippleSpec read_stipple(const std::vector<Token>& t, int line) {
  if (t.size() < 3 || t.size() > 7) fail({line, t.empty() ? 1 : t[0].col}, "stipple line takes 3 to 7 fields");
  StippleSpec st;
  st.p = {number(t[0], line), number(t[1], line), number(t[2], line)};
  if (t.size() > 3) st.weight = number(t[3], line);
  if (t.size() > 4) st.theta_min_deg = number(t[4], line);
  if (t.size() > 5) st.theta_max_deg = number(t[5], line);
  if (t.size() > 6) st.priority = integer(t[6], line);
  if (st.weight < 0.0 || st.weight > 1.0) fail({line, t[3].col}, "stipple weight must lie in [0, 1]");
  if (!(st.theta_min_deg < st.theta_max_deg)) fail({line, t[0].col}, "stipple window must have theta_min < theta_max");
  return st;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x) + " " + fmt(v.y) + " " + fmt(v.z); }

}  // namespace

bool SceneSpec::operator==(const SceneSpec& o) const {
  FabricationParams a = fab, b = o.fab;
  a.step = b.step = 0.0;
  return media.eta1 == o.media.eta1 && media.eta2 == o.media.eta2 && light == o.light && host == o.host &&
         view == o.view && a == b && step_deg == o.step_deg && stipples == o.stipples;
}

SceneSpec parse_scene(const std::string& text) {
  static const std::set<std::string> known{"media", "light", "host", "view", "fab", "stipples"};
  SceneSpec out;
  std::map<std::string, Section> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const int col = static_cast<int>(first) + 1;

    if (line[first] == '[') {
      const auto close = line.find(']', first);
      if (close == std::string::npos) fail({line_no, col}, "unterminated section header");
      if (line.find_first_not_of(" \t", close + 1) != std::string::npos) {
        fail({line_no, static_cast<int>(close) + 2}, "text after section header");
      }
      current = line.substr(first + 1, close - first - 1);
      if (!known.count(current)) fail({line_no, col + 1}, "unknown section [" + current + "]");
      if (sections.count(current)) fail({line_no, col}, "duplicate section [" + current + "]");
      sections.emplace(current, Section(current, {line_no, col}));
      continue;
    }
    if (current.empty()) fail({line_no, col}, "content before the first section");
    if (current == "stipples") {
      out.stipples.push_back(read_stipple(split(line, 1), line_no));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail({line_no, col}, "expected 'key = value'");
    const auto key_end = line.find_last_not_of(" \t", eq == 0 ? 0 : eq - 1);
    if (eq == first || key_end == std::string::npos) fail({line_no, col}, "missing key before '='");
    const std::string key = line.substr(first, key_end - first + 1);
    Entry e;
    e.key_at = {line_no, col};
    e.values = split(line.substr(eq + 1), static_cast<int>(eq) + 2);
    e.value_at = {line_no, e.values.empty() ? static_cast<int>(eq) + 2 : e.values[0].col};
    if (e.values.empty()) fail(e.value_at, "missing value for '" + key + "'");
    sections.at(current).add(key, std::move(e));
  }

  const auto read = [&](const char* name, void (*reader)(Section&, SceneSpec&)) {
    const auto it = sections.find(name);
    if (it == sections.end()) return;
    reader(it->second, out);
    it->second.finish();
  };
  read("media", read_media);
  read("light", read_light);
  read("host", read_host);
  read("view", read_view);
  read("fab", read_fab);
  for (const char* required : {"light", "host", "view", "stipples"}) {
    if (!sections.count(required)) fail({line_no, 1}, std::string("missing section [") + required + "]");
  }

  // Domain validation through the geometry constructors.
  const auto check = [&](const char* name, const std::function<void()>& build) {
    try {
      build();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Parse) throw;
      fail(sections.at(name).at(), std::string("[") + name + "] " + e.what());
    }
  };
  check("light", [&] { scene_light(out); });
  check("host", [&] { scene_host(out); });
  check("view", [&] { scene_view(out); });
  return out;
}

std::string print_scene(const SceneSpec& scene) {
  std::string s;
  const auto kv = [&s](const char* key, const std::string& value) { s += std::string(key) + " = " + value + "\n"; };
  s += "[media]\n";
  kv("eta1", fmt(scene.media.eta1));
  kv("eta2", fmt(scene.media.eta2));

  s += "\n[light]\n";
  const LightSpec& l = scene.light;
  if (l.kind == LightKind::Point) {
    kv("type", "point");
    kv("position", fmt(l.position));
  } else {
    kv("type", "directional");
    if (l.alpha_deg) kv("alpha", fmt(*l.alpha_deg)); else kv("direction", fmt(l.direction));
  }

  s += "\n[host]\n";
  const HostSpec& h = scene.host;
  if (h.kind == HostKind::Plane) {
    kv("type", "plane");
    kv("origin", fmt(h.origin));
    kv("normal", fmt(h.normal));
  } else {
    kv("type", "sphere");
    kv("center", fmt(h.center));
    kv("radius", fmt(h.radius));
    kv("outside", h.outside ? "true" : "false");
  }

  s += "\n[view]\n";
  const ViewSpec& v = scene.view;
  kv("type", v.kind == ViewKind::Orbit ? "orbit" : v.kind == ViewKind::Line ? "line" : "infinity");
  kv("samples", std::to_string(v.samples));
  if (v.kind == ViewKind::Line) {
    kv("origin", fmt(v.origin));
    kv("direction", fmt(v.direction));
    kv("range", fmt(v.range));
  } else {
    if (v.kind == ViewKind::Orbit) {
      kv("center", fmt(v.center));
      kv("radius", fmt(v.radius));
    }
    kv("elevation", fmt(v.elevation_deg));
    kv("theta_min", fmt(v.theta_min_deg));
    kv("theta_max", fmt(v.theta_max_deg));
  }

  s += "\n[fab]\n";
  const FabricationParams& f = scene.fab;
  kv("delta", fmt(f.delta));
  kv("pitch", fmt(f.pitch));
  kv("standoff", fmt(f.cone_standoff));
  kv("resolution", fmt(f.resolution));
  kv("tool_radius", fmt(f.tool_radius));
  kv("bar_height", fmt(f.bar_height));
  kv("step", fmt(scene.step_deg));
  kv("extent", fmt(f.extent));
  kv("safe_height", fmt(f.safe_height));
  kv("feed", fmt(f.feed));
  kv("plunge_feed", fmt(f.plunge_feed));
  kv("envelope", fmt(f.envelope.x_min) + " " + fmt(f.envelope.x_max) + " " + fmt(f.envelope.y_min) + " " +
                     fmt(f.envelope.y_max));

  s += "\n[stipples]\n";
  for (const auto& st : scene.stipples) {
    s += fmt(st.p) + " " + fmt(st.weight) + " " + fmt(st.theta_min_deg) + " " + fmt(st.theta_max_deg) + " " +
         std::to_string(st.priority) + "\n";
  }
  return s;
}

FabricationParams scene_fab(const SceneSpec& scene) {
  FabricationParams f = scene.fab;
  f.step = scene.step_deg * kDeg;
  return f;
}

LightSource scene_light(const SceneSpec& scene) {
  const LightSpec& l = scene.light;
  if (l.kind == LightKind::Point) return LightSource::point(l.position);
  if (l.alpha_deg) return LightSource::from_alpha(*l.alpha_deg * kDeg);
  return LightSource::directional(l.direction);
}

HostSurface scene_host(const SceneSpec& scene) {
  const HostSpec& h = scene.host;
  if (h.kind == HostKind::Plane) return HostSurface::plane(h.origin, h.normal);
  return HostSurface::sphere(h.center, h.radius, h.outside);
}

ViewPath scene_view(const SceneSpec& scene) {
  const ViewSpec& v = scene.view;
  switch (v.kind) {
    case ViewKind::Orbit:
      return ViewPath(OrbitPath{v.center, v.radius, v.elevation_deg * kDeg, v.theta_min_deg * kDeg,
                                v.theta_max_deg * kDeg},
                      v.samples);
    case ViewKind::Line:
      return ViewPath(LinePath{v.origin, v.direction, v.range}, v.samples);
    case ViewKind::Infinity:
      break;
  }
  return ViewPath(InfinityPath{v.theta_min_deg * kDeg, v.theta_max_deg * kDeg, v.elevation_deg * kDeg}, v.samples);
}

std::vector<Stipple> scene_stipples(const SceneSpec& scene) {
  std::vector<Stipple> out;
  for (const auto& s : scene.stipples) {
    out.push_back({s.p, s.weight, s.theta_min_deg * kDeg, s.theta_max_deg * kDeg, s.priority});
  }
  return out;
}

}  // namespace spechol
