#include "spechol/export.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "spechol/error.hpp"

namespace spechol {

namespace {

std::string f4(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  if (std::string(buf) == "-0.0000") return "0.0000";
  return buf;
}

std::string f6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

}  // namespace

std::string striping_gcode(const Striping& striping) {
  const FabricationParams& fab = striping.fab;
  std::string g;
  g += "(specular holography striping)\n";
  g += "(arcs " + std::to_string(striping.arcs.size()) + ", groove depth " + f4(fab.delta) + ")\n";
  g += "G21\nG90\n";
  const std::string safe = f4(fab.safe_height);
  for (std::size_t i = 0; i < striping.arcs.size(); ++i) {
    const StripeArc& arc = striping.arcs[i];
    const auto& samples = arc.path.samples;
    if (samples.empty()) continue;
    for (const auto& s : samples) {
      if (!fab.envelope.contains(s.position.x, s.position.y)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "arc %zu sample (%.4f, %.4f) lies outside the machine envelope", i,
                      s.position.x, s.position.y);
        throw Error(ErrorCode::Envelope, msg);
      }
    }
    g += "(arc " + std::to_string(i) + " stipple " + std::to_string(arc.stipple) + ")\n";
    const Vec3& first = samples.front().position;
    g += "G0 X" + f4(first.x) + " Y" + f4(first.y) + " Z" + safe + "\n";
    g += "G1 Z" + f4(first.z - fab.delta) + " F" + f4(fab.plunge_feed) + " (plunge)\n";
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const Vec3& q = samples[k].position;
      g += "G1 X" + f4(q.x) + " Y" + f4(q.y) + " Z" + f4(q.z - fab.delta);
      if (k == 0) g += " F" + f4(fab.feed);
      g += "\n";
    }
    g += "G0 Z" + safe + " (retract)\n";
  }
  g += "M2\n";
  return g;
}

std::string striping_csv(const Striping& striping) {
  std::string out = "stipple_id,theta_deg,x,y,z\n";
  for (const auto& arc : striping.arcs) {
    for (const auto& s : arc.path.samples) {
      out += std::to_string(arc.stipple) + "," + f6(s.theta * 180.0 / std::numbers::pi) + "," + f6(s.position.x) +
             "," + f6(s.position.y) + "," + f6(s.position.z) + "\n";
    }
  }
  return out;
}

std::string mesh_obj(const Mesh& mesh) {
  std::string out = "# specular holography ridging\n";
  out += "# vertices " + std::to_string(mesh.vertices.size()) + " triangles " +
         std::to_string(mesh.triangles.size()) + "\n";
  for (const auto& v : mesh.vertices) out += "v " + f6(v.x) + " " + f6(v.y) + " " + f6(v.z) + "\n";
  for (const auto& n : mesh.normals) out += "vn " + f6(n.x) + " " + f6(n.y) + " " + f6(n.z) + "\n";
  for (const auto& [tag, name] : {std::pair{FaceTag::Imaging, "imaging"}, std::pair{FaceTag::Backface, "backface"}}) {
    out += std::string("g ") + name + "\n";
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      if (mesh.tags[t] != tag) continue;
      out += "f";
      for (auto idx : mesh.triangles[t]) {
        const std::string k = std::to_string(idx + 1);
        out += " " + k + "//" + k;
      }
      out += "\n";
    }
  }
  return out;
}

Mesh merge_meshes(const std::vector<Mesh>& meshes) {
  Mesh out;
  for (const auto& m : meshes) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    out.normals.insert(out.normals.end(), m.normals.begin(), m.normals.end());
    for (const auto& t : m.triangles) out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    out.tags.insert(out.tags.end(), m.tags.begin(), m.tags.end());
  }
  return out;
}

std::string pgm(const std::vector<std::uint8_t>& frame, int width, int height) {
  if (width < 1 || height < 1 || frame.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "frame size does not match its dimensions");
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(frame.data()), frame.size());
  return out;
}

std::vector<std::string> write_frames(const GlintMap& map, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
  std::vector<std::string> paths;
  for (std::size_t k = 0; k < map.frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.pgm", k);
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    const std::string bytes = pgm(map.frames[k], map.width, map.height);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace spechol
