// Command-line front end. Talks to the library only through the C interface.

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spechol/spechol.h"

namespace {

// Runtime failures that are not verification findings.
constexpr int kFailure = 3;

struct Failure {
  std::string what;
};

void check(sh_status st, const char* doing) {
  if (st != SH_OK) throw Failure{std::string(doing) + ": " + sh_status_name(st) + ": " + sh_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Scene = Handle<sh_scene, sh_scene_free>;
using Striping = Handle<sh_striping, sh_striping_free>;
using Ridging = Handle<sh_ridging, sh_ridging_free>;
using GlintMap = Handle<sh_glintmap, sh_glintmap_free>;

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  sh_string_free(s);
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Failure{"cannot write " + path};
}

void load(Scene& scene, const std::string& path) { check(sh_scene_load(path.c_str(), &scene.p), "loading scene"); }

struct Raster {
  int width = 64;
  int height = 64;
  double ppm = 4.0;
};

void add_raster(CLI::App* cmd, Raster& r) {
  cmd->add_option("--width", r.width, "frame width in pixels")->check(CLI::PositiveNumber);
  cmd->add_option("--height", r.height, "frame height in pixels")->check(CLI::PositiveNumber);
  cmd->add_option("--ppm", r.ppm, "pixels per millimetre at the look-at point")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Specular holography: reflectors, stripings and glint simulation"};
  app.require_subcommand(1);
  std::string scene_path;

  auto* foliate = app.add_subcommand("foliate", "classify the reflector through each stipple");
  foliate->add_option("scene", scene_path, "scene file")->required();

  std::string out_path, csv_path;
  auto* stripe = app.add_subcommand("stripe", "build the striping and write its toolpaths");
  stripe->add_option("scene", scene_path, "scene file")->required();
  stripe->add_option("-o,--gcode", out_path, "G-code output file");
  stripe->add_option("--csv", csv_path, "per-sample CSV output file");

  std::vector<double> crop;
  auto* ridge = app.add_subcommand("ridge", "build ridged reflectors and write their mesh");
  ridge->add_option("scene", scene_path, "scene file")->required();
  ridge->add_option("-o,--obj", out_path, "mesh output file");
  ridge->add_option("--crop", crop, "az_min az_max el_min el_max in degrees")->expected(4);

  auto* profile = app.add_subcommand("profile", "report the cutter profile for the striping");
  profile->add_option("scene", scene_path, "scene file")->required();

  std::string surface = "stripe", frames_dir;
  double baseline = 3.0;
  Raster raster;
  auto* simulate = app.add_subcommand("simulate", "render glint maps and triangulate each stipple");
  simulate->add_option("scene", scene_path, "scene file")->required();
  simulate->add_option("--surface", surface, "surface to simulate")->check(CLI::IsMember({"stripe", "ridge"}));
  simulate->add_option("--frames", frames_dir, "directory for frame_NNNN.pgm files");
  simulate->add_option("--baseline", baseline, "stereo baseline in degrees")->check(CLI::PositiveNumber);
  add_raster(simulate, raster);

  std::string gcode_path, obj_path;
  auto* exp = app.add_subcommand("export", "write every artifact of a scene");
  exp->add_option("scene", scene_path, "scene file")->required();
  exp->add_option("--gcode", gcode_path, "G-code output file");
  exp->add_option("--csv", csv_path, "per-sample CSV output file");
  exp->add_option("--obj", obj_path, "ridging mesh output file");
  exp->add_option("--frames", frames_dir, "directory for glint frames");
  add_raster(exp, raster);

  std::vector<std::string> suites{"foliation", "striping"};
  auto* verify = app.add_subcommand("verify", "run the residual suites; exit 1 on any violation");
  verify->add_option("scene", scene_path, "scene file")->required();
  verify->add_option("--suite", suites, "foliation, striping, ridging or all")
      ->check(CLI::IsMember({"foliation", "striping", "ridging", "all"}))
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n\n%s", e.what(), app.help().c_str());
    return 2;
  }

  try {
    Scene scene;
    load(scene, scene_path);

    if (*foliate) {
      char* r = nullptr;
      check(sh_foliate_report(scene.p, &r), "foliate");
      emit(take(r), "");
    } else if (*stripe) {
      Striping s;
      char* r = nullptr;
      check(sh_stripe_build(scene.p, &s.p), "stripe");
      check(sh_striping_report(s.p, &r), "stripe report");
      std::fputs(take(r).c_str(), stderr);
      check(sh_striping_gcode(s.p, &r), "G-code export");
      emit(take(r), out_path);
      if (!csv_path.empty()) {
        check(sh_striping_csv(s.p, &r), "CSV export");
        emit(take(r), csv_path);
      }
    } else if (*ridge) {
      Ridging rg;
      char* r = nullptr;
      check(sh_ridge_build(scene.p, &rg.p), "ridge");
      if (!crop.empty()) check(sh_ridge_crop(rg.p, crop[0], crop[1], crop[2], crop[3]), "crop");
      check(sh_ridging_report(rg.p, &r), "ridge report");
      std::fputs(take(r).c_str(), stderr);
      check(sh_ridge_mesh_obj(rg.p, &r), "mesh export");
      emit(take(r), out_path);
    } else if (*profile) {
      Striping s;
      char* r = nullptr;
      check(sh_stripe_build(scene.p, &s.p), "stripe");
      check(sh_profile_report(scene.p, s.p, &r), "profile");
      emit(take(r), "");
    } else if (*simulate) {
      Striping s;
      Ridging rg;
      if (surface == "ridge") {
        check(sh_ridge_build(scene.p, &rg.p), "ridge");
      } else {
        check(sh_stripe_build(scene.p, &s.p), "stripe");
      }
      GlintMap map;
      char* r = nullptr;
      check(sh_simulate(scene.p, s.p, rg.p, raster.width, raster.height, raster.ppm, &map.p), "simulate");
      if (!frames_dir.empty()) check(sh_glintmap_write_frames(map.p, frames_dir.c_str()), "frames");
      check(sh_glintmap_report(map.p, &r), "glint report");
      emit(take(r), "");
      check(sh_triangulate_report(scene.p, s.p, rg.p, baseline, &r), "triangulation");
      emit(take(r), "");
    } else if (*exp) {
      char* r = nullptr;
      Striping s;
      check(sh_stripe_build(scene.p, &s.p), "stripe");
      if (!gcode_path.empty()) {
        check(sh_striping_gcode(s.p, &r), "G-code export");
        emit(take(r), gcode_path);
      }
      if (!csv_path.empty()) {
        check(sh_striping_csv(s.p, &r), "CSV export");
        emit(take(r), csv_path);
      }
      if (!obj_path.empty()) {
        Ridging rg;
        check(sh_ridge_build(scene.p, &rg.p), "ridge");
        check(sh_ridge_mesh_obj(rg.p, &r), "mesh export");
        emit(take(r), obj_path);
      }
      if (!frames_dir.empty()) {
        GlintMap map;
        check(sh_simulate(scene.p, s.p, nullptr, raster.width, raster.height, raster.ppm, &map.p), "simulate");
        check(sh_glintmap_write_frames(map.p, frames_dir.c_str()), "frames");
      }
    } else if (*verify) {
      unsigned flags = 0;
      for (const auto& s : suites) {
        if (s == "foliation") flags |= SH_VERIFY_FOLIATION;
        if (s == "striping") flags |= SH_VERIFY_STRIPING;
        if (s == "ridging") flags |= SH_VERIFY_RIDGING;
        if (s == "all") flags |= SH_VERIFY_ALL;
      }
      char* r = nullptr;
      size_t violations = 0;
      check(sh_verify(scene.p, flags, &r, &violations), "verify");
      emit(take(r), "");
      return violations == 0 ? 0 : 1;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.what.c_str());
    return kFailure;
  }
  return 0;
}
