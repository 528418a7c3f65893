#pragma once

// Text and image writers for stripings, meshes and glint maps. All output is
// deterministic: fixed precision, no timestamps.

#include <cstdint>
#include <string>
#include <vector>

#include "spechol/ridging.hpp"
#include "spechol/simulate.hpp"
#include "spechol/striping.hpp"

namespace spechol {

// One plunge, cut and retract per arc. Throws Envelope when a sample falls
// outside the machine envelope.
std::string striping_gcode(const Striping& striping);

// stipple_id,theta_deg,x,y,z for every sample of every arc.
std::string striping_csv(const Striping& striping);

// Faces grouped as "imaging" and "backface".
std::string mesh_obj(const Mesh& mesh);
Mesh merge_meshes(const std::vector<Mesh>& meshes);

// Binary greymap, maxval 255.
std::string pgm(const std::vector<std::uint8_t>& frame, int width, int height);

// Writes frame_0000.pgm, frame_0001.pgm, ... into dir and returns the paths.
std::vector<std::string> write_frames(const GlintMap& map, const std::string& dir);

}  // namespace spechol
