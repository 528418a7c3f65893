#pragma once

#include <numbers>

namespace spechol {

struct MachineEnvelope {
  double x_min = -500.0;
  double x_max = 500.0;
  double y_min = -500.0;
  double y_max = 500.0;

  bool contains(double x, double y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
  bool operator==(const MachineEnvelope&) const = default;
};

struct FabricationParams {
  double delta = 0.5;           // shell half-thickness, mm
  double pitch = 2.0;           // ridge band width, mm
  double cone_standoff = 0.0;   // apex height above the host, mm; <= 0 means 10 * delta
  double resolution = 8.0;      // mesh samples per mm
  double tool_radius = 0.2;     // mm
  double bar_height = 2.0;      // striping bar height, mm
  double step = 0.1 * std::numbers::pi / 180.0;  // toolpath step in view angle, radians
  double extent = 4.0;          // outer radius of a ridged patch, mm
  double safe_height = 5.0;     // G-code rapid height, mm
  double feed = 300.0;          // mm/min
  double plunge_feed = 100.0;   // mm/min
  MachineEnvelope envelope;

  double standoff() const { return cone_standoff > 0.0 ? cone_standoff : 10.0 * delta; }
  bool operator==(const FabricationParams&) const = default;
};

}  // namespace spechol
