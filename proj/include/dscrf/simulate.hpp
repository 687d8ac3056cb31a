#pragma once

#include <array>
#include <cstdint>

#include "dscrf/field.hpp"

namespace dscrf {

/// One moving square. Positions advance by discrete kinematics
/// (p(t+1) = p(t) + v(t), v(t) = v0 + a*t) and the half-size grows linearly,
/// so center offsets follow p0 + v0*t + a*t*(t-1)/2.
struct ObjectSpec {
  std::array<double, 2> position{};      // initial center, px
  std::array<double, 2> velocity{};      // px/frame
  std::array<double, 2> acceleration{};  // px/frame^2
  double half_size = 4.0;                // px
  double growth = 0.0;                   // px/frame
  std::array<double, 3> color{0.85, 0.85, 0.85};
};

struct MotionSpec {
  int width = 64;
  int height = 64;
  int frames = 20;
  double noise_sigma = 0.02;
  std::array<double, 3> background{0.15, 0.15, 0.15};
  std::vector<ObjectSpec> objects;

  /// Center and inclusive pixel extent of one object at frame t.
  struct Extent {
    double cx = 0.0, cy = 0.0;
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  };
  Extent extent(int object, int t) const;

  /// Rejects specs whose objects ever leave the canvas.
  void validate() const;
};

struct Sequence {
  std::vector<Frame> frames;
  std::vector<LabelField> scene_masks;  // union of all objects
  // target_masks[t][j]: object j's visible pixels at frame t (later objects
  // in the spec draw over earlier ones).
  std::vector<std::vector<LabelField>> target_masks;
};

Sequence generate(const MotionSpec& spec, std::uint64_t seed);

MotionSpec motion_spec_from_json_text(const std::string& text);
MotionSpec motion_spec_from_file(const std::string& path);

}  // namespace dscrf
