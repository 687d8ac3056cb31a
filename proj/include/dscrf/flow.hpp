#pragma once

#include <utility>
#include <vector>

#include "dscrf/field.hpp"

namespace dscrf {

struct FlowSettings {
  double alpha = 0.2;    // smoothness weight, > 0
  int iterations = 200;  // Jacobi iterations, >= 1
  double presmooth = 1.5;  // Gaussian sigma applied before derivatives; 0 off

  void validate() const;
};

/// Dense velocity field from `prev` to `curr` (Horn-Schunck, grayscale,
/// synchronous Jacobi updates). Velocities are measured at the pixels of
/// `prev`: content at p in `prev` appears near p + v(p) in `curr`.
FlowField dense_flow(const Frame& prev, const Frame& curr,
                     const FlowSettings& settings);

/// Per-pixel integer offsets, round-half-away-from-zero.
struct IntOffsetField {
  int width = 0;
  int height = 0;
  std::vector<int> dx;
  std::vector<int> dy;
};

IntOffsetField round_flow(const FlowField& flow);

int round_half_away(double v);

}  // namespace dscrf
