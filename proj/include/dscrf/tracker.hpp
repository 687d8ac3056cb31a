#pragma once

#include "dscrf/config.hpp"
#include "dscrf/field.hpp"

namespace dscrf {

/// Everything the per-frame loop carries between steps.
struct TrackState {
  int width = 0;
  int height = 0;
  Frame prev_frame;
  LabelField prev_labels;                        // decoded scene at t-1
  std::vector<std::vector<int>> targets;         // sorted pixel sets
  std::vector<std::array<double, 2>> velocities; // forward motion, px/frame
  int frame_index = 2;                           // next frame to track
  ModelParams params;
};

/// State from the two user-annotated frames; tracking starts at frame 2.
TrackState initialize(const Frame& frame1, const Frame& frame2,
                      const SequenceAnnotation& annotation,
                      const ModelParams& params, const RunConfig& cfg);

struct StepResult {
  LabelField decoded;
  bool bp_converged = true;
  int bp_iterations = 0;
  int component_count = 0;
  std::vector<bool> target_matched;
};

/// Advances the state by one frame: flow, cliques, features, inference,
/// decoding, data association.
StepResult step(TrackState& state, const Frame& frame, const RunConfig& cfg);

/// 4-connected components of the silhouette pixels, each sorted, ordered by
/// smallest contained index.
std::vector<std::vector<int>> connected_components(const LabelField& field);

/// Pixel set shifted by an integer offset; pixels leaving the grid drop out.
std::vector<int> translate_pixels(const std::vector<int>& pixels, int dx,
                                  int dy, int width, int height);

struct Association {
  std::vector<std::vector<int>> targets;
  std::vector<bool> matched;
  int component_count = 0;
};

/// Greedy one-to-one matching of decoded components to targets by IoU
/// against each target's motion-predicted previous silhouette. Unmatched
/// targets coast on their prediction.
Association associate(const LabelField& decoded,
                      const std::vector<std::vector<int>>& prev_targets,
                      const std::vector<std::array<double, 2>>& velocities);

}  // namespace dscrf
