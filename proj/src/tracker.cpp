#include "dscrf/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "dscrf/flow.hpp"
#include "dscrf/graph.hpp"
#include "dscrf/inference.hpp"
#include "dscrf/metrics.hpp"

namespace dscrf {

namespace {

std::array<double, 2> centroid(const std::vector<int>& pixels, int width) {
  if (pixels.empty()) return {0.0, 0.0};
  double sx = 0.0, sy = 0.0;
  for (int i : pixels) {
    sx += i % width;
    sy += i / width;
  }
  const double n = static_cast<double>(pixels.size());
  return {sx / n, sy / n};
}

// Velocity memory. Blending damps the centroid jumps that happen when
// targets merge into one component, which matters because a coasting target
// keeps extrapolating with the last estimate it had.
constexpr double kVelocityBlend = 0.5;

}  // namespace

TrackState initialize(const Frame& frame1, const Frame& frame2,
                      const SequenceAnnotation& annotation,
                      const ModelParams& params, const RunConfig& cfg) {
  cfg.validate();
  if (frame1.width() != frame2.width() ||
      frame1.height() != frame2.height()) {
    throw DataError("initialize: the two annotated frames differ in size");
  }
  annotation.validate(frame2.width(), frame2.height());
  if (!params.finite()) throw NumericalError("initialize: non-finite weights");

  TrackState state;
  state.width = frame2.width();
  state.height = frame2.height();
  state.params = params;
  state.prev_frame = frame2;
  state.frame_index = 2;

  std::vector<std::uint8_t> scene(state.width * state.height, kBackground);
  std::vector<int> owner(state.width * state.height, -1);
  for (int j = 0; j < annotation.target_count(); ++j) {
    std::vector<int> pixels = silhouette_pixels(annotation.frame2_masks[j]);
    for (int i : pixels) {
      if (owner[i] >= 0) {
        throw DataError("initialize: frame-2 target masks overlap");
      }
      owner[i] = j;
      scene[i] = kSilhouette;
    }
    state.targets.push_back(std::move(pixels));
  }
  state.prev_labels = LabelField(state.width, state.height, std::move(scene));

  // Initial per-target velocity from the two annotated masks.
  for (int j = 0; j < annotation.target_count(); ++j) {
    const auto c1 =
        centroid(silhouette_pixels(annotation.frame1_masks[j]), state.width);
    const auto c2 = centroid(state.targets[j], state.width);
    state.velocities.push_back({c2[0] - c1[0], c2[1] - c1[1]});
  }
  return state;
}

std::vector<std::vector<int>> connected_components(const LabelField& field) {
  const int w = field.width();
  const int h = field.height();
  std::vector<int> comp(w * h, -1);
  std::vector<std::vector<int>> out;
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (field.at(start) != kSilhouette || comp[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    comp[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      out[id].push_back(i);
      const int x = i % w;
      const int y = i / w;
      const int neighbors[4] = {x > 0 ? i - 1 : -1, x + 1 < w ? i + 1 : -1,
                                y > 0 ? i - w : -1, y + 1 < h ? i + w : -1};
      for (int nb : neighbors) {
        if (nb >= 0 && field.at(nb) == kSilhouette && comp[nb] < 0) {
          comp[nb] = id;
          stack.push_back(nb);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

std::vector<int> translate_pixels(const std::vector<int>& pixels, int dx,
                                  int dy, int width, int height) {
  std::vector<int> out;
  out.reserve(pixels.size());
  for (int i : pixels) {
    const int x = i % width + dx;
    const int y = i / width + dy;
    if (x >= 0 && x < width && y >= 0 && y < height) {
      out.push_back(y * width + x);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Association associate(const LabelField& decoded,
                      const std::vector<std::vector<int>>& prev_targets,
                      const std::vector<std::array<double, 2>>& velocities) {
  if (prev_targets.size() != velocities.size()) {
    throw DataError("associate: one velocity per target required");
  }
  const int num_targets = static_cast<int>(prev_targets.size());
  const std::vector<std::vector<int>> components = connected_components(decoded);

  std::vector<std::vector<int>> predicted(num_targets);
  for (int j = 0; j < num_targets; ++j) {
    if (prev_targets[j].empty()) {
      throw DataError("associate: target " + std::to_string(j) +
                      " has an empty silhouette");
    }
    predicted[j] = translate_pixels(
        prev_targets[j], round_half_away(velocities[j][0]),
        round_half_away(velocities[j][1]), decoded.width(), decoded.height());
  }

  struct Candidate {
    double score;
    int target;
    int component;
  };
  std::vector<Candidate> candidates;
  for (int j = 0; j < num_targets; ++j) {
    for (std::size_t c = 0; c < components.size(); ++c) {
      const double score = iou(components[c], predicted[j]);
      if (score > 0.0) {
        candidates.push_back({score, j, static_cast<int>(c)});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.target != b.target) return a.target < b.target;
              return a.component < b.component;
            });

  Association result;
  result.component_count = static_cast<int>(components.size());
  result.targets.resize(num_targets);
  result.matched.assign(num_targets, false);
  std::vector<bool> component_used(components.size(), false);
  for (const Candidate& cand : candidates) {
    if (result.matched[cand.target] || component_used[cand.component]) continue;
    result.matched[cand.target] = true;
    component_used[cand.component] = true;
    result.targets[cand.target] = components[cand.component];
  }
  for (int j = 0; j < num_targets; ++j) {
    if (!result.matched[j]) {
      // Occlusion coast: carry the motion-predicted silhouette forward,
      // falling back to the stale pixels if the prediction left the canvas.
      result.targets[j] =
          predicted[j].empty() ? prev_targets[j] : std::move(predicted[j]);
    }
  }
  return result;
}

StepResult step(TrackState& state, const Frame& frame, const RunConfig& cfg) {
  if (frame.width() != state.width || frame.height() != state.height) {
    throw DataError("step: frame dimensions do not match the track state");
  }

  const FlowField back_flow = dense_flow(frame, state.prev_frame, cfg.flow);
  const CliqueSet cliques = build_cliques(back_flow);
  const FeatureBundle features = compute_features(
      frame, state.prev_labels, back_flow, cliques, cfg.features);
  const PotentialTable pot =
      assemble_potentials(cliques, features, state.params, state.prev_labels);

  StepResult result;
  if (state.width * state.height <= cfg.exact_cutoff) {
    const InferenceResult inf = exact_inference(pot, cliques);
    result.decoded = decode(inf.marginals);
  } else {
    const InferenceResult inf = bp_inference(pot, cliques, cfg.bp);
    result.bp_converged = inf.converged;
    result.bp_iterations = inf.iterations;
    result.decoded = decode(inf.marginals);
  }

  Association assoc =
      associate(result.decoded, state.targets, state.velocities);
  result.component_count = assoc.component_count;
  result.target_matched = assoc.matched;
  for (std::size_t j = 0; j < assoc.targets.size(); ++j) {
    if (assoc.matched[j]) {
      const auto before = centroid(state.targets[j], state.width);
      const auto after = centroid(assoc.targets[j], state.width);
      state.velocities[j][0] = kVelocityBlend * state.velocities[j][0] +
                               (1.0 - kVelocityBlend) * (after[0] - before[0]);
      state.velocities[j][1] = kVelocityBlend * state.velocities[j][1] +
                               (1.0 - kVelocityBlend) * (after[1] - before[1]);
    }
  }
  state.targets = std::move(assoc.targets);
  state.prev_labels = result.decoded;
  state.prev_frame = frame;
  state.frame_index += 1;
  return result;
}

}  // namespace dscrf
