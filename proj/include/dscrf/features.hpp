#pragma once

#include "dscrf/field.hpp"
#include "dscrf/flow.hpp"

namespace dscrf {

/// Per-pixel region ids on the current frame, contiguous from 0.
struct Segmentation {
  int width = 0;
  int height = 0;
  int region_count = 0;
  std::vector<int> region;  // per pixel
};

/// Statistical region merging on RGB: 4-neighbor pairs sorted by max channel
/// difference, regions merged under the SRM predicate at granularity q.
/// Larger q keeps more regions apart.
Segmentation segment(const Frame& frame, double q);

// Unary families are returned as the candidate-label-0 value per node; the
// label-1 value is its negation.

/// Agreement of candidate label 0 with the previous labels read through the
/// motion-guided temporal correspondence: +1 where the shifted prior is
/// silhouette, -1 elsewhere.
std::vector<double> appearance_unary(const LabelField& prev_labels,
                                     const FlowField& flow);

/// tanh(|v|): motion as silhouette evidence.
std::vector<double> flow_magnitude_unary(const FlowField& flow);

/// Region-coherent vote 2p-1 where p is the fraction of the region covered
/// by the shifted prior silhouette.
std::vector<double> coherency_unary(const Segmentation& seg,
                                    const LabelField& prev_labels,
                                    const FlowField& flow);

/// Contrast-sensitive pairwise penalty: 0 when labels agree, else
/// -exp(-beta * |gray_i - gray_j|).
double edge_pairwise(const Frame& frame, int i, int j, std::uint8_t yi,
                     std::uint8_t yj, double beta);

/// +1 when the layer-t label matches the decoded previous label across the
/// inter-layer clique, -1 otherwise.
double temporal_pairwise(std::uint8_t y_curr, std::uint8_t y_prev);

struct FeatureSettings {
  double edge_beta = 5.0;  // contrast sensitivity, > 0
  double srm_q = 32.0;     // segmentation granularity, > 0

  void validate() const;
};

/// All per-node and per-clique feature values one inference step needs.
/// Unary vectors hold the label-0 value; edge_weight holds
/// exp(-beta*|dgray|) per intra clique.
struct FeatureBundle {
  std::vector<double> flow_mag;
  std::vector<double> appearance;
  std::vector<double> coherency;
  std::vector<double> temporal;
  std::vector<double> edge_weight;
};

FeatureBundle compute_features(const Frame& frame,
                               const LabelField& prev_labels,
                               const FlowField& flow, const CliqueSet& cliques,
                               const FeatureSettings& settings);

}  // namespace dscrf
