#pragma once

#include "dscrf/field.hpp"

namespace dscrf {

/// Intersection-over-union of the silhouette pixels; 1 when both are empty.
double iou(const LabelField& a, const LabelField& b);

/// Same, over sorted pixel-index sets.
double iou(const std::vector<int>& a, const std::vector<int>& b);

/// Percentage of tracked frames: 100 * (count true) / N.
double accuracy(const std::vector<bool>& tracked);

}  // namespace dscrf
