#include "dscrf/metrics.hpp"

#include <algorithm>

namespace dscrf {

double iou(const LabelField& a, const LabelField& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DataError("iou: field dimensions differ");
  }
  int inter = 0;
  int uni = 0;
  for (int i = 0; i < a.size(); ++i) {
    const bool sa = a.at(i) == kSilhouette;
    const bool sb = b.at(i) == kSilhouette;
    inter += sa && sb;
    uni += sa || sb;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

double iou(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t ia = 0, ib = 0, inter = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] == b[ib]) {
      ++inter;
      ++ia;
      ++ib;
    } else if (a[ia] < b[ib]) {
      ++ia;
    } else {
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double accuracy(const std::vector<bool>& tracked) {
  if (tracked.empty()) throw DataError("accuracy: no frames");
  const auto good = std::count(tracked.begin(), tracked.end(), true);
  return 100.0 * static_cast<double>(good) /
         static_cast<double>(tracked.size());
}

}  // namespace dscrf
