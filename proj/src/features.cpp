#include "dscrf/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dscrf/graph.hpp"

namespace dscrf {

void FeatureSettings::validate() const {
  if (!(edge_beta > 0.0) || !std::isfinite(edge_beta)) {
    throw DataError("edge beta must be positive and finite");
  }
  if (!(srm_q > 0.0) || !std::isfinite(srm_q)) {
    throw DataError("segmentation granularity must be positive and finite");
  }
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
};

// SRM merge bound for one region, on the 0..255 scale with g = 256 levels.
double srm_bound(double region_size, double q, double log_delta) {
  const double g = 256.0;
  const double num =
      std::min(g, region_size) * std::log(1.0 + region_size) + log_delta;
  return g * std::sqrt(num / (2.0 * q * region_size));
}

}  // namespace

Segmentation segment(const Frame& frame, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw DataError("segment: granularity must be positive");
  }
  const int w = frame.width();
  const int h = frame.height();
  const int n = w * h;

  struct Pair {
    float diff;
    int a, b;
  };
  std::vector<Pair> pairs;
  pairs.reserve(2 * n);
  auto channel_diff = [&](int a, int b) {
    const double dr = std::abs(frame.r(a) - frame.r(b));
    const double dg = std::abs(frame.g(a) - frame.g(b));
    const double db = std::abs(frame.b(a) - frame.b(b));
    return static_cast<float>(255.0 * std::max({dr, dg, db}));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      if (x + 1 < w) pairs.push_back({channel_diff(i, i + 1), i, i + 1});
      if (y + 1 < h) pairs.push_back({channel_diff(i, i + w), i, i + w});
    }
  }
  // Ties broken by pixel index so iteration order never matters.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& r) {
    if (p.diff != r.diff) return p.diff < r.diff;
    if (p.a != r.a) return p.a < r.a;
    return p.b < r.b;
  });

  UnionFind uf(n);
  std::vector<int> size(n, 1);
  std::vector<double> sum_r(n), sum_g(n), sum_b(n);
  for (int i = 0; i < n; ++i) {
    sum_r[i] = 255.0 * frame.r(i);
    sum_g[i] = 255.0 * frame.g(i);
    sum_b[i] = 255.0 * frame.b(i);
  }

  const double log_delta = 2.0 * std::log(6.0 * n);
  for (const Pair& p : pairs) {
    const int ra = uf.find(p.a);
    const int rb = uf.find(p.b);
    if (ra == rb) continue;
    const double ba = srm_bound(size[ra], q, log_delta);
    const double bb = srm_bound(size[rb], q, log_delta);
    const double bound = std::sqrt(ba * ba + bb * bb);
    const double inv_a = 1.0 / size[ra];
    const double inv_b = 1.0 / size[rb];
    const bool merge =
        std::abs(sum_r[ra] * inv_a - sum_r[rb] * inv_b) <= bound &&
        std::abs(sum_g[ra] * inv_a - sum_g[rb] * inv_b) <= bound &&
        std::abs(sum_b[ra] * inv_a - sum_b[rb] * inv_b) <= bound;
    if (!merge) continue;
    // Merge smaller root into larger; ties toward the smaller index.
    int keep = ra, drop = rb;
    if (size[drop] > size[keep] ||
        (size[drop] == size[keep] && drop < keep)) {
      std::swap(keep, drop);
    }
    uf.parent[drop] = keep;
    size[keep] += size[drop];
    sum_r[keep] += sum_r[drop];
    sum_g[keep] += sum_g[drop];
    sum_b[keep] += sum_b[drop];
  }

  Segmentation seg;
  seg.width = w;
  seg.height = h;
  seg.region.resize(n);
  std::vector<int> id(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    if (id[root] < 0) id[root] = next++;
    seg.region[i] = id[root];
  }
  seg.region_count = next;
  return seg;
}

std::vector<double> appearance_unary(const LabelField& prev_labels,
                                     const FlowField& flow) {
  if (prev_labels.width() != flow.width() ||
      prev_labels.height() != flow.height()) {
    throw DataError("appearance_unary: dimensions differ");
  }
  std::vector<double> out(flow.size());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const int k = temporal_neighbor(flow, x, y);
      out[flow.index(x, y)] = prev_labels.at(k) == kSilhouette ? 1.0 : -1.0;
    }
  }
  return out;
}

std::vector<double> flow_magnitude_unary(const FlowField& flow) {
  std::vector<double> out(flow.size());
  for (int i = 0; i < flow.size(); ++i) {
    out[i] = std::tanh(std::hypot(flow.vx(i), flow.vy(i)));
  }
  return out;
}

std::vector<double> coherency_unary(const Segmentation& seg,
                                    const LabelField& prev_labels,
                                    const FlowField& flow) {
  if (seg.width != flow.width() || seg.height != flow.height() ||
      prev_labels.width() != flow.width() ||
      prev_labels.height() != flow.height()) {
    throw DataError("coherency_unary: dimensions differ");
  }
  std::vector<int> covered(seg.region_count, 0);
  std::vector<int> total(seg.region_count, 0);
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const int i = flow.index(x, y);
      const int k = temporal_neighbor(flow, x, y);
      total[seg.region[i]] += 1;
      if (prev_labels.at(k) == kSilhouette) covered[seg.region[i]] += 1;
    }
  }
  std::vector<double> vote(seg.region_count);
  for (int r = 0; r < seg.region_count; ++r) {
    const double p = static_cast<double>(covered[r]) / total[r];
    vote[r] = 2.0 * p - 1.0;
  }
  std::vector<double> out(flow.size());
  for (int i = 0; i < flow.size(); ++i) out[i] = vote[seg.region[i]];
  return out;
}

double edge_pairwise(const Frame& frame, int i, int j, std::uint8_t yi,
                     std::uint8_t yj, double beta) {
  if (yi == yj) return 0.0;
  return -std::exp(-beta * std::abs(frame.gray(i) - frame.gray(j)));
}

double temporal_pairwise(std::uint8_t y_curr, std::uint8_t y_prev) {
  return y_curr == y_prev ? 1.0 : -1.0;
}

FeatureBundle compute_features(const Frame& frame,
                               const LabelField& prev_labels,
                               const FlowField& flow, const CliqueSet& cliques,
                               const FeatureSettings& settings) {
  settings.validate();
  if (frame.width() != flow.width() || frame.height() != flow.height()) {
    throw DataError("compute_features: dimensions differ");
  }
  FeatureBundle bundle;
  bundle.flow_mag = flow_magnitude_unary(flow);
  bundle.appearance = appearance_unary(prev_labels, flow);
  const Segmentation seg = segment(frame, settings.srm_q);
  bundle.coherency = coherency_unary(seg, prev_labels, flow);

  bundle.temporal.resize(flow.size());
  for (const InterClique& c : cliques.inter) {
    bundle.temporal[c.node] =
        prev_labels.at(c.prev) == kSilhouette ? 1.0 : -1.0;
  }

  bundle.edge_weight.reserve(cliques.intra.size());
  for (const IntraClique& c : cliques.intra) {
    bundle.edge_weight.push_back(std::exp(
        -settings.edge_beta * std::abs(frame.gray(c.a) - frame.gray(c.b))));
  }
  return bundle;
}

}  // namespace dscrf
