#include "dscrf/graph.hpp"

#include <algorithm>

namespace dscrf {

std::vector<IntraClique> build_intra(int width, int height) {
  if (width < 1 || height < 1) {
    throw DataError("build_intra: dimensions must be at least 1x1");
  }
  std::vector<IntraClique> out;
  out.reserve(width * (height - 1) + height * (width - 1));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int i = y * width + x;
      if (x + 1 < width) out.push_back({i, i + 1});
      if (y + 1 < height) out.push_back({i, i + width});
    }
  }
  return out;
}

int temporal_neighbor(const FlowField& flow, int x, int y) {
  const int i = flow.index(x, y);
  const int kx = std::clamp(x + round_half_away(flow.vx(i)), 0,
                            flow.width() - 1);
  const int ky = std::clamp(y + round_half_away(flow.vy(i)), 0,
                            flow.height() - 1);
  return ky * flow.width() + kx;
}

std::vector<InterClique> build_inter(const FlowField& flow) {
  std::vector<InterClique> out;
  out.reserve(flow.size());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      out.push_back({flow.index(x, y), temporal_neighbor(flow, x, y)});
    }
  }
  return out;
}

CliqueSet build_cliques(const FlowField& flow) {
  CliqueSet set;
  set.width = flow.width();
  set.height = flow.height();
  set.intra = build_intra(flow.width(), flow.height());
  set.inter = build_inter(flow);
  return set;
}

}  // namespace dscrf
