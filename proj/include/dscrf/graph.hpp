#pragma once

#include "dscrf/field.hpp"
#include "dscrf/flow.hpp"

namespace dscrf {

/// All 4-connected neighbor pairs of a W x H lattice, each exactly once,
/// row-major with the right edge before the down edge.
std::vector<IntraClique> build_intra(int width, int height);

/// One temporal clique per node: node i pairs with k = i + round(v(i)) in the
/// previous layer, clamped to the grid. The flow handed in must be the
/// per-node displacement toward the previous frame's content (the tracker
/// computes it current-to-previous).
std::vector<InterClique> build_inter(const FlowField& flow);

/// Index of node (x,y)'s temporal neighbor under the same rule as
/// build_inter.
int temporal_neighbor(const FlowField& flow, int x, int y);

CliqueSet build_cliques(const FlowField& flow);

}  // namespace dscrf
