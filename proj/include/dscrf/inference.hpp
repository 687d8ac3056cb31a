#pragma once

#include <array>

#include "dscrf/features.hpp"
#include "dscrf/field.hpp"

namespace dscrf {

/// Log-potentials of one time step. Unaries absorb every unary family plus
/// the temporal term evaluated against the decoded previous labels; pairwise
/// tables carry only the weighted edge feature.
struct PotentialTable {
  int width = 0;
  int height = 0;
  std::vector<std::array<double, 2>> unary;     // per node, [label]
  std::vector<std::array<double, 4>> pairwise;  // per intra clique, [yi*2+yj]
};

/// Per-node probability of label 0.
struct MarginalField {
  int width = 0;
  int height = 0;
  std::vector<double> p0;

  int size() const { return width * height; }
};

struct BpSettings {
  double damping = 0.5;     // in [0,1)
  double tolerance = 1e-5;  // max message change
  int max_iterations = 200;

  void validate() const;
};

/// Node marginals plus the quantities training needs: pairwise beliefs per
/// intra clique and an estimate of the log partition function (exact when
/// `exact`, Bethe otherwise).
struct InferenceResult {
  MarginalField marginals;
  std::vector<std::array<double, 4>> edge_marginals;
  double log_partition = 0.0;
  bool exact = false;
  bool converged = true;
  int iterations = 0;
};

PotentialTable assemble_potentials(const CliqueSet& cliques,
                                   const FeatureBundle& features,
                                   const ModelParams& params,
                                   const LabelField& prev_labels);

InferenceResult bp_inference(const PotentialTable& pot,
                             const CliqueSet& cliques,
                             const BpSettings& settings);

MarginalField bp_marginals(const PotentialTable& pot, const CliqueSet& cliques,
                           const BpSettings& settings);

/// Exhaustive enumeration over all 2^n labelings; n must be <= 20.
InferenceResult exact_inference(const PotentialTable& pot,
                                const CliqueSet& cliques);

MarginalField exact_marginals(const PotentialTable& pot,
                              const CliqueSet& cliques);

constexpr int kExactNodeCap = 20;

/// Max-posterior-marginal decoding; P(0) = 0.5 ties break to background.
LabelField decode(const MarginalField& marginals);

/// Weighted feature sum of one labeling (the exponent of the model).
double labeling_energy(const PotentialTable& pot, const CliqueSet& cliques,
                       const LabelField& labels);

}  // namespace dscrf
