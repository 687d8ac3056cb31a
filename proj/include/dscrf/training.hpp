#pragma once

#include "dscrf/config.hpp"
#include "dscrf/field.hpp"

namespace dscrf {

/// Three consecutive frames with ground-truth labelings for the middle and
/// last one. The middle labeling plays the decoded-previous-layer role.
struct TrainingInstance {
  Frame frame0;
  Frame frame1;
  Frame frame2;
  LabelField truth1;
  LabelField truth2;

  void validate() const;
};

/// Flow, cliques and feature values of one instance; none of it depends on
/// the weights, so fit computes it once.
struct PreparedInstance {
  CliqueSet cliques;
  FeatureBundle features;
  LabelField prev_labels;
  LabelField truth;
  std::array<double, kFamilyCount> observed{};
};

PreparedInstance prepare_instance(const TrainingInstance& instance,
                                  const RunConfig& cfg);

struct Likelihood {
  double value = 0.0;
  bool exact = false;  // enumeration (true) or Bethe estimate (false)
};

Likelihood log_likelihood(const TrainingInstance& instance,
                          const ModelParams& params, const RunConfig& cfg);

/// Empirical-minus-expected feature totals per family; the l2 term of the
/// fit objective is included when cfg.training.l2 > 0.
std::array<double, kFamilyCount> gradient(const TrainingInstance& instance,
                                          const ModelParams& params,
                                          const RunConfig& cfg);

Likelihood log_likelihood(const PreparedInstance& prep,
                          const ModelParams& params, const RunConfig& cfg);
std::array<double, kFamilyCount> gradient(const PreparedInstance& prep,
                                          const ModelParams& params,
                                          const RunConfig& cfg);

struct FitResult {
  ModelParams params;
  std::vector<double> objective_trace;  // accepted objective per epoch
  bool converged = false;               // gradient norm fell under tolerance
  int epochs = 0;
  bool exact = false;  // true when every instance used enumeration
};

/// Gradient ascent on the summed log-likelihood minus the l2 penalty, with
/// step halving whenever a trial step lowers the objective.
FitResult fit(const std::vector<TrainingInstance>& instances,
              const RunConfig& cfg);

void save_params(const std::string& path, const ModelParams& params);
ModelParams load_params(const std::string& path);

}  // namespace dscrf
