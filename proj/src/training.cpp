#include "dscrf/training.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dscrf/graph.hpp"

namespace dscrf {

void TrainingInstance::validate() const {
  const int w = frame0.width();
  const int h = frame0.height();
  for (const Frame* f : {&frame1, &frame2}) {
    if (f->width() != w || f->height() != h) {
      throw DataError("training instance frames differ in size");
    }
  }
  for (const LabelField* m : {&truth1, &truth2}) {
    if (m->width() != w || m->height() != h) {
      throw DataError("training instance masks differ in size");
    }
  }
}

PreparedInstance prepare_instance(const TrainingInstance& instance,
                                  const RunConfig& cfg) {
  instance.validate();
  // Temporal correspondence flow, sampled at the nodes of the newest frame.
  const FlowField flow = dense_flow(instance.frame2, instance.frame1, cfg.flow);

  PreparedInstance prep;
  prep.cliques = build_cliques(flow);
  prep.features = compute_features(instance.frame2, instance.truth1, flow,
                                   prep.cliques, cfg.features);
  prep.prev_labels = instance.truth1;
  prep.truth = instance.truth2;

  auto unary_total = [&](const std::vector<double>& f) {
    double total = 0.0;
    for (int i = 0; i < prep.truth.size(); ++i) {
      total += prep.truth.at(i) == kSilhouette ? f[i] : -f[i];
    }
    return total;
  };
  prep.observed[static_cast<int>(FeatureFamily::kFlow)] =
      unary_total(prep.features.flow_mag);
  prep.observed[static_cast<int>(FeatureFamily::kAppearance)] =
      unary_total(prep.features.appearance);
  prep.observed[static_cast<int>(FeatureFamily::kCoherency)] =
      unary_total(prep.features.coherency);
  prep.observed[static_cast<int>(FeatureFamily::kTemporal)] =
      unary_total(prep.features.temporal);
  double edge_total = 0.0;
  for (std::size_t c = 0; c < prep.cliques.intra.size(); ++c) {
    const IntraClique& cl = prep.cliques.intra[c];
    if (prep.truth.at(cl.a) != prep.truth.at(cl.b)) {
      edge_total -= prep.features.edge_weight[c];
    }
  }
  prep.observed[static_cast<int>(FeatureFamily::kEdge)] = edge_total;
  return prep;
}

namespace {

InferenceResult infer(const PreparedInstance& prep, const ModelParams& params,
                      const RunConfig& cfg) {
  const PotentialTable pot = assemble_potentials(prep.cliques, prep.features,
                                                 params, prep.prev_labels);
  const int n = prep.cliques.width * prep.cliques.height;
  if (n <= cfg.exact_cutoff) return exact_inference(pot, prep.cliques);
  return bp_inference(pot, prep.cliques, cfg.bp);
}

double dot_observed(const PreparedInstance& prep, const ModelParams& params) {
  double e = 0.0;
  for (int k = 0; k < kFamilyCount; ++k) {
    e += params.weights[k] * prep.observed[k];
  }
  return e;
}

double l2_penalty(const ModelParams& params, double l2) {
  double s = 0.0;
  for (double w : params.weights) s += w * w;
  return 0.5 * l2 * s;
}

}  // namespace

Likelihood log_likelihood(const PreparedInstance& prep,
                          const ModelParams& params, const RunConfig& cfg) {
  const InferenceResult res = infer(prep, params, cfg);
  return {dot_observed(prep, params) - res.log_partition, res.exact};
}

std::array<double, kFamilyCount> gradient(const PreparedInstance& prep,
                                          const ModelParams& params,
                                          const RunConfig& cfg) {
  const InferenceResult res = infer(prep, params, cfg);

  std::array<double, kFamilyCount> expected{};
  auto unary_expectation = [&](const std::vector<double>& f) {
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      total += f[i] * (2.0 * res.marginals.p0[i] - 1.0);
    }
    return total;
  };
  expected[static_cast<int>(FeatureFamily::kFlow)] =
      unary_expectation(prep.features.flow_mag);
  expected[static_cast<int>(FeatureFamily::kAppearance)] =
      unary_expectation(prep.features.appearance);
  expected[static_cast<int>(FeatureFamily::kCoherency)] =
      unary_expectation(prep.features.coherency);
  expected[static_cast<int>(FeatureFamily::kTemporal)] =
      unary_expectation(prep.features.temporal);
  double edge_exp = 0.0;
  for (std::size_t c = 0; c < prep.cliques.intra.size(); ++c) {
    const auto& b = res.edge_marginals[c];
    edge_exp -= prep.features.edge_weight[c] * (b[1] + b[2]);
  }
  expected[static_cast<int>(FeatureFamily::kEdge)] = edge_exp;

  std::array<double, kFamilyCount> grad{};
  for (int k = 0; k < kFamilyCount; ++k) {
    grad[k] = prep.observed[k] - expected[k] -
              cfg.training.l2 * params.weights[k];
  }
  return grad;
}

Likelihood log_likelihood(const TrainingInstance& instance,
                          const ModelParams& params, const RunConfig& cfg) {
  return log_likelihood(prepare_instance(instance, cfg), params, cfg);
}

std::array<double, kFamilyCount> gradient(const TrainingInstance& instance,
                                          const ModelParams& params,
                                          const RunConfig& cfg) {
  return gradient(prepare_instance(instance, cfg), params, cfg);
}

FitResult fit(const std::vector<TrainingInstance>& instances,
              const RunConfig& cfg) {
  cfg.validate();
  if (instances.empty()) throw DataError("fit: no training instances");

  std::vector<PreparedInstance> prepared;
  prepared.reserve(instances.size());
  for (const TrainingInstance& inst : instances) {
    prepared.push_back(prepare_instance(inst, cfg));
  }

  FitResult result;
  result.params = ModelParams{};

  auto objective = [&](const ModelParams& p, bool* all_exact) {
    double total = -l2_penalty(p, cfg.training.l2);
    bool exact = true;
    for (const PreparedInstance& prep : prepared) {
      const Likelihood ll = log_likelihood(prep, p, cfg);
      total += ll.value;
      exact = exact && ll.exact;
    }
    if (all_exact) *all_exact = exact;
    return total;
  };

  double obj = objective(result.params, &result.exact);
  if (!std::isfinite(obj)) {
    throw NumericalError("fit: log-likelihood is non-finite at the start");
  }
  result.objective_trace.push_back(obj);

  double step_hint = cfg.training.step;
  for (int epoch = 0; epoch < cfg.training.epochs; ++epoch) {
    result.epochs = epoch + 1;
    std::array<double, kFamilyCount> grad{};
    for (const PreparedInstance& prep : prepared) {
      const auto g = gradient(prep, result.params, cfg);
      for (int k = 0; k < kFamilyCount; ++k) grad[k] += g[k];
    }
    // prepared-instance gradients omit the (shared) penalty gradient once:
    // each instance subtracted it, so add back all but one contribution.
    for (int k = 0; k < kFamilyCount; ++k) {
      grad[k] += cfg.training.l2 * result.params.weights[k] *
                 (static_cast<double>(prepared.size()) - 1.0);
    }

    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (norm < cfg.training.tolerance) {
      result.converged = true;
      break;
    }

    double step = std::min(cfg.training.step, step_hint * 2.0);
    bool accepted = false;
    for (int halving = 0; halving < 48; ++halving) {
      ModelParams trial = result.params;
      for (int k = 0; k < kFamilyCount; ++k) {
        trial.weights[k] += step * grad[k];
      }
      const double trial_obj = objective(trial, nullptr);
      if (!std::isfinite(trial_obj)) {
        throw NumericalError("fit: log-likelihood became non-finite");
      }
      if (trial_obj >= obj) {
        result.params = trial;
        obj = trial_obj;
        step_hint = step;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent direction at fp precision
    result.objective_trace.push_back(obj);
  }
  return result;
}

void save_params(const std::string& path, const ModelParams& params) {
  if (!params.finite()) throw NumericalError("save_params: non-finite weight");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open params file for writing: " + path);
  out << "dscrf-params v1\n";
  out.precision(17);
  for (int k = 0; k < kFamilyCount; ++k) {
    out << kFamilyNames[k] << ' ' << params.weights[k] << '\n';
  }
  if (!out) throw DataError("failed writing params file: " + path);
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open params file: " + path);
  std::string header;
  std::getline(in, header);
  if (header != "dscrf-params v1") {
    throw DataError("unrecognized params file header: '" + header + "'");
  }
  std::map<std::string, double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name;
    double value = 0.0;
    if (!(ls >> name >> value)) {
      throw DataError("malformed params line: '" + line + "'");
    }
    if (!values.emplace(name, value).second) {
      throw DataError("duplicate family in params file: " + name);
    }
  }
  ModelParams params;
  for (int k = 0; k < kFamilyCount; ++k) {
    auto it = values.find(kFamilyNames[k]);
    if (it == values.end()) {
      throw DataError(std::string("params file is missing family '") +
                      kFamilyNames[k] + "'");
    }
    params.weights[k] = it->second;
    values.erase(it);
  }
  if (!values.empty()) {
    throw DataError("params file names an unknown family: " +
                    values.begin()->first);
  }
  if (!params.finite()) throw NumericalError("params file has non-finite weight");
  return params;
}

}  // namespace dscrf
