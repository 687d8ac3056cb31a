#include "dscrf/inference.hpp"

#include <algorithm>
#include <cmath>

namespace dscrf {

void BpSettings::validate() const {
  if (!(damping >= 0.0 && damping < 1.0)) {
    throw DataError("BP damping must lie in [0,1)");
  }
  if (!(tolerance > 0.0)) throw DataError("BP tolerance must be positive");
  if (max_iterations < 1) throw DataError("BP iteration cap must be >= 1");
}

namespace {

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

void check_sizes(const PotentialTable& pot, const CliqueSet& cliques) {
  const int n = pot.width * pot.height;
  if (pot.width != cliques.width || pot.height != cliques.height ||
      static_cast<int>(pot.unary.size()) != n ||
      pot.pairwise.size() != cliques.intra.size()) {
    throw DataError("potential table does not match the clique set");
  }
  for (const auto& u : pot.unary) {
    if (!std::isfinite(u[0]) || !std::isfinite(u[1])) {
      throw NumericalError("non-finite unary potential");
    }
  }
  for (const auto& p : pot.pairwise) {
    for (double v : p) {
      if (!std::isfinite(v)) throw NumericalError("non-finite pairwise potential");
    }
  }
}

}  // namespace

PotentialTable assemble_potentials(const CliqueSet& cliques,
                                   const FeatureBundle& features,
                                   const ModelParams& params,
                                   const LabelField& prev_labels) {
  const int n = cliques.width * cliques.height;
  if (prev_labels.size() != n) {
    throw DataError("assemble_potentials: previous labels size mismatch");
  }
  if (!params.finite()) {
    throw NumericalError("assemble_potentials: non-finite weights");
  }
  auto require = [&](const std::vector<double>& v, std::size_t want,
                     const char* name) {
    if (v.size() != want) {
      throw DataError(std::string("assemble_potentials: missing or missized ") +
                      name + " feature family");
    }
  };
  require(features.flow_mag, n, "flow");
  require(features.appearance, n, "appearance");
  require(features.coherency, n, "coherency");
  require(features.temporal, n, "temporal");
  require(features.edge_weight, cliques.intra.size(), "edge");

  PotentialTable pot;
  pot.width = cliques.width;
  pot.height = cliques.height;
  pot.unary.resize(n);
  const double wf = params[FeatureFamily::kFlow];
  const double wa = params[FeatureFamily::kAppearance];
  const double wc = params[FeatureFamily::kCoherency];
  const double wt = params[FeatureFamily::kTemporal];
  for (int i = 0; i < n; ++i) {
    // Label-0 feature value; label 1 is the negation for every unary family.
    const double f0 = wf * features.flow_mag[i] + wa * features.appearance[i] +
                      wc * features.coherency[i] + wt * features.temporal[i];
    pot.unary[i] = {f0, -f0};
  }

  const double we = params[FeatureFamily::kEdge];
  pot.pairwise.resize(cliques.intra.size());
  for (std::size_t c = 0; c < cliques.intra.size(); ++c) {
    const double off = we * -features.edge_weight[c];
    pot.pairwise[c] = {0.0, off, off, 0.0};
  }
  return pot;
}

InferenceResult bp_inference(const PotentialTable& pot,
                             const CliqueSet& cliques,
                             const BpSettings& settings) {
  settings.validate();
  check_sizes(pot, cliques);
  const int n = pot.width * pot.height;
  const int m = static_cast<int>(cliques.intra.size());

  // Directed message 2c goes a->b of clique c, 2c+1 goes b->a.
  std::vector<std::array<double, 2>> msg(2 * m, {0.0, 0.0});
  std::vector<std::array<double, 2>> msg_new(2 * m);
  std::vector<std::vector<int>> incoming(n);  // directed message ids into node
  for (int c = 0; c < m; ++c) {
    incoming[cliques.intra[c].b].push_back(2 * c);
    incoming[cliques.intra[c].a].push_back(2 * c + 1);
  }

  auto pre_message = [&](int node, int skip_dir, std::array<double, 2>& out) {
    out = pot.unary[node];
    for (int d : incoming[node]) {
      if (d == skip_dir) continue;
      out[0] += msg[d][0];
      out[1] += msg[d][1];
    }
  };

  const double gamma = settings.damping;
  bool converged = false;
  int iter = 0;
  std::array<double, 2> pre;
  while (iter < settings.max_iterations) {
    ++iter;
    double max_change = 0.0;
    for (int c = 0; c < m; ++c) {
      const int a = cliques.intra[c].a;
      const int b = cliques.intra[c].b;
      const auto& pw = pot.pairwise[c];
      // a -> b; the incoming message from b has direction id 2c+1.
      pre_message(a, 2 * c + 1, pre);
      double m0 = log_add(pre[0] + pw[0], pre[1] + pw[2]);
      double m1 = log_add(pre[0] + pw[1], pre[1] + pw[3]);
      double norm = 0.5 * (m0 + m1);
      msg_new[2 * c] = {m0 - norm, m1 - norm};
      // b -> a; the incoming message from a has direction id 2c.
      pre_message(b, 2 * c, pre);
      m0 = log_add(pre[0] + pw[0], pre[1] + pw[1]);
      m1 = log_add(pre[0] + pw[2], pre[1] + pw[3]);
      norm = 0.5 * (m0 + m1);
      msg_new[2 * c + 1] = {m0 - norm, m1 - norm};
    }
    for (int d = 0; d < 2 * m; ++d) {
      for (int y = 0; y < 2; ++y) {
        const double damped =
            (1.0 - gamma) * msg_new[d][y] + gamma * msg[d][y];
        max_change = std::max(max_change, std::abs(damped - msg[d][y]));
        msg_new[d][y] = damped;
      }
    }
    msg.swap(msg_new);
    if (max_change < settings.tolerance) {
      converged = true;
      break;
    }
  }

  InferenceResult res;
  res.exact = false;
  res.converged = converged;
  res.iterations = iter;
  res.marginals.width = pot.width;
  res.marginals.height = pot.height;
  res.marginals.p0.resize(n);

  std::vector<std::array<double, 2>> belief(n);
  for (int i = 0; i < n; ++i) {
    std::array<double, 2> b = pot.unary[i];
    for (int d : incoming[i]) {
      b[0] += msg[d][0];
      b[1] += msg[d][1];
    }
    const double z = log_add(b[0], b[1]);
    belief[i] = {b[0] - z, b[1] - z};
    res.marginals.p0[i] = std::exp(belief[i][0]);
  }

  res.edge_marginals.resize(m);
  for (int c = 0; c < m; ++c) {
    const int a = cliques.intra[c].a;
    const int b = cliques.intra[c].b;
    const auto& pw = pot.pairwise[c];
    std::array<double, 2> pa, pb;
    pre_message(a, 2 * c + 1, pa);
    pre_message(b, 2 * c, pb);
    std::array<double, 4> lg;
    for (int ya = 0; ya < 2; ++ya) {
      for (int yb = 0; yb < 2; ++yb) {
        lg[ya * 2 + yb] = pa[ya] + pb[yb] + pw[ya * 2 + yb];
      }
    }
    const double z = log_add(log_add(lg[0], lg[1]), log_add(lg[2], lg[3]));
    for (int k = 0; k < 4; ++k) {
      res.edge_marginals[c][k] = std::exp(lg[k] - z);
    }
  }

  // Bethe estimate of log Z; exact on trees.
  const double tiny = 1e-300;
  double avg_energy = 0.0;
  double entropy = 0.0;
  std::vector<int> degree(n, 0);
  for (const IntraClique& c : cliques.intra) {
    degree[c.a] += 1;
    degree[c.b] += 1;
  }
  for (int i = 0; i < n; ++i) {
    const double p0 = res.marginals.p0[i];
    const double p1 = 1.0 - p0;
    avg_energy += p0 * pot.unary[i][0] + p1 * pot.unary[i][1];
    const double h =
        -(p0 * std::log(p0 + tiny) + p1 * std::log(p1 + tiny));
    entropy -= (degree[i] - 1) * h;
  }
  for (int c = 0; c < m; ++c) {
    for (int k = 0; k < 4; ++k) {
      const double p = res.edge_marginals[c][k];
      avg_energy += p * pot.pairwise[c][k];
      entropy += -p * std::log(p + tiny);
    }
  }
  res.log_partition = avg_energy + entropy;
  return res;
}

MarginalField bp_marginals(const PotentialTable& pot, const CliqueSet& cliques,
                           const BpSettings& settings) {
  return bp_inference(pot, cliques, settings).marginals;
}

InferenceResult exact_inference(const PotentialTable& pot,
                                const CliqueSet& cliques) {
  check_sizes(pot, cliques);
  const int n = pot.width * pot.height;
  if (n > kExactNodeCap) {
    throw DataError("exact_inference: node count exceeds the enumeration cap");
  }
  const int m = static_cast<int>(cliques.intra.size());
  const std::uint32_t total = 1u << n;

  // Max energy first so the linear-domain accumulation stays stable.
  auto energy_of = [&](std::uint32_t bits) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += pot.unary[i][(bits >> i) & 1u];
    for (int c = 0; c < m; ++c) {
      const int ya = (bits >> cliques.intra[c].a) & 1u;
      const int yb = (bits >> cliques.intra[c].b) & 1u;
      e += pot.pairwise[c][ya * 2 + yb];
    }
    return e;
  };
  double max_e = -1e300;
  for (std::uint32_t bits = 0; bits < total; ++bits) {
    max_e = std::max(max_e, energy_of(bits));
  }

  long double z = 0.0L;
  std::vector<long double> node0(n, 0.0L);
  std::vector<std::array<long double, 4>> edge(m, {0.0L, 0.0L, 0.0L, 0.0L});
  for (std::uint32_t bits = 0; bits < total; ++bits) {
    const long double w = std::exp(static_cast<long double>(energy_of(bits) - max_e));
    z += w;
    for (int i = 0; i < n; ++i) {
      if (((bits >> i) & 1u) == 0u) node0[i] += w;
    }
    for (int c = 0; c < m; ++c) {
      const int ya = (bits >> cliques.intra[c].a) & 1u;
      const int yb = (bits >> cliques.intra[c].b) & 1u;
      edge[c][ya * 2 + yb] += w;
    }
  }

  InferenceResult res;
  res.exact = true;
  res.converged = true;
  res.iterations = 0;
  res.log_partition = max_e + static_cast<double>(std::log(z));
  res.marginals.width = pot.width;
  res.marginals.height = pot.height;
  res.marginals.p0.resize(n);
  for (int i = 0; i < n; ++i) {
    res.marginals.p0[i] = static_cast<double>(node0[i] / z);
  }
  res.edge_marginals.resize(m);
  for (int c = 0; c < m; ++c) {
    for (int k = 0; k < 4; ++k) {
      res.edge_marginals[c][k] = static_cast<double>(edge[c][k] / z);
    }
  }
  return res;
}

MarginalField exact_marginals(const PotentialTable& pot,
                              const CliqueSet& cliques) {
  return exact_inference(pot, cliques).marginals;
}

LabelField decode(const MarginalField& marginals) {
  std::vector<std::uint8_t> labels(marginals.size());
  for (int i = 0; i < marginals.size(); ++i) {
    labels[i] = marginals.p0[i] > 0.5 ? kSilhouette : kBackground;
  }
  return LabelField(marginals.width, marginals.height, std::move(labels));
}

double labeling_energy(const PotentialTable& pot, const CliqueSet& cliques,
                       const LabelField& labels) {
  if (labels.width() != pot.width || labels.height() != pot.height) {
    throw DataError("labeling_energy: dimensions differ");
  }
  double e = 0.0;
  for (int i = 0; i < labels.size(); ++i) e += pot.unary[i][labels.at(i)];
  for (std::size_t c = 0; c < cliques.intra.size(); ++c) {
    const int ya = labels.at(cliques.intra[c].a);
    const int yb = labels.at(cliques.intra[c].b);
    e += pot.pairwise[c][ya * 2 + yb];
  }
  return e;
}

}  // namespace dscrf
