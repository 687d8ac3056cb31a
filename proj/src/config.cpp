#include "dscrf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dscrf {

void TrainSettings::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw DataError("training step must be positive");
  }
  if (epochs < 1) throw DataError("training epochs must be >= 1");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw DataError("training l2 must be non-negative");
  }
  if (!(tolerance > 0.0)) throw DataError("training tolerance must be positive");
}

void RunConfig::validate() const {
  flow.validate();
  bp.validate();
  features.validate();
  training.validate();
  if (exact_cutoff < 1 || exact_cutoff > kExactNodeCap) {
    throw DataError("exact_cutoff must lie in [1," +
                    std::to_string(kExactNodeCap) + "]");
  }
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw DataError("unknown config key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

RunConfig config_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw DataError("config root must be a JSON object");

  RunConfig cfg;
  reject_unknown(root, {"flow", "bp", "features", "training", "exact_cutoff",
                        "seed"},
                 "config root");
  try {
    if (root.contains("flow")) {
      const json& f = root["flow"];
      reject_unknown(f, {"alpha", "iterations"}, "flow");
      read(f, "alpha", cfg.flow.alpha);
      read(f, "iterations", cfg.flow.iterations);
    }
    if (root.contains("bp")) {
      const json& b = root["bp"];
      reject_unknown(b, {"damping", "tolerance", "max_iterations"}, "bp");
      read(b, "damping", cfg.bp.damping);
      read(b, "tolerance", cfg.bp.tolerance);
      read(b, "max_iterations", cfg.bp.max_iterations);
    }
    if (root.contains("features")) {
      const json& f = root["features"];
      reject_unknown(f, {"edge_beta", "srm_q"}, "features");
      read(f, "edge_beta", cfg.features.edge_beta);
      read(f, "srm_q", cfg.features.srm_q);
    }
    if (root.contains("training")) {
      const json& t = root["training"];
      reject_unknown(t, {"step", "epochs", "l2", "tolerance"}, "training");
      read(t, "step", cfg.training.step);
      read(t, "epochs", cfg.training.epochs);
      read(t, "l2", cfg.training.l2);
      read(t, "tolerance", cfg.training.tolerance);
    }
    read(root, "exact_cutoff", cfg.exact_cutoff);
    read(root, "seed", cfg.seed);
  } catch (const json::exception& e) {
    throw DataError(std::string("config value has the wrong type: ") +
                    e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const RunConfig& cfg) {
  json root;
  root["flow"] = {{"alpha", cfg.flow.alpha},
                  {"iterations", cfg.flow.iterations}};
  root["bp"] = {{"damping", cfg.bp.damping},
                {"tolerance", cfg.bp.tolerance},
                {"max_iterations", cfg.bp.max_iterations}};
  root["features"] = {{"edge_beta", cfg.features.edge_beta},
                      {"srm_q", cfg.features.srm_q}};
  root["training"] = {{"step", cfg.training.step},
                      {"epochs", cfg.training.epochs},
                      {"l2", cfg.training.l2},
                      {"tolerance", cfg.training.tolerance}};
  root["exact_cutoff"] = cfg.exact_cutoff;
  root["seed"] = cfg.seed;
  return root.dump(2);
}

}  // namespace dscrf
