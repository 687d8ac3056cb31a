#pragma once

#include <cstdint>
#include <string>

#include "dscrf/features.hpp"
#include "dscrf/flow.hpp"
#include "dscrf/inference.hpp"

namespace dscrf {

struct TrainSettings {
  double step = 0.05;      // initial ascent step, halved on decrease
  int epochs = 200;
  double l2 = 1.0;         // weight decay; 0 disables
  double tolerance = 1e-4; // stop when the gradient norm drops below this

  void validate() const;
};

/// Every tunable the pipeline reads, with the documented defaults. A JSON
/// config file may supply any subset; unknown keys are rejected.
struct RunConfig {
  FlowSettings flow;
  BpSettings bp;
  FeatureSettings features;
  TrainSettings training;
  int exact_cutoff = kExactNodeCap;  // grids at or under this use enumeration
  std::uint64_t seed = 0;

  void validate() const;
};

RunConfig config_from_json_text(const std::string& text);
RunConfig config_from_file(const std::string& path);
std::string config_to_json_text(const RunConfig& cfg);

}  // namespace dscrf
