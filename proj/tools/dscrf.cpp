// Command-line front end: simulate / train / track / eval.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dscrf/config.hpp"
#include "dscrf/image_io.hpp"
#include "dscrf/metrics.hpp"
#include "dscrf/simulate.hpp"
#include "dscrf/tracker.hpp"
#include "dscrf/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigCli {
  std::string config_path;
  std::optional<double> alpha;
  std::optional<int> flow_iters;
  std::optional<double> damping;
  std::optional<double> bp_tol;
  std::optional<int> bp_iters;
  std::optional<double> edge_beta;
  std::optional<double> srm_q;
  std::optional<double> step;
  std::optional<int> epochs;
  std::optional<double> l2;
  std::optional<double> train_tol;
  std::optional<int> exact_cutoff;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--alpha", alpha, "flow smoothness weight");
    app->add_option("--flow-iters", flow_iters, "flow Jacobi iterations");
    app->add_option("--damping", damping, "BP damping in [0,1)");
    app->add_option("--bp-tol", bp_tol, "BP message tolerance");
    app->add_option("--bp-iters", bp_iters, "BP iteration cap");
    app->add_option("--edge-beta", edge_beta, "edge contrast sensitivity");
    app->add_option("--srm-q", srm_q, "segmentation granularity");
    app->add_option("--step", step, "training step size");
    app->add_option("--epochs", epochs, "training epoch cap");
    app->add_option("--l2", l2, "training l2 penalty");
    app->add_option("--train-tol", train_tol, "training gradient tolerance");
    app->add_option("--exact-cutoff", exact_cutoff,
                    "max node count for exact enumeration");
    app->add_option("--seed", seed, "RNG seed");
  }

  // Flags override anything the config file supplied.
  dscrf::RunConfig resolve() const {
    dscrf::RunConfig cfg;
    if (!config_path.empty()) cfg = dscrf::config_from_file(config_path);
    if (alpha) cfg.flow.alpha = *alpha;
    if (flow_iters) cfg.flow.iterations = *flow_iters;
    if (damping) cfg.bp.damping = *damping;
    if (bp_tol) cfg.bp.tolerance = *bp_tol;
    if (bp_iters) cfg.bp.max_iterations = *bp_iters;
    if (edge_beta) cfg.features.edge_beta = *edge_beta;
    if (srm_q) cfg.features.srm_q = *srm_q;
    if (step) cfg.training.step = *step;
    if (epochs) cfg.training.epochs = *epochs;
    if (l2) cfg.training.l2 = *l2;
    if (train_tol) cfg.training.tolerance = *train_tol;
    if (exact_cutoff) cfg.exact_cutoff = *exact_cutoff;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
  }
};

std::string frame_name(int t, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03d%s", t, ext);
  return buf;
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw dscrf::DataError("cannot write report '" + path + "'");
  out << doc.dump(2) << '\n';
}

int run_simulate(const std::string& spec_path, const std::string& out_dir,
                 std::uint64_t seed) {
  const dscrf::MotionSpec spec = dscrf::motion_spec_from_file(spec_path);
  const dscrf::Sequence seq = dscrf::generate(spec, seed);

  fs::create_directories(fs::path(out_dir) / "frames");
  fs::create_directories(fs::path(out_dir) / "masks");
  const int targets = static_cast<int>(spec.objects.size());
  for (int j = 0; j < targets; ++j) {
    fs::create_directories(fs::path(out_dir) / "targets" / std::to_string(j));
  }
  for (int t = 0; t < spec.frames; ++t) {
    dscrf::save_frame(
        (fs::path(out_dir) / "frames" / frame_name(t, ".png")).string(),
        seq.frames[t]);
    dscrf::save_mask(
        (fs::path(out_dir) / "masks" / frame_name(t, ".png")).string(),
        seq.scene_masks[t]);
    for (int j = 0; j < targets; ++j) {
      dscrf::save_mask((fs::path(out_dir) / "targets" / std::to_string(j) /
                        frame_name(t, ".png"))
                           .string(),
                       seq.target_masks[t][j]);
    }
  }
  std::cout << "wrote " << spec.frames << " frames (" << targets
            << " target(s)) to " << out_dir << '\n';
  return 0;
}

int run_train(const std::vector<std::string>& seq_dirs,
              const std::string& out_path, int max_instances,
              const dscrf::RunConfig& cfg) {
  std::vector<dscrf::TrainingInstance> instances;
  for (const std::string& dir : seq_dirs) {
    const auto frames = dscrf::load_sequence((fs::path(dir) / "frames").string());
    const auto masks = dscrf::load_mask_sequence((fs::path(dir) / "masks").string());
    if (frames.size() != masks.size()) {
      throw dscrf::DataError("sequence '" + dir +
                             "': frame and mask counts differ");
    }
    if (frames.size() < 3) {
      throw dscrf::DataError("sequence '" + dir +
                             "' is too short to form an instance");
    }
    for (std::size_t t = 2; t < frames.size(); ++t) {
      if (max_instances > 0 &&
          static_cast<int>(instances.size()) >= max_instances) {
        break;
      }
      instances.push_back({frames[t - 2], frames[t - 1], frames[t],
                           masks[t - 1], masks[t]});
    }
  }
  std::cout << "training on " << instances.size() << " instance(s)\n";
  const dscrf::FitResult result = dscrf::fit(instances, cfg);
  dscrf::save_params(out_path, result.params);
  std::cout << "epochs: " << result.epochs
            << (result.converged ? " (gradient converged)" : "")
            << ", objective: " << result.objective_trace.back()
            << ", partition: " << (result.exact ? "exact" : "bethe") << '\n';
  for (int k = 0; k < dscrf::kFamilyCount; ++k) {
    std::cout << "  " << dscrf::kFamilyNames[k] << " = "
              << result.params.weights[k] << '\n';
  }
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int run_track(const std::string& frames_dir, const std::string& params_path,
              const std::vector<std::string>& init1,
              const std::vector<std::string>& init2,
              const std::string& out_dir, const std::string& truth_dir,
              const std::vector<std::string>& target_truth_dirs,
              const std::string& report_path, const dscrf::RunConfig& cfg) {
  const auto frames = dscrf::load_sequence(frames_dir);
  if (frames.size() < 3) {
    throw dscrf::DataError("need at least 3 frames to track");
  }
  if (init1.size() != init2.size() || init1.empty()) {
    throw dscrf::DataError(
        "provide matching --init1/--init2 mask pairs, one per target");
  }
  const dscrf::ModelParams params = dscrf::load_params(params_path);

  dscrf::SequenceAnnotation annotation;
  for (std::size_t j = 0; j < init1.size(); ++j) {
    annotation.frame1_masks.push_back(dscrf::load_mask(init1[j]));
    annotation.frame2_masks.push_back(dscrf::load_mask(init2[j]));
  }

  std::vector<dscrf::LabelField> truth;
  if (!truth_dir.empty()) {
    truth = dscrf::load_mask_sequence(truth_dir);
    if (truth.size() != frames.size()) {
      throw dscrf::DataError("truth mask count differs from frame count");
    }
  }
  std::vector<std::vector<dscrf::LabelField>> target_truth;
  if (!target_truth_dirs.empty()) {
    if (target_truth_dirs.size() != init1.size()) {
      throw dscrf::DataError("--truth-target count must match the targets");
    }
    for (const std::string& dir : target_truth_dirs) {
      target_truth.push_back(dscrf::load_mask_sequence(dir));
      if (target_truth.back().size() != frames.size()) {
        throw dscrf::DataError("target truth mask count differs from frames");
      }
    }
  }

  dscrf::TrackState state =
      dscrf::initialize(frames[0], frames[1], annotation, params, cfg);

  fs::create_directories(fs::path(out_dir) / "masks");
  for (std::size_t j = 0; j < init1.size(); ++j) {
    fs::create_directories(fs::path(out_dir) / "targets" / std::to_string(j));
  }
  // Frames 0 and 1 echo the annotation so the output covers the sequence.
  for (int t = 0; t < 2; ++t) {
    dscrf::LabelField scene =
        dscrf::LabelField::filled(state.width, state.height, dscrf::kBackground);
    const auto& masks =
        t == 0 ? annotation.frame1_masks : annotation.frame2_masks;
    for (const auto& m : masks) {
      for (int i : dscrf::silhouette_pixels(m)) {
        scene.set(i, dscrf::kSilhouette);
      }
    }
    dscrf::save_mask(
        (fs::path(out_dir) / "masks" / frame_name(t, ".png")).string(), scene);
  }

  json report;
  report["config"] = json::parse(dscrf::config_to_json_text(cfg));
  report["frames"] = static_cast<int>(frames.size());
  report["targets"] = static_cast<int>(init1.size());
  json per_frame = json::array();
  std::vector<bool> tracked;
  std::vector<std::vector<bool>> target_tracked(init1.size());

  for (std::size_t t = 2; t < frames.size(); ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    const dscrf::StepResult res = dscrf::step(state, frames[t], cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    dscrf::save_mask(
        (fs::path(out_dir) / "masks" / frame_name(static_cast<int>(t), ".png"))
            .string(),
        res.decoded);
    json target_rows = json::array();
    for (std::size_t j = 0; j < state.targets.size(); ++j) {
      dscrf::LabelField mask = dscrf::LabelField::filled(
          state.width, state.height, dscrf::kBackground);
      for (int i : state.targets[j]) mask.set(i, dscrf::kSilhouette);
      dscrf::save_mask((fs::path(out_dir) / "targets" / std::to_string(j) /
                        frame_name(static_cast<int>(t), ".png"))
                           .string(),
                       mask);
      json trow;
      trow["target"] = static_cast<int>(j);
      trow["matched"] = static_cast<bool>(res.target_matched[j]);
      trow["pixels"] = static_cast<int>(state.targets[j].size());
      if (!target_truth.empty()) {
        const double overlap = dscrf::iou(mask, target_truth[j][t]);
        trow["iou"] = overlap;
        target_tracked[j].push_back(overlap >= 0.5);
      }
      target_rows.push_back(trow);
    }

    json row;
    row["frame"] = static_cast<int>(t);
    row["bp_converged"] = res.bp_converged;
    row["bp_iterations"] = res.bp_iterations;
    row["components"] = res.component_count;
    row["seconds"] = seconds;
    row["targets"] = target_rows;
    if (!truth.empty()) {
      const double overlap = dscrf::iou(res.decoded, truth[t]);
      row["iou"] = overlap;
      tracked.push_back(overlap >= 0.5);
    }
    per_frame.push_back(row);
  }
  report["per_frame"] = per_frame;
  if (!tracked.empty()) report["accuracy"] = dscrf::accuracy(tracked);
  if (!target_truth.empty()) {
    json acc = json::array();
    for (const auto& flags : target_tracked) {
      acc.push_back(dscrf::accuracy(flags));
    }
    report["target_accuracy"] = acc;
  }

  const std::string report_file =
      report_path.empty() ? (fs::path(out_dir) / "report.json").string()
                          : report_path;
  write_json(report_file, report);
  std::cout << "tracked " << frames.size() - 2 << " frame(s); report at "
            << report_file << '\n';
  if (!tracked.empty()) {
    std::cout << "accuracy (IoU >= 0.5): " << dscrf::accuracy(tracked)
              << "%\n";
  }
  return 0;
}

int run_eval(const std::string& pred_dir, const std::string& truth_dir,
             double threshold, const std::string& report_path) {
  const auto pred = dscrf::load_mask_sequence(pred_dir);
  const auto truth = dscrf::load_mask_sequence(truth_dir);
  if (pred.size() != truth.size()) {
    throw dscrf::DataError("predicted and truth mask counts differ (" +
                           std::to_string(pred.size()) + " vs " +
                           std::to_string(truth.size()) + ")");
  }
  std::vector<bool> tracked;
  json rows = json::array();
  double iou_sum = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const double overlap = dscrf::iou(pred[t], truth[t]);
    iou_sum += overlap;
    tracked.push_back(overlap >= threshold);
    rows.push_back({{"frame", static_cast<int>(t)}, {"iou", overlap}});
    std::cout << "frame " << t << "  iou " << overlap << '\n';
  }
  const double acc = dscrf::accuracy(tracked);
  const double mean_iou = iou_sum / static_cast<double>(pred.size());
  std::cout << "mean iou: " << mean_iou << "\naccuracy (iou >= " << threshold
            << "): " << acc << "%\n";
  if (!report_path.empty()) {
    json report;
    report["per_frame"] = rows;
    report["mean_iou"] = mean_iou;
    report["threshold"] = threshold;
    report["accuracy"] = acc;
    write_json(report_path, report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep-structured CRF object silhouette tracker"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "render a synthetic sequence");
  std::string sim_spec, sim_out;
  std::uint64_t sim_seed = 0;
  sim->add_option("--spec", sim_spec, "motion spec JSON")->required();
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--seed", sim_seed, "noise seed");

  // train
  auto* train = app.add_subcommand("train", "fit feature weights");
  std::vector<std::string> train_seqs;
  std::string train_out;
  int train_max_instances = 0;
  ConfigCli train_cfg;
  train->add_option("--seq", train_seqs, "sequence directory (repeatable)")
      ->required();
  train->add_option("--out", train_out, "params file to write")->required();
  train->add_option("--max-instances", train_max_instances,
                    "cap on training instances (0 = all)");
  train_cfg.attach(train);

  // track
  auto* track = app.add_subcommand("track", "track a sequence");
  std::string track_frames, track_params, track_out, track_truth, track_report;
  std::vector<std::string> track_init1, track_init2, track_target_truth;
  ConfigCli track_cfg;
  track->add_option("--frames", track_frames, "frame directory")->required();
  track->add_option("--params", track_params, "trained params file")
      ->required();
  track->add_option("--init1", track_init1,
                    "frame-0 mask per target (repeatable)")
      ->required();
  track->add_option("--init2", track_init2,
                    "frame-1 mask per target (repeatable)")
      ->required();
  track->add_option("--out", track_out, "output directory")->required();
  track->add_option("--truth", track_truth,
                    "scene truth mask directory (adds IoU to the report)");
  track->add_option("--truth-target", track_target_truth,
                    "per-target truth mask directory (repeatable)");
  track->add_option("--report", track_report, "report path override");
  track_cfg.attach(track);

  // eval
  auto* eval = app.add_subcommand("eval", "score predicted masks");
  std::string eval_pred, eval_truth, eval_report;
  double eval_threshold = 0.5;
  eval->add_option("--pred", eval_pred, "predicted mask directory")
      ->required();
  eval->add_option("--truth", eval_truth, "truth mask directory")->required();
  eval->add_option("--threshold", eval_threshold,
                   "IoU threshold for a correctly tracked frame");
  eval->add_option("--report", eval_report, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_spec, sim_out, sim_seed);
    if (train->parsed()) {
      return run_train(train_seqs, train_out, train_max_instances,
                       train_cfg.resolve());
    }
    if (track->parsed()) {
      return run_track(track_frames, track_params, track_init1, track_init2,
                       track_out, track_truth, track_target_truth,
                       track_report, track_cfg.resolve());
    }
    if (eval->parsed()) {
      return run_eval(eval_pred, eval_truth, eval_threshold, eval_report);
    }
  } catch (const dscrf::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const dscrf::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
