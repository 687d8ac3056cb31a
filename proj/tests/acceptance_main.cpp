// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dscrf/graph.hpp"
#include "dscrf/inference.hpp"
#include "dscrf/metrics.hpp"
#include "dscrf/simulate.hpp"
#include "dscrf/tracker.hpp"
#include "dscrf/training.hpp"
#include "test_util.hpp"

using namespace dscrf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Held-out training data: two squares that separate, three consecutive
// instances. Separation pairs carry the evidence that keeps region votes
// stronger than raw prior-copy votes.
std::vector<TrainingInstance> training_pairs() {
  MotionSpec spec;
  spec.width = 64;
  spec.height = 64;
  spec.frames = 7;
  spec.noise_sigma = 0.02;
  ObjectSpec left;
  left.position = {22, 30};
  left.velocity = {-2.0, -0.5};
  left.half_size = 7;
  left.color = {0.85, 0.85, 0.85};
  ObjectSpec right;
  right.position = {37, 33};
  right.velocity = {2.0, 0.5};
  right.half_size = 6;
  right.growth = 0.2;
  right.color = {0.6, 0.6, 0.6};
  spec.objects = {left, right};
  const Sequence seq = generate(spec, 33);
  std::vector<TrainingInstance> out;
  for (int t = 2; t <= 4; ++t) {
    out.push_back({seq.frames[t - 2], seq.frames[t - 1], seq.frames[t],
                   seq.scene_masks[t - 1], seq.scene_masks[t]});
  }
  return out;
}

MotionSpec tracked_motion_spec(int kind) {
  MotionSpec spec;
  spec.width = 64;
  spec.height = 64;
  spec.frames = 20;
  spec.noise_sigma = 0.02;
  ObjectSpec o;
  if (kind == 1) {  // acceleration, constant shape
    o.position = {14, 14};
    o.velocity = {0.4, 0.3};
    o.acceleration = {0.12, 0.08};
    o.half_size = 6;
  } else if (kind == 2) {  // constant velocity, size change
    o.position = {16, 16};
    o.velocity = {1.2, 0.9};
    o.half_size = 4;
    o.growth = 0.35;
  } else {  // acceleration and size change
    o.position = {14, 14};
    o.velocity = {0.5, 0.4};
    o.acceleration = {0.1, 0.06};
    o.half_size = 4;
    o.growth = 0.25;
  }
  spec.objects.push_back(o);
  return spec;
}

Outcome motion_tracking(const ModelParams& params, const RunConfig& cfg) {
  Outcome out;
  out.pass = true;
  char buf[160];
  for (int kind : {1, 2, 3}) {
    const Sequence seq = generate(tracked_motion_spec(kind), 100 + kind);
    SequenceAnnotation ann;
    ann.frame1_masks = {seq.scene_masks[0]};
    ann.frame2_masks = {seq.scene_masks[1]};
    const auto t0 = std::chrono::steady_clock::now();
    TrackState state =
        initialize(seq.frames[0], seq.frames[1], ann, params, cfg);
    int high = 0;
    std::vector<bool> tracked;
    const int steps = static_cast<int>(seq.frames.size()) - 2;
    for (std::size_t t = 2; t < seq.frames.size(); ++t) {
      const StepResult res = step(state, seq.frames[t], cfg);
      const double overlap = iou(res.decoded, seq.scene_masks[t]);
      high += overlap >= 0.8;
      tracked.push_back(overlap >= 0.5);
    }
    const double elapsed = seconds_since(t0);
    const double acc = accuracy(tracked);
    const bool ok = high >= 0.9 * steps && acc == 100.0 && elapsed <= 60.0;
    out.pass = out.pass && ok;
    std::snprintf(buf, sizeof buf, "motion%d %d/%d@0.8 acc=%.0f%% %.1fs; ",
                  kind, high, steps, acc, elapsed);
    out.detail += buf;
  }
  return out;
}

Outcome occlusion_crossing(const ModelParams& params, const RunConfig& cfg) {
  MotionSpec spec;
  spec.width = 64;
  spec.height = 64;
  spec.frames = 28;
  spec.noise_sigma = 0.02;
  ObjectSpec hidden;  // drawn first: occluded while the other passes over
  hidden.position = {50, 32};
  hidden.velocity = {-1.0, 0.0};
  hidden.half_size = 4;
  hidden.color = {0.6, 0.6, 0.6};
  ObjectSpec cover;
  cover.position = {14, 32};
  cover.velocity = {1.0, 0.0};
  cover.half_size = 6;
  cover.color = {0.85, 0.85, 0.85};
  spec.objects = {hidden, cover};
  const Sequence seq = generate(spec, 5);

  int full_occlusion = 0;
  for (int t = 0; t < spec.frames; ++t) {
    full_occlusion += silhouette_pixels(seq.target_masks[t][0]).empty();
  }

  SequenceAnnotation ann;
  ann.frame1_masks = {seq.target_masks[0][0], seq.target_masks[0][1]};
  ann.frame2_masks = {seq.target_masks[1][0], seq.target_masks[1][1]};
  TrackState state =
      initialize(seq.frames[0], seq.frames[1], ann, params, cfg);
  StepResult last;
  for (std::size_t t = 2; t < seq.frames.size(); ++t) {
    last = step(state, seq.frames[t], cfg);
  }
  const int final_t = spec.frames - 1;
  double overlap[2];
  for (int j = 0; j < 2; ++j) {
    LabelField mask = LabelField::filled(64, 64, kBackground);
    for (int i : state.targets[j]) mask.set(i, kSilhouette);
    overlap[j] = iou(mask, seq.target_masks[final_t][j]);
  }
  Outcome out;
  out.pass = full_occlusion >= 3 && overlap[0] >= 0.5 && overlap[1] >= 0.5;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d fully occluded frames; final IoU %.2f/%.2f; re-matched "
                "%d/%d",
                full_occlusion, overlap[0], overlap[1],
                static_cast<int>(last.target_matched[0]),
                static_cast<int>(last.target_matched[1]));
  out.detail = buf;
  return out;
}

CliqueSet grid_cliques(int w, int h) {
  CliqueSet c;
  c.width = w;
  c.height = h;
  c.intra = build_intra(w, h);
  c.inter = build_inter(FlowField(w, h));
  return c;
}

PotentialTable random_potentials(int w, int h, const CliqueSet& cliques,
                                 std::mt19937& rng, double unary_scale,
                                 double pairwise_scale) {
  PotentialTable pot;
  pot.width = w;
  pot.height = h;
  pot.unary.resize(w * h);
  for (auto& u : pot.unary) {
    u[0] = test::runif(rng, -unary_scale, unary_scale);
    u[1] = test::runif(rng, -unary_scale, unary_scale);
  }
  pot.pairwise.resize(cliques.intra.size());
  for (auto& p : pot.pairwise) {
    for (auto& v : p) v = test::runif(rng, -pairwise_scale, pairwise_scale);
  }
  return pot;
}

Outcome bp_oracle() {
  BpSettings bp;
  bp.damping = 0.5;
  bp.tolerance = 1e-10;
  bp.max_iterations = 500;

  const std::pair<int, int> shapes[] = {{4, 4}, {8, 2}, {5, 3}, {2, 7}, {16, 1}};
  double worst_grid = 0.0;
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [w, h] = shapes[trial % 5];
    const CliqueSet cliques = grid_cliques(w, h);
    const PotentialTable pot =
        random_potentials(w, h, cliques, rng, 2.0, 0.4);
    const MarginalField approx = bp_marginals(pot, cliques, bp);
    const MarginalField exact = exact_marginals(pot, cliques);
    for (int i = 0; i < w * h; ++i) {
      worst_grid =
          std::max(worst_grid, std::abs(approx.p0[i] - exact.p0[i]));
    }
  }

  double worst_chain = 0.0;
  bp.tolerance = 1e-13;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8 + trial % 9;
    const CliqueSet cliques = grid_cliques(n, 1);
    const PotentialTable pot =
        random_potentials(n, 1, cliques, rng, 2.0, 1.0);
    const MarginalField approx = bp_marginals(pot, cliques, bp);
    const MarginalField exact = exact_marginals(pot, cliques);
    for (int i = 0; i < n; ++i) {
      worst_chain =
          std::max(worst_chain, std::abs(approx.p0[i] - exact.p0[i]));
    }
  }

  Outcome out;
  out.pass = worst_grid < 1e-3 && worst_chain < 1e-9;
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "grid max err %.2e (<1e-3), chain max err %.2e (<1e-9)",
                worst_grid, worst_chain);
  out.detail = buf;
  return out;
}

Outcome gradient_check() {
  RunConfig cfg;
  cfg.training.l2 = 0.0;
  cfg.exact_cutoff = kExactNodeCap;
  std::mt19937 rng(4321);
  const double h = 1e-4;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 2 + trial % 2;
    const int ht = 2 + (trial / 2) % 3;  // up to 3x4 = 12 nodes
    const TrainingInstance inst{
        test::random_frame(rng, w, ht), test::random_frame(rng, w, ht),
        test::random_frame(rng, w, ht), test::random_mask(rng, w, ht),
        test::random_mask(rng, w, ht)};
    const PreparedInstance prep = prepare_instance(inst, cfg);
    ModelParams params;
    for (int k = 0; k < kFamilyCount; ++k) {
      params.weights[k] = test::runif(rng, -1.0, 1.0);
    }
    const auto grad = gradient(prep, params, cfg);
    for (int k = 0; k < kFamilyCount; ++k) {
      ModelParams up = params, down = params;
      up.weights[k] += h;
      down.weights[k] -= h;
      const double fd = (log_likelihood(prep, up, cfg).value -
                         log_likelihood(prep, down, cfg).value) /
                        (2.0 * h);
      worst = std::max(worst, std::abs(grad[k] - fd) /
                                  std::max(1.0, std::abs(fd)));
    }
  }
  Outcome out;
  out.pass = worst < 1e-5;
  char buf[80];
  std::snprintf(buf, sizeof buf, "worst relative error %.2e (<1e-5)", worst);
  out.detail = buf;
  return out;
}

Outcome ascent_monotonicity() {
  std::mt19937 rng(9);
  RunConfig cfg;
  cfg.training.l2 = 0.01;
  cfg.training.epochs = 150;
  cfg.exact_cutoff = kExactNodeCap;
  double worst_drop = 0.0;
  bool all_exact = true;
  for (int run = 0; run < 3; ++run) {
    std::vector<TrainingInstance> instances;
    for (int i = 0; i < 2; ++i) {
      const int w = 2 + rng() % 2;
      const int h = 2 + rng() % 2;
      instances.push_back({test::random_frame(rng, w, h),
                           test::random_frame(rng, w, h),
                           test::random_frame(rng, w, h),
                           test::random_mask(rng, w, h),
                           test::random_mask(rng, w, h)});
    }
    const FitResult res = fit(instances, cfg);
    all_exact = all_exact && res.exact;
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
      worst_drop = std::max(
          worst_drop, res.objective_trace[i - 1] - res.objective_trace[i]);
    }
  }
  Outcome out;
  out.pass = all_exact && worst_drop <= 1e-9;
  char buf[100];
  std::snprintf(buf, sizeof buf, "worst trace decrease %.2e (<=1e-9), exact Z %s",
                worst_drop, all_exact ? "yes" : "no");
  out.detail = buf;
  return out;
}

Outcome flow_recovery() {
  const int W = 64, H = 64;
  auto plaid = [&](int dx, int dy) {
    std::vector<double> g(W * H);
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        g[y * W + x] = 0.5 +
                       0.18 * std::sin(2.0 * M_PI * (x - dx) / 32.0) +
                       0.18 * std::sin(2.0 * M_PI * (y - dy) / 32.0);
      }
    }
    return test::gray_frame(W, H, g);
  };
  const FlowSettings fs{0.2, 300, 1.5};
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const std::pair<int, int> shifts[] = {
        {d, 0}, {-d, 0}, {0, d}, {0, -d}, {d, -d}};
    for (const auto& [dx, dy] : shifts) {
      const FlowField flow = dense_flow(plaid(0, 0), plaid(dx, dy), fs);
      double sx = 0.0, sy = 0.0;
      int n = 0;
      for (int y = 8; y < 56; ++y) {
        for (int x = 8; x < 56; ++x) {
          sx += flow.vx(x, y);
          sy += flow.vy(x, y);
          ++n;
        }
      }
      worst = std::max({worst, std::abs(sx / n - dx), std::abs(sy / n - dy)});
    }
  }
  Outcome out;
  out.pass = worst < 0.5;
  char buf[80];
  std::snprintf(buf, sizeof buf, "worst mean-flow error %.3f px (<0.5)", worst);
  out.detail = buf;
  return out;
}

Outcome clique_conformance() {
  std::mt19937 rng(777);
  int checked = 0;
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    const int w = 1 + rng() % 12;
    const int h = 1 + rng() % 12;
    FlowField flow(w, h);
    for (int i = 0; i < w * h; ++i) {
      flow.set(i, test::runif(rng, -5.0, 5.0), test::runif(rng, -5.0, 5.0));
    }
    const auto inter = build_inter(flow);
    ok = ok && static_cast<int>(inter.size()) == w * h;
    for (const InterClique& c : inter) {
      const int x = c.node % w, y = c.node / w;
      const int kx =
          std::clamp(x + round_half_away(flow.vx(c.node)), 0, w - 1);
      const int ky =
          std::clamp(y + round_half_away(flow.vy(c.node)), 0, h - 1);
      ok = ok && c.prev == ky * w + kx;
      ++checked;
    }
  }
  Outcome out;
  out.pass = ok;
  out.detail = "verified " + std::to_string(checked) +
               " inter cliques across 100 random flow fields";
  return out;
}

Outcome metric_fidelity() {
  std::vector<bool> a(100, false);
  for (int i = 0; i < 88; ++i) a[i] = true;
  std::vector<bool> b(100, false);
  for (int i = 0; i < 16; ++i) b[i] = true;
  const double acc88 = accuracy(a);
  const double acc16 = accuracy(b);
  Outcome out;
  out.pass = acc88 == 88.0 && acc16 == 16.0;
  char buf[80];
  std::snprintf(buf, sizeof buf, "accuracy(88/100)=%.0f%%, accuracy(16/100)=%.0f%%",
                acc88, acc16);
  out.detail = buf;
  return out;
}

}  // namespace

int main() {
  const RunConfig cfg;  // documented defaults throughout

  std::printf("training weights on 3 held-out synthetic pairs...\n");
  const auto t0 = std::chrono::steady_clock::now();
  const FitResult trained = fit(training_pairs(), cfg);
  std::printf("trained in %.1fs (%d epochs):", seconds_since(t0),
              trained.epochs);
  for (int k = 0; k < kFamilyCount; ++k) {
    std::printf(" %s=%.3f", kFamilyNames[k], trained.params.weights[k]);
  }
  std::printf("\n\n");

  struct Row {
    const char* name;
    Outcome outcome;
  };
  const Row rows[] = {
      {"1. Accelerating/scaling motion tracking", motion_tracking(trained.params, cfg)},
      {"2. Occlusion crossing re-association", occlusion_crossing(trained.params, cfg)},
      {"3. Inference oracle equivalence", bp_oracle()},
      {"4. Gradient correctness", gradient_check()},
      {"5. Ascent monotonicity", ascent_monotonicity()},
      {"6. Flow shift recovery", flow_recovery()},
      {"7. Temporal clique conformance", clique_conformance()},
      {"8. Accuracy metric fidelity", metric_fidelity()},
  };

  int failures = 0;
  for (const Row& row : rows) {
    failures += !row.outcome.pass;
    std::printf("[%s] %s — %s\n", row.outcome.pass ? "PASS" : "FAIL",
                row.name, row.outcome.detail.c_str());
  }
  return failures;
}
