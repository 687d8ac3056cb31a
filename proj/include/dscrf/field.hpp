#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dscrf/errors.hpp"

namespace dscrf {

constexpr std::uint8_t kSilhouette = 0;
constexpr std::uint8_t kBackground = 1;

/// One RGB observation on a W x H grid, channels in [0,1], plus a derived
/// grayscale (luma) plane.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, std::vector<double> r, std::vector<double> g,
        std::vector<double> b);

  static Frame constant(int width, int height, double r, double g, double b);

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  int index(int x, int y) const { return y * width_ + x; }

  double r(int i) const { return r_[i]; }
  double g(int i) const { return g_[i]; }
  double b(int i) const { return b_[i]; }
  double gray(int i) const { return gray_[i]; }
  double gray(int x, int y) const { return gray_[index(x, y)]; }

  const std::vector<double>& gray_plane() const { return gray_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> r_, g_, b_;
  std::vector<double> gray_;
};

/// Per-pixel luma, 0.299 R + 0.587 G + 0.114 B.
std::vector<double> grayscale(const Frame& frame);

/// Binary state plane; 0 marks silhouette pixels, 1 background.
class LabelField {
 public:
  LabelField() = default;
  LabelField(int width, int height, std::vector<std::uint8_t> labels);

  static LabelField filled(int width, int height, std::uint8_t value);

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  int index(int x, int y) const { return y * width_ + x; }

  std::uint8_t at(int i) const { return labels_[i]; }
  std::uint8_t at(int x, int y) const { return labels_[index(x, y)]; }
  void set(int i, std::uint8_t v);
  void set(int x, int y, std::uint8_t v) { set(index(x, y), v); }

  const std::vector<std::uint8_t>& labels() const { return labels_; }

  bool operator==(const LabelField& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> labels_;
};

/// Indices of all label-0 pixels, ascending.
std::vector<int> silhouette_pixels(const LabelField& field);

/// Dense per-pixel velocity between two consecutive frames, pixels/frame.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);
  FlowField(int width, int height, std::vector<double> vx,
            std::vector<double> vy);

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  int index(int x, int y) const { return y * width_ + x; }

  double vx(int i) const { return vx_[i]; }
  double vy(int i) const { return vy_[i]; }
  double vx(int x, int y) const { return vx_[index(x, y)]; }
  double vy(int x, int y) const { return vy_[index(x, y)]; }
  void set(int i, double vx, double vy) {
    vx_[i] = vx;
    vy_[i] = vy;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> vx_, vy_;
};

/// Unordered pair of 4-connected lattice neighbors within one layer.
struct IntraClique {
  int a = 0;  // pixel index, a < b
  int b = 0;
};

/// Ordered pair (node at layer t, temporal neighbor at layer t-1).
struct InterClique {
  int node = 0;
  int prev = 0;
};

/// All pairwise cliques of one time step.
struct CliqueSet {
  int width = 0;
  int height = 0;
  std::vector<IntraClique> intra;
  std::vector<InterClique> inter;  // exactly one per node, node order
};

/// Feature families sharing one tied weight each.
enum class FeatureFamily : int {
  kFlow = 0,        // flow-magnitude unary
  kAppearance = 1,  // shifted prior-label agreement unary
  kCoherency = 2,   // segmentation region vote unary
  kEdge = 3,        // contrast-sensitive pairwise
  kTemporal = 4,    // inter-layer agreement with decoded previous labels
};

constexpr int kFamilyCount = 5;

extern const std::array<const char*, kFamilyCount> kFamilyNames;

/// Tied feature weights, one per family.
struct ModelParams {
  std::array<double, kFamilyCount> weights{};

  double operator[](FeatureFamily f) const {
    return weights[static_cast<int>(f)];
  }
  double& operator[](FeatureFamily f) { return weights[static_cast<int>(f)]; }

  bool finite() const;
};

/// User annotation of the first two frames: one mask pair per target.
struct SequenceAnnotation {
  std::vector<LabelField> frame1_masks;
  std::vector<LabelField> frame2_masks;

  int target_count() const { return static_cast<int>(frame2_masks.size()); }
  void validate(int width, int height) const;
};

}  // namespace dscrf
