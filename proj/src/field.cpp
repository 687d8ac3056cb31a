#include "dscrf/field.hpp"

#include <cmath>

namespace dscrf {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw DataError("grid dimensions must be at least 1x1");
  }
}

void check_channel(const std::vector<double>& c, int n, const char* name) {
  if (static_cast<int>(c.size()) != n) {
    throw DataError(std::string("channel ") + name +
                    " length does not match width*height");
  }
  for (double v : c) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw DataError(std::string("channel ") + name +
                      " value outside [0,1]");
    }
  }
}

}  // namespace

Frame::Frame(int width, int height, std::vector<double> r,
             std::vector<double> g, std::vector<double> b)
    : width_(width), height_(height), r_(std::move(r)), g_(std::move(g)),
      b_(std::move(b)) {
  check_dims(width_, height_);
  const int n = width_ * height_;
  check_channel(r_, n, "R");
  check_channel(g_, n, "G");
  check_channel(b_, n, "B");
  gray_.resize(n);
  for (int i = 0; i < n; ++i) {
    gray_[i] = 0.299 * r_[i] + 0.587 * g_[i] + 0.114 * b_[i];
  }
}

Frame Frame::constant(int width, int height, double r, double g, double b) {
  check_dims(width, height);
  const int n = width * height;
  return Frame(width, height, std::vector<double>(n, r),
               std::vector<double>(n, g), std::vector<double>(n, b));
}

std::vector<double> grayscale(const Frame& frame) { return frame.gray_plane(); }

LabelField::LabelField(int width, int height,
                       std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  check_dims(width_, height_);
  if (static_cast<int>(labels_.size()) != width_ * height_) {
    throw DataError("label buffer length does not match width*height");
  }
  for (std::uint8_t v : labels_) {
    if (v != kSilhouette && v != kBackground) {
      throw DataError("label value must be 0 or 1");
    }
  }
}

LabelField LabelField::filled(int width, int height, std::uint8_t value) {
  check_dims(width, height);
  return LabelField(width, height,
                    std::vector<std::uint8_t>(width * height, value));
}

void LabelField::set(int i, std::uint8_t v) {
  if (v != kSilhouette && v != kBackground) {
    throw DataError("label value must be 0 or 1");
  }
  labels_[i] = v;
}

std::vector<int> silhouette_pixels(const LabelField& field) {
  std::vector<int> out;
  for (int i = 0; i < field.size(); ++i) {
    if (field.at(i) == kSilhouette) out.push_back(i);
  }
  return out;
}

FlowField::FlowField(int width, int height)
    : width_(width), height_(height), vx_(width * height, 0.0),
      vy_(width * height, 0.0) {
  check_dims(width_, height_);
}

FlowField::FlowField(int width, int height, std::vector<double> vx,
                     std::vector<double> vy)
    : width_(width), height_(height), vx_(std::move(vx)), vy_(std::move(vy)) {
  check_dims(width_, height_);
  const int n = width_ * height_;
  if (static_cast<int>(vx_.size()) != n ||
      static_cast<int>(vy_.size()) != n) {
    throw DataError("flow buffer length does not match width*height");
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(vx_[i]) || !std::isfinite(vy_[i])) {
      throw NumericalError("flow field contains non-finite velocity");
    }
  }
}

const std::array<const char*, kFamilyCount> kFamilyNames = {
    "flow", "appearance", "coherency", "edge", "temporal"};

bool ModelParams::finite() const {
  for (double w : weights) {
    if (!std::isfinite(w)) return false;
  }
  return true;
}

void SequenceAnnotation::validate(int width, int height) const {
  if (frame1_masks.empty() || frame1_masks.size() != frame2_masks.size()) {
    throw DataError("annotation needs a frame-1 and frame-2 mask per target");
  }
  for (std::size_t j = 0; j < frame2_masks.size(); ++j) {
    for (const LabelField* m : {&frame1_masks[j], &frame2_masks[j]}) {
      if (m->width() != width || m->height() != height) {
        throw DataError("annotation mask dimensions do not match the frames");
      }
      if (silhouette_pixels(*m).empty()) {
        throw DataError("annotation mask for target " + std::to_string(j) +
                        " has no silhouette pixels");
      }
    }
  }
}

}  // namespace dscrf
