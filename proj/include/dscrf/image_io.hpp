#pragma once

#include <string>

#include "dscrf/field.hpp"

namespace dscrf {

/// Reads an 8-bit PNG, PGM (P5) or PPM (P6) image as an RGB frame with
/// channels scaled to [0,1]. Grayscale inputs replicate into all channels.
Frame load_image(const std::string& path);

/// Writes a frame as 8-bit RGB; format chosen by extension (.png or .ppm).
void save_frame(const std::string& path, const Frame& frame);

/// Strict binary mask: every pixel must be exactly 0 (silhouette) or 255
/// (background); anything else is rejected.
LabelField load_mask(const std::string& path);

/// Writes a mask as 8-bit grayscale 0/255; .png or .pgm by extension.
void save_mask(const std::string& path, const LabelField& field);

/// All numbered image files of a directory, ordered by the number in the
/// filename stem. Dimensions must agree across the sequence.
std::vector<Frame> load_sequence(const std::string& dir);

std::vector<LabelField> load_mask_sequence(const std::string& dir);

/// The ordered file list load_sequence would read.
std::vector<std::string> list_sequence_files(const std::string& dir);

}  // namespace dscrf
