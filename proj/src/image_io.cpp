#include "dscrf/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <png.h>

namespace dscrf {

namespace {

namespace fs = std::filesystem;

struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3
  std::vector<std::uint8_t> data;
};

std::string lower_ext(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

RawImage read_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError("cannot read PNG '" + path + "': " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  RawImage raw;
  raw.width = static_cast<int>(image.width);
  raw.height = static_cast<int>(image.height);
  raw.channels = 3;
  raw.data.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data.data(), 0, nullptr)) {
    throw DataError("cannot decode PNG '" + path + "': " + image.message);
  }
  return raw;
}

void write_png(const std::string& path, int width, int height, int channels,
               const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    throw DataError("cannot write PNG '" + path + "': " + image.message);
  }
}

int pnm_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comments between header fields.
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) {
    throw DataError("malformed PNM header in '" + path + "'");
  }
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

RawImage read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image '" + path + "'");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  int channels = 0;
  if (magic[0] == 'P' && magic[1] == '5') channels = 1;
  if (magic[0] == 'P' && magic[1] == '6') channels = 3;
  if (channels == 0) {
    throw DataError("unsupported PNM magic in '" + path +
                    "' (only binary P5/P6)");
  }
  RawImage raw;
  raw.channels = channels;
  raw.width = pnm_token(in, path);
  raw.height = pnm_token(in, path);
  const int maxval = pnm_token(in, path);
  if (raw.width < 1 || raw.height < 1) {
    throw DataError("bad PNM dimensions in '" + path + "'");
  }
  if (maxval != 255) {
    throw DataError("unsupported PNM maxval " + std::to_string(maxval) +
                    " in '" + path + "' (want 255)");
  }
  raw.data.resize(static_cast<std::size_t>(raw.width) * raw.height * channels);
  in.read(reinterpret_cast<char*>(raw.data.data()),
          static_cast<std::streamsize>(raw.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.data.size())) {
    throw DataError("truncated PNM payload in '" + path + "'");
  }
  return raw;
}

void write_pnm(const std::string& path, int width, int height, int channels,
               const std::uint8_t* data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << (channels == 1 ? "P5" : "P6") << '\n'
      << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(width) * height * channels);
  if (!out) throw DataError("failed writing '" + path + "'");
}

RawImage read_raw(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw DataError("unsupported image format '" + ext + "' for '" + path + "'");
}

}  // namespace

Frame load_image(const std::string& path) {
  const RawImage raw = read_raw(path);
  const int n = raw.width * raw.height;
  std::vector<double> r(n), g(n), b(n);
  for (int i = 0; i < n; ++i) {
    if (raw.channels == 1) {
      r[i] = g[i] = b[i] = raw.data[i] / 255.0;
    } else {
      r[i] = raw.data[3 * i] / 255.0;
      g[i] = raw.data[3 * i + 1] / 255.0;
      b[i] = raw.data[3 * i + 2] / 255.0;
    }
  }
  return Frame(raw.width, raw.height, std::move(r), std::move(g),
               std::move(b));
}

void save_frame(const std::string& path, const Frame& frame) {
  const int n = frame.size();
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(n) * 3);
  auto to_byte = [](double v) {
    return static_cast<std::uint8_t>(
        std::clamp(static_cast<int>(std::lround(v * 255.0)), 0, 255));
  };
  for (int i = 0; i < n; ++i) {
    rgb[3 * i] = to_byte(frame.r(i));
    rgb[3 * i + 1] = to_byte(frame.g(i));
    rgb[3 * i + 2] = to_byte(frame.b(i));
  }
  const std::string ext = lower_ext(path);
  if (ext == ".png") {
    write_png(path, frame.width(), frame.height(), 3, rgb.data());
  } else if (ext == ".ppm") {
    write_pnm(path, frame.width(), frame.height(), 3, rgb.data());
  } else {
    throw DataError("unsupported frame format '" + ext + "' (use .png/.ppm)");
  }
}

LabelField load_mask(const std::string& path) {
  const RawImage raw = read_raw(path);
  const int n = raw.width * raw.height;
  std::vector<std::uint8_t> labels(n);
  for (int i = 0; i < n; ++i) {
    std::uint8_t v;
    if (raw.channels == 1) {
      v = raw.data[i];
    } else {
      v = raw.data[3 * i];
      if (raw.data[3 * i + 1] != v || raw.data[3 * i + 2] != v) {
        throw DataError("mask '" + path + "' has a non-gray pixel");
      }
    }
    if (v == 0) {
      labels[i] = kSilhouette;
    } else if (v == 255) {
      labels[i] = kBackground;
    } else {
      throw DataError("mask '" + path + "' has pixel value " +
                      std::to_string(v) + " (only 0 and 255 are allowed)");
    }
  }
  return LabelField(raw.width, raw.height, std::move(labels));
}

void save_mask(const std::string& path, const LabelField& field) {
  std::vector<std::uint8_t> gray(field.size());
  for (int i = 0; i < field.size(); ++i) {
    gray[i] = field.at(i) == kSilhouette ? 0 : 255;
  }
  const std::string ext = lower_ext(path);
  if (ext == ".png") {
    write_png(path, field.width(), field.height(), 1, gray.data());
  } else if (ext == ".pgm") {
    write_pnm(path, field.width(), field.height(), 1, gray.data());
  } else {
    throw DataError("unsupported mask format '" + ext + "' (use .png/.pgm)");
  }
}

std::vector<std::string> list_sequence_files(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw DataError("not a directory: '" + dir + "'");
  }
  struct Entry {
    long long number;
    std::string name;
    std::string path;
  };
  std::vector<Entry> entries;
  for (const auto& de : fs::directory_iterator(dir)) {
    if (!de.is_regular_file()) continue;
    const std::string ext = lower_ext(de.path().string());
    if (ext != ".png" && ext != ".pgm" && ext != ".ppm") continue;
    const std::string stem = de.path().stem().string();
    // Trailing digit run of the stem carries the frame number.
    std::size_t end = stem.size();
    while (end > 0 && std::isdigit(static_cast<unsigned char>(stem[end - 1]))) {
      --end;
    }
    if (end == stem.size()) {
      throw DataError("image file '" + de.path().string() +
                      "' has no frame number in its name");
    }
    long long number = 0;
    try {
      number = std::stoll(stem.substr(end));
    } catch (const std::exception&) {
      throw DataError("cannot parse frame number of '" + de.path().string() +
                      "'");
    }
    entries.push_back(
        {number, de.path().filename().string(), de.path().string()});
  }
  if (entries.empty()) {
    throw DataError("no image files found in '" + dir + "'");
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.number != b.number) return a.number < b.number;
    return a.name < b.name;
  });
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const Entry& e : entries) out.push_back(e.path);
  return out;
}

namespace {

template <typename T, typename Loader>
std::vector<T> load_all(const std::string& dir, Loader&& loader) {
  std::vector<T> out;
  int w = 0, h = 0;
  for (const std::string& path : list_sequence_files(dir)) {
    T item = loader(path);
    if (out.empty()) {
      w = item.width();
      h = item.height();
    } else if (item.width() != w || item.height() != h) {
      throw DataError("image '" + path + "' is " +
                      std::to_string(item.width()) + "x" +
                      std::to_string(item.height()) + " but the sequence is " +
                      std::to_string(w) + "x" + std::to_string(h));
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace

std::vector<Frame> load_sequence(const std::string& dir) {
  return load_all<Frame>(dir, [](const std::string& p) { return load_image(p); });
}

std::vector<LabelField> load_mask_sequence(const std::string& dir) {
  return load_all<LabelField>(dir,
                              [](const std::string& p) { return load_mask(p); });
}

}  // namespace dscrf
