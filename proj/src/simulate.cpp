#include "dscrf/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dscrf/flow.hpp"

namespace dscrf {

MotionSpec::Extent MotionSpec::extent(int object, int t) const {
  const ObjectSpec& o = objects[object];
  Extent e;
  const double td = static_cast<double>(t);
  e.cx = o.position[0] + o.velocity[0] * td +
         o.acceleration[0] * td * (td - 1.0) * 0.5;
  e.cy = o.position[1] + o.velocity[1] * td +
         o.acceleration[1] * td * (td - 1.0) * 0.5;
  const double half = o.half_size + o.growth * td;
  const int side = round_half_away(2.0 * half + 1.0);
  e.x0 = round_half_away(e.cx - half);
  e.y0 = round_half_away(e.cy - half);
  e.x1 = e.x0 + side - 1;
  e.y1 = e.y0 + side - 1;
  return e;
}

void MotionSpec::validate() const {
  if (width < 1 || height < 1) throw DataError("canvas must be at least 1x1");
  if (frames < 3) throw DataError("sequence needs at least 3 frames");
  if (objects.empty()) throw DataError("spec has no objects");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw DataError("noise sigma must be non-negative");
  }
  auto check_color = [](const std::array<double, 3>& c, const char* what) {
    for (double v : c) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError(std::string(what) + " color outside [0,1]");
      }
    }
  };
  check_color(background, "background");
  for (std::size_t j = 0; j < objects.size(); ++j) {
    check_color(objects[j].color, "object");
    if (!(objects[j].half_size > 0.0)) {
      throw DataError("object half-size must be positive");
    }
    for (int t = 0; t < frames; ++t) {
      const double half =
          objects[j].half_size + objects[j].growth * static_cast<double>(t);
      if (half <= 0.0) {
        throw DataError("object " + std::to_string(j) +
                        " shrinks away at frame " + std::to_string(t));
      }
      const Extent e = extent(static_cast<int>(j), t);
      if (e.x0 < 0 || e.y0 < 0 || e.x1 >= width || e.y1 >= height) {
        throw DataError("object " + std::to_string(j) +
                        " leaves the canvas at frame " + std::to_string(t));
      }
    }
  }
}

namespace {

// Portable normal deviates: Box-Muller over the raw mt19937 stream, so the
// emitted sequences do not depend on the standard library's distribution.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed)
      : rng_(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(rng_()) + 0.5) / 4294967296.0;
    const double u2 = (static_cast<double>(rng_()) + 0.5) / 4294967296.0;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

Sequence generate(const MotionSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int w = spec.width;
  const int h = spec.height;
  const int n = w * h;
  const int num_objects = static_cast<int>(spec.objects.size());

  GaussianSource noise(seed);
  Sequence seq;
  seq.frames.reserve(spec.frames);
  seq.scene_masks.reserve(spec.frames);
  seq.target_masks.reserve(spec.frames);

  for (int t = 0; t < spec.frames; ++t) {
    std::vector<double> r(n, spec.background[0]);
    std::vector<double> g(n, spec.background[1]);
    std::vector<double> b(n, spec.background[2]);
    // owner[i]: topmost object covering pixel i, or -1.
    std::vector<int> owner(n, -1);
    for (int j = 0; j < num_objects; ++j) {
      const MotionSpec::Extent e = spec.extent(j, t);
      for (int y = e.y0; y <= e.y1; ++y) {
        for (int x = e.x0; x <= e.x1; ++x) {
          const int i = y * w + x;
          owner[i] = j;
          r[i] = spec.objects[j].color[0];
          g[i] = spec.objects[j].color[1];
          b[i] = spec.objects[j].color[2];
        }
      }
    }

    std::vector<std::uint8_t> scene(n, kBackground);
    std::vector<std::vector<std::uint8_t>> per_target(
        num_objects, std::vector<std::uint8_t>(n, kBackground));
    for (int i = 0; i < n; ++i) {
      if (owner[i] >= 0) {
        scene[i] = kSilhouette;
        per_target[owner[i]][i] = kSilhouette;
      }
    }

    if (spec.noise_sigma > 0.0) {
      for (int i = 0; i < n; ++i) {
        r[i] = std::clamp(r[i] + spec.noise_sigma * noise.next(), 0.0, 1.0);
        g[i] = std::clamp(g[i] + spec.noise_sigma * noise.next(), 0.0, 1.0);
        b[i] = std::clamp(b[i] + spec.noise_sigma * noise.next(), 0.0, 1.0);
      }
    }

    seq.frames.emplace_back(w, h, std::move(r), std::move(g), std::move(b));
    seq.scene_masks.emplace_back(w, h, std::move(scene));
    std::vector<LabelField> masks;
    masks.reserve(num_objects);
    for (int j = 0; j < num_objects; ++j) {
      masks.emplace_back(w, h, std::move(per_target[j]));
    }
    seq.target_masks.push_back(std::move(masks));
  }
  return seq;
}

namespace {

using nlohmann::json;

std::array<double, 2> read_vec2(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 2) {
    throw DataError(std::string(what) + " must be a [x, y] array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::array<double, 3> read_color(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 3) {
    throw DataError(std::string(what) + " must be an [r, g, b] array");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw DataError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

MotionSpec motion_spec_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("motion spec is not valid JSON: ") + e.what());
  }
  MotionSpec spec;
  try {
    reject_unknown(root,
                   {"width", "height", "frames", "noise_sigma", "background",
                    "objects"},
                   "motion spec");
    if (root.contains("width")) spec.width = root["width"].get<int>();
    if (root.contains("height")) spec.height = root["height"].get<int>();
    if (root.contains("frames")) spec.frames = root["frames"].get<int>();
    if (root.contains("noise_sigma")) {
      spec.noise_sigma = root["noise_sigma"].get<double>();
    }
    if (root.contains("background")) {
      spec.background = read_color(root["background"], "background");
    }
    if (!root.contains("objects") || !root["objects"].is_array() ||
        root["objects"].empty()) {
      throw DataError("motion spec needs a non-empty 'objects' array");
    }
    for (const json& o : root["objects"]) {
      reject_unknown(o,
                     {"position", "velocity", "acceleration", "half_size",
                      "growth", "color"},
                     "object");
      ObjectSpec obj;
      obj.position = read_vec2(o.at("position"), "position");
      if (o.contains("velocity")) {
        obj.velocity = read_vec2(o["velocity"], "velocity");
      }
      if (o.contains("acceleration")) {
        obj.acceleration = read_vec2(o["acceleration"], "acceleration");
      }
      if (o.contains("half_size")) obj.half_size = o["half_size"].get<double>();
      if (o.contains("growth")) obj.growth = o["growth"].get<double>();
      if (o.contains("color")) obj.color = read_color(o["color"], "color");
      spec.objects.push_back(obj);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("motion spec value has the wrong type: ") +
                    e.what());
  }
  spec.validate();
  return spec;
}

MotionSpec motion_spec_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open motion spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return motion_spec_from_json_text(buf.str());
}

}  // namespace dscrf
