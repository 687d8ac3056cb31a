#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iterator>

#include "dscrf/simulate.hpp"
#include "test_util.hpp"

using namespace dscrf;

namespace {

MotionSpec base_spec() {
  MotionSpec s;
  s.width = 96;
  s.height = 96;
  s.frames = 10;
  s.noise_sigma = 0.0;
  ObjectSpec o;
  o.position = {40, 40};
  o.half_size = 4;
  s.objects.push_back(o);
  return s;
}

}  // namespace

TEST_CASE("accelerated centers follow the discrete kinematics") {
  MotionSpec s = base_spec();
  s.objects[0].velocity = {1.0, 0.0};
  s.objects[0].acceleration = {0.2, 0.0};
  s.validate();
  const double expected[] = {0.0, 1.0, 2.2, 3.6, 5.2};
  for (int t = 0; t < 5; ++t) {
    CHECK(s.extent(0, t).cx - 40.0 == doctest::Approx(expected[t]).epsilon(1e-12));
    CHECK(s.extent(0, t).cy == doctest::Approx(40.0));
  }
}

TEST_CASE("constant velocity means exactly linear centers") {
  MotionSpec s = base_spec();
  s.objects[0].velocity = {1.5, -0.5};
  for (int t = 0; t < s.frames; ++t) {
    CHECK(s.extent(0, t).cx == doctest::Approx(40.0 + 1.5 * t));
    CHECK(s.extent(0, t).cy == doctest::Approx(40.0 - 0.5 * t));
  }
}

TEST_CASE("growth makes the mask area follow (2(s+gt)+1)^2") {
  MotionSpec s = base_spec();
  s.objects[0].growth = 0.5;
  const Sequence seq = generate(s, 3);
  for (int t = 0; t < s.frames; ++t) {
    const double side = 2.0 * (4.0 + 0.5 * t) + 1.0;
    const int count =
        static_cast<int>(silhouette_pixels(seq.scene_masks[t]).size());
    CHECK(count == static_cast<int>(std::lround(side * side)));
  }
}

TEST_CASE("noise-free frames match the masks exactly") {
  MotionSpec s = base_spec();
  s.objects[0].velocity = {2.0, 1.0};
  const Sequence seq = generate(s, 9);
  for (int t = 0; t < s.frames; ++t) {
    for (int i = 0; i < 96 * 96; ++i) {
      const bool is_object = seq.frames[t].r(i) == s.objects[0].color[0] &&
                             seq.frames[t].g(i) == s.objects[0].color[1];
      CHECK(is_object == (seq.scene_masks[t].at(i) == kSilhouette));
    }
  }
}

TEST_CASE("generation is deterministic per seed") {
  MotionSpec s = base_spec();
  s.noise_sigma = 0.05;
  s.objects[0].velocity = {1.0, 1.0};
  const Sequence a = generate(s, 42);
  const Sequence b = generate(s, 42);
  const Sequence c = generate(s, 43);
  bool all_equal = true;
  bool any_differs_across_seeds = false;
  for (int t = 0; t < s.frames; ++t) {
    CHECK(a.scene_masks[t] == b.scene_masks[t]);
    for (int i = 0; i < 96 * 96; ++i) {
      all_equal = all_equal && a.frames[t].r(i) == b.frames[t].r(i);
      any_differs_across_seeds =
          any_differs_across_seeds || a.frames[t].r(i) != c.frames[t].r(i);
    }
  }
  CHECK(all_equal);
  CHECK(any_differs_across_seeds);
}

TEST_CASE("objects leaving the canvas are rejected up front") {
  MotionSpec s = base_spec();
  s.objects[0].velocity = {8.0, 0.0};  // exits long before the last frame
  CHECK_THROWS_AS(s.validate(), DataError);
  CHECK_THROWS_AS(generate(s, 0), DataError);
}

TEST_CASE("spec validation") {
  MotionSpec s = base_spec();
  s.frames = 2;
  CHECK_THROWS_AS(s.validate(), DataError);
  s = base_spec();
  s.objects.clear();
  CHECK_THROWS_AS(s.validate(), DataError);
  s = base_spec();
  s.objects[0].color = {1.5, 0.0, 0.0};
  CHECK_THROWS_AS(s.validate(), DataError);
  s = base_spec();
  s.noise_sigma = -0.1;
  CHECK_THROWS_AS(s.validate(), DataError);
}

TEST_CASE("occlusion-aware per-target masks") {
  MotionSpec s;
  s.width = 32;
  s.height = 32;
  s.frames = 3;
  s.noise_sigma = 0.0;
  ObjectSpec under;
  under.position = {14, 14};
  under.half_size = 3;
  ObjectSpec over;
  over.position = {16, 14};
  over.half_size = 4;
  over.color = {0.5, 0.5, 0.5};
  s.objects = {under, over};  // second object draws on top
  const Sequence seq = generate(s, 0);
  const auto visible_under = silhouette_pixels(seq.target_masks[0][0]);
  const auto visible_over = silhouette_pixels(seq.target_masks[0][1]);
  CHECK(visible_over.size() == 81);  // full 9x9, drawn last
  CHECK(visible_under.size() < 49);  // partially hidden 7x7
  // no pixel belongs to both targets
  std::vector<int> inter;
  std::set_intersection(visible_under.begin(), visible_under.end(),
                        visible_over.begin(), visible_over.end(),
                        std::back_inserter(inter));
  CHECK(inter.empty());
  // scene mask is the union
  CHECK(silhouette_pixels(seq.scene_masks[0]).size() ==
        visible_under.size() + visible_over.size());
}

TEST_CASE("motion spec JSON parsing") {
  const std::string good = R"({
    "width": 48, "height": 40, "frames": 8, "noise_sigma": 0.01,
    "background": [0.1, 0.1, 0.1],
    "objects": [{
      "position": [20, 20], "velocity": [1, 0.5],
      "acceleration": [0.1, 0], "half_size": 4, "growth": 0.2,
      "color": [0.9, 0.8, 0.7]
    }]
  })";
  const MotionSpec s = motion_spec_from_json_text(good);
  CHECK(s.width == 48);
  CHECK(s.frames == 8);
  REQUIRE(s.objects.size() == 1);
  CHECK(s.objects[0].velocity[0] == doctest::Approx(1.0));
  CHECK(s.objects[0].growth == doctest::Approx(0.2));

  CHECK_THROWS_AS(motion_spec_from_json_text("{"), DataError);
  CHECK_THROWS_AS(motion_spec_from_json_text(R"({"objects": []})"), DataError);
  CHECK_THROWS_AS(
      motion_spec_from_json_text(
          R"({"objects": [{"position": [1, 1]}], "mystery": 3})"),
      DataError);
  CHECK_THROWS_AS(
      motion_spec_from_json_text(
          R"({"objects": [{"position": [1, 1], "speed": 2}]})"),
      DataError);
}
