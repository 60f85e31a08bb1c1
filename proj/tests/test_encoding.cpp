#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "jtm/encoding.hpp"
#include "jtm/error.hpp"

using namespace jtm;

namespace {

double tent(double x, double center) {
  return std::clamp(1.5 - std::abs(4.0 * x - center), 0.0, 1.0);
}

// Textbook HSV to RGB, sector by sector.
Rgb hsv_oracle(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = v - c;
  return {r + m, g + m, b + m};
}

EncodingParams at_level(EncodingLevel level) {
  EncodingParams p;
  p.level = level;
  return p;
}

}  // namespace

TEST_CASE("jet endpoints and midpoint") {
  const ColorMap& jet = ColorMap::jet();
  CHECK(sample_colormap(jet, 0.0) == Rgb{0, 0, 0.5});
  CHECK(sample_colormap(jet, 1.0) == Rgb{0.5, 0, 0});
  // l = 0.5 reads index round(127.5) = 128, x = 128/255.
  CHECK(colormap_index(0.5) == 128);
  const double x = 128.0 / 255.0;
  const Rgb mid = sample_colormap(jet, 0.5);
  CHECK(mid.r == doctest::Approx(tent(x, 3)).epsilon(1e-15));
  CHECK(mid.g == doctest::Approx(tent(x, 2)).epsilon(1e-15));
  CHECK(mid.b == doctest::Approx(tent(x, 1)).epsilon(1e-15));
  CHECK(mid.g == 1.0);
}

TEST_CASE("colormap tables") {
  const auto& jet = ColorMap::jet().entries();
  const auto& rev = ColorMap::jet_reversed().entries();
  const auto& gray = ColorMap::grayscale().entries();
  for (std::size_t i = 0; i < ColorMap::kSize; ++i) {
    CHECK(rev[i] == jet[ColorMap::kSize - 1 - i]);
    CHECK(gray[i].r == gray[i].g);
    CHECK(gray[i].g == gray[i].b);
    if (i > 0) CHECK(gray[i].r < gray[i - 1].r);
  }
  CHECK(gray.front().r == doctest::Approx(0.8));
  CHECK(gray.back().r == 0.0);
  CHECK_THROWS_AS(sample_colormap(ColorMap::jet(), 1.0001), Error);
  CHECK_THROWS_AS(sample_colormap(ColorMap::jet(), -0.1), Error);
}

TEST_CASE("colormap CSV round trip") {
  const ColorMap back = ColorMap::from_csv(ColorMap::jet().to_csv());
  CHECK(back.entries() == ColorMap::jet().entries());
}

TEST_CASE("hue position") {
  CHECK(hue_position(6, 7) == 1.0);
  CHECK(hue_position(1, 2) == 1.0);
  CHECK(hue_position(3, 7) == 0.5);
  for (std::size_t n = 2; n < 500; ++n) CHECK(hue_position(n - 1, n) == 1.0);
  CHECK_THROWS_AS(hue_position(0, 5), Error);
  CHECK_THROWS_AS(hue_position(5, 5), Error);
}

TEST_CASE("saturation and brightness") {
  EncodingParams p;
  p.s_min = 0.2;
  p.s_max = 0.8;
  CHECK(saturation(0.3, 1.2, p) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(saturation(1.2, 1.2, p) == 0.8);
  CHECK(saturation(0.0, 1.2, p) == 0.2);
  CHECK(saturation(0.0, 0.0, p) == 0.2);
  EncodingParams b;
  CHECK(brightness(0.9, 1.8, b) == 0.5);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    EncodingParams q;
    q.s_min = u(rng) * 0.5;
    q.s_max = q.s_min + u(rng) * (1 - q.s_min);
    q.b_min = u(rng) * 0.5;
    q.b_max = q.b_min + u(rng) * (1 - q.b_min);
    const double vmax = 0.01 + u(rng);
    CHECK(saturation(vmax, vmax, q) == q.s_max);
    CHECK(brightness(vmax, vmax, q) == q.b_max);
    CHECK(saturation(0, vmax, q) == q.s_min);
    CHECK(brightness(0, vmax, q) == q.b_min);
    const double v1 = u(rng) * vmax, v2 = u(rng) * vmax;
    const double s1 = saturation(std::min(v1, v2), vmax, q);
    const double s2 = saturation(std::max(v1, v2), vmax, q);
    CHECK(s1 <= s2);
    CHECK(s1 >= q.s_min);
    CHECK(s2 <= q.s_max);
  }
}

TEST_CASE("parameter validation") {
  EncodingParams p;
  p.s_min = 0.7;
  p.s_max = 0.3;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.b_max = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("HSV conversion round trip") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const Rgb c{u(rng), u(rng), u(rng)};
    const Hsv h = rgb_to_hsv(c);
    const Rgb back = hsv_to_rgb(h);
    CHECK(back.r == doctest::Approx(c.r).epsilon(1e-12));
    CHECK(back.g == doctest::Approx(c.g).epsilon(1e-12));
    CHECK(back.b == doctest::Approx(c.b).epsilon(1e-12));
    const Rgb o = hsv_oracle(h.h, h.s, h.v);
    CHECK(o.r == doctest::Approx(back.r).epsilon(1e-12));
    CHECK(o.g == doctest::Approx(back.g).epsilon(1e-12));
    CHECK(o.b == doctest::Approx(back.b).epsilon(1e-12));
  }
}

TEST_CASE("Kinect partition") {
  const JointPartition p = JointPartition::kinect_v1();
  REQUIRE(p.size() == 20);
  for (std::size_t k : {0, 1, 2, 3}) CHECK(p.part_of(k) == BodyPart::kMiddle);
  for (std::size_t k : {4, 5, 6, 7, 12, 13, 14, 15}) CHECK(p.part_of(k) == BodyPart::kLeft);
  for (std::size_t k : {8, 9, 10, 11, 16, 17, 18, 19}) CHECK(p.part_of(k) == BodyPart::kRight);
  CHECK(JointPartition::parse("# three joints\nleft right\nmiddle\n").parts() ==
        std::vector<BodyPart>{BodyPart::kLeft, BodyPart::kRight, BodyPart::kMiddle});
  CHECK(JointPartition::from_names({"HandLeft", "right_knee", "Head"}).parts() ==
        std::vector<BodyPart>{BodyPart::kLeft, BodyPart::kRight, BodyPart::kMiddle});
  CHECK(JointPartition::default_for(20, {}) == p);
  CHECK(JointPartition::default_for(3, {}) == JointPartition::uniform(3, BodyPart::kLeft));
}

TEST_CASE("colorize by level") {
  const std::size_t n = 11;
  CHECK(colorize_segment(3, 5, 0.2, 1.0, n, at_level(EncodingLevel::kRaw)) == Rgb{0, 0, 0});
  for (std::size_t k : {0, 4, 8}) {
    CHECK(colorize_segment(n - 1, k, 0.3, 1.0, n, at_level(EncodingLevel::kHue)) ==
          ColorMap::jet().entries().back());
  }
  // Parts: left joint 4 uses jet, right joint 8 its reverse, middle joint 0 gray.
  const auto parts = at_level(EncodingLevel::kHueParts);
  CHECK(colorize_segment(2, 4, 0, 1, n, parts) == sample_colormap(ColorMap::jet(), 0.2));
  CHECK(colorize_segment(2, 8, 0, 1, n, parts) == sample_colormap(ColorMap::jet_reversed(), 0.2));
  CHECK(colorize_segment(2, 0, 0, 1, n, parts) == sample_colormap(ColorMap::grayscale(), 0.2));
}

TEST_CASE("FULL middle joint at peak speed, last step") {
  EncodingParams p = at_level(EncodingLevel::kFull);
  p.s_min = 0.1;
  p.s_max = 0.9;
  p.b_min = 0.2;
  p.b_max = 0.7;
  const Rgb got = colorize_segment(9, 0, 2.0, 2.0, 10, p);
  // Last gray entry is black: hue 0, saturation stays 0, value becomes b_max.
  const Rgb want = hsv_oracle(0.0, 0.0, 0.7);
  CHECK(got.r == doctest::Approx(want.r).epsilon(1e-15));
  CHECK(got.g == doctest::Approx(want.g).epsilon(1e-15));
  CHECK(got.b == doctest::Approx(want.b).epsilon(1e-15));
}

TEST_CASE("FULL left joint overrides S and V of the jet color") {
  EncodingParams p = at_level(EncodingLevel::kFull);
  const std::size_t n = 5, q = 2;
  const double v = 0.25, vmax = 1.0;
  const Hsv base = rgb_to_hsv(sample_colormap(ColorMap::jet(), 0.5));
  const Rgb want = hsv_oracle(base.h, 0.25, 0.25);
  const Rgb got = colorize_segment(q, 4, v, vmax, n, p);
  CHECK(got.r == doctest::Approx(want.r).epsilon(1e-12));
  CHECK(got.g == doctest::Approx(want.g).epsilon(1e-12));
  CHECK(got.b == doctest::Approx(want.b).epsilon(1e-12));
}

TEST_CASE("constant S = B = 1 reduces FULL to HUE_PARTS on saturated colors") {
  EncodingParams full = at_level(EncodingLevel::kFull);
  full.s_min = full.s_max = full.b_min = full.b_max = 1.0;
  const EncodingParams parts = at_level(EncodingLevel::kHueParts);
  const std::size_t n = 256;
  std::size_t checked = 0;
  for (std::size_t q = 1; q < n; ++q) {
    for (std::size_t k : {4, 8}) {
      const Rgb base = colorize_segment(q, k, 0, 1, n, parts);
      const double hi = std::max({base.r, base.g, base.b});
      const double lo = std::min({base.r, base.g, base.b});
      if (hi != 1.0 || lo != 0.0) continue;
      const Rgb got = colorize_segment(q, k, 0.3, 1.0, n, full);
      CHECK(got.r == doctest::Approx(base.r).epsilon(1e-12));
      CHECK(got.g == doctest::Approx(base.g).epsilon(1e-12));
      CHECK(got.b == doctest::Approx(base.b).epsilon(1e-12));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("hue index is monotone in q") {
  const std::size_t n = 97;
  std::size_t prev = 0;
  for (std::size_t q = 1; q < n; ++q) {
    const std::size_t idx = colormap_index(hue_position(q, n));
    CHECK(idx >= prev);
    prev = idx;
  }
  CHECK(prev == 255);
}

TEST_CASE("level names") {
  for (EncodingLevel l : kAllLevels) CHECK(parse_level(to_string(l)) == l);
  CHECK(parse_level("hue-parts-sat") == EncodingLevel::kHuePartsSat);
  CHECK_THROWS_AS(parse_level("bogus"), Error);
}

TEST_CASE("partition size must match at part levels") {
  EncodingParams p = at_level(EncodingLevel::kHueParts);
  p.partition = JointPartition::uniform(3, BodyPart::kLeft);
  CHECK_THROWS_AS(Colorizer(p, 4), Error);
  p.level = EncodingLevel::kHue;
  CHECK_NOTHROW(Colorizer(p, 4));
}
