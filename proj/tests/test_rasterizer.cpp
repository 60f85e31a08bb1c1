#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "jtm/error.hpp"
#include "jtm/evalkit.hpp"
#include "jtm/rasterizer.hpp"
#include "jtm/trajectory.hpp"
#include "oracles.hpp"

using namespace jtm;

namespace {

std::set<PixelCoord> painted(PixelCoord a, PixelCoord b, int w = 256, int h = 256) {
  JtmCanvas c(w, h);
  draw_segment(c, a, b, Rgb8{0, 0, 0});
  const auto fp = footprint(c);
  return {fp.begin(), fp.end()};
}

SkeletonSequence translated(SkeletonSequence seq, Point3 d) {
  for (auto& f : seq.frames)
    for (auto& p : f.joints) p = p + d;
  return seq;
}

EncodingParams level(EncodingLevel l) {
  EncodingParams p;
  p.level = l;
  return p;
}

}  // namespace

TEST_CASE("quantization rounds half up") {
  CHECK(quantize_channel(0.0) == 0);
  CHECK(quantize_channel(1.0) == 255);
  CHECK(quantize_channel(0.5) == 128);  // 127.5 rounds up
  CHECK(quantize_channel(127.4999 / 255.0) == 127);
  CHECK(quantize_channel(2.0) == 255);
}

TEST_CASE("draw_segment basics") {
  CHECK(painted({7, 7}, {7, 7}) == std::set<PixelCoord>{{7, 7}});
  std::set<PixelCoord> row;
  for (int x = 2; x <= 9; ++x) row.insert({x, 5});
  CHECK(painted({2, 5}, {9, 5}) == row);
  CHECK(painted({0, 0}, {5, 3}) == oracle::line_pixels({0, 0}, {5, 3}));
  CHECK(painted({0, 0}, {5, 3}) ==
        std::set<PixelCoord>{{0, 0}, {1, 1}, {2, 1}, {3, 2}, {4, 2}, {5, 3}});
}

TEST_CASE("draw_segment matches the line oracle and ignores direction") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> c(0, 255);
  for (int i = 0; i < 2000; ++i) {
    const PixelCoord a{c(rng), c(rng)}, b{c(rng), c(rng)};
    const auto fwd = painted(a, b);
    CHECK(fwd == oracle::line_pixels(a, b));
    CHECK(fwd == painted(b, a));
  }
  // Exact half-way ties in both orientations.
  CHECK(painted({0, 0}, {4, 2}) == painted({4, 2}, {0, 0}));
  CHECK(painted({0, 0}, {2, 4}) == oracle::line_pixels({2, 4}, {0, 0}));
}

TEST_CASE("thick lines are clipped to the canvas") {
  JtmCanvas c(10, 10);
  draw_segment(c, {0, 0}, {9, 0}, Rgb8{0, 0, 0}, 3);
  CHECK(footprint(c).size() == 20);  // rows 0 and 1; row -1 is clipped
}

TEST_CASE("footprint") {
  JtmCanvas c(16, 8);
  CHECK(footprint(c).empty());
  c.set({3, 4}, Rgb8{1, 2, 3});
  CHECK(footprint(c) == std::vector<PixelCoord>{{3, 4}});
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> x(0, 15), y(0, 7);
  for (int i = 0; i < 30; ++i) c.set({x(rng), y(rng)}, Rgb8{0, 0, 0});
  std::size_t scan = 0;
  for (int yy = 0; yy < 8; ++yy)
    for (int xx = 0; xx < 16; ++xx) scan += !(c.at({xx, yy}) == Rgb8{});
  CHECK(footprint(c).size() == scan);
}

TEST_CASE("world_to_pixel fits the box") {
  const NormalizationBox box{0, 0, 2, 2, 0.05};
  CHECK(world_to_pixel({0, 0}, box, 256, 256) == PixelCoord{13, 242});
  CHECK(world_to_pixel({2, 2}, box, 256, 256) == PixelCoord{242, 13});
  const PixelCoord center = world_to_pixel({1, 1}, box, 256, 256);
  CHECK(std::abs(center.x - 128) <= 1);
  CHECK(std::abs(center.y - 128) <= 1);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-100, 100), frac(0, 1);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const NormalizationBox bx{std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d), 0.05};
    const Point2 p{bx.min_u + frac(rng) * (bx.max_u - bx.min_u),
                   bx.min_v + frac(rng) * (bx.max_v - bx.min_v)};
    const PixelCoord px = world_to_pixel(p, bx, 200, 120);
    CHECK(px.x >= 0);
    CHECK(px.x < 200);
    CHECK(px.y >= 0);
    CHECK(px.y < 120);
  }
}

TEST_CASE("a joint moving right at HUE walks the jet colormap left to right") {
  SkeletonSequence seq;
  seq.joint_count = 1;
  for (int i = 0; i < 40; ++i) seq.frames.push_back(Frame{{{0.01 * i, 0.0, 2.0}}});
  const JtmCanvas img = render_jtm(seq, Plane::kFront, {}, level(EncodingLevel::kHue));
  const auto& jet = ColorMap::jet().entries();
  int prev = -1;
  std::size_t columns = 0;
  for (int x = 0; x < img.width(); ++x) {
    for (int y = 0; y < img.height(); ++y) {
      const Rgb8 px = img.at({x, y});
      if (px == Rgb8{}) continue;
      int idx = -1;
      for (std::size_t i = 0; i < jet.size(); ++i) {
        if (quantize(jet[i]) == px) {
          idx = static_cast<int>(i);
          break;
        }
      }
      REQUIRE(idx >= 0);
      CHECK(idx >= prev);
      prev = idx;
      ++columns;
    }
  }
  CHECK(columns > 200);
  CHECK(prev == 255);
}

TEST_CASE("a static sequence renders one dot per joint at minimum brightness") {
  SkeletonSequence seq;
  seq.joint_count = 3;
  const Frame f{{{0, 0, 2}, {1, 0, 2}, {0, 1, 2}}};
  seq.frames = {f, f, f};
  const JtmCanvas img = render_jtm(seq, Plane::kFront, {}, level(EncodingLevel::kFull));
  const auto fp = footprint(img);
  CHECK(fp.size() == 3);
  for (const auto& p : fp) CHECK(img.at(p) == Rgb8{0, 0, 0});
}

TEST_CASE("cw and ccw circles: same footprint at RAW, different colors at HUE") {
  const auto cw = synthesize_motion(MotionKind::kCircleCw, 50);
  const auto ccw = synthesize_motion(MotionKind::kCircleCcw, 50);
  CHECK(reverse_in_time(cw).frames == ccw.frames);
  for (Plane p : kAllPlanes) {
    const auto a = render_jtm(cw, p, {}, level(EncodingLevel::kRaw));
    const auto b = render_jtm(ccw, p, {}, level(EncodingLevel::kRaw));
    CHECK(footprint(a) == footprint(b));
  }
  const auto a = render_jtm(cw, Plane::kFront, {}, level(EncodingLevel::kHue));
  const auto b = render_jtm(ccw, Plane::kFront, {}, level(EncodingLevel::kHue));
  CHECK_FALSE(a == b);
}

TEST_CASE("render_all agrees with render_jtm and does not depend on threads") {
  std::mt19937_64 rng(24);
  const auto seq = oracle::random_sequence(rng, 12, 6);
  const ViewGrid grid = enumerate_views({0, 30}, 15, {-15, 15}, 15);
  const auto params = level(EncodingLevel::kFull);
  RenderOptions opts;
  opts.width = 64;
  opts.height = 48;
  const auto one = render_all(seq, grid, params, opts, 1);
  const auto many = render_all(seq, grid, params, opts, 8);
  REQUIRE(one.size() == grid.size());
  for (std::size_t v = 0; v < grid.size(); ++v) {
    CHECK(one[v].view == grid[v]);
    for (Plane p : kAllPlanes) {
      CHECK(one[v].plane(p) == many[v].plane(p));
      CHECK(one[v].plane(p) == render_jtm(seq, p, grid[v], params, opts));
      CHECK(one[v].plane(p).plane() == p);
    }
  }
  CHECK(render_all(seq, default_view_grid(), params, opts).size() * 3 == 84);
}

TEST_CASE("translation invariance on random sequences") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> off(-3, 3);
  RenderOptions opts;
  opts.width = opts.height = 96;
  for (int trial = 0; trial < 20; ++trial) {
    const auto seq = oracle::random_sequence(rng, 8, 5);
    const auto moved = translated(seq, {off(rng), off(rng), off(rng)});
    for (EncodingLevel l : {EncodingLevel::kRaw, EncodingLevel::kHue, EncodingLevel::kFull}) {
      const auto a = render_view(seq, {}, level(l), opts);
      const auto b = render_view(moved, {}, level(l), opts);
      for (std::size_t p = 0; p < 3; ++p) CHECK(a[p] == b[p]);
    }
  }
}

TEST_CASE("each plane ignores offsets along its dropped axis") {
  std::mt19937_64 rng(26);
  const auto seq = oracle::random_sequence(rng, 10, 4);
  const auto params = level(EncodingLevel::kFull);
  CHECK(render_jtm(seq, Plane::kFront, {}, params) ==
        render_jtm(translated(seq, {0, 0, 3.7}), Plane::kFront, {}, params));
  CHECK(render_jtm(seq, Plane::kTop, {}, params) ==
        render_jtm(translated(seq, {0, -1.3, 0}), Plane::kTop, {}, params));
  CHECK(render_jtm(seq, Plane::kSide, {}, params) ==
        render_jtm(translated(seq, {2.2, 0, 0}), Plane::kSide, {}, params));
}

TEST_CASE("time reversal keeps the footprint at every level") {
  // Random joints all fall in the left part, whose colors never render as
  // background white.
  std::mt19937_64 rng(27);
  RenderOptions opts;
  opts.width = opts.height = 128;
  for (int trial = 0; trial < 10; ++trial) {
    const auto seq = oracle::random_sequence(rng, 9, 4);
    const auto rev = reverse_in_time(seq);
    for (EncodingLevel l : kAllLevels) {
      const auto a = render_view(seq, {15, -30}, level(l), opts);
      const auto b = render_view(rev, {15, -30}, level(l), opts);
      for (std::size_t p = 0; p < 3; ++p) CHECK(footprint(a[p]) == footprint(b[p]));
    }
  }
}

TEST_CASE("render options are validated") {
  SkeletonSequence seq;
  seq.joint_count = 1;
  seq.frames = {Frame{{{0, 0, 0}}}, Frame{{{1, 0, 0}}}};
  RenderOptions bad;
  bad.margin = 0.5;
  CHECK_THROWS_AS(render_jtm(seq, Plane::kFront, {}, {}, bad), Error);
  bad = {};
  bad.thickness = 0;
  CHECK_THROWS_AS(render_jtm(seq, Plane::kFront, {}, {}, bad), Error);
}
