#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "jtm/error.hpp"
#include "jtm/evalkit.hpp"
#include "jtm/png_io.hpp"
#include "jtm/trajectory.hpp"

using namespace jtm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("jtm_evalkit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::vector<std::uint8_t>> tree_bytes(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), root).generic_string()] = read_file_bytes(e.path().string());
    }
  }
  return out;
}

SyntheticClassSpec spec(const std::string& label, MotionKind kind, double jitter = 0.002) {
  SyntheticClassSpec s;
  s.label = label;
  s.motion = kind;
  s.jitter = jitter;
  return s;
}

JtmCanvas flat(Rgb8 c) {
  JtmCanvas img(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) img.set({x, y}, c);
  return img;
}

}  // namespace

TEST_CASE("synthetic corpus shape and determinism") {
  const auto specs = default_synthetic_specs();
  CHECK(specs.size() == 6);
  CHECK(direction_magnitude_specs().size() == 4);
  const Corpus a = generate_synthetic(specs, 5, 99);
  const Corpus b = generate_synthetic(specs, 5, 99);
  REQUIRE(a.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sequence == b[i].sequence);
    CHECK(a[i].sequence.joint_count == 20);
    CHECK(validate(a[i].sequence).empty());
    CHECK(a[i].sequence.frame_count() >= 40);
    CHECK(a[i].sequence.frame_count() <= 60);
  }
  CHECK(a[7].sample_id == specs[1].label + "_002");
  CHECK(a[7].subject == 2);
  CHECK_FALSE(generate_synthetic(specs, 5, 100)[0].sequence == a[0].sequence);
}

TEST_CASE("zero-jitter circles are time reversals of each other") {
  const std::vector<SyntheticClassSpec> specs = {spec("cw", MotionKind::kCircleCw, 0.0)};
  const auto cw = synthesize_motion(MotionKind::kCircleCw, 45, 1.05);
  const auto ccw = synthesize_motion(MotionKind::kCircleCcw, 45, 1.05);
  CHECK(reverse_in_time(cw).frames == ccw.frames);
  const auto sample = generate_synthetic(specs, 1, 5)[0].sequence;
  CHECK(compute_speeds(sample).max() > 0.0);
}

TEST_CASE("jitter stays within five standard deviations of the clean path") {
  const double sigma = 0.01;
  const std::vector<SyntheticClassSpec> noisy = {spec("a", MotionKind::kSweepEased, sigma)};
  const std::vector<SyntheticClassSpec> clean = {spec("a", MotionKind::kSweepEased, 0.0)};
  const Corpus n = generate_synthetic(noisy, 100, 3);
  const Corpus c = generate_synthetic(clean, 100, 3);
  double worst = 0.0;
  for (std::size_t s = 0; s < 100; ++s) {
    REQUIRE(n[s].sequence.frame_count() == c[s].sequence.frame_count());
    for (std::size_t i = 0; i < n[s].sequence.frame_count(); ++i) {
      for (std::size_t k = 0; k < 20; ++k) {
        const Point3 d = n[s].sequence.at(i, k) - c[s].sequence.at(i, k);
        worst = std::max({worst, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
      }
    }
  }
  CHECK(worst < 5 * sigma);
  CHECK(worst > sigma);
}

TEST_CASE("corpus files round trip") {
  const fs::path dir = scratch("corpus");
  const Corpus a = generate_synthetic(direction_magnitude_specs(), 2, 4);
  write_corpus(a, dir.string());
  const Corpus b = read_corpus((dir / "corpus.jsonl").string());
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i].sample_id == a[i].sample_id);
    CHECK(b[i].label == a[i].label);
    CHECK(b[i].subject == a[i].subject);
    CHECK(b[i].sequence == a[i].sequence);
  }
  fs::remove_all(dir);
}

TEST_CASE("k-NN scores") {
  const JtmCanvas white = flat(Rgb8{255, 255, 255});
  const JtmCanvas black = flat(Rgb8{0, 0, 0});
  const JtmCanvas gray = flat(Rgb8{128, 128, 128});
  CHECK(pixel_distance(white, black) == 1.0);
  CHECK(pixel_distance(white, white) == 0.0);

  SUBCASE("identical image wins") {
    const std::vector<TrainImage> train = {{"w", &white}, {"b", &black}};
    const std::vector<TestImage> test = {{"t", &white}};
    const auto s = knn_scores(train, test);
    CHECK(s.class_labels() == std::vector<std::string>{"b", "w"});
    CHECK(predict(s)[0].second == "w");
    CHECK(s.at(0, 0) + s.at(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("equidistant classes tie and the first label wins") {
    const JtmCanvas up = flat(Rgb8{200, 200, 200});
    const JtmCanvas down = flat(Rgb8{56, 56, 56});
    const std::vector<TrainImage> train = {{"z", &up}, {"a", &down}};
    const std::vector<TestImage> test = {{"t", &gray}};
    const auto s = knn_scores(train, test);
    CHECK(s.at(0, 0) == s.at(0, 1));
    CHECK(predict(s)[0].second == "a");
  }
  SUBCASE("fixed class list keeps absent classes at zero") {
    const std::vector<TrainImage> train = {{"w", &white}};
    const std::vector<TestImage> test = {{"t", &gray}};
    KnnOptions opts;
    opts.class_labels = {"b", "w"};
    const auto s = knn_scores(train, test, opts);
    CHECK(s.class_labels() == std::vector<std::string>{"b", "w"});
    CHECK(s.at(0, 0) == 0.0);
    CHECK(s.at(0, 1) == 1.0);
  }
  SUBCASE("size mismatch") {
    const JtmCanvas small(4, 4);
    const std::vector<TrainImage> train = {{"w", &white}};
    const std::vector<TestImage> test = {{"t", &small}};
    try {
      knn_scores(train, test);
      FAIL("expected DIM_MISMATCH");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDimMismatch);
    }
  }
}

TEST_CASE("k-NN against an exhaustive scan") {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> b(0, 255);
  std::vector<JtmCanvas> images;
  for (int i = 0; i < 15; ++i) {
    JtmCanvas img(6, 5);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 6; ++x)
        img.set({x, y}, Rgb8{static_cast<std::uint8_t>(b(rng)), static_cast<std::uint8_t>(b(rng)),
                             static_cast<std::uint8_t>(b(rng))});
    images.push_back(img);
  }
  const std::vector<std::string> labels = {"a", "b", "c"};
  std::vector<TrainImage> train;
  for (int i = 0; i < 12; ++i) train.push_back({labels[i % 3], &images[i]});
  std::vector<TestImage> test;
  for (int i = 12; i < 15; ++i) test.push_back({"t" + std::to_string(i), &images[i]});

  for (std::size_t k : {1, 2, 4}) {
    KnnOptions opts;
    opts.k = k;
    opts.temperature = 0.05;
    const auto s = knn_scores(train, test, opts);
    for (std::size_t r = 0; r < test.size(); ++r) {
      std::vector<double> mean;
      for (const auto& label : labels) {
        std::vector<double> d;
        for (const auto& t : train) {
          if (t.label != label) continue;
          double sum = 0;
          const auto x = test[r].image->bytes(), y = t.image->bytes();
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double diff = (double(x[i]) - double(y[i])) / 255.0;
            sum += diff * diff;
          }
          d.push_back(std::sqrt(sum / double(x.size())));
        }
        std::sort(d.begin(), d.end());
        double acc = 0;
        for (std::size_t j = 0; j < k; ++j) acc += d[j];
        mean.push_back(acc / double(k));
      }
      const double lo = *std::min_element(mean.begin(), mean.end());
      double z = 0;
      for (double& m : mean) z += (m = std::exp(-(m - lo) / 0.05));
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(s.at(r, c) == doctest::Approx(mean[c] / z).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("manifest lines and file names") {
  CHECK(image_file_name("s_001", {15, -30}, Plane::kTop) == "s_001__t15_p-30__top.png");
  CHECK(image_file_name("s", {22.5, 0}, Plane::kSide) == "s__t22.5_p0__side.png");
  const std::vector<ManifestRow> rows = {{"a", "x", {0, 0}, Plane::kFront, "train", "p/a.png"},
                                         {"b", "y", {15, -45}, Plane::kSide, "", "b.png"}};
  const auto back = parse_manifest(write_manifest(rows));
  REQUIRE(back.size() == 2);
  CHECK(back[1].view == ViewAngles{15, -45});
  CHECK(back[1].plane == Plane::kSide);
  CHECK(back[0].split == "train");
  CHECK(back[0].path == "p/a.png");
}

TEST_CASE("dataset export layout and idempotence") {
  const fs::path dir = scratch("export");
  const Corpus corpus = generate_synthetic(
      std::vector<SyntheticClassSpec>{spec("up", MotionKind::kArmsTogether),
                                      spec("cw", MotionKind::kCircleCw)},
      2, 6);
  std::vector<RenderedImage> images;
  for (const auto& s : corpus) {
    const auto planes = render_view(s.sequence, {}, {});
    for (Plane p : kAllPlanes) {
      images.push_back({s.sample_id, s.label, {}, p, planes[static_cast<std::size_t>(p)]});
    }
  }
  const auto summary = export_dataset(images, dir.string());
  CHECK(summary.rows.size() == 12);
  CHECK(summary.files_per_split.at("train") == 6);
  CHECK(summary.files_per_split.at("test") == 6);
  CHECK(fs::exists(dir / "train" / "front" / "up" / "up_000__t0_p0__front.png"));
  CHECK(fs::exists(dir / "test" / "side" / "cw" / "cw_001__t0_p0__side.png"));

  const auto first = tree_bytes(dir);
  CHECK(first.size() == 13);
  export_dataset(images, dir.string());
  CHECK(tree_bytes(dir) == first);

  std::ifstream in(dir / "manifest.jsonl");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto rows = parse_manifest(text);
  REQUIRE(rows.size() == images.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const fs::path file = dir / rows[i].path;
    REQUIRE(fs::is_regular_file(file));
    const auto it = std::find_if(images.begin(), images.end(), [&](const RenderedImage& im) {
      return im.sample_id == rows[i].sample_id && im.plane == rows[i].plane;
    });
    REQUIRE(it != images.end());
    CHECK(read_png(file.string()).pixels() == it->canvas.pixels());
  }
  fs::remove_all(dir);
}

TEST_CASE("split rules") {
  const std::vector<std::string> ids = {"a0", "b0", "a1", "b1", "a2"};
  const std::vector<std::string> labels = {"a", "b", "a", "b", "a"};
  const auto s = assign_splits(ids, labels, SplitRule::kParity);
  CHECK(s.at("a0") == "train");
  CHECK(s.at("a1") == "test");
  CHECK(s.at("a2") == "train");
  CHECK(s.at("b1") == "test");
  CHECK(assign_splits(ids, labels, SplitRule::kAllTest).at("a0") == "test");
}

TEST_CASE("ablation on tiny corpora") {
  EvalOptions opts;
  opts.render.width = opts.render.height = 96;

  const Corpus single = generate_synthetic(
      std::vector<SyntheticClassSpec>{spec("only", MotionKind::kSweepUniform)}, 4, 1);
  const std::vector<EncodingLevel> levels = {EncodingLevel::kRaw, EncodingLevel::kFull};
  const auto r1 = run_ablation(single, levels, {}, opts);
  REQUIRE(r1.rows.size() == 2);
  for (const auto& row : r1.rows) {
    CHECK(row.front == 1.0);
    CHECK(row.top == 1.0);
    CHECK(row.side == 1.0);
    CHECK(row.fused == 1.0);
  }

  const Corpus pair = generate_synthetic(
      std::vector<SyntheticClassSpec>{spec("cw", MotionKind::kCircleCw),
                                      spec("ccw", MotionKind::kCircleCcw)},
      10, 2);
  const std::vector<EncodingLevel> two = {EncodingLevel::kRaw, EncodingLevel::kHue};
  const auto r2 = run_ablation(pair, two, {}, opts);
  CHECK(r2.rows[0].fused <= 0.8);
  CHECK(r2.rows[1].fused >= 0.9);
  CHECK(r2.to_csv().starts_with("level,front,top,side,fused_multiply,fused_average,fused_max\n"));

  Protocol loso;
  loso.kind = Protocol::Kind::kLeaveOneSubjectOut;
  const auto r3 = run_ablation(pair, std::vector<EncodingLevel>{EncodingLevel::kHue}, loso, opts);
  CHECK(r3.rows[0].fused >= 0.9);
}

TEST_CASE("score_planes rows are probability vectors") {
  EvalOptions opts;
  opts.render.width = opts.render.height = 64;
  const Corpus corpus = generate_synthetic(direction_magnitude_specs(), 4, 8);
  Protocol loso;
  loso.kind = Protocol::Kind::kLeaveOneSubjectOut;
  const PlaneScores s = score_planes(corpus, loso, opts);
  CHECK(s.truth.size() == corpus.size());
  for (const auto& m : s.planes) {
    CHECK(m.cols() == 4);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      double sum = 0;
      for (double v : m.row(r)) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("view grid runner") {
  EvalOptions opts;
  opts.render.width = opts.render.height = 64;
  const Corpus corpus = generate_synthetic(direction_magnitude_specs(), 4, 9);
  const auto ablation =
      run_ablation(corpus, std::vector<EncodingLevel>{EncodingLevel::kFull}, {}, opts);
  const auto single = run_viewgrid(corpus, ViewGrid::identity(), {}, opts);
  REQUIRE(single.cells.size() == 1);
  CHECK(single.cells[0].fused == ablation.rows[0].fused);
  CHECK(single.cells[0].front == ablation.rows[0].front);

  const auto grid = run_viewgrid(corpus, enumerate_views({-45, 45}, 45, {-45, 45}, 45), {}, opts);
  CHECK(grid.cells.size() == 9);
  CHECK(grid.all_views_fused >= 0.0);
  CHECK(grid.all_views_fused <= 1.0);
  const std::string csv = grid.to_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
  CHECK(grid.to_csv() == run_viewgrid(corpus, enumerate_views({-45, 45}, 45, {-45, 45}, 45), {},
                                      opts)
                             .to_csv());
}
