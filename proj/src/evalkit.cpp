#include "jtm/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jtm/error.hpp"
#include "jtm/numfmt.hpp"
#include "jtm/parallel.hpp"
#include "jtm/png_io.hpp"

namespace jtm {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Kinect V1 joint indices.
enum Joint : std::size_t {
  kHipCenter, kSpine, kShoulderCenter, kHead,
  kShoulderLeft, kElbowLeft, kWristLeft, kHandLeft,
  kShoulderRight, kElbowRight, kWristRight, kHandRight,
  kHipLeft, kKneeLeft, kAnkleLeft, kFootLeft,
  kHipRight, kKneeRight, kAnkleRight, kFootRight,
  kJointCount
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t cls, std::uint64_t sample,
                          std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ cls) ^ sample) ^ stream);
}

Point3 lerp3(const Point3& a, const Point3& b, double t) {
  return {std::lerp(a.x, b.x, t), std::lerp(a.y, b.y, t), std::lerp(a.z, b.z, t)};
}

// Places elbow and wrist between a fixed shoulder and the given hand position.
void pose_arm(std::vector<Point3>& pose, std::size_t shoulder, std::size_t elbow,
              std::size_t wrist, std::size_t hand, const Point3& hand_pos) {
  pose[hand] = hand_pos;
  Point3 mid = lerp3(pose[shoulder], hand_pos, 0.5);
  mid.y -= 0.04;
  pose[elbow] = mid;
  pose[wrist] = lerp3(hand_pos, mid, 0.25);
}

Point3 lateral_hand(const Point3& shoulder, double side, double angle_rad, double reach) {
  return {shoulder.x + side * reach * std::cos(angle_rad), shoulder.y + reach * std::sin(angle_rad),
          shoulder.z - 0.05};
}

std::string sample_name(std::string_view label, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%03zu", index);
  return std::string(label) + "_" + buf;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%6.2f%%", 100.0 * v);
  return buf;
}

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<Fold> make_folds(const Corpus& corpus, const Protocol& protocol) {
  std::vector<Fold> folds;
  if (protocol.kind == Protocol::Kind::kFixedSplit) {
    std::map<std::string, std::size_t> seen;
    Fold fold;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const std::size_t position = seen[corpus[i].label]++;
      (position % 2 == 0 ? fold.train : fold.test).push_back(i);
    }
    folds.push_back(std::move(fold));
  } else {
    std::set<int> subjects;
    for (const auto& s : corpus) subjects.insert(s.subject);
    for (int subject : subjects) {
      Fold fold;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        (corpus[i].subject == subject ? fold.test : fold.train).push_back(i);
      }
      folds.push_back(std::move(fold));
    }
  }
  for (const auto& f : folds) {
    if (f.train.empty() || f.test.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "protocol leaves a fold without training or test samples");
    }
  }
  return folds;
}

using PlaneSet = std::array<JtmCanvas, 3>;

std::vector<PlaneSet> render_samples(const Corpus& corpus, std::span<const std::size_t> indices,
                                     const ViewAngles& view, const EncodingParams& params,
                                     const RenderOptions& render, unsigned threads) {
  std::vector<std::optional<PlaneSet>> slots(indices.size());
  parallel_for(indices.size(), resolve_threads(threads), [&](std::size_t i) {
    slots[i] = render_view(corpus[indices[i]].sequence, view, params, render);
  });
  std::vector<PlaneSet> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<std::string> corpus_labels(const Corpus& corpus) {
  std::set<std::string> labels;
  for (const auto& s : corpus) labels.insert(s.label);
  return {labels.begin(), labels.end()};
}

// Scores of one fold's test samples for each plane.
std::array<ScoreMatrix, 3> fold_scores(const Corpus& corpus, const Fold& fold,
                                       std::span<const ViewAngles> train_views,
                                       const ViewAngles& test_view, const EncodingParams& params,
                                       const EvalOptions& options, const KnnOptions& knn) {
  std::vector<PlaneSet> train_sets;
  std::vector<std::size_t> owner;
  for (const ViewAngles& view : train_views) {
    auto rendered = render_samples(corpus, fold.train, view, params, options.render, options.threads);
    for (std::size_t i = 0; i < rendered.size(); ++i) {
      train_sets.push_back(std::move(rendered[i]));
      owner.push_back(fold.train[i]);
    }
  }
  const auto test_sets =
      render_samples(corpus, fold.test, test_view, params, options.render, options.threads);

  std::array<ScoreMatrix, 3> out;
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<TrainImage> train;
    train.reserve(train_sets.size());
    for (std::size_t i = 0; i < train_sets.size(); ++i) {
      train.push_back({corpus[owner[i]].label, &train_sets[i][p]});
    }
    std::vector<TestImage> test;
    test.reserve(test_sets.size());
    for (std::size_t i = 0; i < test_sets.size(); ++i) {
      test.push_back({corpus[fold.test[i]].sample_id, &test_sets[i][p]});
    }
    out[p] = knn_scores(train, test, knn);
  }
  return out;
}

ScoreMatrix stack_rows(std::span<const ScoreMatrix> parts) {
  if (parts.size() == 1) return parts.front();
  std::vector<std::string> ids;
  std::vector<double> scores;
  for (const auto& m : parts) {
    ids.insert(ids.end(), m.sample_ids().begin(), m.sample_ids().end());
    scores.insert(scores.end(), m.scores().begin(), m.scores().end());
  }
  return {std::move(ids), parts.front().class_labels(), std::move(scores)};
}

std::size_t count_hits(const ScoreMatrix& m, std::span<const std::string> truth) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (m.class_labels()[argmax(m.row(r))] == truth[r]) ++hits;
  }
  return hits;
}

double ratio(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

// Running elementwise product with each row rescaled to max 1 after every
// factor; rescaling a row leaves its argmax unchanged and avoids underflow
// when dozens of matrices are multiplied.
class RunningProduct {
 public:
  void multiply(const ScoreMatrix& m) {
    if (!product_) {
      product_ = m.scores();
      cols_ = m.cols();
    } else {
      if (m.scores().size() != product_->size()) {
        throw Error(ErrorCode::kShapeMismatch, "running product shape changed");
      }
      for (std::size_t i = 0; i < product_->size(); ++i) (*product_)[i] *= m.scores()[i];
    }
    for (std::size_t r = 0; cols_ != 0 && r < product_->size() / cols_; ++r) {
      auto first = product_->begin() + static_cast<std::ptrdiff_t>(r * cols_);
      const double hi = *std::max_element(first, first + static_cast<std::ptrdiff_t>(cols_));
      if (hi > 0.0) {
        std::for_each(first, first + static_cast<std::ptrdiff_t>(cols_),
                      [hi](double& v) { v /= hi; });
      }
    }
    ids_ = m.sample_ids();
    labels_ = m.class_labels();
  }

  ScoreMatrix result() const { return {ids_, labels_, product_.value_or(std::vector<double>{})}; }

 private:
  std::optional<std::vector<double>> product_;
  std::size_t cols_ = 0;
  std::vector<std::string> ids_;
  std::vector<std::string> labels_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Corpus files

void write_corpus(const Corpus& corpus, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "sequences", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir);
  std::string manifest;
  for (const auto& s : corpus) {
    const std::string rel = "sequences/" + s.sample_id + ".jsonl";
    write_file_atomic((fs::path(dir) / rel).string(),
                      write_sequence(s.sequence, SequenceFormat::kCanonicalJson));
    json row;
    row["sample_id"] = s.sample_id;
    row["label"] = s.label;
    row["subject"] = s.subject;
    row["path"] = rel;
    manifest += row.dump() + "\n";
  }
  write_file_atomic((fs::path(dir) / "corpus.jsonl").string(), manifest);
}

Corpus read_corpus(const std::string& manifest_path) {
  fs::path path(manifest_path);
  if (fs::is_directory(path)) path /= "corpus.jsonl";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus manifest " + path.string());
  const fs::path base = path.parent_path();
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    json row;
    try {
      row = json::parse(line);
      LabeledSequence s;
      s.sample_id = row.at("sample_id").get<std::string>();
      s.label = row.at("label").get<std::string>();
      s.subject = row.value("subject", 0);
      const fs::path seq_path = base / row.at("path").get<std::string>();
      ParseOptions opts;
      opts.source_id = s.sample_id;
      s.sequence = read_sequence_file(seq_path.string(), std::nullopt, opts);
      corpus.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSyntax,
                  path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Synthetic actions

std::string_view to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::kCircleCw: return "circle_cw";
    case MotionKind::kCircleCcw: return "circle_ccw";
    case MotionKind::kSweepUniform: return "sweep_uniform";
    case MotionKind::kSweepEased: return "sweep_eased";
    case MotionKind::kArmsTogether: return "arms_together";
    case MotionKind::kArmsAlternate: return "arms_alternate";
  }
  return "circle_cw";
}

MotionKind parse_motion_kind(std::string_view name) {
  for (MotionKind k : {MotionKind::kCircleCw, MotionKind::kCircleCcw, MotionKind::kSweepUniform,
                       MotionKind::kSweepEased, MotionKind::kArmsTogether,
                       MotionKind::kArmsAlternate}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown motion '" + std::string(name) + "'");
}

std::vector<SyntheticClassSpec> default_synthetic_specs() {
  std::vector<SyntheticClassSpec> specs;
  for (MotionKind k : {MotionKind::kCircleCw, MotionKind::kCircleCcw, MotionKind::kSweepUniform,
                       MotionKind::kSweepEased, MotionKind::kArmsTogether,
                       MotionKind::kArmsAlternate}) {
    specs.push_back({std::string(to_string(k)), k});
  }
  return specs;
}

std::vector<SyntheticClassSpec> direction_magnitude_specs() {
  auto specs = default_synthetic_specs();
  specs.resize(4);
  return specs;
}

const std::vector<std::string>& kinect_v1_joint_names() {
  static const std::vector<std::string> names = {
      "HipCenter",     "Spine",      "ShoulderCenter", "Head",      "ShoulderLeft",
      "ElbowLeft",     "WristLeft",  "HandLeft",       "ShoulderRight", "ElbowRight",
      "WristRight",    "HandRight",  "HipLeft",        "KneeLeft",  "AnkleLeft",
      "FootLeft",      "HipRight",   "KneeRight",      "AnkleRight", "FootRight"};
  return names;
}

std::vector<Point3> rest_pose() {
  std::vector<Point3> p(kJointCount);
  const double z = 2.5;
  p[kHipCenter] = {0.0, 0.0, z};
  p[kSpine] = {0.0, 0.2, z};
  p[kShoulderCenter] = {0.0, 0.45, z};
  p[kHead] = {0.0, 0.65, z};
  // Subject's left side is at negative x.
  p[kShoulderLeft] = {-0.18, 0.42, z};
  p[kElbowLeft] = {-0.22, 0.15, z};
  p[kWristLeft] = {-0.24, -0.08, z};
  p[kHandLeft] = {-0.25, -0.15, z};
  p[kHipLeft] = {-0.10, -0.05, z};
  p[kKneeLeft] = {-0.11, -0.50, z};
  p[kAnkleLeft] = {-0.12, -0.90, z};
  p[kFootLeft] = {-0.12, -0.95, z - 0.08};
  for (auto [l, r] : {std::pair{kShoulderLeft, kShoulderRight}, {kElbowLeft, kElbowRight},
                      {kWristLeft, kWristRight}, {kHandLeft, kHandRight}, {kHipLeft, kHipRight},
                      {kKneeLeft, kKneeRight}, {kAnkleLeft, kAnkleRight},
                      {kFootLeft, kFootRight}}) {
    p[r] = {-p[l].x, p[l].y, p[l].z};
  }
  return p;
}

SkeletonSequence synthesize_motion(MotionKind kind, std::size_t frames, double scale) {
  if (frames < 2) throw Error(ErrorCode::kTooShort, "synthetic motion needs >= 2 frames");
  const std::vector<Point3> rest = rest_pose();
  SkeletonSequence seq;
  seq.joint_count = kJointCount;
  seq.joint_names = kinect_v1_joint_names();
  seq.source_id = std::string(to_string(kind));
  seq.frames.reserve(frames);

  constexpr double kPi = std::numbers::pi;
  const double raise_lo = -80.0 * kPi / 180.0;
  const double raise_hi = 80.0 * kPi / 180.0;
  const double reach = 0.55 * scale;

  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(frames - 1);
    std::vector<Point3> pose = rest;
    switch (kind) {
      case MotionKind::kCircleCw:
      case MotionKind::kCircleCcw: {
        const Point3 center{rest[kShoulderRight].x + 0.10, rest[kShoulderRight].y - 0.15,
                            rest[kShoulderRight].z - 0.35};
        const double radius = 0.2 * scale;
        // Clockwise walks the counter-clockwise angles backwards, so one circle is
        // exactly the other reversed in time.
        const std::size_t u = kind == MotionKind::kCircleCcw ? i : frames - 1 - i;
        const double phi =
            0.5 * kPi + 2.0 * kPi * static_cast<double>(u) / static_cast<double>(frames - 1);
        pose_arm(pose, kShoulderRight, kElbowRight, kWristRight, kHandRight,
                 {center.x + radius * std::cos(phi), center.y + radius * std::sin(phi), center.z});
        break;
      }
      case MotionKind::kSweepUniform:
      case MotionKind::kSweepEased: {
        const double s =
            kind == MotionKind::kSweepUniform ? t : 0.5 * (1.0 - std::cos(kPi * t));
        const double x = std::lerp(0.45, -0.25, s) * scale;
        const double y = 0.2 + 0.08 * scale * std::sin(kPi * s);
        pose_arm(pose, kShoulderRight, kElbowRight, kWristRight, kHandRight, {x, y, 2.2});
        break;
      }
      case MotionKind::kArmsTogether:
      case MotionKind::kArmsAlternate: {
        double a_left = t, a_right = t;
        if (kind == MotionKind::kArmsAlternate) {
          a_left = std::min(1.0, 2.0 * t);
          a_right = std::max(0.0, 2.0 * t - 1.0);
        }
        pose_arm(pose, kShoulderLeft, kElbowLeft, kWristLeft, kHandLeft,
                 lateral_hand(rest[kShoulderLeft], -1.0, std::lerp(raise_lo, raise_hi, a_left),
                              reach));
        pose_arm(pose, kShoulderRight, kElbowRight, kWristRight, kHandRight,
                 lateral_hand(rest[kShoulderRight], 1.0, std::lerp(raise_lo, raise_hi, a_right),
                              reach));
        break;
      }
    }
    seq.frames.push_back(Frame{std::move(pose)});
  }
  return seq;
}

Corpus generate_synthetic(std::span<const SyntheticClassSpec> specs, std::size_t per_class,
                          std::uint64_t seed) {
  if (per_class == 0) throw Error(ErrorCode::kInvalidArgument, "per_class must be >= 1");
  Corpus corpus;
  corpus.reserve(specs.size() * per_class);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    const SyntheticClassSpec& spec = specs[c];
    if (!(spec.jitter >= 0.0) || spec.min_frames < 2 || spec.max_frames < spec.min_frames) {
      throw Error(ErrorCode::kInvalidArgument, "bad synthetic class spec '" + spec.label + "'");
    }
    for (std::size_t k = 0; k < per_class; ++k) {
      std::mt19937_64 shape_rng(stream_seed(seed, c, k, 0));
      std::mt19937_64 noise_rng(stream_seed(seed, c, k, 1));
      std::uniform_int_distribution<std::size_t> frame_dist(spec.min_frames, spec.max_frames);
      std::uniform_real_distribution<double> scale_dist(0.9, 1.1);
      std::uniform_real_distribution<double> shift_dist(-0.2, 0.2);
      const std::size_t frames = frame_dist(shape_rng);
      const double scale = scale_dist(shape_rng);
      const Point3 shift{shift_dist(shape_rng), 0.5 * shift_dist(shape_rng),
                         1.5 * shift_dist(shape_rng)};

      SkeletonSequence seq = synthesize_motion(spec.motion, frames, scale);
      std::normal_distribution<double> noise(0.0, spec.jitter);
      for (auto& frame : seq.frames) {
        for (auto& p : frame.joints) {
          p = p + shift;
          if (spec.jitter > 0.0) {
            p.x += noise(noise_rng);
            p.y += noise(noise_rng);
            p.z += noise(noise_rng);
          }
        }
      }
      LabeledSequence sample;
      sample.sample_id = sample_name(spec.label, k);
      sample.label = spec.label;
      sample.subject = static_cast<int>(k % 5);
      seq.source_id = sample.sample_id;
      sample.sequence = std::move(seq);
      corpus.push_back(std::move(sample));
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Nearest-neighbour baseline

double pixel_distance(const JtmCanvas& a, const JtmCanvas& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimMismatch, "images differ in size");
  }
  const auto x = a.bytes();
  const auto y = b.bytes();
  std::uint64_t total = 0;
  // Blocks keep the 32-bit partial sum from overflowing (65536 * 255^2 < 2^32).
  constexpr std::size_t kBlock = 65536;
  for (std::size_t start = 0; start < x.size(); start += kBlock) {
    const std::size_t stop = std::min(x.size(), start + kBlock);
    std::uint32_t partial = 0;
    for (std::size_t i = start; i < stop; ++i) {
      const int d = static_cast<int>(x[i]) - static_cast<int>(y[i]);
      partial += static_cast<std::uint32_t>(d * d);
    }
    total += partial;
  }
  return std::sqrt(static_cast<double>(total) / static_cast<double>(x.size())) / 255.0;
}

ScoreMatrix knn_scores(std::span<const TrainImage> train, std::span<const TestImage> test,
                       const KnnOptions& options) {
  if (train.empty()) throw Error(ErrorCode::kInvalidArgument, "knn needs training images");
  if (options.k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (!(options.temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  }
  const int w = train.front().image->width();
  const int h = train.front().image->height();
  auto check_dims = [&](const JtmCanvas* img) {
    if (img->width() != w || img->height() != h) {
      throw Error(ErrorCode::kDimMismatch, "all images must share one size");
    }
  };
  std::map<std::string, std::size_t> class_index;
  for (const auto& t : train) {
    check_dims(t.image);
    class_index.emplace(t.label, 0);
  }
  for (const auto& t : test) check_dims(t.image);
  if (!options.class_labels.empty()) {
    for (const auto& [label, idx] : class_index) {
      if (std::find(options.class_labels.begin(), options.class_labels.end(), label) ==
          options.class_labels.end()) {
        throw Error(ErrorCode::kIdMismatch, "training label '" + label + "' is not a known class");
      }
    }
    for (const auto& label : options.class_labels) class_index.emplace(label, 0);
  }
  std::vector<std::string> labels;
  for (auto& [label, idx] : class_index) {
    idx = labels.size();
    labels.push_back(label);
  }
  std::vector<std::size_t> train_class(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) train_class[i] = class_index[train[i].label];

  const std::size_t classes = labels.size();
  std::vector<double> scores(test.size() * classes);
  parallel_for(test.size(), resolve_threads(options.threads), [&](std::size_t r) {
    std::vector<std::vector<double>> per_class(classes);
    for (std::size_t i = 0; i < train.size(); ++i) {
      per_class[train_class[i]].push_back(pixel_distance(*test[r].image, *train[i].image));
    }
    constexpr double kAbsent = std::numeric_limits<double>::infinity();
    std::vector<double> mean(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      auto& d = per_class[c];
      if (d.empty()) {
        mean[c] = kAbsent;
        continue;
      }
      const std::size_t k = std::min(options.k, d.size());
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += d[j];
      mean[c] = sum / static_cast<double>(k);
    }
    const double nearest = *std::min_element(mean.begin(), mean.end());
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      mean[c] = mean[c] == kAbsent ? 0.0 : std::exp(-(mean[c] - nearest) / options.temperature);
      z += mean[c];
    }
    for (std::size_t c = 0; c < classes; ++c) scores[r * classes + c] = mean[c] / z;
  });

  std::vector<std::string> ids;
  ids.reserve(test.size());
  for (const auto& t : test) ids.push_back(t.sample_id);
  return {std::move(ids), std::move(labels), std::move(scores)};
}

// ---------------------------------------------------------------------------
// Dataset export

std::string image_file_name(std::string_view sample_id, const ViewAngles& view, Plane plane) {
  return std::string(sample_id) + "__t" + format_double(view.theta) + "_p" +
         format_double(view.psi) + "__" + std::string(to_string(plane)) + ".png";
}

std::string manifest_line(const ManifestRow& row) {
  json j;
  j["sample_id"] = row.sample_id;
  j["label"] = row.label;
  j["theta"] = row.view.theta;
  j["psi"] = row.view.psi;
  j["plane"] = std::string(to_string(row.plane));
  if (!row.split.empty()) j["split"] = row.split;
  j["path"] = row.path;
  return j.dump();
}

std::string write_manifest(std::span<const ManifestRow> rows) {
  std::string out;
  for (const auto& r : rows) out += manifest_line(r) + "\n";
  return out;
}

std::vector<ManifestRow> parse_manifest(std::string_view text) {
  std::vector<ManifestRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    try {
      const json j = json::parse(line);
      ManifestRow r;
      r.sample_id = j.at("sample_id").get<std::string>();
      r.label = j.value("label", "");
      r.view = {j.at("theta").get<double>(), j.at("psi").get<double>()};
      r.plane = parse_plane(j.at("plane").get<std::string>());
      r.split = j.value("split", "");
      r.path = j.at("path").get<std::string>();
      rows.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSyntax, std::string("manifest: ") + e.what());
    }
  }
  return rows;
}

SplitRule parse_split_rule(std::string_view name) {
  if (name == "parity") return SplitRule::kParity;
  if (name == "train") return SplitRule::kAllTrain;
  if (name == "test") return SplitRule::kAllTest;
  throw Error(ErrorCode::kInvalidArgument, "unknown split rule '" + std::string(name) + "'");
}

std::map<std::string, std::string> assign_splits(std::span<const std::string> sample_ids,
                                                 std::span<const std::string> labels,
                                                 SplitRule rule) {
  std::map<std::string, std::string> out;
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < sample_ids.size(); ++i) {
    if (out.contains(sample_ids[i])) continue;
    std::string split;
    switch (rule) {
      case SplitRule::kParity: split = position[labels[i]]++ % 2 == 0 ? "train" : "test"; break;
      case SplitRule::kAllTrain: split = "train"; break;
      case SplitRule::kAllTest: split = "test"; break;
    }
    out.emplace(sample_ids[i], split);
  }
  return out;
}

DatasetWriter::DatasetWriter(std::string out_dir, std::map<std::string, std::string> splits)
    : out_dir_(std::move(out_dir)), splits_(std::move(splits)) {}

void DatasetWriter::add(const RenderedImage& img) {
  const auto split = splits_.find(img.sample_id);
  if (split == splits_.end()) {
    throw Error(ErrorCode::kIdMismatch, "no split assigned to '" + img.sample_id + "'");
  }
  ManifestRow row;
  row.sample_id = img.sample_id;
  row.label = img.label;
  row.view = img.view;
  row.plane = img.plane;
  row.split = split->second;
  const fs::path rel = fs::path(row.split) / std::string(to_string(img.plane)) / img.label /
                       image_file_name(img.sample_id, img.view, img.plane);
  row.path = rel.generic_string();
  if (!written_.insert(row.path).second) {
    throw Error(ErrorCode::kIo, "two images map to " + row.path);
  }
  const fs::path full = fs::path(out_dir_) / rel;
  std::error_code ec;
  fs::create_directories(full.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + full.parent_path().string());
  write_png(img.canvas, full.string());
  ++summary_.files_per_split[row.split];
  summary_.rows.push_back(std::move(row));
}

ExportSummary DatasetWriter::finish() {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir_);
  write_file_atomic((fs::path(out_dir_) / "manifest.jsonl").string(), write_manifest(summary_.rows));
  return std::move(summary_);
}

ExportSummary export_dataset(std::span<const RenderedImage> images, const std::string& out_dir,
                             SplitRule rule) {
  std::vector<std::string> ids, labels;
  for (const auto& img : images) {
    ids.push_back(img.sample_id);
    labels.push_back(img.label);
  }
  DatasetWriter writer(out_dir, assign_splits(ids, labels, rule));
  for (const auto& img : images) writer.add(img);
  return writer.finish();
}

// ---------------------------------------------------------------------------
// Experiment runners

std::string ExperimentReport::to_csv() const {
  std::string out = "level,front,top,side,fused_multiply,fused_average,fused_max\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.level)) + "," + format_double(r.front) + "," +
           format_double(r.top) + "," + format_double(r.side) + "," + format_double(r.fused) +
           "," + format_double(r.fused_average) + "," + format_double(r.fused_max) + "\n";
  }
  return out;
}

std::string ExperimentReport::to_table() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-14s %8s %8s %8s %8s %8s %8s\n", "level", "front", "top",
                "side", "multiply", "average", "max");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-14s %8s %8s %8s %8s %8s %8s\n",
                  std::string(to_string(r.level)).c_str(), percent(r.front).c_str(),
                  percent(r.top).c_str(), percent(r.side).c_str(), percent(r.fused).c_str(),
                  percent(r.fused_average).c_str(), percent(r.fused_max).c_str());
    out += buf;
  }
  return out;
}

PlaneScores score_planes(const Corpus& corpus, const Protocol& protocol,
                         const EvalOptions& options, const ViewAngles& test_view) {
  if (protocol.train_views.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "protocol needs at least one training view");
  }
  const auto folds = make_folds(corpus, protocol);
  KnnOptions knn = options.knn;
  if (knn.threads == 0) knn.threads = options.threads;
  if (knn.class_labels.empty()) knn.class_labels = corpus_labels(corpus);

  std::array<std::vector<ScoreMatrix>, 3> parts;
  PlaneScores out;
  for (const Fold& fold : folds) {
    auto scores = fold_scores(corpus, fold, protocol.train_views, test_view, options.encoding,
                              options, knn);
    for (std::size_t p = 0; p < 3; ++p) parts[p].push_back(std::move(scores[p]));
    for (std::size_t i : fold.test) out.truth.push_back(corpus[i].label);
  }
  for (std::size_t p = 0; p < 3; ++p) out.planes[p] = stack_rows(parts[p]);
  return out;
}

ExperimentReport run_ablation(const Corpus& corpus, std::span<const EncodingLevel> levels,
                              const Protocol& protocol, const EvalOptions& options) {
  ExperimentReport report;
  for (EncodingLevel level : levels) {
    EvalOptions opts = options;
    opts.encoding.level = level;
    const PlaneScores s = score_planes(corpus, protocol, opts);
    const std::size_t n = s.truth.size();
    report.rows.push_back({level, ratio(count_hits(s.planes[0], s.truth), n),
                           ratio(count_hits(s.planes[1], s.truth), n),
                           ratio(count_hits(s.planes[2], s.truth), n),
                           ratio(count_hits(multiply_fuse(s.planes), s.truth), n),
                           ratio(count_hits(average_fuse(s.planes), s.truth), n),
                           ratio(count_hits(max_fuse(s.planes), s.truth), n)});
  }
  return report;
}

std::string ViewGridReport::to_csv() const {
  std::string out = "theta,psi,front,top,side,fused,fused_with_natural\n";
  for (const auto& c : cells) {
    out += format_double(c.view.theta) + "," + format_double(c.view.psi) + "," +
           format_double(c.front) + "," + format_double(c.top) + "," + format_double(c.side) +
           "," + format_double(c.fused) + "," + format_double(c.fused_with_natural) + "\n";
  }
  out += "all,all,,,," + format_double(all_views_fused) + ",\n";
  return out;
}

std::string ViewGridReport::to_table() const {
  std::vector<double> thetas, psis;
  for (const auto& c : cells) {
    if (std::find(thetas.begin(), thetas.end(), c.view.theta) == thetas.end()) {
      thetas.push_back(c.view.theta);
    }
    if (std::find(psis.begin(), psis.end(), c.view.psi) == psis.end()) psis.push_back(c.view.psi);
  }
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%12s", "theta\\psi");
  out += buf;
  for (double p : psis) {
    std::snprintf(buf, sizeof(buf), " %8s", format_double(p).c_str());
    out += buf;
  }
  out += "\n";
  for (double t : thetas) {
    std::snprintf(buf, sizeof(buf), "%12s", format_double(t).c_str());
    out += buf;
    for (double p : psis) {
      auto it = std::find_if(cells.begin(), cells.end(), [&](const ViewCell& c) {
        return c.view.theta == t && c.view.psi == p;
      });
      std::snprintf(buf, sizeof(buf), " %8s",
                    it == cells.end() ? "-" : percent(it->fused).c_str());
      out += buf;
    }
    out += "\n";
  }
  out += "all views fused: " + percent(all_views_fused) + "\n";
  return out;
}

ViewGridReport run_viewgrid(const Corpus& corpus, const ViewGrid& grid, const Protocol& protocol,
                            const EvalOptions& options) {
  // Training and test samples are both rendered at the evaluated view.
  auto scores_at = [&](const ViewAngles& view) {
    Protocol p = protocol;
    p.train_views = {view};
    return score_planes(corpus, p, options, view);
  };
  const PlaneScores natural = scores_at(ViewAngles{});
  const std::size_t n = natural.truth.size();

  ViewGridReport report;
  RunningProduct all;
  for (const ViewAngles& view : grid) {
    const PlaneScores s = view == ViewAngles{} ? natural : scores_at(view);
    for (const auto& m : s.planes) all.multiply(m);
    const std::vector<ScoreMatrix> six = {s.planes[0], s.planes[1], s.planes[2],
                                          natural.planes[0], natural.planes[1], natural.planes[2]};
    report.cells.push_back({view, ratio(count_hits(s.planes[0], s.truth), n),
                            ratio(count_hits(s.planes[1], s.truth), n),
                            ratio(count_hits(s.planes[2], s.truth), n),
                            ratio(count_hits(multiply_fuse(s.planes), s.truth), n),
                            ratio(count_hits(multiply_fuse(six), s.truth), n)});
  }
  report.all_views_fused = ratio(count_hits(all.result(), natural.truth), n);
  return report;
}

}  // namespace jtm
