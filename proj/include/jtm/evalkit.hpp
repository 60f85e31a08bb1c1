#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jtm/encoding.hpp"
#include "jtm/fusion.hpp"
#include "jtm/geometry.hpp"
#include "jtm/rasterizer.hpp"
#include "jtm/skeleton_io.hpp"

namespace jtm {

// ---------------------------------------------------------------------------
// Labeled corpora

struct LabeledSequence {
  std::string sample_id;
  std::string label;
  int subject = 0;
  SkeletonSequence sequence;
};

using Corpus = std::vector<LabeledSequence>;

/// Writes `<dir>/corpus.jsonl` (sample_id, label, subject, path) plus one
/// canonical sequence file per sample under `<dir>/sequences/`.
void write_corpus(const Corpus& corpus, const std::string& dir);
/// Reads a corpus manifest; sequence paths are relative to the manifest's directory.
Corpus read_corpus(const std::string& manifest_path);

// ---------------------------------------------------------------------------
// Synthetic actions

enum class MotionKind {
  kCircleCw,       // right hand draws a clockwise circle in the front plane
  kCircleCcw,      // same circle, counter-clockwise
  kSweepUniform,   // right hand sweeps across the body at constant speed
  kSweepEased,     // same path, slow-fast-slow speed profile
  kArmsTogether,   // both arms raise at the same time
  kArmsAlternate,  // left arm raises, then the right arm
};

std::string_view to_string(MotionKind kind);
MotionKind parse_motion_kind(std::string_view name);

struct SyntheticClassSpec {
  std::string label;
  MotionKind motion = MotionKind::kCircleCw;
  double jitter = 0.002;  // per-joint Gaussian noise std, meters
  std::size_t min_frames = 40;
  std::size_t max_frames = 60;
};

/// Six classes: a direction pair, a speed-profile pair and a coordination pair.
std::vector<SyntheticClassSpec> default_synthetic_specs();
/// The direction and speed-profile pairs only (four classes).
std::vector<SyntheticClassSpec> direction_magnitude_specs();

/// Standing Kinect V1 pose (20 joints) about 2.5 m in front of the camera.
std::vector<Point3> rest_pose();
const std::vector<std::string>& kinect_v1_joint_names();

/// Noise-free motion of `frames` frames; `scale` stretches the gesture amplitude.
SkeletonSequence synthesize_motion(MotionKind kind, std::size_t frames, double scale = 1.0);

/// Seed used by the command line and the bundled corpora.
inline constexpr std::uint64_t kDefaultSeed = 1234;

/// per_class samples for every spec, deterministic in `seed`. Sample k of a
/// class is id `<label>_<k>` (three digits) with subject k % 5. Sample shape
/// (frame count, amplitude, placement) is drawn before the jitter, so a zero
/// jitter spec reproduces the clean path of the jittered one.
Corpus generate_synthetic(std::span<const SyntheticClassSpec> specs, std::size_t per_class,
                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Nearest-neighbour baseline

enum class DistanceMetric { kL2Pixel };

/// Root-mean-square difference of all channel values, scaled to [0, 1].
double pixel_distance(const JtmCanvas& a, const JtmCanvas& b);

struct TrainImage {
  std::string label;
  const JtmCanvas* image = nullptr;
};

struct TestImage {
  std::string sample_id;
  const JtmCanvas* image = nullptr;
};

struct KnnOptions {
  std::size_t k = 1;
  DistanceMetric metric = DistanceMetric::kL2Pixel;
  /// Softmin temperature in distance units.
  double temperature = 0.01;
  unsigned threads = 0;
  /// Fixed column set (sorted). Empty means the sorted training labels. Classes
  /// without training images score 0.
  std::vector<std::string> class_labels;
};

/// Per test image and class: the mean distance to that class's k nearest
/// training images (k capped at the class size), turned into scores by a
/// softmin. Rows sum to 1.
/// Throws Error(kDimMismatch) if image sizes differ, kInvalidArgument if train is empty.
ScoreMatrix knn_scores(std::span<const TrainImage> train, std::span<const TestImage> test,
                       const KnnOptions& options = {});

// ---------------------------------------------------------------------------
// Dataset export

struct RenderedImage {
  std::string sample_id;
  std::string label;
  ViewAngles view;
  Plane plane = Plane::kFront;
  JtmCanvas canvas{1, 1};
};

struct ManifestRow {
  std::string sample_id;
  std::string label;
  ViewAngles view;
  Plane plane = Plane::kFront;
  std::string split;  // empty outside exported datasets
  std::string path;   // relative to the manifest's directory
};

/// `<sample_id>__t<theta>_p<psi>__<plane>.png`, angles in shortest decimal form.
std::string image_file_name(std::string_view sample_id, const ViewAngles& view, Plane plane);

std::string manifest_line(const ManifestRow& row);
std::string write_manifest(std::span<const ManifestRow> rows);
std::vector<ManifestRow> parse_manifest(std::string_view text);

enum class SplitRule {
  kParity,    // per-class sample order: even positions train, odd positions test
  kAllTrain,
  kAllTest,
};

SplitRule parse_split_rule(std::string_view name);

/// Split name for every distinct sample id in `sample_ids`/`labels` order.
std::map<std::string, std::string> assign_splits(std::span<const std::string> sample_ids,
                                                 std::span<const std::string> labels,
                                                 SplitRule rule);

struct ExportSummary {
  std::vector<ManifestRow> rows;
  std::map<std::string, std::size_t> files_per_split;
};

/// Incremental export for trees too large to hold in memory. Every added
/// image's sample id must have an entry in `splits`.
class DatasetWriter {
 public:
  DatasetWriter(std::string out_dir, std::map<std::string, std::string> splits);
  void add(const RenderedImage& image);
  /// Writes the manifest.
  ExportSummary finish();

 private:
  std::string out_dir_;
  std::map<std::string, std::string> splits_;
  std::set<std::string> written_;
  ExportSummary summary_;
};

/// Writes `out_dir/<split>/<plane>/<label>/<file>.png` for every image plus
/// `out_dir/manifest.jsonl`. Re-exporting the same images yields a
/// byte-identical tree. Throws Error(kIo).
ExportSummary export_dataset(std::span<const RenderedImage> images, const std::string& out_dir,
                             SplitRule rule = SplitRule::kParity);

// ---------------------------------------------------------------------------
// Experiment runners

struct Protocol {
  enum class Kind { kFixedSplit, kLeaveOneSubjectOut };
  Kind kind = Kind::kFixedSplit;
  /// Views rendered for training samples (rotation augmentation); test samples
  /// always use the evaluated view.
  std::vector<ViewAngles> train_views = {ViewAngles{}};
};

struct EvalOptions {
  EncodingParams encoding;  // level is overridden by the runners
  RenderOptions render;
  KnnOptions knn;
  unsigned threads = 0;
};

struct AblationRow {
  EncodingLevel level = EncodingLevel::kFull;
  double front = 0.0;
  double top = 0.0;
  double side = 0.0;
  double fused = 0.0;  // multiply fusion
  double fused_average = 0.0;
  double fused_max = 0.0;
};

struct ExperimentReport {
  std::vector<AblationRow> rows;

  std::string to_csv() const;
  std::string to_table() const;
};

/// Per-plane k-NN scores for every test sample of every fold, stacked in fold
/// order, plus the true label of each row. Training samples are rendered at
/// each of protocol.train_views, test samples at `test_view`. Columns are the
/// sorted corpus labels.
struct PlaneScores {
  std::array<ScoreMatrix, 3> planes;  // indexed like kAllPlanes
  std::vector<std::string> truth;
};

PlaneScores score_planes(const Corpus& corpus, const Protocol& protocol,
                         const EvalOptions& options, const ViewAngles& test_view = {});

/// For each level: score_planes at the identity view, then per-plane and
/// fused (multiply, average, max) accuracies.
ExperimentReport run_ablation(const Corpus& corpus, std::span<const EncodingLevel> levels,
                              const Protocol& protocol = {}, const EvalOptions& options = {});

struct ViewCell {
  ViewAngles view;
  double front = 0.0;
  double top = 0.0;
  double side = 0.0;
  double fused = 0.0;               // three planes of this view
  double fused_with_natural = 0.0;  // plus the three planes of the (0, 0) view
};

struct ViewGridReport {
  std::vector<ViewCell> cells;  // grid order
  double all_views_fused = 0.0;  // every plane of every view multiplied together

  std::string to_csv() const;
  std::string to_table() const;
};

/// Training and test samples are both rendered at each grid view;
/// protocol.train_views is ignored.
ViewGridReport run_viewgrid(const Corpus& corpus, const ViewGrid& grid,
                            const Protocol& protocol = {}, const EvalOptions& options = {});

}  // namespace jtm
