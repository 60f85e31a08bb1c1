#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jtm {

/// Class scores per sample: rows are samples, columns are classes.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  /// Throws Error(kShapeMismatch) for inconsistent sizes, kIdMismatch for
  /// duplicate sample ids or class labels, kInvalidScore for negative or
  /// non-finite scores.
  ScoreMatrix(std::vector<std::string> sample_ids, std::vector<std::string> class_labels,
              std::vector<double> scores);

  std::size_t rows() const { return sample_ids_.size(); }
  std::size_t cols() const { return class_labels_.size(); }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  const std::vector<std::string>& class_labels() const { return class_labels_; }
  const std::vector<double>& scores() const { return scores_; }
  double at(std::size_t row, std::size_t col) const { return scores_[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return {scores_.data() + r * cols(), cols()};
  }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::vector<std::string> sample_ids_;
  std::vector<std::string> class_labels_;
  std::vector<double> scores_;
};

enum class FusionMethod { kMultiply, kAverage, kMax };

std::string_view to_string(FusionMethod method);
FusionMethod parse_fusion_method(std::string_view name);

/// Elementwise product, left unnormalized. Needs at least two matrices with
/// identical sample ids and class labels, in the same order.
ScoreMatrix multiply_fuse(std::span<const ScoreMatrix> matrices);
/// Elementwise arithmetic mean.
ScoreMatrix average_fuse(std::span<const ScoreMatrix> matrices);
/// Elementwise maximum.
ScoreMatrix max_fuse(std::span<const ScoreMatrix> matrices);
ScoreMatrix fuse(std::span<const ScoreMatrix> matrices, FusionMethod method);

/// Column of the largest score; ties go to the lowest class index.
std::size_t argmax(std::span<const double> row);

/// (sample_id, predicted label) per row.
std::vector<std::pair<std::string, std::string>> predict(const ScoreMatrix& m);

/// Fraction of rows whose prediction equals truth[row]. Throws on size mismatch.
double accuracy(const ScoreMatrix& m, std::span<const std::string> truth);

/// Wire format: header `sample_id,<label_1>,...,<label_C>`, one row per sample,
/// shortest round-trip decimals.
std::string write_scores_csv(const ScoreMatrix& m);
ScoreMatrix parse_scores_csv(std::istream& in);
ScoreMatrix parse_scores_csv(std::string_view text);
ScoreMatrix read_scores_csv(const std::string& path);

/// `sample_id,label` then one row per prediction.
std::string write_predictions_csv(const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace jtm
