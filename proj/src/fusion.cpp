#include "jtm/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "jtm/error.hpp"
#include "jtm/numfmt.hpp"

namespace jtm {
namespace {

void check_unique(const std::vector<std::string>& names, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::kIdMismatch, std::string("duplicate ") + what + " '" + n + "'");
    }
  }
}

void check_compatible(std::span<const ScoreMatrix> matrices) {
  if (matrices.size() < 2) {
    throw Error(ErrorCode::kShapeMismatch, "fusion needs at least two score matrices");
  }
  const ScoreMatrix& first = matrices.front();
  for (std::size_t i = 1; i < matrices.size(); ++i) {
    const ScoreMatrix& m = matrices[i];
    // Header and id mismatches are reported first: they usually mean the
    // files came from different runs, whatever their shapes.
    if (m.class_labels() != first.class_labels()) {
      throw Error(ErrorCode::kIdMismatch, "class labels of matrix " + std::to_string(i) +
                                              " differ from the first");
    }
    if (m.sample_ids() != first.sample_ids()) {
      throw Error(ErrorCode::kIdMismatch, "sample ids of matrix " + std::to_string(i) +
                                              " differ from the first");
    }
  }
}

template <typename Combine>
ScoreMatrix combine(std::span<const ScoreMatrix> matrices, Combine&& op) {
  check_compatible(matrices);
  std::vector<double> out = matrices.front().scores();
  for (std::size_t i = 1; i < matrices.size(); ++i) {
    const auto& s = matrices[i].scores();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = op(out[j], s[j]);
  }
  return {matrices.front().sample_ids(), matrices.front().class_labels(), std::move(out)};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

ScoreMatrix::ScoreMatrix(std::vector<std::string> sample_ids,
                         std::vector<std::string> class_labels, std::vector<double> scores)
    : sample_ids_(std::move(sample_ids)),
      class_labels_(std::move(class_labels)),
      scores_(std::move(scores)) {
  if (scores_.size() != sample_ids_.size() * class_labels_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "score count does not match rows x classes");
  }
  check_unique(sample_ids_, "sample id");
  check_unique(class_labels_, "class label");
  for (double s : scores_) {
    if (!std::isfinite(s) || s < 0.0) {
      throw Error(ErrorCode::kInvalidScore, "scores must be finite and non-negative");
    }
  }
}

std::string_view to_string(FusionMethod method) {
  switch (method) {
    case FusionMethod::kMultiply: return "multiply";
    case FusionMethod::kAverage: return "average";
    case FusionMethod::kMax: return "max";
  }
  return "multiply";
}

FusionMethod parse_fusion_method(std::string_view name) {
  if (name == "multiply") return FusionMethod::kMultiply;
  if (name == "average") return FusionMethod::kAverage;
  if (name == "max") return FusionMethod::kMax;
  throw Error(ErrorCode::kInvalidArgument, "unknown fusion method '" + std::string(name) + "'");
}

ScoreMatrix multiply_fuse(std::span<const ScoreMatrix> matrices) {
  return combine(matrices, [](double a, double b) { return a * b; });
}

ScoreMatrix average_fuse(std::span<const ScoreMatrix> matrices) {
  ScoreMatrix sum = combine(matrices, [](double a, double b) { return a + b; });
  std::vector<double> mean = sum.scores();
  const double count = static_cast<double>(matrices.size());
  for (double& v : mean) v /= count;
  return {sum.sample_ids(), sum.class_labels(), std::move(mean)};
}

ScoreMatrix max_fuse(std::span<const ScoreMatrix> matrices) {
  return combine(matrices, [](double a, double b) { return std::max(a, b); });
}

ScoreMatrix fuse(std::span<const ScoreMatrix> matrices, FusionMethod method) {
  switch (method) {
    case FusionMethod::kMultiply: return multiply_fuse(matrices);
    case FusionMethod::kAverage: return average_fuse(matrices);
    case FusionMethod::kMax: return max_fuse(matrices);
  }
  return multiply_fuse(matrices);
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

std::vector<std::pair<std::string, std::string>> predict(const ScoreMatrix& m) {
  if (m.cols() == 0) throw Error(ErrorCode::kShapeMismatch, "score matrix has no classes");
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out.emplace_back(m.sample_ids()[r], m.class_labels()[argmax(m.row(r))]);
  }
  return out;
}

double accuracy(const ScoreMatrix& m, std::span<const std::string> truth) {
  if (truth.size() != m.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "truth labels do not match score rows");
  }
  if (m.rows() == 0) return 0.0;
  const auto predictions = predict(m);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < predictions.size(); ++r) {
    if (predictions[r].second == truth[r]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(m.rows());
}

std::string write_scores_csv(const ScoreMatrix& m) {
  std::string out = "sample_id";
  for (const auto& label : m.class_labels()) out += "," + label;
  out += "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.sample_ids()[r];
    for (double s : m.row(r)) out += "," + format_double(s);
    out += "\n";
  }
  return out;
}

ScoreMatrix parse_scores_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> labels;
  bool have_header = false;
  std::vector<std::string> ids;
  std::vector<double> scores;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      if (cells.empty() || cells.front() != "sample_id") {
        throw Error(ErrorCode::kSyntax, "score CSV header must start with sample_id");
      }
      labels.assign(cells.begin() + 1, cells.end());
      have_header = true;
      continue;
    }
    if (cells.size() != labels.size() + 1) {
      throw Error(ErrorCode::kShapeMismatch, "line " + std::to_string(line_no) + " has " +
                                                 std::to_string(cells.size()) + " cells, expected " +
                                                 std::to_string(labels.size() + 1));
    }
    ids.push_back(cells.front());
    for (std::size_t c = 1; c < cells.size(); ++c) {
      try {
        scores.push_back(parse_double(cells[c]));
      } catch (const Error& e) {
        throw Error(ErrorCode::kSyntax, "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (!have_header) throw Error(ErrorCode::kSyntax, "score CSV is empty");
  return {std::move(ids), std::move(labels), std::move(scores)};
}

ScoreMatrix parse_scores_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_scores_csv(in);
}

ScoreMatrix read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return parse_scores_csv(in);
}

std::string write_predictions_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = "sample_id,label\n";
  for (const auto& [id, label] : rows) out += id + "," + label + "\n";
  return out;
}

}  // namespace jtm
