#include "jtm/skeleton_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "jtm/error.hpp"
#include "jtm/numfmt.hpp"

namespace jtm {
namespace {

using json = nlohmann::json;

constexpr int kFormatVersion = 1;

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

double json_coordinate(const json& v, std::size_t line_no) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) {
    throw Error(ErrorCode::kSyntax,
                "line " + std::to_string(line_no) + ": coordinate is not a number");
  }
  return v.get<double>();
}

SkeletonSequence parse_canonical(std::istream& in, const ParseOptions& options) {
  SkeletonSequence seq;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t declared_frames = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kSyntax, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!doc.is_object()) {
      throw Error(ErrorCode::kSyntax, "line " + std::to_string(line_no) + ": expected object");
    }

    if (!have_header) {
      if (!doc.contains("jtm_skeleton") || !doc.contains("joint_count")) {
        throw Error(ErrorCode::kSyntax, "first record must be the jtm_skeleton header");
      }
      if (doc["jtm_skeleton"] != kFormatVersion) {
        throw Error(ErrorCode::kSyntax, "unsupported format version");
      }
      const auto& jc = doc["joint_count"];
      if (!jc.is_number_unsigned()) {
        throw Error(ErrorCode::kSyntax, "joint_count must be a non-negative integer");
      }
      seq.joint_count = jc.get<std::size_t>();
      if (doc.contains("frame_count")) {
        if (!doc["frame_count"].is_number_unsigned()) {
          throw Error(ErrorCode::kSyntax, "frame_count must be a non-negative integer");
        }
        declared_frames = doc["frame_count"].get<std::size_t>();
      }
      if (doc.contains("joint_names")) {
        for (const auto& name : doc["joint_names"]) {
          if (!name.is_string()) throw Error(ErrorCode::kSyntax, "joint_names must be strings");
          seq.joint_names.push_back(name.get<std::string>());
        }
      }
      if (doc.contains("source_id") && doc["source_id"].is_string()) {
        seq.source_id = doc["source_id"].get<std::string>();
      }
      have_header = true;
      continue;
    }

    if (!doc.contains("joints") || !doc["joints"].is_array()) {
      throw Error(ErrorCode::kSyntax,
                  "line " + std::to_string(line_no) + ": frame record needs a joints array");
    }
    Frame frame;
    for (const auto& joint : doc["joints"]) {
      if (!joint.is_array() || joint.size() != 3) {
        throw Error(ErrorCode::kSyntax,
                    "line " + std::to_string(line_no) + ": joint must be [x, y, z]");
      }
      frame.joints.push_back({json_coordinate(joint[0], line_no),
                              json_coordinate(joint[1], line_no),
                              json_coordinate(joint[2], line_no)});
    }
    seq.frames.push_back(std::move(frame));
  }

  if (!have_header) throw Error(ErrorCode::kSyntax, "missing header record");
  if (declared_frames != 0 && declared_frames != seq.frames.size()) {
    throw Error(ErrorCode::kShape, "header declares " + std::to_string(declared_frames) +
                                       " frames, found " + std::to_string(seq.frames.size()));
  }
  if (seq.source_id.empty()) seq.source_id = options.source_id;
  return seq;
}

SkeletonSequence parse_plain(std::istream& in, const ParseOptions& options) {
  SkeletonSequence seq;
  seq.source_id = options.source_id;
  seq.joint_count = options.plain_joint_count;
  bool infer = seq.joint_count == 0;

  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    values.clear();
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r' || *p == ',')) ++p;
      if (p == end) break;
      double value = 0.0;
      const char* start = p;
      if (*p == '+') ++p;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t' &&
                                *next != '\r' && *next != ',')) {
        const char* tok_end = start;
        while (tok_end < end && *tok_end != ' ' && *tok_end != '\t') ++tok_end;
        throw Error(ErrorCode::kSyntax, "line " + std::to_string(line_no) +
                                            ": bad number '" + std::string(start, tok_end) + "'");
      }
      values.push_back(value);
      p = next;
    }
    if (values.size() % 3 != 0) {
      throw Error(ErrorCode::kSyntax, "line " + std::to_string(line_no) +
                                          ": value count is not a multiple of 3");
    }
    if (infer) {
      seq.joint_count = values.size() / 3;
      infer = false;
    }
    Frame frame;
    frame.joints.reserve(values.size() / 3);
    for (std::size_t i = 0; i + 2 < values.size(); i += 3) {
      frame.joints.push_back({values[i], values[i + 1], values[i + 2]});
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

}  // namespace

std::string describe(const Violation& v) {
  switch (v.kind) {
    case Violation::Kind::kEmpty: return "EMPTY(no frames)";
    case Violation::Kind::kShape: return "SHAPE(frame=" + std::to_string(v.frame) + ")";
    case Violation::Kind::kNonFinite:
      return "NONFINITE(frame=" + std::to_string(v.frame) +
             ", joint=" + std::to_string(v.joint) + ")";
    case Violation::Kind::kNames: return "NAMES(joint_names length != joint_count)";
  }
  return "UNKNOWN";
}

std::vector<Violation> validate(const SkeletonSequence& seq) {
  std::vector<Violation> out;
  if (seq.frames.empty()) out.push_back({Violation::Kind::kEmpty});
  if (!seq.joint_names.empty() && seq.joint_names.size() != seq.joint_count) {
    out.push_back({Violation::Kind::kNames});
  }
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& joints = seq.frames[i].joints;
    if (joints.size() != seq.joint_count) {
      out.push_back({Violation::Kind::kShape, i});
      continue;
    }
    for (std::size_t j = 0; j < joints.size(); ++j) {
      if (!joints[j].finite()) out.push_back({Violation::Kind::kNonFinite, i, j});
    }
  }
  return out;
}

void require_valid(const SkeletonSequence& seq) {
  const auto violations = validate(seq);
  if (violations.empty()) return;
  const auto& first = violations.front();
  ErrorCode code = ErrorCode::kShape;
  if (first.kind == Violation::Kind::kNonFinite) code = ErrorCode::kNonFinite;
  std::string what = describe(first);
  if (violations.size() > 1) {
    what += " and " + std::to_string(violations.size() - 1) + " more";
  }
  if (!seq.source_id.empty()) what = seq.source_id + ": " + what;
  throw Error(code, what);
}

SkeletonSequence parse_sequence(std::istream& in, SequenceFormat format,
                                const ParseOptions& options) {
  SkeletonSequence seq = format == SequenceFormat::kCanonicalJson
                             ? parse_canonical(in, options)
                             : parse_plain(in, options);
  if (options.repair_missing) seq = repair_missing(std::move(seq));
  require_valid(seq);
  return seq;
}

SkeletonSequence parse_sequence(std::string_view text, SequenceFormat format,
                                const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return parse_sequence(in, format, options);
}

SequenceFormat format_for_path(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".jsonl") || ends_with(".json")) return SequenceFormat::kCanonicalJson;
  return SequenceFormat::kPlainXyz;
}

SkeletonSequence read_sequence_file(const std::string& path,
                                    std::optional<SequenceFormat> format,
                                    const ParseOptions& options) {
  ParseOptions opts = options;
  if (path == "-") return parse_sequence(std::cin, format.value_or(SequenceFormat::kCanonicalJson), opts);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  if (opts.source_id.empty()) {
    auto slash = path.find_last_of('/');
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = stem.find('.');
    if (dot != std::string::npos) stem.resize(dot);
    opts.source_id = stem;
  }
  // A header-supplied id wins over the filename for canonical files.
  return parse_sequence(in, format.value_or(format_for_path(path)), opts);
}

std::string write_sequence(const SkeletonSequence& seq, SequenceFormat format) {
  std::string out;
  if (format == SequenceFormat::kPlainXyz) {
    for (const auto& frame : seq.frames) {
      bool first = true;
      for (const auto& p : frame.joints) {
        for (double c : {p.x, p.y, p.z}) {
          if (!first) out += ' ';
          out += format_double(c);
          first = false;
        }
      }
      out += '\n';
    }
    return out;
  }

  json header;
  header["jtm_skeleton"] = kFormatVersion;
  header["joint_count"] = seq.joint_count;
  header["frame_count"] = seq.frames.size();
  header["source_id"] = seq.source_id;
  if (!seq.joint_names.empty()) header["joint_names"] = seq.joint_names;
  out += header.dump();
  out += '\n';
  // Coordinates are written with the shortest round-trip decimal form, so a
  // re-parse reproduces every double bit for bit.
  for (const auto& frame : seq.frames) {
    out += "{\"joints\":[";
    for (std::size_t j = 0; j < frame.joints.size(); ++j) {
      const auto& p = frame.joints[j];
      if (j) out += ',';
      out += '[';
      out += format_json_double(p.x);
      out += ',';
      out += format_json_double(p.y);
      out += ',';
      out += format_json_double(p.z);
      out += ']';
    }
    out += "]}\n";
  }
  return out;
}

SkeletonSequence repair_missing(SkeletonSequence seq) {
  const std::size_t n = seq.frames.size();
  for (std::size_t j = 0; j < seq.joint_count; ++j) {
    std::vector<std::size_t> good;
    for (std::size_t i = 0; i < n; ++i) {
      if (j < seq.frames[i].joints.size() && seq.frames[i].joints[j].finite()) good.push_back(i);
    }
    if (good.empty() || good.size() == n) continue;
    std::size_t next = 0;  // index into good of the first finite frame >= i
    for (std::size_t i = 0; i < n; ++i) {
      if (j >= seq.frames[i].joints.size()) continue;
      while (next < good.size() && good[next] < i) ++next;
      auto& p = seq.frames[i].joints[j];
      if (p.finite()) continue;
      if (next == 0) {
        p = seq.frames[good.front()].joints[j];
      } else if (next == good.size()) {
        p = seq.frames[good.back()].joints[j];
      } else {
        const std::size_t lo = good[next - 1];
        const std::size_t hi = good[next];
        const double t = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
        const Point3& a = seq.frames[lo].joints[j];
        const Point3& b = seq.frames[hi].joints[j];
        p = {std::lerp(a.x, b.x, t), std::lerp(a.y, b.y, t), std::lerp(a.z, b.z, t)};
      }
    }
  }
  return seq;
}

}  // namespace jtm
