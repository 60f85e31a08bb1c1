#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "jtm/error.hpp"
#include "jtm/evalkit.hpp"
#include "jtm/fusion.hpp"
#include "jtm/numfmt.hpp"
#include "jtm/png_io.hpp"

namespace jtm::cli {
namespace {

namespace fs = std::filesystem;

// Thrown for problems CLI11 cannot see: config files, flag combinations.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kLevelNames = {"raw",           "hue",           "hue_parts",
                                              "hue_parts_sat", "hue_parts_bri", "full"};
const std::vector<std::string> kGridNames = {"identity", "default", "orthogonal"};

ViewGrid named_grid(const std::string& name) {
  if (name == "default") return default_view_grid();
  if (name == "orthogonal") return orthogonal_view_grid();
  return ViewGrid::identity();
}

struct EncodingFlags {
  std::string level = "full";
  double s_min = 0.0;
  double s_max = 1.0;
  double b_min = 0.0;
  double b_max = 1.0;
  std::string hue_map = "jet";
  std::string partition;
  int width = 256;
  int height = 256;
  double margin = 0.05;
  int thickness = 1;

  EncodingParams params() const {
    EncodingParams p;
    p.level = parse_level(level);
    p.s_min = s_min;
    p.s_max = s_max;
    p.b_min = b_min;
    p.b_max = b_max;
    p.hue_map = parse_colormap_kind(hue_map);
    if (!partition.empty()) {
      const auto bytes = read_file_bytes(partition);
      p.partition = JointPartition::parse(std::string(bytes.begin(), bytes.end()));
    }
    p.validate();
    return p;
  }

  RenderOptions render() const {
    RenderOptions r{width, height, margin, thickness};
    r.validate();
    return r;
  }
};

void add_encoding_flags(CLI::App* cmd, EncodingFlags& f, bool with_level) {
  if (with_level) {
    cmd->add_option("--level", f.level, "Encoding level")
        ->check(CLI::IsMember(kLevelNames))
        ->capture_default_str();
  }
  cmd->add_option("--s-min", f.s_min, "Saturation at zero speed")->capture_default_str();
  cmd->add_option("--s-max", f.s_max, "Saturation at the peak speed")->capture_default_str();
  cmd->add_option("--b-min", f.b_min, "Brightness at zero speed")->capture_default_str();
  cmd->add_option("--b-max", f.b_max, "Brightness at the peak speed")->capture_default_str();
  cmd->add_option("--hue-map", f.hue_map, "Colormap of the left part (the right part uses its reverse)")
      ->check(CLI::IsMember({"jet", "jet_reversed", "grayscale"}))
      ->capture_default_str();
  cmd->add_option("--partition", f.partition,
                  "Body-part file: one of left/right/middle per joint (default: by joint names, "
                  "Kinect V1 for 20 joints)");
  cmd->add_option("--width", f.width, "Canvas width in pixels")->capture_default_str();
  cmd->add_option("--height", f.height, "Canvas height in pixels")->capture_default_str();
  cmd->add_option("--margin", f.margin, "Blank border as a fraction of the canvas")
      ->capture_default_str();
  cmd->add_option("--thickness", f.thickness, "Line width in pixels")->capture_default_str();
}

struct CorpusFlags {
  std::string corpus;
  std::string synthetic = "six";
  std::size_t per_class = 30;
  std::uint64_t seed = kDefaultSeed;

  Corpus load() const {
    if (!corpus.empty()) return read_corpus(corpus);
    const auto specs =
        synthetic == "four" ? direction_magnitude_specs() : default_synthetic_specs();
    return generate_synthetic(specs, per_class, seed);
  }
};

void add_corpus_flags(CLI::App* cmd, CorpusFlags& f) {
  cmd->add_option("--corpus", f.corpus, "Corpus manifest or directory (default: synthetic corpus)");
  cmd->add_option("--synthetic", f.synthetic,
                  "Synthetic class set when no corpus is given: six, or four (direction and "
                  "speed classes only)")
      ->check(CLI::IsMember({"six", "four"}))
      ->capture_default_str();
  cmd->add_option("--per-class", f.per_class, "Synthetic samples per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Synthetic corpus seed")->capture_default_str();
}

struct EvalFlags {
  std::string protocol = "fixed";
  std::string train_views = "identity";
  std::size_t k = 1;
  double temperature = 0.01;
};

void add_eval_flags(CLI::App* cmd, EvalFlags& f) {
  cmd->add_option("--protocol", f.protocol,
                  "fixed: even samples of each class train, odd ones test; loso: leave one "
                  "subject out")
      ->check(CLI::IsMember({"fixed", "loso"}))
      ->capture_default_str();
  cmd->add_option("--train-views", f.train_views, "Views rendered for training samples")
      ->check(CLI::IsMember(kGridNames))
      ->capture_default_str();
  cmd->add_option("--k", f.k, "Neighbours averaged per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--temperature", f.temperature, "Softmin temperature of the k-NN scores")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

Protocol make_protocol(const EvalFlags& f) {
  Protocol p;
  p.kind = f.protocol == "loso" ? Protocol::Kind::kLeaveOneSubjectOut
                                : Protocol::Kind::kFixedSplit;
  const ViewGrid grid = named_grid(f.train_views);
  p.train_views.assign(grid.begin(), grid.end());
  return p;
}

EvalOptions make_eval_options(const EncodingFlags& enc, const EvalFlags& ev, unsigned threads) {
  EvalOptions o;
  o.encoding = enc.params();
  o.render = enc.render();
  o.knn.k = ev.k;
  o.knn.temperature = ev.temperature;
  o.threads = threads;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  write_file_atomic(path, text);
}

// ---------------------------------------------------------------------------
// Config files: `key = value` lines, '#' comments. Keys are long flag names
// without the dashes.

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(std::string_view(text).substr(0, eq));
    std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty() || !seen.insert(key).second) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": empty or repeated key '" + key +
                       "'");
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

bool flag_given(std::span<const std::string> args, const std::string& name) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == name || a.starts_with(name + "=");
  });
}

// Inserts config entries after the subcommand name for every flag the user did
// not pass, so command-line flags win. Keys known to another subcommand only are
// ignored; keys unknown to every subcommand are rejected.
std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].starts_with("--config=")) config_path = args[i].substr(9);
  }
  if (!config_path) return args;

  const auto sub_pos = std::find_if(args.begin(), args.end(),
                                    [](const std::string& a) { return !a.starts_with("-"); });
  if (sub_pos == args.end()) return args;
  CLI::App* sub = app.get_subcommand_no_throw(*sub_pos);
  if (sub == nullptr) return args;

  std::set<std::string> known;
  for (const CLI::App* cmd : app.get_subcommands([](CLI::App*) { return true; })) {
    for (const CLI::Option* opt : cmd->get_options()) {
      for (const auto& name : opt->get_lnames()) known.insert(name);
    }
  }
  known.erase("help");
  known.erase("config");

  std::vector<std::string> extra;
  for (const auto& [key, value] : read_config(*config_path)) {
    if (!known.contains(key)) throw UsageError("unknown config key '" + key + "'");
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || flag_given(args, "--" + key)) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1" || value == "yes") {
        extra.push_back("--" + key);
      } else if (value != "false" && value != "0" && value != "no") {
        throw UsageError("config key '" + key + "' expects true or false");
      }
    } else {
      extra.push_back("--" + key + "=" + value);
    }
  }
  args.insert(sub_pos + 1, extra.begin(), extra.end());
  return args;
}

// ---------------------------------------------------------------------------
// Commands

struct EncodeCmd {
  std::vector<std::string> inputs;
  std::string format = "auto";
  std::size_t joints = 0;
  std::string plane = "all";
  double theta = 0.0;
  double psi = 0.0;
  std::string views;
  std::string out = ".";
  std::string label;
  bool repair = false;
  EncodingFlags enc;

  int run(std::ostream& out_stream, unsigned threads) const {
    const EncodingParams params = enc.params();
    const RenderOptions render = enc.render();
    const ViewGrid grid =
        views.empty() ? ViewGrid({ViewAngles{theta, psi}}) : named_grid(views);
    std::vector<Plane> planes;
    if (plane == "all") {
      planes.assign(kAllPlanes.begin(), kAllPlanes.end());
    } else {
      planes.push_back(parse_plane(plane));
    }

    ParseOptions popts;
    popts.plain_joint_count = joints;
    popts.repair_missing = repair;
    std::optional<SequenceFormat> fmt;
    if (format == "canonical") fmt = SequenceFormat::kCanonicalJson;
    if (format == "plain") fmt = SequenceFormat::kPlainXyz;

    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + out);

    std::vector<ManifestRow> rows;
    std::set<std::string> names;
    for (const auto& input : inputs) {
      const SkeletonSequence seq = read_sequence_file(input, fmt, popts);
      const std::string id =
          seq.source_id.empty() ? fs::path(input).stem().string() : seq.source_id;
      for (const ViewRender& vr : render_all(seq, grid, params, render, threads)) {
        for (Plane p : planes) {
          ManifestRow row{id, label, vr.view, p, "", image_file_name(id, vr.view, p)};
          if (!names.insert(row.path).second) {
            throw Error(ErrorCode::kInvalidArgument, "two inputs share the sample id '" + id + "'");
          }
          write_png(vr.plane(p), (fs::path(out) / row.path).string());
          rows.push_back(std::move(row));
        }
      }
    }
    write_file_atomic((fs::path(out) / "manifest.jsonl").string(), write_manifest(rows));
    out_stream << "wrote " << rows.size() << " images to " << out << "\n";
    return kExitOk;
  }
};

struct DatasetCmd {
  std::string corpus;
  std::string out;
  std::string views = "identity";
  std::string split = "parity";
  EncodingFlags enc;

  int run(std::ostream& out_stream, unsigned threads) const {
    const EncodingParams params = enc.params();
    const RenderOptions render = enc.render();
    const ViewGrid grid = named_grid(views);
    const Corpus samples = read_corpus(corpus);

    std::vector<std::string> ids, labels;
    for (const auto& s : samples) {
      ids.push_back(s.sample_id);
      labels.push_back(s.label);
    }
    DatasetWriter writer(out, assign_splits(ids, labels, parse_split_rule(split)));
    for (const auto& s : samples) {
      for (ViewRender& vr : render_all(s.sequence, grid, params, render, threads)) {
        for (Plane p : kAllPlanes) {
          writer.add({s.sample_id, s.label, vr.view, p,
                      std::move(vr.planes[static_cast<std::size_t>(p)])});
        }
      }
    }
    const ExportSummary summary = writer.finish();
    out_stream << "wrote " << summary.rows.size() << " images to " << out;
    for (const auto& [name, count] : summary.files_per_split) {
      out_stream << " (" << name << ": " << count << ")";
    }
    out_stream << "\n";
    return kExitOk;
  }
};

struct FuseCmd {
  std::vector<std::string> inputs;
  std::string method = "multiply";
  std::string out;
  std::string predictions;

  int run(std::ostream& out_stream) const {
    std::vector<ScoreMatrix> matrices;
    for (const auto& path : inputs) matrices.push_back(read_scores_csv(path));
    const ScoreMatrix fused = fuse(matrices, parse_fusion_method(method));
    const std::string csv = write_scores_csv(fused);
    if (out.empty()) {
      out_stream << csv;
    } else {
      write_text(out, csv);
    }
    if (!predictions.empty()) write_text(predictions, write_predictions_csv(predict(fused)));
    return kExitOk;
  }
};

std::string percent_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

struct EvalCmd {
  CorpusFlags corpus;
  EvalFlags eval;
  EncodingFlags enc;
  std::string out;
  std::string scores_dir;

  int run(std::ostream& out_stream, unsigned threads) const {
    const Corpus samples = corpus.load();
    const PlaneScores s =
        score_planes(samples, make_protocol(eval), make_eval_options(enc, eval, threads));
    std::vector<std::pair<std::string, double>> rows;
    for (Plane p : kAllPlanes) {
      rows.emplace_back(to_string(p), accuracy(s.planes[static_cast<std::size_t>(p)], s.truth));
    }
    for (FusionMethod m : {FusionMethod::kMultiply, FusionMethod::kAverage, FusionMethod::kMax}) {
      rows.emplace_back(to_string(m), accuracy(fuse(s.planes, m), s.truth));
    }
    std::string csv = "method,accuracy\n";
    for (const auto& [name, acc] : rows) {
      csv += name + "," + format_double(acc) + "\n";
      out_stream << std::string(10 - std::min<std::size_t>(10, name.size()), ' ') << name << "  "
                 << percent_cell(acc) << "%\n";
    }
    if (!out.empty()) write_text(out, csv);
    if (!scores_dir.empty()) {
      for (Plane p : kAllPlanes) {
        write_text((fs::path(scores_dir) / (std::string(to_string(p)) + ".csv")).string(),
                   write_scores_csv(s.planes[static_cast<std::size_t>(p)]));
      }
      std::vector<std::pair<std::string, std::string>> truth;
      for (std::size_t r = 0; r < s.truth.size(); ++r) {
        truth.emplace_back(s.planes[0].sample_ids()[r], s.truth[r]);
      }
      write_text((fs::path(scores_dir) / "truth.csv").string(), write_predictions_csv(truth));
    }
    return kExitOk;
  }
};

struct AblateCmd {
  CorpusFlags corpus;
  EvalFlags eval;
  EncodingFlags enc;
  std::vector<std::string> levels = kLevelNames;
  std::string out;

  int run(std::ostream& out_stream, unsigned threads) const {
    std::vector<EncodingLevel> parsed;
    for (const auto& l : levels) parsed.push_back(parse_level(l));
    const ExperimentReport report = run_ablation(corpus.load(), parsed, make_protocol(eval),
                                                 make_eval_options(enc, eval, threads));
    out_stream << report.to_table();
    if (!out.empty()) write_text(out, report.to_csv());
    return kExitOk;
  }
};

struct ViewGridCmd {
  CorpusFlags corpus;
  EvalFlags eval;
  EncodingFlags enc;
  double step = 15.0;
  std::optional<double> range;
  double theta_min = 0.0;
  double theta_max = 45.0;
  double psi_min = -45.0;
  double psi_max = 45.0;
  std::string out;

  int run(std::ostream& out_stream, unsigned threads) const {
    AngleRange theta{theta_min, theta_max};
    AngleRange psi{psi_min, psi_max};
    if (range) theta = psi = AngleRange{-*range, *range};
    const ViewGrid grid = enumerate_views(theta, step, psi, step);
    const ViewGridReport report = run_viewgrid(corpus.load(), grid, make_protocol(eval),
                                               make_eval_options(enc, eval, threads));
    out_stream << report.to_table();
    if (!out.empty()) write_text(out, report.to_csv());
    return kExitOk;
  }
};

struct SynthCmd {
  std::string out;
  std::string classes = "six";
  std::size_t per_class = 30;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> jitter;

  int run(std::ostream& out_stream) const {
    auto specs = classes == "four" ? direction_magnitude_specs() : default_synthetic_specs();
    if (jitter) {
      if (!(*jitter >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "jitter must be >= 0");
      for (auto& s : specs) s.jitter = *jitter;
    }
    const Corpus corpus = generate_synthetic(specs, per_class, seed);
    write_corpus(corpus, out);
    out_stream << "wrote " << corpus.size() << " sequences to " << out << "\n";
    return kExitOk;
  }
};

struct ColormapCmd {
  std::string name = "jet";
  std::string out;

  int run(std::ostream& out_stream) const {
    const std::string csv = ColorMap::named(parse_colormap_kind(name)).to_csv();
    if (out.empty()) {
      out_stream << csv;
    } else {
      write_text(out, csv);
    }
    return kExitOk;
  }
};

struct ValidateCmd {
  std::vector<std::string> inputs;
  std::string format = "auto";
  std::size_t joints = 0;

  // Reports every problem of every file instead of stopping at the first.
  int run(std::ostream& out_stream, std::ostream& err) const {
    int status = kExitOk;
    for (const auto& input : inputs) {
      try {
        ParseOptions popts;
        popts.plain_joint_count = joints;
        std::optional<SequenceFormat> fmt;
        if (format == "canonical") fmt = SequenceFormat::kCanonicalJson;
        if (format == "plain") fmt = SequenceFormat::kPlainXyz;
        const SkeletonSequence seq = read_sequence_file(input, fmt, popts);
        out_stream << input << ": ok, " << seq.frame_count() << " frames x " << seq.joint_count
                   << " joints\n";
      } catch (const Error& e) {
        err << input << ": " << e.what() << "\n";
        status = kExitData;
      }
    }
    return status;
  }
};

void add_format_flags(CLI::App* cmd, std::string& format, std::size_t& joints) {
  cmd->add_option("--format", format,
                  "Input format: canonical (JSON lines), plain (x y z per joint per line), or "
                  "auto by extension")
      ->check(CLI::IsMember({"auto", "canonical", "plain"}))
      ->capture_default_str();
  cmd->add_option("--joints", joints, "Joints per line of plain input (0: infer from the first line)")
      ->capture_default_str();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyGrid:
    case ErrorCode::kIdMismatch:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int run(std::span<const std::string> args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint trajectory maps: encode skeleton sequences as images, fuse scores, "
               "evaluate.",
               "jtm"};
  app.require_subcommand(1);
  unsigned threads = 0;
  std::string config;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config,
                    "key = value file; keys are flag names without dashes, flags win");
    cmd->add_option("--threads", threads,
                    "Worker threads (0: hardware concurrency; JTM_THREADS caps it)")
        ->capture_default_str();
  };

  EncodeCmd encode;
  auto* c_encode = app.add_subcommand("encode", "Render JTM images of skeleton sequence files");
  c_encode->add_option("inputs", encode.inputs, "Sequence files ('-' reads stdin)")->required();
  add_format_flags(c_encode, encode.format, encode.joints);
  c_encode->add_option("--plane", encode.plane, "Projection plane")
      ->check(CLI::IsMember({"front", "top", "side", "all"}))
      ->capture_default_str();
  c_encode->add_option("--theta", encode.theta, "Rotation about the y axis, degrees")
      ->capture_default_str();
  c_encode->add_option("--psi", encode.psi, "Rotation about the x axis, degrees")
      ->capture_default_str();
  c_encode->add_option("--views", encode.views,
                       "Render a whole view grid instead of --theta/--psi")
      ->check(CLI::IsMember(kGridNames))
      ->excludes(c_encode->get_option("--theta"))
      ->excludes(c_encode->get_option("--psi"));
  c_encode->add_option("--out", encode.out, "Output directory")->capture_default_str();
  c_encode->add_option("--label", encode.label, "Label recorded in the manifest");
  c_encode->add_flag("--repair", encode.repair,
                     "Interpolate missing (null/NaN) joints instead of rejecting the file");
  add_encoding_flags(c_encode, encode.enc, true);
  add_common(c_encode);

  DatasetCmd dataset;
  auto* c_dataset = app.add_subcommand("dataset", "Export a corpus as a train/test image tree");
  c_dataset->add_option("--corpus", dataset.corpus, "Corpus manifest or directory")->required();
  c_dataset->add_option("--out", dataset.out, "Output directory")->required();
  c_dataset->add_option("--views", dataset.views, "View grid rendered per sample")
      ->check(CLI::IsMember(kGridNames))
      ->capture_default_str();
  c_dataset->add_option("--split", dataset.split,
                        "parity: even samples of each class train, odd ones test; or train, test")
      ->check(CLI::IsMember({"parity", "train", "test"}))
      ->capture_default_str();
  add_encoding_flags(c_dataset, dataset.enc, true);
  add_common(c_dataset);

  FuseCmd fuse_cmd;
  auto* c_fuse = app.add_subcommand("fuse", "Fuse score CSVs (sample_id,<labels...>)");
  c_fuse->add_option("inputs", fuse_cmd.inputs, "Score CSVs")->required()->expected(2, -1);
  c_fuse->add_option("--method", fuse_cmd.method, "Fusion rule")
      ->check(CLI::IsMember({"multiply", "average", "max"}))
      ->capture_default_str();
  c_fuse->add_option("--out", fuse_cmd.out, "Fused score CSV (default: stdout)");
  c_fuse->add_option("--predictions", fuse_cmd.predictions, "Write sample_id,label predictions");
  add_common(c_fuse);

  EvalCmd eval_cmd;
  auto* c_eval = app.add_subcommand("eval", "Per-plane and fused k-NN accuracy at one level");
  add_corpus_flags(c_eval, eval_cmd.corpus);
  add_eval_flags(c_eval, eval_cmd.eval);
  add_encoding_flags(c_eval, eval_cmd.enc, true);
  c_eval->add_option("--out", eval_cmd.out, "Report CSV");
  c_eval->add_option("--scores-dir", eval_cmd.scores_dir,
                     "Write front/top/side score CSVs and truth.csv here");
  add_common(c_eval);

  AblateCmd ablate;
  auto* c_ablate = app.add_subcommand("ablate", "Accuracy of each encoding level");
  add_corpus_flags(c_ablate, ablate.corpus);
  add_eval_flags(c_ablate, ablate.eval);
  add_encoding_flags(c_ablate, ablate.enc, false);
  c_ablate->add_option("--levels", ablate.levels, "Comma-separated levels")
      ->delimiter(',')
      ->check(CLI::IsMember(kLevelNames))
      ->capture_default_str();
  c_ablate->add_option("--out", ablate.out, "Report CSV");
  add_common(c_ablate);

  ViewGridCmd viewgrid;
  auto* c_viewgrid = app.add_subcommand("viewgrid", "Accuracy at every view of a rotation grid");
  add_corpus_flags(c_viewgrid, viewgrid.corpus);
  add_eval_flags(c_viewgrid, viewgrid.eval);
  add_encoding_flags(c_viewgrid, viewgrid.enc, true);
  c_viewgrid->add_option("--step", viewgrid.step, "Angle step for both axes, degrees")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_viewgrid->add_option("--range", viewgrid.range,
                         "Use [-R, R] for both angles instead of the four bounds below");
  c_viewgrid->add_option("--theta-min", viewgrid.theta_min)->capture_default_str();
  c_viewgrid->add_option("--theta-max", viewgrid.theta_max)->capture_default_str();
  c_viewgrid->add_option("--psi-min", viewgrid.psi_min)->capture_default_str();
  c_viewgrid->add_option("--psi-max", viewgrid.psi_max)->capture_default_str();
  c_viewgrid->add_option("--out", viewgrid.out, "Report CSV");
  add_common(c_viewgrid);

  SynthCmd synth;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic labeled corpus");
  c_synth->add_option("--out", synth.out, "Corpus directory")->required();
  c_synth->add_option("--classes", synth.classes, "six, or four (direction and speed classes)")
      ->check(CLI::IsMember({"six", "four"}))
      ->capture_default_str();
  c_synth->add_option("--per-class", synth.per_class)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();
  c_synth->add_option("--jitter", synth.jitter, "Joint noise std in meters (default per class)");
  add_common(c_synth);

  ColormapCmd colormap;
  auto* c_colormap = app.add_subcommand("colormap", "Print a colormap table as index,r,g,b CSV");
  c_colormap->add_option("--name", colormap.name)
      ->check(CLI::IsMember({"jet", "jet_reversed", "grayscale"}))
      ->capture_default_str();
  c_colormap->add_option("--out", colormap.out, "Output file (default: stdout)");
  add_common(c_colormap);

  ValidateCmd validate;
  auto* c_validate = app.add_subcommand("validate", "Check skeleton sequence files");
  c_validate->add_option("inputs", validate.inputs, "Sequence files")->required();
  add_format_flags(c_validate, validate.format, validate.joints);
  add_common(c_validate);

  try {
    const std::vector<std::string> args =
        merge_config(app, std::vector<std::string>(args_in.begin(), args_in.end()));
    std::vector<const char*> argv = {"jtm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "jtm: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "jtm: " << e.what() << "\n";
    return exit_code_for(e.code());
  }

  try {
    if (c_encode->parsed()) return encode.run(out, threads);
    if (c_dataset->parsed()) return dataset.run(out, threads);
    if (c_fuse->parsed()) return fuse_cmd.run(out);
    if (c_eval->parsed()) return eval_cmd.run(out, threads);
    if (c_ablate->parsed()) return ablate.run(out, threads);
    if (c_viewgrid->parsed()) return viewgrid.run(out, threads);
    if (c_synth->parsed()) return synth.run(out);
    if (c_colormap->parsed()) return colormap.run(out);
    if (c_validate->parsed()) return validate.run(out, err);
  } catch (const Error& e) {
    err << "jtm " << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "jtm: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace jtm::cli
