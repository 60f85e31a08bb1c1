#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "jtm/encoding.hpp"
#include "jtm/error.hpp"
#include "jtm/evalkit.hpp"
#include "jtm/fusion.hpp"
#include "jtm/geometry.hpp"
#include "jtm/png_io.hpp"
#include "jtm/rasterizer.hpp"
#include "jtm/skeleton_io.hpp"

namespace py = pybind11;
using namespace jtm;

namespace {

using Joints = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Scores = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Sequences cross the boundary as (frames, joints, 3) float64 arrays.
Joints to_array(const SkeletonSequence& seq) {
  Joints out({seq.frame_count(), seq.joint_count, std::size_t{3}});
  auto v = out.mutable_unchecked<3>();
  for (std::size_t i = 0; i < seq.frame_count(); ++i) {
    for (std::size_t k = 0; k < seq.joint_count; ++k) {
      const Point3& p = seq.at(i, k);
      v(i, k, 0) = p.x;
      v(i, k, 1) = p.y;
      v(i, k, 2) = p.z;
    }
  }
  return out;
}

SkeletonSequence from_array(const Joints& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw Error(ErrorCode::kShape, "expected an array of shape (frames, joints, 3)");
  }
  const auto v = a.unchecked<3>();
  SkeletonSequence seq;
  seq.joint_count = static_cast<std::size_t>(a.shape(1));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    Frame f;
    for (py::ssize_t k = 0; k < a.shape(1); ++k) f.joints.push_back({v(i, k, 0), v(i, k, 1), v(i, k, 2)});
    seq.frames.push_back(std::move(f));
  }
  require_valid(seq);
  return seq;
}

py::array_t<std::uint8_t> to_image(const JtmCanvas& c) {
  py::array_t<std::uint8_t> out({c.height(), c.width(), 3});
  const auto bytes = c.bytes();
  std::memcpy(out.mutable_data(), bytes.data(), bytes.size());
  return out;
}

JtmCanvas from_image(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw Error(ErrorCode::kShape, "expected an array of shape (height, width, 3)");
  }
  JtmCanvas c(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  const auto v = a.unchecked<3>();
  for (int y = 0; y < c.height(); ++y)
    for (int x = 0; x < c.width(); ++x) c.set({x, y}, Rgb8{v(y, x, 0), v(y, x, 1), v(y, x, 2)});
  return c;
}

SequenceFormat parse_format(const std::string& name) {
  if (name == "canonical") return SequenceFormat::kCanonicalJson;
  if (name == "plain") return SequenceFormat::kPlainXyz;
  throw Error(ErrorCode::kInvalidArgument, "format must be canonical or plain");
}

EncodingParams make_params(const std::string& level, double s_min, double s_max, double b_min,
                           double b_max, const std::string& hue_map) {
  EncodingParams p;
  p.level = parse_level(level);
  p.s_min = s_min;
  p.s_max = s_max;
  p.b_min = b_min;
  p.b_max = b_max;
  p.hue_map = parse_colormap_kind(hue_map);
  return p;
}

RenderOptions make_render(int width, int height, double margin, int thickness) {
  RenderOptions r;
  r.width = width;
  r.height = height;
  r.margin = margin;
  r.thickness = thickness;
  return r;
}

std::vector<std::pair<double, double>> grid_list(const ViewGrid& g) {
  std::vector<std::pair<double, double>> out;
  for (const auto& v : g) out.emplace_back(v.theta, v.psi);
  return out;
}

ScoreMatrix to_matrix(const std::vector<std::string>& ids, const std::vector<std::string>& labels,
                      const Scores& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::kShapeMismatch, "scores must be two-dimensional");
  return {ids, labels, std::vector<double>(a.data(), a.data() + a.size())};
}

py::tuple from_matrix(const ScoreMatrix& m) {
  Scores a({m.rows(), m.cols()});
  std::copy(m.scores().begin(), m.scores().end(), a.mutable_data());
  return py::make_tuple(m.sample_ids(), m.class_labels(), a);
}

std::vector<SyntheticClassSpec> class_set(const std::string& name) {
  if (name == "six") return default_synthetic_specs();
  if (name == "four") return direction_magnitude_specs();
  throw Error(ErrorCode::kInvalidArgument, "classes must be six or four");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint trajectory maps: skeleton sequences rendered as color images";

  static py::exception<Error> error(m, "JtmError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def(
      "parse_sequence",
      [](const std::string& text, const std::string& format, std::size_t joints, bool repair) {
        ParseOptions o;
        o.plain_joint_count = joints;
        o.repair_missing = repair;
        return to_array(parse_sequence(std::string_view(text), parse_format(format), o));
      },
      py::arg("text"), py::arg("format") = "canonical", py::arg("joints") = 0,
      py::arg("repair") = false);
  m.def(
      "read_sequence",
      [](const std::string& path) { return to_array(read_sequence_file(path)); }, py::arg("path"));
  m.def(
      "write_sequence",
      [](const Joints& joints, const std::string& format) {
        return write_sequence(from_array(joints), parse_format(format));
      },
      py::arg("joints"), py::arg("format") = "canonical");

  m.def(
      "rotate_point",
      [](std::array<double, 3> p, double theta, double psi) {
        const Point3 q = rotate_point({p[0], p[1], p[2]}, {theta, psi});
        return std::array<double, 3>{q.x, q.y, q.z};
      },
      py::arg("point"), py::arg("theta"), py::arg("psi"));
  m.def("default_view_grid", [] { return grid_list(default_view_grid()); });
  m.def("orthogonal_view_grid", [] { return grid_list(orthogonal_view_grid()); });

  m.def("hue_position", &hue_position, py::arg("q"), py::arg("n"));
  m.def(
      "saturation",
      [](double v, double v_max, double s_min, double s_max) {
        EncodingParams p;
        p.s_min = s_min;
        p.s_max = s_max;
        return saturation(v, v_max, p);
      },
      py::arg("v"), py::arg("v_max"), py::arg("s_min") = 0.0, py::arg("s_max") = 1.0);
  m.def(
      "brightness",
      [](double v, double v_max, double b_min, double b_max) {
        EncodingParams p;
        p.b_min = b_min;
        p.b_max = b_max;
        return brightness(v, v_max, p);
      },
      py::arg("v"), py::arg("v_max"), py::arg("b_min") = 0.0, py::arg("b_max") = 1.0);

  m.def(
      "render",
      [](const Joints& joints, const std::string& plane, double theta, double psi,
         const std::string& level, int width, int height, double margin, int thickness,
         double s_min, double s_max, double b_min, double b_max, const std::string& hue_map) {
        const SkeletonSequence seq = from_array(joints);
        const auto params = make_params(level, s_min, s_max, b_min, b_max, hue_map);
        const auto render = make_render(width, height, margin, thickness);
        const Plane pl = parse_plane(plane);
        JtmCanvas c(1, 1);
        {
          py::gil_scoped_release release;
          c = render_jtm(seq, pl, {theta, psi}, params, render);
        }
        return to_image(c);
      },
      py::arg("joints"), py::arg("plane") = "front", py::arg("theta") = 0.0,
      py::arg("psi") = 0.0, py::arg("level") = "full", py::arg("width") = 256,
      py::arg("height") = 256, py::arg("margin") = 0.05, py::arg("thickness") = 1,
      py::arg("s_min") = 0.0, py::arg("s_max") = 1.0, py::arg("b_min") = 0.0,
      py::arg("b_max") = 1.0, py::arg("hue_map") = "jet");
  m.def(
      "render_view",
      [](const Joints& joints, double theta, double psi, const std::string& level, int width,
         int height) {
        const SkeletonSequence seq = from_array(joints);
        EncodingParams params;
        params.level = parse_level(level);
        const auto planes = render_view(seq, {theta, psi}, params, make_render(width, height, 0.05, 1));
        return py::make_tuple(to_image(planes[0]), to_image(planes[1]), to_image(planes[2]));
      },
      py::arg("joints"), py::arg("theta") = 0.0, py::arg("psi") = 0.0, py::arg("level") = "full",
      py::arg("width") = 256, py::arg("height") = 256);
  m.def(
      "encode_png",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& image) {
        const auto bytes = encode_png(from_image(image));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("image"));
  m.def(
      "decode_png",
      [](const py::bytes& data) {
        const std::string s = data;
        const JtmCanvas c = decode_png(
            std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
        return to_image(c);
      },
      py::arg("data"));

  m.def(
      "fuse",
      [](const std::vector<Scores>& matrices, const std::string& method) {
        std::vector<ScoreMatrix> ms;
        for (const auto& a : matrices) {
          if (a.ndim() != 2) throw Error(ErrorCode::kShapeMismatch, "scores must be two-dimensional");
          std::vector<std::string> ids, labels;
          for (py::ssize_t r = 0; r < a.shape(0); ++r) ids.push_back(std::to_string(r));
          for (py::ssize_t c = 0; c < a.shape(1); ++c) labels.push_back(std::to_string(c));
          ms.push_back(to_matrix(ids, labels, a));
        }
        const ScoreMatrix f = fuse(ms, parse_fusion_method(method));
        Scores out({f.rows(), f.cols()});
        std::copy(f.scores().begin(), f.scores().end(), out.mutable_data());
        return out;
      },
      py::arg("matrices"), py::arg("method") = "multiply");
  m.def(
      "parse_scores_csv",
      [](const std::string& text) { return from_matrix(parse_scores_csv(std::string_view(text))); },
      py::arg("text"));
  m.def(
      "write_scores_csv",
      [](const std::vector<std::string>& ids, const std::vector<std::string>& labels,
         const Scores& scores) { return write_scores_csv(to_matrix(ids, labels, scores)); },
      py::arg("sample_ids"), py::arg("class_labels"), py::arg("scores"));

  m.def(
      "generate_synthetic",
      [](const std::string& classes, std::size_t per_class, std::uint64_t seed) {
        py::list out;
        for (const auto& s : generate_synthetic(class_set(classes), per_class, seed)) {
          py::dict d;
          d["sample_id"] = s.sample_id;
          d["label"] = s.label;
          d["subject"] = s.subject;
          d["joints"] = to_array(s.sequence);
          out.append(d);
        }
        return out;
      },
      py::arg("classes") = "six", py::arg("per_class") = 30, py::arg("seed") = kDefaultSeed);
  m.def(
      "run_ablation",
      [](const std::string& classes, std::size_t per_class, std::uint64_t seed,
         const std::vector<std::string>& levels, int width, int height, std::size_t k) {
        const Corpus corpus = generate_synthetic(class_set(classes), per_class, seed);
        std::vector<EncodingLevel> parsed;
        for (const auto& l : levels) parsed.push_back(parse_level(l));
        EvalOptions opts;
        opts.render = make_render(width, height, 0.05, 1);
        opts.knn.k = k;
        ExperimentReport r;
        {
          py::gil_scoped_release release;
          r = run_ablation(corpus, parsed, {}, opts);
        }
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict d;
          d["level"] = std::string(to_string(row.level));
          d["front"] = row.front;
          d["top"] = row.top;
          d["side"] = row.side;
          d["fused_multiply"] = row.fused;
          d["fused_average"] = row.fused_average;
          d["fused_max"] = row.fused_max;
          rows.append(d);
        }
        return rows;
      },
      py::arg("classes") = "six", py::arg("per_class") = 30, py::arg("seed") = kDefaultSeed,
      py::arg("levels") = std::vector<std::string>{"raw", "hue", "full"}, py::arg("width") = 256,
      py::arg("height") = 256, py::arg("k") = 1);
}
