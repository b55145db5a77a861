#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "focaler/analysis.hpp"
#include "focaler/focaler.hpp"
#include "focaler/geometry.hpp"
#include "focaler/gradients.hpp"
#include "focaler/io.hpp"
#include "focaler/simulator.hpp"
#include "focaler/variants.hpp"

namespace py = pybind11;
using namespace focaler;

namespace {

py::dict grad_dict(const Grad4& g) {
  py::dict d;
  d["d_cx"] = g.d_cx;
  d["d_cy"] = g.d_cy;
  d["d_w"] = g.d_w;
  d["d_h"] = g.d_h;
  return d;
}

std::vector<BoxPair> to_pairs(const std::vector<std::pair<Box, Box>>& pairs) {
  std::vector<BoxPair> out;
  out.reserve(pairs.size());
  for (const auto& [a, g] : pairs) out.push_back({a, g, false});
  return out;
}

py::dict run_dict(const RunResult& r, bool with_traces) {
  py::dict d;
  d["mean_final_iou"] = r.mean_final_iou;
  d["mean_final_l1"] = r.mean_final_l1;
  d["diverged"] = r.diverged;
  d["clamp_events"] = r.clamp_events;
  py::list per_pair;
  for (const PairResult& p : r.per_pair) {
    py::dict pd;
    pd["final_iou"] = p.final_iou;
    pd["final_l1"] = p.final_l1;
    pd["diverged"] = p.diverged;
    if (with_traces) {
      std::vector<double> ious;
      ious.reserve(p.trace.size());
      for (const auto& s : p.trace) ious.push_back(s.iou);
      pd["iou_trace"] = ious;
    }
    per_pair.append(pd);
  }
  d["per_pair"] = per_pair;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "IoU-family box regression losses (C++ core)";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

  py::class_<Box>(m, "Box")
      .def(py::init<double, double, double, double>(), py::arg("cx"), py::arg("cy"), py::arg("w"),
           py::arg("h"))
      .def_static("from_corners",
                  py::overload_cast<double, double, double, double>(&Box::from_corners),
                  py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_property_readonly("cx", &Box::cx)
      .def_property_readonly("cy", &Box::cy)
      .def_property_readonly("w", &Box::w)
      .def_property_readonly("h", &Box::h)
      .def("corners",
           [](const Box& b) {
             const CornerBox c = b.to_corners();
             return py::make_tuple(c.x1, c.y1, c.x2, c.y2);
           })
      .def("__eq__", [](const Box& a, const Box& b) { return a == b; })
      .def("__repr__", [](const Box& b) { return to_string(b); });

  py::enum_<LossKind>(m, "LossKind")
      .value("IoU", LossKind::IoU)
      .value("GIoU", LossKind::GIoU)
      .value("DIoU", LossKind::DIoU)
      .value("CIoU", LossKind::CIoU)
      .value("EIoU", LossKind::EIoU)
      .value("SIoU", LossKind::SIoU)
      .def_static("parse", [](const std::string& t) { return parse_loss_kind(t); })
      .def_property_readonly("token", [](LossKind k) { return std::string(to_string(k)); });

  py::enum_<FocusMode>(m, "FocusMode")
      .value("focus_hard", FocusMode::FocusHard)
      .value("focus_easy", FocusMode::FocusEasy);

  py::class_<SiouParams>(m, "SiouParams")
      .def(py::init([](double theta, double eps) {
             SiouParams p{theta, eps};
             p.validate();
             return p;
           }),
           py::arg("theta") = 4.0, py::arg("eps") = 1e-7)
      .def_readonly("theta", &SiouParams::theta)
      .def_readonly("eps", &SiouParams::eps);

  py::class_<FocalerInterval>(m, "FocalerInterval")
      .def(py::init<double, double>(), py::arg("d"), py::arg("u"))
      .def_property_readonly("d", &FocalerInterval::d)
      .def_property_readonly("u", &FocalerInterval::u)
      .def_property_readonly("slope", &FocalerInterval::slope);

  m.def("iou", &focaler::iou, py::arg("a"), py::arg("b"));

  m.def(
      "metric",
      [](LossKind kind, const Box& a, const Box& g, const SiouParams& p) {
        const MetricBreakdown mb = metric(kind, a, g, p);
        py::dict d;
        d["metric"] = mb.metric;
        d["iou"] = mb.iou;
        d["terms"] = mb.terms;
        d["degenerate"] = mb.degenerate;
        return d;
      },
      py::arg("kind"), py::arg("a"), py::arg("g"), py::arg("siou") = SiouParams{});

  m.def("loss", &focaler::loss, py::arg("kind"), py::arg("a"), py::arg("g"),
        py::arg("siou") = SiouParams{});

  m.def("focaler_map", &focaler_map, py::arg("iou"), py::arg("interval"));
  m.def("focaler_iou_loss", &focaler_iou_loss, py::arg("iou"), py::arg("interval"));
  m.def("mapping_slope", &mapping_slope, py::arg("iou"), py::arg("interval"));
  m.def(
      "focaler_loss",
      [](LossKind kind, const Box& a, const Box& g, const FocalerInterval& iv,
         const SiouParams& p) {
        const FocalerEval e = focaler_loss(kind, a, g, iv, p);
        py::dict d;
        d["iou"] = e.iou;
        d["iou_focaler"] = e.iou_focaler;
        d["base_loss"] = e.base_loss;
        d["focaler_loss"] = e.focaler_loss;
        d["degenerate"] = e.degenerate;
        return d;
      },
      py::arg("kind"), py::arg("a"), py::arg("g"), py::arg("interval"),
      py::arg("siou") = SiouParams{});

  m.def(
      "loss_grad",
      [](LossKind kind, const Box& a, const Box& g, std::optional<FocalerInterval> iv,
         const SiouParams& p) {
        const LossGrad lg = loss_grad(kind, a, g, iv, p);
        return py::make_tuple(lg.loss, grad_dict(lg.grad), lg.nonsmooth);
      },
      py::arg("kind"), py::arg("a"), py::arg("g"), py::arg("interval") = py::none(),
      py::arg("siou") = SiouParams{});

  m.def(
      "fd_grad",
      [](LossKind kind, const Box& a, const Box& g, std::optional<FocalerInterval> iv,
         const SiouParams& p, double step) { return grad_dict(fd_grad(kind, a, g, iv, p, step)); },
      py::arg("kind"), py::arg("a"), py::arg("g"), py::arg("interval") = py::none(),
      py::arg("siou") = SiouParams{}, py::arg("step") = 1e-6);

  m.def(
      "grad_check",
      [](std::vector<LossKind> kinds, std::size_t n, std::uint64_t seed, double tol,
         bool with_focaler) {
        GradCheckOptions o;
        if (!kinds.empty()) o.kinds = std::move(kinds);
        o.n = n;
        o.seed = seed;
        o.tol_rel = tol;
        o.with_focaler = with_focaler;
        const GradCheckReport r = grad_check(o);
        py::dict d;
        d["max_rel_err"] = r.max_rel_err;
        d["max_abs_err"] = r.max_abs_err;
        d["n_points"] = r.n_points;
        d["n_skipped"] = r.n_skipped;
        d["passed"] = r.passed();
        return d;
      },
      py::arg("kinds") = std::vector<LossKind>{}, py::arg("n") = 1000, py::arg("seed") = 7,
      py::arg("tol") = 1e-5, py::arg("with_focaler") = false);

  m.def(
      "generate_scenarios",
      [](std::size_t n_easy, std::size_t n_hard, std::pair<double, double> easy_range,
         std::pair<double, double> hard_range, std::pair<double, double> size_range,
         std::uint64_t seed) {
        ScenarioSpec s{n_easy, n_hard, easy_range, hard_range, size_range, seed};
        std::vector<std::pair<Box, Box>> out;
        for (const BoxPair& p : generate_scenarios(s)) out.emplace_back(p.anchor, p.gt);
        return out;
      },
      py::arg("n_easy"), py::arg("n_hard"), py::arg("easy_iou_range") = std::make_pair(0.5, 0.9),
      py::arg("hard_iou_range") = std::make_pair(0.1, 0.5),
      py::arg("gt_size_range") = std::make_pair(1.0, 4.0), py::arg("seed") = 0);

  m.def(
      "run",
      [](const std::vector<std::pair<Box, Box>>& pairs, LossKind kind, double lr,
         std::size_t steps, std::optional<FocalerInterval> iv, const SiouParams& p,
         unsigned threads, bool traces) {
        ScenarioSet s;
        s.pairs = to_pairs(pairs);
        s.kind = kind;
        s.lr = lr;
        s.steps = steps;
        s.interval = iv;
        s.siou = p;
        s.threads = threads;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(s);
        }
        return run_dict(r, traces);
      },
      py::arg("pairs"), py::arg("kind"), py::arg("lr"), py::arg("steps"),
      py::arg("interval") = py::none(), py::arg("siou") = SiouParams{}, py::arg("threads") = 1,
      py::arg("traces") = false);

  m.def(
      "compare",
      [](const std::vector<std::pair<LossKind, std::optional<FocalerInterval>>>& configs,
         const std::vector<std::pair<Box, Box>>& pairs, double lr, std::size_t steps) {
        std::vector<RunConfig> cfgs;
        for (const auto& [k, iv] : configs) cfgs.push_back({k, iv});
        std::vector<ConfigSummary> rows;
        {
          py::gil_scoped_release release;
          rows = compare(cfgs, to_pairs(pairs), lr, steps);
        }
        py::list out;
        for (const auto& row : rows) {
          py::dict d;
          d["config_id"] = row.config_id;
          d["kind"] = std::string(to_string(row.config.kind));
          d["mean_final_iou"] = row.mean_final_iou;
          d["mean_final_l1"] = row.mean_final_l1;
          d["diverged"] = row.diverged;
          out.append(d);
        }
        return out;
      },
      py::arg("configs"), py::arg("pairs"), py::arg("lr"), py::arg("steps"));

  m.def(
      "analyze",
      [](const std::vector<std::pair<Box, Box>>& pairs, FocusMode mode, std::size_t bins) {
        const auto bp = to_pairs(pairs);
        const IoUHistogram h = iou_histogram(bp, bins);
        const IntervalRecommendation rec = recommend_interval(h, mode);
        return analysis_json(h, rec);
      },
      py::arg("pairs"), py::arg("mode") = FocusMode::FocusHard, py::arg("bins") = 10);

  m.def("paper_fixture", [] {
    py::list rows;
    for (const auto& r : bundled_paper_fixture().rows) {
      rows.append(py::make_tuple(r.detector, r.loss_name, std::stod(r.ap50), std::stod(r.map5095)));
    }
    return rows;
  });
}
