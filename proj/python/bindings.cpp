#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tangraph/cli.hpp"
#include "tangraph/errors.hpp"
#include "tangraph/report_io.hpp"
#include "tangraph/zoo.hpp"

namespace py = pybind11;
using namespace tangraph;

namespace {

ParamPoint point(int chart, const std::vector<double>& coords) {
  ParamPoint p;
  p.chart = chart;
  p.coords = Vec::Map(coords.data(), static_cast<Eigen::Index>(coords.size()));
  return p;
}

RadiusKind parse_kind(const std::string& kind) {
  if (kind == "c0" || kind == "C0") return RadiusKind::c0;
  if (kind == "c1" || kind == "C1") return RadiusKind::c1;
  throw InvalidParams("kind must be c0 or c1");
}

CheckOptions options(int grid, int threads) {
  CheckOptions o;
  o.grid = grid;
  o.threads = threads;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Local graph representations of immersions";

  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<PreconditionViolated>(mod, "PreconditionViolated", base.ptr());
  py::register_exception<RankDeficient>(mod, "RankDeficient", base.ptr());
  py::register_exception<UnknownEntry>(mod, "UnknownEntry", base.ptr());
  py::register_exception<InvalidParams>(mod, "InvalidParams", base.ptr());
  py::register_exception<BoundaryEscape>(mod, "BoundaryEscape", base.ptr());
  py::register_exception<NotAGraph>(mod, "NotAGraph", base.ptr());
  py::register_exception<MonotonicityViolated>(mod, "MonotonicityViolated", base.ptr());
  py::register_exception<ProbeHypothesisFailed>(mod, "ProbeHypothesisFailed", base.ptr());

  mod.def("version", [] { return std::string(version()); });
  mod.def("lambda_cap", &lambda_cap, py::arg("m"));
  mod.def("zoo_entries", [] {
    std::vector<std::pair<std::string, Params>> out;
    for (const auto& e : zoo_entries()) out.emplace_back(e.name, e.defaults);
    return out;
  });

  // Results cross the boundary as the same JSON documents the tool writes.
  mod.def(
      "extract",
      [](const std::string& name, const Params& params, int chart, const std::vector<double>& q,
         double r, int grid, int threads) {
        const auto f = zoo_build(name, params);
        ExtractOptions eo;
        eo.threads = threads;
        py::gil_scoped_release release;
        const auto s = extract(FrameContext::canonical(f, point(chart, q), r), grid, 0.0, eo);
        std::ostringstream csv;
        write_csv(csv, s);
        return std::pair{to_json(s), csv.str()};
      },
      py::arg("name"), py::arg("params"), py::arg("chart"), py::arg("q"), py::arg("r"),
      py::arg("grid") = 128, py::arg("threads") = 1);

  mod.def(
      "check_property",
      [](const std::string& name, const Params& params, const std::string& kind, double r,
         double lambda, std::size_t samples, std::uint64_t seed, int grid, int threads) {
        const auto f = zoo_build(name, params);
        const auto q = sample_points(f, {samples, seed});
        py::gil_scoped_release release;
        return to_json(check_property(parse_kind(kind), f, r, lambda, q, options(grid, threads)));
      },
      py::arg("name"), py::arg("params"), py::arg("kind"), py::arg("r"), py::arg("lam"),
      py::arg("samples") = 16, py::arg("seed") = 0, py::arg("grid") = 128, py::arg("threads") = 1);

  mod.def(
      "max_radius",
      [](const std::string& name, const Params& params, double lambda, const std::string& kind,
         std::size_t samples, std::uint64_t seed, double tol, int grid, int threads) {
        const auto f = zoo_build(name, params);
        py::gil_scoped_release release;
        return to_json(max_radius(f, lambda, parse_kind(kind), {samples, seed}, tol,
                                  options(grid, threads)));
      },
      py::arg("name"), py::arg("params"), py::arg("lam"), py::arg("kind"),
      py::arg("samples") = 16, py::arg("seed") = 0, py::arg("tol") = 1e-3, py::arg("grid") = 128,
      py::arg("threads") = 1);

  mod.def(
      "verify_main_theorem",
      [](const std::string& name, const Params& params, double lambda, std::size_t samples,
         std::uint64_t seed, double tol, int grid, int threads) {
        const auto f = zoo_build(name, params);
        py::gil_scoped_release release;
        return to_json(verify_main_theorem(f, lambda, {samples, seed}, tol, options(grid, threads)));
      },
      py::arg("name"), py::arg("params"), py::arg("lam"), py::arg("samples") = 16,
      py::arg("seed") = 0, py::arg("tol") = 1e-3, py::arg("grid") = 128, py::arg("threads") = 1);

  mod.def(
      "certify_du_bound",
      [](const std::string& name, const Params& params, int chart, const std::vector<double>& q,
         double r, double lambda, int grid) {
        const auto f = zoo_build(name, params);
        py::gil_scoped_release release;
        return to_json(certify_du_bound(f, point(chart, q), r, lambda, grid));
      },
      py::arg("name"), py::arg("params"), py::arg("chart"), py::arg("q"), py::arg("r"),
      py::arg("lam"), py::arg("grid") = 64);

  mod.def(
      "analyze_counterexample",
      [](double eps, double delta, double r, int angles) {
        py::gil_scoped_release release;
        return to_json(analyze_counterexample(eps, delta, r, angles));
      },
      py::arg("eps"), py::arg("delta"), py::arg("r"), py::arg("angles") = 4096);

  mod.def("iteration_constants", [] { return to_json(iteration_constants()); });

  mod.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
