#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fatlas/cli.hpp"

namespace py = pybind11;
using namespace fatlas;

namespace {

std::vector<Point> rows(const Eigen::MatrixXd& m) {
  std::vector<Point> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m.row(i).transpose());
  return out;
}

Eigen::MatrixXd stack(const std::vector<Point>& pts) {
  if (pts.empty()) return {};
  Eigen::MatrixXd m(pts.size(), pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) = pts[i].transpose();
  return m;
}

py::tuple mesh_arrays(const SimplicialComplex& c) {
  const MeshExport m = export_mesh(c);
  Eigen::MatrixXd v(m.vertices.size(), 3);
  Eigen::MatrixXi f(m.faces.size(), 3);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) v.row(i) = m.vertices[i].transpose();
  for (std::size_t i = 0; i < m.faces.size(); ++i) f.row(i) << m.faces[i][0], m.faces[i][1], m.faces[i][2];
  return py::make_tuple(v, f);
}

py::tuple run(const std::string& command, const std::string& config_json, const std::string& out,
              bool timestamp) {
  std::ostringstream log, printed;
  CommandOptions opts;
  opts.timestamp = timestamp;
  opts.log = &log;
  opts.out = &printed;
  Json report;
  int code = kExitConfig;
  {
    py::gil_scoped_release release;
    try {
      Overrides o;
      o.out = out;
      code = run_command(command, parse_run_config(Json::parse(config_json), o), opts, &report);
    } catch (const ConfigError& e) {
      log << "config error: " << e.what() << '\n';
    } catch (const Json::exception& e) {
      log << "config error: " << e.what() << '\n';
    }
  }
  return py::make_tuple(code, report.is_null() ? std::string("null") : report.dump(), log.str());
}

}  // namespace

PYBIND11_MODULE(_fatlas, m) {
  m.doc() = "Thick triangulations of surfaces and Alexander maps";

  py::register_exception<Error>(m, "FatlasError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("thickness", [](const Eigen::MatrixXd& v) { return thickness(rows(v)); }, py::arg("vertices"),
        "Thickness of the simplex whose vertices are the rows.");
  m.def("simplex_volume", [](const Eigen::MatrixXd& v) { return simplex_volume(rows(v)); }, py::arg("vertices"));
  m.def("regular_simplex", [](int k) { return stack(regular_simplex(k)); }, py::arg("k"));
  m.def("outer_dilatation", &outer_dilatation, py::arg("A"));
  m.def(
      "affine_dilatation",
      [](const Eigen::MatrixXd& tau, const Eigen::MatrixXd& target) {
        return outer_dilatation(affine_to_model(rows(tau), rows(target)).A);
      },
      py::arg("tau"), py::arg("target"), "Outer dilatation of the affine map sending rows of tau to rows of target.");
  m.def(
      "load_mesh", [](const std::string& path) { return mesh_arrays(load_mesh(path)); }, py::arg("path"),
      "Vertices (n x 3) and oriented faces (m x 3) of an OFF or OBJ file.");
  m.def("run", &run, py::arg("command"), py::arg("config_json"), py::arg("out"), py::arg("timestamp") = false,
        "Runs a command; returns (exit code, report JSON, log text).");
  m.def("worker_count", &worker_count);
}
