#include "vora/error.hpp"
#include "vora/filter_calculus.hpp"
#include "vora/optimizer.hpp"
#include "vora/spectral_data.hpp"
#include "vora/vora_metric.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

namespace py = pybind11;

namespace {

py::dict report_to_dict(const vora::OptimizationReport& report) {
  py::list rows;
  for (const auto& r : report.iterations) {
    py::dict row;
    row["iter"] = r.iter;
    row["vora"] = r.vora;
    row["mu"] = r.mu;
    row["step"] = r.step;
    row["gradnorm"] = r.grad_norm;
    row["backtracks"] = r.backtracks;
    rows.append(row);
  }
  py::dict d;
  d["iterations"] = rows;
  d["final_filter"] = report.final_filter.transmittance();
  d["normalized_filter"] = report.normalized_filter;
  d["initial_vora"] = report.initial_vora;
  d["final_vora"] = report.final_vora;
  d["termination"] = vora::to_string(report.termination);
  d["method"] = vora::to_string(report.method);
  d["alpha"] = report.alpha;
  if (report.coefficients) d["coefficients"] = *report.coefficients;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Vora-Value evaluation and colorimetric filter design";

  py::register_exception<vora::VoraError>(m, "VoraError", PyExc_ValueError);

  py::class_<vora::WavelengthGrid>(m, "WavelengthGrid")
      .def(py::init([](double start, double step, int count) { return vora::WavelengthGrid::make(start, step, count); }),
           py::arg("start_nm") = 400.0, py::arg("step_nm") = 10.0, py::arg("count") = 31)
      .def_static("parse", &vora::WavelengthGrid::parse)
      .def_readonly("start_nm", &vora::WavelengthGrid::start_nm)
      .def_readonly("step_nm", &vora::WavelengthGrid::step_nm)
      .def_readonly("count", &vora::WavelengthGrid::count)
      .def("wavelengths", &vora::WavelengthGrid::wavelengths)
      .def("__repr__", [](const vora::WavelengthGrid& g) { return "WavelengthGrid(" + g.to_string() + ")"; });

  py::class_<vora::SensorSet>(m, "SensorSet")
      .def(py::init([](const vora::WavelengthGrid& grid, const Eigen::MatrixXd& responses,
                       const std::array<std::string, 3>& names) { return vora::SensorSet(grid, responses, names); }),
           py::arg("grid"), py::arg("responses"), py::arg("channel_names") = std::array<std::string, 3>{"c1", "c2", "c3"})
      .def_property_readonly("grid", &vora::SensorSet::grid)
      .def_property_readonly("responses", &vora::SensorSet::responses)
      .def_property_readonly("channel_names", &vora::SensorSet::channel_names);

  m.def("parse_spectral_csv",
        [](const std::string& text, int channels) {
          const vora::RawSpectra raw = vora::parse_spectral_csv_text(text, channels);
          return py::make_tuple(raw.wavelengths, raw.values, raw.channel_names);
        },
        py::arg("text"), py::arg("expected_channels") = 3);
  m.def("resample_to_grid", &vora::resample_to_grid, py::arg("wavelengths"), py::arg("values"), py::arg("grid"));
  m.def("load_sensor_set", &vora::load_sensor_set, py::arg("path"), py::arg("grid") = vora::WavelengthGrid{});
  m.def("reference_gaussian_camera", &vora::reference_gaussian_camera, py::arg("grid") = vora::WavelengthGrid{});
  m.def("gaussian_camera", &vora::gaussian_camera, py::arg("grid"), py::arg("peaks_nm"), py::arg("sigma_nm"));

  m.def("vora_value",
        [](const vora::SensorSet& camera, const vora::SensorSet& observer) {
          return vora::vora_value(camera, observer).raw;
        },
        py::arg("camera"), py::arg("observer"));
  m.def("filtered_vora_value",
        [](const vora::SensorSet& camera, const vora::SensorSet& observer, const Eigen::VectorXd& f) {
          return vora::filtered_vora_value(camera, observer, f).raw;
        },
        py::arg("camera"), py::arg("observer"), py::arg("filter"));
  m.def("regularized_objective", &vora::regularized_objective, py::arg("camera"), py::arg("observer"),
        py::arg("filter"), py::arg("alpha"));

  m.def("gradient",
        [](const vora::SensorSet& camera, const vora::SensorSet& observer, const Eigen::VectorXd& f) {
          return vora::gradient(vora::VoraObjective(camera, observer), f);
        },
        py::arg("camera"), py::arg("observer"), py::arg("filter"));
  m.def("hessian",
        [](const vora::SensorSet& camera, const vora::SensorSet& observer, const Eigen::VectorXd& f, double alpha) {
          return vora::hessian(vora::VoraObjective(camera, observer), f, alpha).matrix;
        },
        py::arg("camera"), py::arg("observer"), py::arg("filter"), py::arg("alpha") = 0.0);
  m.def("make_basis",
        [](const std::string& spec, const vora::WavelengthGrid& grid) {
          return vora::parse_basis_spec(spec, grid).basis;
        },
        py::arg("spec"), py::arg("grid") = vora::WavelengthGrid{});
  m.def("gradient_in_basis",
        [](const vora::SensorSet& camera, const vora::SensorSet& observer, const std::string& spec,
           const Eigen::VectorXd& coeffs) {
          return vora::gradient_in_basis(camera, observer, vora::parse_basis_spec(spec, camera.grid()), coeffs);
        },
        py::arg("camera"), py::arg("observer"), py::arg("basis"), py::arg("coeffs"));
  m.def("newton_step",
        [](const vora::SensorSet& camera, const vora::SensorSet& observer, const Eigen::VectorXd& f, double alpha) {
          return vora::newton_step(vora::VoraObjective(camera, observer), f, alpha);
        },
        py::arg("camera"), py::arg("observer"), py::arg("filter"), py::arg("alpha"));
  m.def("project_to_box", py::overload_cast<const Eigen::VectorXd&, double, double>(&vora::project_to_box),
        py::arg("v"), py::arg("tau_min") = 1e-4, py::arg("tau_max") = 1.0);

  m.def("optimize",
        [](const vora::SensorSet& camera, const vora::SensorSet& observer, const std::string& method, double alpha,
           int max_iters, double tol_obj, double tol_grad, double tau_min, double tau_max,
           const std::optional<std::string>& basis, const std::string& init, std::uint64_t seed) {
          vora::OptimizerConfig config;
          config.method = vora::parse_method(method);
          config.alpha = alpha;
          config.max_iters = max_iters;
          config.tol_obj = tol_obj;
          config.tol_grad = tol_grad;
          config.tau_min = tau_min;
          config.tau_max = tau_max;
          config.seed = seed;
          if (init == "random") {
            config.init = vora::InitKind::Random;
          } else if (init != "ones") {
            throw vora::VoraError(vora::ErrorCode::InvalidConfig, "init must be 'ones' or 'random'");
          }
          if (basis) {
            const vora::BasisSet parsed = vora::parse_basis_spec(*basis, camera.grid());
            config.basis = vora::BasisSpec{parsed.kind, static_cast<int>(parsed.dimension())};
          }
          std::optional<vora::OptimizationReport> report;
          {
            py::gil_scoped_release release;
            report.emplace(vora::optimize(camera, observer, config));
          }
          return report_to_dict(*report);
        },
        py::arg("camera"), py::arg("observer"), py::arg("method") = "grad", py::arg("alpha") = 1e-4,
        py::arg("max_iters") = 5000, py::arg("tol_obj") = 1e-12, py::arg("tol_grad") = 1e-8,
        py::arg("tau_min") = 1e-4, py::arg("tau_max") = 1.0, py::arg("basis") = py::none(),
        py::arg("init") = "ones", py::arg("seed") = 0);
}
