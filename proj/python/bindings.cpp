#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>
#include <vector>

#include "splidar/consensus_filter.hpp"
#include "splidar/depth_estimator.hpp"
#include "splidar/evaluation.hpp"
#include "splidar/simulator.hpp"
#include "splidar/theory.hpp"

namespace py = pybind11;
using namespace splidar;

namespace {

template <class T>
py::array_t<T> to_array(const Grid<T>& grid) {
  py::array_t<T> out({grid.height(), grid.width()});
  std::copy(grid.data().begin(), grid.data().end(), out.mutable_data());
  return out;
}

Grid<double> to_grid(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  Grid<double> grid(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), grid.data().begin());
  return grid;
}

py::array_t<double> to_array(std::span<const double> values) {
  py::array_t<double> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::array_t<std::size_t> counts(const PixelLists& lists) {
  py::array_t<std::size_t> out({lists.height(), lists.width()});
  auto* p = out.mutable_data();
  for (std::size_t k = 0; k < lists.pixel_count(); ++k) p[k] = lists.at(k).size();
  return out;
}

PipelineOptions pipeline_options(double p_outlier, double beta, unsigned threads) {
  PipelineOptions options;
  options.p_outlier = p_outlier;
  options.pml.beta = beta;
  options.pml.threads = threads;
  options.threads = threads;
  return options;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Single-photon LiDAR simulation, signal extraction and depth estimation";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<AcquisitionParams>(m, "AcquisitionParams")
      .def(py::init<>())
      .def_readwrite("repetition_period", &AcquisitionParams::repetition_period)
      .def_readwrite("pulse_width", &AcquisitionParams::pulse_width)
      .def_readwrite("efficiency", &AcquisitionParams::efficiency)
      .def_readwrite("signal_flux", &AcquisitionParams::signal_flux)
      .def_readwrite("pulses", &AcquisitionParams::pulses)
      .def_readwrite("background", &AcquisitionParams::background)
      .def_property_readonly("max_depth", &AcquisitionParams::max_depth)
      .def("validate", &AcquisitionParams::validate);

  py::class_<Scene>(m, "Scene")
      .def(py::init([](const py::array_t<double, py::array::c_style | py::array::forcecast>& alpha,
                       const py::array_t<double, py::array::c_style | py::array::forcecast>& depth) {
             return Scene(to_grid(alpha), to_grid(depth));
           }),
           py::arg("reflectivity"), py::arg("depth"))
      .def_property_readonly("height", &Scene::height)
      .def_property_readonly("width", &Scene::width)
      .def_property_readonly("reflectivity", [](const Scene& s) { return to_array(s.reflectivity()); })
      .def_property_readonly("depth", [](const Scene& s) { return to_array(s.depth()); })
      .def("mean_reflectivity", &Scene::mean_reflectivity);

  m.def("toy_scene", &toy_scene, py::arg("n"));
  m.def("blocks_scene", &blocks_scene, py::arg("n"));

  py::class_<TimestampCube>(m, "TimestampCube")
      .def_property_readonly("height", &TimestampCube::height)
      .def_property_readonly("width", &TimestampCube::width)
      .def_readonly("params", &TimestampCube::params)
      .def("pixel", [](const TimestampCube& c, std::size_t r, std::size_t col) {
        if (r >= c.height() || col >= c.width()) throw py::index_error("pixel out of range");
        return to_array(c.pixel(r, col));
      })
      .def("counts", [](const TimestampCube& c) { return counts(c.timestamps); })
      .def_property_readonly("total", [](const TimestampCube& c) { return c.timestamps.total(); });

  py::class_<CensoredCube>(m, "CensoredCube")
      .def_property_readonly("height", &CensoredCube::height)
      .def_property_readonly("width", &CensoredCube::width)
      .def("pixel", [](const CensoredCube& c, std::size_t r, std::size_t col) {
        if (r >= c.height() || col >= c.width()) throw py::index_error("pixel out of range");
        return to_array(c.pixel(r, col));
      })
      .def("counts", [](const CensoredCube& c) { return counts(c.signal_sets); })
      .def("nonempty_pixels", &CensoredCube::nonempty_pixels);

  m.def("configure_for_targets", &configure_for_targets, py::arg("scene"),
        py::arg("base") = AcquisitionParams{}, py::arg("sbr"), py::arg("signal_ppp"));
  m.def("simulate_scene",
        [](const Scene& scene, const AcquisitionParams& params, std::uint64_t seed, unsigned threads) {
          py::gil_scoped_release release;
          return simulate_scene(scene, params, RngSeed{seed}, threads);
        },
        py::arg("scene"), py::arg("params"), py::arg("seed"), py::arg("threads") = 0);
  m.def("simulate_pixel",
        [](double alpha, double depth, const AcquisitionParams& params, std::uint64_t seed) {
          return to_array(simulate_pixel(alpha, depth, params, RngSeed{seed}));
        },
        py::arg("alpha"), py::arg("depth"), py::arg("params"), py::arg("seed"));

  m.def("run_filter",
        [](const TimestampCube& cube, const std::string& filter, double p_outlier, unsigned threads) {
          const auto kind = parse_filter(filter);
          py::gil_scoped_release release;
          return run_filter(cube, kind, pipeline_options(p_outlier, PmlConfig{}.beta, threads));
        },
        py::arg("cube"), py::arg("filter"), py::arg("p_outlier") = 1.0, py::arg("threads") = 0);

  m.def("pml_depth",
        [](const CensoredCube& censored, const AcquisitionParams& params, double beta,
           int max_iterations, double tolerance) {
          PmlConfig config;
          config.beta = beta;
          config.max_iterations = max_iterations;
          config.tolerance = tolerance;
          PmlResult result;
          {
            py::gil_scoped_release release;
            result = pml_depth(censored, params, config);
          }
          return py::make_tuple(to_array(result.image.depth), to_array(result.image.valid),
                                result.converged);
        },
        py::arg("censored"), py::arg("params"), py::arg("beta") = PmlConfig{}.beta,
        py::arg("max_iterations") = PmlConfig{}.max_iterations,
        py::arg("tolerance") = PmlConfig{}.tolerance,
        "Returns (depth, valid, converged).");

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("censored", &PipelineResult::censored)
      .def_property_readonly("depth", [](const PipelineResult& r) { return to_array(r.depth.depth); })
      .def_property_readonly("valid", [](const PipelineResult& r) { return to_array(r.depth.valid); })
      .def_readonly("blank", &PipelineResult::blank)
      .def_readonly("pml_converged", &PipelineResult::pml_converged);

  m.def("run_pipeline",
        [](const TimestampCube& cube, const std::string& filter, double p_outlier, double beta,
           unsigned threads) {
          const auto kind = parse_filter(filter);
          py::gil_scoped_release release;
          return run_pipeline(cube, kind, pipeline_options(p_outlier, beta, threads));
        },
        py::arg("cube"), py::arg("filter"), py::arg("p_outlier") = 1.0,
        py::arg("beta") = PmlConfig{}.beta, py::arg("threads") = 0);

  m.def("rmse",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& truth,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& estimate) {
          return rmse(to_grid(truth), to_grid(estimate));
        },
        py::arg("truth"), py::arg("estimate"));

  py::class_<Predictor>(m, "Predictor")
      .def_readonly("value", &Predictor::value)
      .def("abs_error", [](const Predictor& p, const AcquisitionParams& params) {
        return theoretical_abs_error(p, params);
      });
  m.def("predictor", &predictor, py::arg("alpha"), py::arg("depth"), py::arg("mean_alpha"),
        py::arg("sbr"), py::arg("params"));
  m.def("count_split",
        [](double alpha, double depth, const AcquisitionParams& params) {
          const auto split = count_split(alpha, depth, params);
          return py::make_tuple(split.below, split.upto);
        },
        py::arg("alpha"), py::arg("depth"), py::arg("params"), "Returns (k_minus, k_plus).");

  py::class_<SweepRow>(m, "SweepRow")
      .def_property_readonly("filter", [](const SweepRow& r) { return std::string(to_string(r.filter)); })
      .def_readonly("value", &SweepRow::value)
      .def_readonly("trial_count", &SweepRow::trial_count)
      .def_readonly("mean_rmse", &SweepRow::mean_rmse)
      .def_readonly("std_rmse", &SweepRow::std_rmse)
      .def_readonly("trial_rmse", &SweepRow::trial_rmse);

  m.def("sweep",
        [](const Scene& scene, const std::string& vary, std::vector<double> values, double fixed,
           int trials, const std::vector<std::string>& filters, std::uint64_t seed,
           double p_outlier, double beta, unsigned threads) {
          SweepSpec spec;
          spec.scene = scene;
          if (vary == "sbr") spec.variable = SweepVariable::sbr;
          else if (vary == "signal-ppp" || vary == "signal_ppp") spec.variable = SweepVariable::signal_ppp;
          else throw py::value_error("vary must be 'sbr' or 'signal-ppp'");
          spec.values = std::move(values);
          spec.fixed_value = fixed;
          spec.trials = trials;
          spec.filters.clear();
          for (const auto& f : filters) spec.filters.push_back(parse_filter(f));
          spec.pipeline = pipeline_options(p_outlier, beta, threads);
          py::gil_scoped_release release;
          return run_sweep(spec, AcquisitionParams{}, RngSeed{seed}).rows;
        },
        py::arg("scene"), py::arg("vary"), py::arg("values"), py::arg("fixed"),
        py::arg("trials") = 1, py::arg("filters") = std::vector<std::string>{"rom", "mode", "consensus"},
        py::arg("seed") = 0, py::arg("p_outlier") = 1.0, py::arg("beta") = PmlConfig{}.beta,
        py::arg("threads") = 0);
}
