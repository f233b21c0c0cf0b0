#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tofdemix/dictionary.hpp"
#include "tofdemix/pipeline.hpp"
#include "tofdemix/scene_io.hpp"
#include "tofdemix/sensor.hpp"
#include "tofdemix/solver.hpp"

namespace py = pybind11;
using namespace tofdemix;

namespace {

Grid grid_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw py::value_error("expected a 2-D array (height, width)");
    Grid grid(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
    std::copy(arr.data(), arr.data() + arr.size(), grid.values().begin());
    return grid;
}

py::array_t<double> grid_to_array(const Grid& grid) {
    py::array_t<double> out({grid.height(), grid.width()});
    std::copy(grid.values().begin(), grid.values().end(), out.mutable_data());
    return out;
}

py::array_t<std::complex<double>> cube_to_array(const MeasurementCube& cube) {
    py::array_t<std::complex<double>> out(
        {cube.height(), cube.width(), cube.plan().harmonic_count});
    std::copy(cube.values().begin(), cube.values().end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-frequency AMCW ToF simulation and sparse multipath decomposition";

    m.attr("SPEED_OF_LIGHT") = speed_of_light;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    py::class_<Layer>(m, "Layer")
        .def(py::init([](py::array_t<double> depth, py::array_t<double> amplitude) {
                 return Layer{grid_from_array(std::move(depth)),
                              grid_from_array(std::move(amplitude))};
             }),
             py::arg("depth"), py::arg("amplitude"))
        .def_property_readonly("depth",
                               [](const Layer& l) { return grid_to_array(l.depth_map); })
        .def_property_readonly("amplitude",
                               [](const Layer& l) { return grid_to_array(l.amplitude_map); });

    py::class_<Scene>(m, "Scene")
        .def(py::init([](int width, int height) {
                 Scene s;
                 s.width = width;
                 s.height = height;
                 return s;
             }),
             py::arg("width"), py::arg("height"))
        .def_readonly("width", &Scene::width)
        .def_readonly("height", &Scene::height)
        .def("add_layer",
             [](Scene& s, py::array_t<double> depth, py::array_t<double> amplitude) {
                 s.layers.push_back(
                     {grid_from_array(std::move(depth)), grid_from_array(std::move(amplitude))});
             },
             py::arg("depth"), py::arg("amplitude"))
        .def("validate", &validate_scene)
        .def_property_readonly("layer_count",
                               [](const Scene& s) { return s.layers.size(); });

    m.def("load_scene", &load_scene, py::arg("path"));
    m.def("save_scene", &save_scene, py::arg("scene"), py::arg("path"));

    py::class_<ModulationPlan>(m, "ModulationPlan")
        .def(py::init([](double f0_hz, int harmonics, double s0,
                         std::optional<double> dc_offset) {
                 ModulationPlan p;
                 p.base_frequency_hz = f0_hz;
                 p.harmonic_count = harmonics;
                 p.modulation_depth = s0;
                 p.dc_offset = dc_offset;
                 p.validate();
                 return p;
             }),
             py::arg("f0_hz"), py::arg("harmonics"), py::arg("s0") = 1.0,
             py::arg("dc_offset") = std::nullopt)
        .def_readonly("base_frequency_hz", &ModulationPlan::base_frequency_hz)
        .def_readonly("harmonic_count", &ModulationPlan::harmonic_count)
        .def_readonly("modulation_depth", &ModulationPlan::modulation_depth);

    py::class_<MeasurementCube>(m, "MeasurementCube")
        .def_property_readonly("width", &MeasurementCube::width)
        .def_property_readonly("height", &MeasurementCube::height)
        .def_property_readonly("noise_sigma", &MeasurementCube::noise_sigma)
        .def_property_readonly("plan", &MeasurementCube::plan)
        .def_property_readonly("values", &cube_to_array,
                               "Complex measurements, shape (height, width, N)");

    m.def("phase_of_depth", &phase_of_depth, py::arg("depth_m"), py::arg("omega_rad_s"));
    m.def(
        "four_bucket_estimate",
        [](const std::array<double, 4>& samples, double s0) {
            const auto est = four_bucket_estimate(samples, s0);
            return py::make_tuple(est.amplitude, est.phase, est.degenerate);
        },
        py::arg("samples"), py::arg("s0") = 1.0,
        "Returns (amplitude, phase, degenerate) from four quarter-period samples");
    m.def("measure", &measure, py::arg("scene"), py::arg("plan"), py::arg("noise_sigma") = 0.0,
          py::arg("seed") = 0,
          "Simulate bucket samples and apply the four-bucket estimator per pixel");
    m.def(
        "single_frequency_depth",
        [](std::complex<double> z, double omega) -> py::object {
            const auto d = single_frequency_depth(z, omega);
            if (!d) return py::none();
            return py::float_(*d);
        },
        py::arg("z"), py::arg("omega_rad_s"));

    py::class_<Dictionary>(m, "Dictionary")
        .def_property_readonly("harmonic_count", &Dictionary::harmonic_count)
        .def_property_readonly("grid_size", &Dictionary::grid_size)
        .def_property_readonly("base_frequency_hz", &Dictionary::base_frequency_hz)
        .def_property_readonly("grid_cell_depth", &Dictionary::grid_cell_depth)
        .def_property_readonly("unambiguous_range", &Dictionary::unambiguous_range)
        .def_property_readonly("atoms",
                               [](const Dictionary& d) -> Eigen::MatrixXcd { return d.atoms(); })
        .def("write_csv", &Dictionary::write_csv, py::arg("path"));

    m.def("build_dictionary", &build_dictionary, py::arg("harmonics"), py::arg("grid_size"),
          py::arg("f0_hz"));
    m.def("grid_index_to_depth", &grid_index_to_depth, py::arg("grid_index"), py::arg("dict"));
    m.def("depth_to_nearest_grid_index", &depth_to_nearest_grid_index, py::arg("depth_m"),
          py::arg("dict"));
    m.def(
        "forward_vandermonde",
        [](const std::vector<double>& phases, int harmonics) {
            return forward_vandermonde(phases, harmonics);
        },
        py::arg("phases"), py::arg("harmonics"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init([](int k, double epsilon, double min_amplitude, bool refit) {
                 SolverConfig c;
                 c.max_components = k;
                 c.residual_tolerance = epsilon;
                 c.min_amplitude = min_amplitude;
                 c.refit = refit;
                 c.validate();
                 return c;
             }),
             py::arg("k"), py::arg("epsilon") = 0.0, py::arg("min_amplitude") = 0.0,
             py::arg("refit") = false)
        .def_readonly("max_components", &SolverConfig::max_components)
        .def_readonly("residual_tolerance", &SolverConfig::residual_tolerance)
        .def_readonly("min_amplitude", &SolverConfig::min_amplitude);

    py::class_<SparseSolution>(m, "SparseSolution")
        .def_readonly("support", &SparseSolution::support)
        .def_readonly("amplitudes", &SparseSolution::amplitudes)
        .def_readonly("residual_norm", &SparseSolution::residual_norm)
        .def_readonly("iterations", &SparseSolution::iterations)
        .def_readonly("phase_warning", &SparseSolution::phase_warning)
        .def_property_readonly("coefficients",
                               [](const SparseSolution& s) -> Eigen::VectorXcd {
                                   return s.coefficients;
                               })
        .def_property_readonly("stopped_on_tolerance", [](const SparseSolution& s) {
            return s.stop_reason == StopReason::residual_tolerance;
        });

    m.def("omp_decompose", &omp_decompose, py::arg("z"), py::arg("dict"), py::arg("config"));
    m.def("brute_force_decompose", &brute_force_decompose, py::arg("z"), py::arg("dict"),
          py::arg("k"));

    py::class_<ReproduceConfig>(m, "ReproduceConfig")
        .def(py::init<>())
        .def_readwrite("width", &ReproduceConfig::width)
        .def_readwrite("height", &ReproduceConfig::height)
        .def_readwrite("mid_depth", &ReproduceConfig::mid_depth)
        .def_readwrite("snr_db", &ReproduceConfig::snr_db)
        .def_readwrite("rng_seed", &ReproduceConfig::rng_seed)
        .def_readwrite("grid_size", &ReproduceConfig::grid_size)
        .def_readwrite("k", &ReproduceConfig::k)
        .def_readwrite("output_dir", &ReproduceConfig::output_dir);

    py::class_<MapStack>(m, "MapStack")
        .def_readonly("k", &MapStack::k)
        .def_readonly("sentinel", &MapStack::sentinel)
        .def("depth_map", [](const MapStack& s, int k) { return grid_to_array(s.depth.at(k)); })
        .def("amplitude_map",
             [](const MapStack& s, int k) { return grid_to_array(s.amplitude.at(k)); })
        .def_property_readonly("baseline_depth",
                               [](const MapStack& s) { return grid_to_array(s.baseline_depth); })
        .def_property_readonly("baseline_amplitude",
                               [](const MapStack& s) {
                                   return grid_to_array(s.baseline_amplitude);
                               })
        .def_property_readonly("residual",
                               [](const MapStack& s) { return grid_to_array(s.residual); });

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("maps", &RunResult::maps)
        .def_property_readonly("no_signal",
                               [](const RunResult& r) { return r.report.no_signal; });

    m.def("reproduce_experiment", &reproduce_paper_experiment, py::arg("config"),
          "Run the built-in three-layer experiment; writes outputs when output_dir is set");
}
