#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isac_edge/beamform.hpp"
#include "isac_edge/channels.hpp"
#include "isac_edge/error.hpp"
#include "isac_edge/model.hpp"
#include "isac_edge/pipeline.hpp"
#include "isac_edge/scenario.hpp"
#include "isac_edge/timealloc.hpp"

namespace py = pybind11;
using namespace isac_edge;

namespace {

py::dict beamform_dict(const BeamformOutcome& o) {
  py::dict d;
  d["status"] = to_string(o.status);
  d["radar"] = o.pair.radar;
  d["data"] = o.pair.data;
  d["power_used"] = o.pair.power_used;
  d["sinr_com"] = o.sinr_com;
  d["sinr_sen"] = o.sinr_sen;
  d["rank1_defect"] = o.rank1_defect;
  d["message"] = o.message;
  return d;
}

py::dict allocation_dict(const TimeAllocation& a) {
  py::list binding;
  for (Binding b : a.binding) binding.append(to_string(b));
  py::dict d;
  d["durations"] = a.durations;
  d["mu_star"] = a.mu_star;
  d["binding"] = binding;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ISAC beamforming, time allocation and the end-to-end comparison pipeline";

  static py::exception<Error> error(m, "IsacError", PyExc_ValueError);
  static py::exception<InfeasibleTask> infeasible(m, "InfeasibleTaskError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InfeasibleTask& e) {
      py::set_error(infeasible, e.what());
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<ErrorModel>(m, "ErrorModel")
      .def(py::init<double, double>(), py::arg("a"), py::arg("b"))
      .def_readwrite("a", &ErrorModel::coefficient)
      .def_readwrite("b", &ErrorModel::exponent);

  py::class_<TaskSpec>(m, "TaskSpec")
      .def(py::init([](double eta, double a, double b) { return TaskSpec{eta, {a, b}}; }),
           py::arg("sensing_threshold"), py::arg("a"), py::arg("b"))
      .def_readwrite("sensing_threshold", &TaskSpec::sensing_threshold)
      .def_readwrite("error", &TaskSpec::error);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("num_antennas", &SystemConfig::num_antennas)
      .def_readwrite("max_power", &SystemConfig::max_power)
      .def_readwrite("noise_power", &SystemConfig::noise_power)
      .def_readwrite("clutter_power", &SystemConfig::clutter_power)
      .def_readwrite("bandwidth", &SystemConfig::bandwidth)
      .def_readwrite("sample_bits", &SystemConfig::sample_bits)
      .def_readwrite("total_time", &SystemConfig::total_time)
      .def_readwrite("sensing_time_per_sample", &SystemConfig::sensing_time_per_sample)
      .def_readwrite("tasks", &SystemConfig::tasks)
      .def("validate", &SystemConfig::validate);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("system", &Scenario::system)
      .def_readonly("seed", &Scenario::seed)
      .def_readonly("target_error", &Scenario::target_error)
      .def("channels", [](const Scenario& s) {
        const ChannelSet ch = s.channels();
        return py::make_tuple(ch.uplink, ch.echoes);
      }, "(uplink, [echo per task]) as complex arrays");

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); },
        py::arg("text"));

  m.def("db_to_linear", &db_to_linear);
  m.def("linear_to_db", &linear_to_db);
  m.def("dbm_to_watts", &dbm_to_watts);
  m.def("watts_to_dbm", &watts_to_dbm);
  m.def("sensing_sinr", &sensing_sinr, py::arg("w"), py::arg("g"), py::arg("noise_power"),
        py::arg("clutter_power"));
  m.def("comm_sinr", &comm_sinr, py::arg("f"), py::arg("w"), py::arg("h"),
        py::arg("noise_power"));
  m.def("rate", &rate, py::arg("sinr"));
  m.def("classification_error",
        [](double v, double a, double b) { return classification_error(v, {a, b}); },
        py::arg("samples"), py::arg("a"), py::arg("b"));
  m.def("fit_error_model", [](const std::vector<std::pair<double, double>>& pts) {
    std::vector<FitPoint> points;
    for (const auto& [v, e] : pts) points.push_back({v, e});
    const FitResult r = fit_error_model(points);
    return py::make_tuple(r.model.coefficient, r.model.exponent);
  }, py::arg("points"), "Least-squares (a, b) for E = a v^-b from (v, E) pairs");

  m.def("solve_beamforming",
        [](const ComplexVector& h, const ComplexVector& g, double eta, const SystemConfig& cfg) {
          return beamform_dict(solve_beamforming(h, g, eta, cfg));
        },
        py::arg("uplink"), py::arg("echo"), py::arg("threshold"), py::arg("config"));
  m.def("zf_oracle",
        [](const ComplexVector& h, const ComplexVector& g, double eta, const SystemConfig& cfg) {
          return zf_oracle(h, g, eta, cfg).sinr_com;
        },
        py::arg("uplink"), py::arg("echo"), py::arg("threshold"), py::arg("config"));
  m.def("grid_oracle", &grid_oracle, py::arg("uplink"), py::arg("echo"), py::arg("threshold"),
        py::arg("config"), py::arg("resolution") = 64, py::arg("refinement_passes") = 1);

  m.def("solve_time_allocation",
        [](const std::vector<double>& sinr_com, const SystemConfig& cfg) {
          return allocation_dict(solve_time_allocation(make_rate_profile(sinr_com, cfg), cfg));
        },
        py::arg("sinr_com"), py::arg("config"));
  m.def("remark_surface",
        [](const std::vector<double>& sinr_db, const std::vector<double>& t_s) {
          std::ostringstream os;
          write_remark_csv(os, sweep_remark(sinr_db, t_s, remark_config()));
          return os.str();
        },
        py::arg("sinr_db"), py::arg("t_s"), "CSV text: sinr_db,t_s,tau_1,tau_2,mu_star");

  m.def("isac_gain_analytic", &isac_gain_analytic, py::arg("config"), py::arg("uplink"));

  m.def("solve_report",
        [](const Scenario& s, const std::string& mode) {
          CompareOptions o;
          o.mode = parse_compare_mode(mode);
          o.target_error = s.target_error.value_or(0.0);
          py::gil_scoped_release release;
          return report_to_json(compare(s.system, s.channels(), o), s.system);
        },
        py::arg("scenario"), py::arg("mode") = "equal_samples");
  m.def("sweep_csv",
        [](const Scenario& s, const std::string& param, const std::vector<double>& grid,
           const std::string& mode, int jobs) {
          SweepSpec spec;
          spec.param = param;
          spec.grid = grid;
          spec.options.mode = parse_compare_mode(mode);
          spec.options.target_error = s.target_error.value_or(0.0);
          spec.jobs = jobs;
          py::gil_scoped_release release;
          std::ostringstream os;
          write_sweep_csv(os, sweep(s.system, s.channels(), spec));
          return os.str();
        },
        py::arg("scenario"), py::arg("param"), py::arg("grid"), py::arg("mode") = "equal_samples",
        py::arg("jobs") = 1);
}
