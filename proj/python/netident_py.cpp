// Python bindings. Node and edge indices are 0-based, as in the C++ API;
// labels ("1->2") are the 1-based names used in network files.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "netident/netident.hpp"

namespace py = pybind11;
using namespace netident;

namespace {

std::vector<double> or_zeros(const std::optional<std::vector<double>>& v, std::size_t n) {
  return v ? *v : std::vector<double>(n, 0.0);
}

IdentifyOptions make_options(const NetworkSpec& spec, std::optional<int> experiments, std::optional<double> period,
                             std::optional<int> samples, std::optional<double> sigma, std::uint64_t seed,
                             std::optional<int> window, std::optional<int> degree, bool exact, unsigned threads) {
  IdentifyOptions opt = default_options(spec);
  if (experiments) opt.plan.count = *experiments;
  if (period) opt.plan.period = *period;
  if (samples) opt.plan.samples = *samples;
  if (sigma) opt.plan.sigma = *sigma;
  opt.plan.seed = seed;
  if (window) opt.window = *window;
  if (degree) opt.degree = *degree;
  opt.exact_derivatives = exact;
  opt.threads = threads;
  return opt;
}

py::dict stage_dict(const NetworkSpec& spec, const Stage& s) {
  py::dict d;
  d["order"] = s.derivative_order;
  d["sink"] = s.sink;
  d["edges"] = s.edges;
  std::vector<std::string> labels;
  for (int e : s.edges) labels.push_back(edge_label(spec.edges[e]));
  d["labels"] = labels;
  d["paths"] = s.paths;
  d["nonzero_nodes"] = s.nonzero_nodes;
  d["zeroed_nodes"] = s.zeroed_nodes;
  d["description"] = describe_stage(spec, s);
  return d;
}

py::dict report_dict(const NetworkSpec& spec, const IdentificationReport& r) {
  py::dict d;
  py::list edges;
  for (const auto& e : r.edges) {
    py::dict item;
    item["edge"] = e.edge;
    item["label"] = edge_label(spec.edges[e.edge]);
    item["estimate"] = e.estimate;
    item["truth"] = e.truth ? py::cast(*e.truth) : py::none();
    edges.append(item);
  }
  d["edges"] = edges;
  py::list stages;
  for (const auto& s : r.stages) {
    py::dict item;
    item["index"] = s.index;
    item["order"] = s.order;
    item["sink"] = s.sink;
    item["edges"] = s.edges;
    item["experiments"] = s.experiments;
    item["condition"] = s.condition;
    item["residual"] = s.residual;
    item["retries"] = s.retries;
    stages.append(item);
  }
  d["stages"] = stages;
  d["rmse"] = r.rmse ? py::cast(*r.rmse) : py::none();
  d["table"] = format_report_table(spec, r);
  return d;
}

}  // namespace

PYBIND11_MODULE(netident, m) {
  m.doc() = "Identifiability checks, simulation and staged identification of nonlinear networks on DAGs";

  // netident.Error carries the library's error code name in `code`.
  py::exception<Error>(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object type = py::module_::import("netident").attr("Error");
      py::object instance = type(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(type.ptr(), instance.ptr());
    }
  });

  py::class_<NetworkSpec>(m, "Network")
      .def_readonly("node_count", &NetworkSpec::node_count)
      .def_readonly("measured", &NetworkSpec::measured)
      .def_property_readonly("edges",
                             [](const NetworkSpec& s) {
                               py::list out;
                               for (const auto& e : s.edges) {
                                 py::dict d;
                                 d["tail"] = e.tail;
                                 d["head"] = e.head;
                                 d["label"] = edge_label(e);
                                 d["basis"] = format_basis_list(e.basis);
                                 d["coefficients"] = e.coefficients ? py::cast(*e.coefficients) : py::none();
                                 out.append(d);
                               }
                               return out;
                             })
      .def_property_readonly("has_truth", &NetworkSpec::has_truth)
      .def_property_readonly("coefficient_count", &NetworkSpec::coefficient_count)
      .def("format", &format_network)
      .def("__repr__", [](const NetworkSpec& s) {
        std::ostringstream out;
        out << "<Network nodes=" << s.node_count << " edges=" << s.edges.size() << ">";
        return out.str();
      });

  m.def("load_network", &load_network, py::arg("path"));
  m.def("parse_network", &parse_network_text, py::arg("text"));

  m.def(
      "check",
      [](const NetworkSpec& spec) {
        py::dict d;
        d["order"] = validate(spec);
        const auto req = required_measurements(spec);
        d["required"] = req.nodes;
        std::vector<std::string> hazards;
        for (const auto& h : req.warnings) hazards.push_back(h.message);
        d["hazards"] = hazards;
        py::list stages;
        for (const auto& s : identification_schedule(spec)) stages.append(stage_dict(spec, s));
        d["schedule"] = stages;
        return d;
      },
      py::arg("network"), "Validates the graph and returns the order, required sinks, hazards and schedule.");

  m.def(
      "simulate",
      [](const NetworkSpec& spec, const std::vector<double>& x0, double t_end, double step,
         const std::optional<std::vector<double>>& u) {
        const auto inputs = or_zeros(u, x0.size());
        const Trajectory tr = simulate(spec, x0, inputs, t_end, step);
        py::array_t<double> out({tr.size(), static_cast<std::size_t>(spec.node_count)});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < tr.size(); ++i)
          for (int j = 0; j < spec.node_count; ++j) view(i, j) = tr.states[i][j];
        return out;
      },
      py::arg("network"), py::arg("x0"), py::arg("t_end"), py::arg("step"), py::arg("u") = py::none(),
      "RK4 trajectory; row i is the state at t = i * step.");

  m.def(
      "sg_fit_at_start",
      [](const std::vector<double>& samples, int window, int degree, double spacing, int up_to) {
        SgConfig cfg{window, degree, spacing};
        return sg_fit_at_start(samples, cfg, up_to);
      },
      py::arg("samples"), py::arg("window") = 10, py::arg("degree") = 5, py::arg("spacing") = 0.1,
      py::arg("up_to") = 1, "Savitzky-Golay derivative estimates of orders 0..up_to at the first sample.");

  m.def(
      "exact_jet",
      [](const NetworkSpec& spec, const std::vector<double>& x0, int order, const std::optional<std::vector<double>>& u) {
        const auto inputs = or_zeros(u, x0.size());
        const Jet jet = exact_jet(spec, x0, inputs, order);
        std::vector<std::vector<double>> out;
        for (int i = 0; i < spec.node_count; ++i) out.push_back(jet_to_derivatives(jet, i));
        return out;
      },
      py::arg("network"), py::arg("x0"), py::arg("order"), py::arg("u") = py::none(),
      "Time derivatives 0..order of every node at t = 0.");

  m.def(
      "identify",
      [](const NetworkSpec& spec, std::optional<int> experiments, std::optional<double> period,
         std::optional<int> samples, std::optional<double> sigma, std::uint64_t seed, std::optional<int> window,
         std::optional<int> degree, bool exact, unsigned threads) {
        const auto opt = make_options(spec, experiments, period, samples, sigma, seed, window, degree, exact, threads);
        const auto schedule = identification_schedule(spec);
        IdentificationReport report;
        {
          py::gil_scoped_release release;
          report = identify(spec, opt, schedule);
        }
        return report_dict(spec, report);
      },
      py::arg("network"), py::arg("experiments") = py::none(), py::arg("period") = py::none(),
      py::arg("samples") = py::none(), py::arg("sigma") = py::none(), py::arg("seed") = 1,
      py::arg("window") = py::none(), py::arg("degree") = py::none(), py::arg("exact") = false,
      py::arg("threads") = 0,
      "Staged identification in simulation. Unset options come from the file's plan line.");

  m.def(
      "sweep",
      [](const NetworkSpec& spec, const std::vector<double>& sigmas, int repetitions, std::optional<int> experiments,
         std::optional<double> period, std::optional<int> samples, std::uint64_t seed, std::optional<int> window,
         std::optional<int> degree, unsigned threads) {
        const auto opt =
            make_options(spec, experiments, period, samples, std::nullopt, seed, window, degree, false, threads);
        const auto schedule = identification_schedule(spec);
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(spec, opt, schedule, sigmas, repetitions);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["sigma"] = r.sigma;
          d["rmse"] = r.rmse;
          d["failures"] = r.failures;
          d["median"] = r.median;
          d["q1"] = r.q1;
          d["q3"] = r.q3;
          out.append(d);
        }
        return out;
      },
      py::arg("network"), py::arg("sigmas"), py::arg("repetitions") = 10, py::arg("experiments") = py::none(),
      py::arg("period") = py::none(), py::arg("samples") = py::none(), py::arg("seed") = 1,
      py::arg("window") = py::none(), py::arg("degree") = py::none(), py::arg("threads") = 0,
      "RMSE quartiles over repeated noisy identifications, one row per sigma.");
}
