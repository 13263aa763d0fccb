#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "insight/cli.hpp"
#include "insight/csv.hpp"
#include "insight/error.hpp"
#include "insight/interestingness.hpp"

namespace py = pybind11;
using namespace insight;

namespace {

tabular::Dataset load(const std::string& path, const std::optional<std::string>& schema) {
  std::optional<tabular::Schema> s;
  if (schema) s = tabular::load_schema(*schema);
  return tabular::load_csv(path, s);
}

std::string search_json(const tabular::Dataset& d, const std::string& config, const std::string& label) {
  const auto cfg = report::search_config_from_json(report::json::parse(config));
  const auto result = search::run_search(d, cfg);
  return report::dump(report::to_json(report::make_report(result, cfg, label)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monte Carlo tree search over data transformations and mining models";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<MiningError>(m, "MiningError", PyExc_RuntimeError);

  py::class_<tabular::Dataset>(m, "Dataset")
      .def_static("from_csv", &load, py::arg("path"), py::arg("schema") = py::none())
      .def_static(
          "from_csv_text", [](const std::string& text) { return tabular::parse_csv(text); }, py::arg("text"))
      .def_property_readonly("rows", &tabular::Dataset::row_count)
      .def_property_readonly("columns",
                             [](const tabular::Dataset& d) {
                               std::vector<std::string> names;
                               for (const auto& c : d.columns()) names.push_back(c->name());
                               return names;
                             })
      .def("to_csv", [](const tabular::Dataset& d) { return tabular::to_csv(d); })
      .def("schema_json", [](const tabular::Dataset& d) { return tabular::schema_to_json(d); })
      .def("__len__", &tabular::Dataset::row_count);

  m.def("presets", &search::preset_names);
  m.def(
      "preset_json", [](const std::string& name) { return report::dump(report::to_json(search::preset(name))); },
      py::arg("name"));
  m.def("search_json", &search_json, py::arg("dataset"), py::arg("config"), py::arg("label") = "dataset",
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "generate",
      [](int scenario, const std::string& variant, uint64_t seed, const std::string& output) {
        return cli::generate({scenario, variant, seed, output});
      },
      py::arg("scenario"), py::arg("variant"), py::arg("seed") = 1, py::arg("output") = ".");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "insight");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));

  auto s = m.def_submodule("scores", "Interestingness formulas");
  s.def("quantitative_outlier", &intr::quantitative_outlier_score, py::arg("z"), py::arg("t_quant") = 2.0);
  s.def("qualitative_outlier", &intr::qualitative_outlier_score, py::arg("frequency"), py::arg("t_qual") = 0.85);
  s.def("tree", &intr::tree_score, py::arg("accuracy"), py::arg("entropy"), py::arg("coverage"));
  s.def("clustering", &intr::clustering_score, py::arg("silhouette"), py::arg("association"));
  s.def("trend", &intr::trend_score, py::arg("trend"), py::arg("period"), py::arg("outliers"));
  s.def("rule", &intr::rule_score, py::arg("kulc"), py::arg("imbalance"));
  s.def("kulczynski", &intr::kulczynski, py::arg("sup_a"), py::arg("sup_b"), py::arg("sup_ab"));
  s.def("imbalance_ratio", &intr::imbalance_ratio, py::arg("sup_a"), py::arg("sup_b"), py::arg("sup_ab"));
}
