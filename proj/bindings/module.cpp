#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "auctiondyn/io.hpp"
#include "auctiondyn/presets.hpp"

namespace py = pybind11;
using namespace auctiondyn;

namespace {

TieBreakRule tie_from_string(const std::string& name) {
  if (name == "uniform_split") return TieBreakRule::kUniformSplit;
  if (name == "favor_lower_index") return TieBreakRule::kFavorLowerIndex;
  if (name == "favor_higher_index") return TieBreakRule::kFavorHigherIndex;
  throw ConfigError("unknown tie rule '" + name + "'");
}

PaymentInterpolation interp_from_string(const std::string& name) {
  if (name == "step") return PaymentInterpolation::kStep;
  if (name == "linear") return PaymentInterpolation::kLinear;
  throw ConfigError("unknown interpolation '" + name + "'");
}

py::dict ic_report_to_dict(const ICReport& report) {
  py::dict out;
  out["status"] = to_string(report.status);
  out["gamma"] = report.gamma;
  out["min_gap"] = report.min_gap;
  out["ir_ok"] = report.ir_ok;
  if (report.witness) {
    py::dict w;
    w["bidder"] = report.witness->bidder;
    w["value"] = report.witness->value;
    w["bid"] = report.witness->bid;
    w["opponent"] = report.witness->opponent;
    w["gap"] = report.witness->gap;
    w["ir_violation"] = report.witness->ir_violation;
    out["witness"] = w;
  } else {
    out["witness"] = py::none();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "repeated truthful auctions against mean-based learning bidders";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception<io::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<BidGrid>(m, "BidGrid")
      .def(py::init<int>(), py::arg("delta"))
      .def_property_readonly("delta", &BidGrid::delta)
      .def_property_readonly("size", &BidGrid::size)
      .def("value_of", &BidGrid::value_of, py::arg("index"))
      .def("nearest_index", &BidGrid::nearest_index, py::arg("value"))
      .def("__repr__",
           [](const BidGrid& g) { return "BidGrid(delta=" + std::to_string(g.delta()) + ")"; });

  py::class_<Mechanism>(m, "Mechanism")
      .def_property_readonly("name", &Mechanism::name)
      .def_property_readonly("bidders", &Mechanism::bidders)
      .def_property_readonly("grid", &Mechanism::grid)
      .def("alloc",
           [](const Mechanism& m_, int bidder, const std::vector<int>& profile) {
             return m_.alloc(bidder, profile);
           })
      .def("pay",
           [](const Mechanism& m_, int bidder, const std::vector<int>& profile) {
             return m_.pay(bidder, profile);
           })
      .def("deterministic", [](const Mechanism& m_) { return m_.deterministic(); })
      .def("__repr__", [](const Mechanism& m_) { return "Mechanism(" + m_.name() + ")"; });

  m.def(
      "make_spa",
      [](const BidGrid& grid, int n, int reserve, const std::string& tie) {
        return make_spa(grid, n, reserve, tie_from_string(tie));
      },
      py::arg("grid"), py::arg("n"), py::arg("reserve") = 0,
      py::arg("tie") = "uniform_split");
  m.def("make_staircase", &make_staircase, py::arg("grid"), py::arg("n") = 2);
  m.def("make_softmax", &make_softmax, py::arg("grid"), py::arg("lambda_"));
  m.def("mix", &mix, py::arg("q"), py::arg("a"), py::arg("a_prime"));
  m.def("strictify", &strictify, py::arg("a"), py::arg("a_strict"), py::arg("q"),
        py::arg("verify_budget") = kDefaultVerifyBudget);

  m.def(
      "verify_ic",
      [](const Mechanism& mech, std::size_t budget, double tolerance) {
        return ic_report_to_dict(verify_ic(mech, budget, tolerance));
      },
      py::arg("mechanism"), py::arg("budget") = kDefaultVerifyBudget,
      py::arg("tolerance") = kIcTolerance);

  m.def(
      "characterize_deterministic",
      [](const Mechanism& mech) {
        auto report = characterize_deterministic(mech);
        py::dict out;
        out["pass"] = report.pass;
        if (report.violation) {
          py::dict v;
          v["kind"] = report.violation->kind;
          v["bidder"] = report.violation->bidder;
          v["bid"] = report.violation->bid;
          v["opponent"] = report.violation->opponent;
          v["expected"] = report.violation->expected;
          v["actual"] = report.violation->actual;
          out["violation"] = v;
        } else {
          out["violation"] = py::none();
        }
        return out;
      },
      py::arg("mechanism"));

  m.def(
      "payment_from_allocation",
      [](const BidGrid& grid, const std::vector<double>& row, const std::string& interpolation) {
        return payment_from_allocation(grid, row, interp_from_string(interpolation));
      },
      py::arg("grid"), py::arg("allocation"), py::arg("interpolation") = "linear");

  m.def(
      "virtual_values",
      [](const BidGrid& grid, const std::vector<double>& pmf) {
        auto table = virtual_values(DiscreteDistribution(grid, pmf));
        py::list out;
        for (std::size_t k = 0; k < table.phi.size(); ++k) {
          if (table.defined[k])
            out.append(table.phi[k]);
          else
            out.append(py::none());
        }
        return out;
      },
      py::arg("grid"), py::arg("pmf"));
  m.def(
      "is_regular",
      [](const BidGrid& grid, const std::vector<double>& pmf) {
        return is_regular(DiscreteDistribution(grid, pmf));
      },
      py::arg("grid"), py::arg("pmf"));
  m.def(
      "myerson_reserve",
      [](const BidGrid& grid, const std::vector<double>& pmf) {
        return myerson_reserve(DiscreteDistribution(grid, pmf));
      },
      py::arg("grid"), py::arg("pmf"));
  m.def(
      "uniform_pmf",
      [](const BidGrid& grid) {
        auto d = DiscreteDistribution::uniform(grid);
        return std::vector<double>(d.pmf().begin(), d.pmf().end());
      },
      py::arg("grid"));

  m.def("default_eta", &default_eta, py::arg("delta"), py::arg("horizon"));
  m.def("default_mean_based_delta", &default_mean_based_delta, py::arg("delta"),
        py::arg("horizon"));

  m.def(
      "simulate_json",
      [](const std::string& config_json, int trials, int jobs, int benchmark_reserve) {
        SimConfig cfg = io::parse_sim_config(nlohmann::json::parse(config_json));
        AggregateResult agg = run_trials(cfg, trials, jobs);
        return io::summary_from_aggregate(cfg, agg, benchmark_reserve).dump();
      },
      py::arg("config_json"), py::arg("trials") = 1, py::arg("jobs") = 1,
      py::arg("benchmark_reserve") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "simulate_outputs_json",
      [](const std::string& config_json, const std::string& out_dir, int trials, int jobs,
         int benchmark_reserve) {
        SimConfig cfg = io::parse_sim_config(nlohmann::json::parse(config_json));
        AggregateResult agg = run_trials(cfg, trials, jobs);
        return io::write_simulation_outputs(cfg, agg, out_dir, benchmark_reserve).dump();
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("trials") = 1, py::arg("jobs") = 1,
      py::arg("benchmark_reserve") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "metagame_gain_json",
      [](const std::string& config_json, int bidder, int jobs) {
        SimConfig cfg = io::parse_sim_config(nlohmann::json::parse(config_json));
        return metagame_gain(cfg, bidder, jobs);
      },
      py::arg("config_json"), py::arg("bidder"), py::arg("jobs") = 1,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "fit_scaling_exponent",
      [](const std::vector<std::pair<double, double>>& points) {
        ExponentFit fit = fit_scaling_exponent(points);
        py::dict out;
        out["exponent"] = fit.exponent;
        out["valid"] = fit.valid;
        out["used_points"] = fit.used_points;
        out["excluded"] = fit.excluded;
        return out;
      },
      py::arg("points"));

  m.def(
      "run_preset_json",
      [](const std::string& id, int jobs) {
        PresetReport report = run_preset(id, jobs);
        nlohmann::json doc;
        doc["id"] = report.id;
        doc["assertions"] = nlohmann::json::array();
        for (const auto& a : report.assertions) {
          doc["assertions"].push_back(
              {{"name", a.name}, {"hard", a.hard}, {"pass", a.pass}, {"detail", a.detail}});
        }
        doc["artifacts"] = report.artifacts;
        doc["hard_pass"] = report.hard_pass();
        return doc.dump();
      },
      py::arg("preset_id"), py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());

  m.def("preset_ids", [] { return preset_ids(); });
}
