#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "hcran/acceptance.hpp"
#include "hcran/baselines.hpp"
#include "hcran/channel.hpp"
#include "hcran/error.hpp"
#include "hcran/experiment.hpp"
#include "hcran/oracle.hpp"
#include "hcran/scenario.hpp"

namespace py = pybind11;
using namespace hcran;

namespace {

py::list matrix(const Grid<double>& g) {
    py::list rows;
    for (int r = 0; r < g.rows(); ++r) {
        py::list row;
        for (int c = 0; c < g.cols(); ++c) row.append(g(r, c));
        rows.append(row);
    }
    return rows;
}

std::vector<int> owners(const AllocationMatrix& a) {
    std::vector<int> out(a.rbs());
    for (int k = 0; k < a.rbs(); ++k) out[k] = a.owner(k);
    return out;
}

py::dict solution_dict(const EeSolution& s) {
    py::dict d;
    d["ee"] = s.ee;
    d["rate"] = s.rate;
    d["power"] = s.power;
    d["gamma"] = s.gamma;
    d["feasible"] = s.feasible;
    d["converged"] = s.trace.converged;
    d["owners"] = owners(s.a);
    d["powers"] = matrix(s.p.grid());
    std::vector<double> gammas;
    for (const auto& it : s.trace.iterations) gammas.push_back(it.gamma);
    d["gammas"] = gammas;
    return d;
}

py::dict row_dict(const ResultRow& r) {
    py::dict d;
    d["scenario"] = r.scenario;
    d["algorithm"] = r.algorithm;
    d["series_value"] = r.series_value;
    d["sweep_value"] = r.sweep_value;
    d["snapshot"] = r.snapshot;
    d["ee"] = r.ee;
    d["converged"] = r.converged;
    d["outer_iterations"] = r.outer_iterations;
    d["gap"] = r.gap;
    d["infeasible"] = r.infeasible;
    d["error"] = r.error;
    return d;
}

py::dict summary_dict(const SummaryRow& s) {
    py::dict d;
    d["scenario"] = s.scenario;
    d["algorithm"] = s.algorithm;
    d["series_value"] = s.series_value;
    d["sweep_value"] = s.sweep_value;
    d["samples"] = s.samples;
    d["mean_ee"] = s.mean_ee;
    d["ci95"] = s.ci95;
    d["infeasible"] = s.infeasible;
    d["failed"] = s.failed;
    return d;
}

py::dict table_dict(const ResultTable& t) {
    py::list rows, summary;
    for (const auto& r : t.rows) rows.append(row_dict(r));
    for (const auto& s : summarize(t)) summary.append(summary_dict(s));
    py::dict d;
    d["rows"] = rows;
    d["summary"] = summary;
    return d;
}

Algorithm algorithm_of(const std::string& name) {
    auto a = parse_algorithm(name);
    if (!a) throw ConfigError("unknown algorithm '" + name + "'");
    return *a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Energy-efficient resource allocation for H-CRAN downlinks";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("k_total", &ScenarioConfig::k_total)
        .def_readwrite("bandwidth_hz", &ScenarioConfig::bandwidth_hz)
        .def_readwrite("omega1_ratio", &ScenarioConfig::omega1_ratio)
        .def_readwrite("n_high", &ScenarioConfig::n_high)
        .def_readwrite("n_low", &ScenarioConfig::n_low)
        .def_readwrite("t_hues", &ScenarioConfig::t_hues)
        .def_readwrite("l_rrh", &ScenarioConfig::l_rrh)
        .def_readwrite("eta_r", &ScenarioConfig::eta_r)
        .def_readwrite("eta_er", &ScenarioConfig::eta_er)
        .def_readwrite("eta_hue_db", &ScenarioConfig::eta_hue_db)
        .def_readwrite("relax_floors", &ScenarioConfig::relax_floors)
        .def_readwrite("p_max_r_dbm", &ScenarioConfig::p_max_r_dbm)
        .def_readwrite("p_max_m_dbm", &ScenarioConfig::p_max_m_dbm)
        .def_readwrite("scenario_l", &ScenarioConfig::scenario_l)
        .def_property_readonly("b0", &ScenarioConfig::b0)
        .def_property_readonly("delta0", &ScenarioConfig::delta0)
        .def("validate", &ScenarioConfig::validate);

    m.def("path_loss_db",
          [](const std::string& link, double d) {
              if (link == "rrh-rue") return path_loss_db(LinkType::RrhToRue, d);
              if (link == "hpn-rue") return path_loss_db(LinkType::HpnToRue, d);
              if (link == "rrh-hue") return path_loss_db(LinkType::RrhToHue, d);
              if (link == "hpn-hue") return path_loss_db(LinkType::HpnToHue, d);
              throw ConfigError("unknown link '" + link + "'");
          },
          py::arg("link"), py::arg("distance_m"));

    m.def("channel",
          [](const ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t snapshot) {
              const auto sp = make_snapshot_problem(cfg, seed, snapshot);
              py::dict d;
              d["sigma"] = matrix(sp.inst.channel.sigma);
              d["g_r2m"] = sp.inst.channel.g_r2m;
              d["rate_floor"] = sp.inst.rate_floor;
              d["delta0"] = sp.inst.delta0;
              return d;
          },
          py::arg("config") = ScenarioConfig{}, py::arg("seed") = 1, py::arg("snapshot") = 0,
          "CINR matrix and constraint data of one H-CRAN snapshot.");

    m.def("solve_snapshot",
          [](const ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t snapshot, const std::string& algorithm) {
              const auto sp = make_snapshot_problem(cfg, seed, snapshot);
              const auto algo = algorithm_of(algorithm);
              EeSolution sol;
              {
                  py::gil_scoped_release release;
                  sol = solve(algo, sp.inst, {}, {}, {sp.certificate.a});
              }
              auto d = solution_dict(sol);
              if (algo == Algorithm::Optimal) d["gap"] = oracle::duality_gap(sol).relative_gap;
              return d;
          },
          py::arg("config") = ScenarioConfig{}, py::arg("seed") = 1, py::arg("snapshot") = 0,
          py::arg("algorithm") = "optimal");

    m.def("tiny_check",
          [](std::uint64_t seed, std::uint64_t index) {
              oracle::TinyInstance tiny;
              oracle::OracleResult best;
              EeSolution sol;
              {
                  py::gil_scoped_release release;
                  tiny = oracle::make_tiny_instance(seed, index);
                  best = oracle::brute_force_ee(tiny);
                  sol = solve_ee(tiny.inst);
              }
              py::dict d;
              d["rbs"] = tiny.inst.n_rbs();
              d["ues"] = tiny.inst.n_ues();
              d["oracle_ee"] = best.gamma;
              d["solver_ee"] = sol.ee;
              d["assignments"] = best.assignments;
              return d;
          },
          py::arg("seed"), py::arg("index"), "Brute-force optimum and solver EE on one tiny instance.");

    m.def("figure_config", [](int n) { return serialize_config(figure_config(n)); }, py::arg("figure"),
          "INI text of a figure preset.");

    m.def("run_config",
          [](const std::string& text, std::optional<int> snapshots, std::optional<std::uint64_t> seed,
             std::optional<int> workers) {
              std::istringstream in(text);
              auto cfg = parse_config(in, "<python>");
              if (snapshots) cfg.snapshots = *snapshots;
              if (seed) cfg.seed = *seed;
              if (workers) cfg.workers = *workers;
              cfg.validate();
              ResultTable t;
              {
                  py::gil_scoped_release release;
                  t = run_experiment(cfg);
              }
              return table_dict(t);
          },
          py::arg("config"), py::arg("snapshots") = py::none(), py::arg("seed") = py::none(),
          py::arg("workers") = py::none(), "Run an experiment from INI text; returns rows and summary.");

    m.def("run_figure",
          [](int n, int snapshots, std::uint64_t seed, int workers) {
              auto cfg = figure_config(n);
              cfg.snapshots = snapshots;
              cfg.seed = seed;
              cfg.workers = workers;
              cfg.validate();
              ResultTable t;
              {
                  py::gil_scoped_release release;
                  t = run_experiment(cfg);
              }
              return table_dict(t);
          },
          py::arg("figure"), py::arg("snapshots") = 1000, py::arg("seed") = 1, py::arg("workers") = 1);

    m.def("verify",
          [](std::vector<int> criteria, int snapshots, int tiny, std::uint64_t seed, int workers) {
              AcceptanceOptions opt;
              opt.only = std::move(criteria);
              opt.snapshots = snapshots;
              opt.tiny_instances = tiny;
              opt.seed = seed;
              opt.workers = workers;
              std::vector<CriterionResult> results;
              {
                  py::gil_scoped_release release;
                  results = run_acceptance(opt);
              }
              py::list out;
              for (const auto& r : results) {
                  py::dict d;
                  d["id"] = r.id;
                  d["name"] = r.name;
                  d["passed"] = r.pass;
                  d["detail"] = r.detail;
                  out.append(d);
              }
              return out;
          },
          py::arg("criteria") = std::vector<int>{}, py::arg("snapshots") = 1000, py::arg("tiny") = 200,
          py::arg("seed") = 1, py::arg("workers") = 1);

    m.attr("__version__") = HCRAN_VERSION;
    m.attr("RNG") = std::string(SnapshotRng::kName);
}
