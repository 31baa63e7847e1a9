#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dagsim/metrics.hpp"
#include "dagsim/montecarlo.hpp"
#include "dagsim/reputation.hpp"
#include "dagsim/scenario.hpp"
#include "dagsim/simulation.hpp"

namespace py = pybind11;
using namespace dagsim;

namespace {

py::dict run_to_dict(const RunResult& run, const ScenarioConfig& cfg) {
    py::dict d;
    d["seed"] = run.seed;
    d["nodes"] = run.nodes;
    d["duration"] = run.duration;

    std::uint64_t issued = 0, disseminated = 0;
    for (const auto& [id, stat] : run.txs) {
        ++issued;
        if (stat.disseminated_at >= 0.0) ++disseminated;
    }
    d["issued"] = issued;
    d["disseminated"] = disseminated;

    DrSeries series = dissemination_series(run, cfg);
    d["time"] = series.time;
    d["total_dr"] = series.total;
    d["per_node_dr"] = series.per_node;

    LatencySummary lat = latency_summary(run, cfg.nodes);
    d["latency_per_node"] = lat.per_node;
    d["undelivered_per_node"] = lat.undelivered;

    py::list events;
    for (const auto& ev : run.blacklist_events) {
        py::dict e;
        e["observer"] = ev.observer;
        e["target"] = ev.target;
        e["time"] = ev.time;
        events.append(e);
    }
    d["blacklist_events"] = events;
    d["honest_honest_blacklists"] = run.honest_honest_blacklists;
    d["consistency_checked"] = run.consistency.checked;
    d["consistency_violations"] = run.consistency.violations;
    d["invariant_failures"] = run.invariant_failures;
    d["mean_total_dr"] =
        mean_dr_total(run, std::min(30.0, cfg.duration / 2), cfg.duration);
    return d;
}

ScenarioConfig config_from_arg(const py::object& scenario) {
    if (py::isinstance<py::str>(scenario)) {
        std::string s = scenario.cast<std::string>();
        for (const auto& name : builtin_scenario_names())
            if (name == s) return builtin_scenario(name);
        return scenario_from_json(s);
    }
    py::object dumps = py::module_::import("json").attr("dumps");
    return scenario_from_json(dumps(scenario).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete-event simulator for reputation-based DAG-ledger access control";

    m.def("builtin_scenarios", &builtin_scenario_names,
          "Names of the ready-made scenarios");

    m.def(
        "scenario",
        [](const std::string& name) {
            py::object loads = py::module_::import("json").attr("loads");
            return loads(scenario_to_json(builtin_scenario(name)));
        },
        py::arg("name"), "Built-in scenario as a dict (edit and pass back to run)");

    m.def(
        "validate",
        [](const py::object& scenario) {
            config_from_arg(scenario);
            return true;
        },
        py::arg("scenario"), "Validates a scenario dict / JSON string / builtin name");

    m.def(
        "run",
        [](const py::object& scenario, std::uint64_t seed) {
            ScenarioConfig cfg = config_from_arg(scenario);
            RunResult run = Simulation(cfg, seed).run();
            std::vector<std::string> violations;
            check_run_invariants(cfg, run, violations);
            py::dict d = run_to_dict(run, cfg);
            d["violations"] = violations;
            return d;
        },
        py::arg("scenario"), py::arg("seed") = 1,
        "One simulation run; returns metrics as a dict");

    m.def(
        "run_batch",
        [](const py::object& scenario, std::uint64_t seed, int runs) {
            ScenarioConfig cfg = config_from_arg(scenario);
            if (runs > 0) cfg.runs = runs;
            BatchResult batch = run_batch(cfg, seed);
            py::list out;
            for (const auto& run : batch.runs) out.append(run_to_dict(run, cfg));
            py::dict d;
            d["runs"] = out;
            d["violations"] = batch.violations;
            return d;
        },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("runs") = -1,
        "Monte-Carlo batch (seeds seed..seed+runs-1) with invariant checks");

    m.def(
        "write_outputs",
        [](const py::object& scenario, std::uint64_t seed, const std::string& out_dir,
           bool emit_plots) {
            ScenarioConfig cfg = config_from_arg(scenario);
            BatchResult batch = run_batch(cfg, seed);
            write_outputs(out_dir, cfg, batch, emit_plots);
            return batch.ok();
        },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("out_dir") = "out",
        py::arg("emit_plots") = false,
        "Runs a batch and writes the CSV/JSON outputs; returns invariant status");

    m.def("zipf_weights", &zipf_weights, py::arg("n"), py::arg("s"),
          "Normalized Zipf weights over ranks 1..n");

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
