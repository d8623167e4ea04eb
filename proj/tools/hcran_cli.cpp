#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hcran/acceptance.hpp"
#include "hcran/error.hpp"
#include "hcran/experiment.hpp"

using namespace hcran;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> snapshots;
    std::optional<int> workers;
    std::string algorithm;
    std::string out;
    std::string format = "csv";
    std::string table;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--snapshots", o.snapshots, "Snapshots per sweep point")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--algorithm", o.algorithm, "Restrict the H-CRAN scenario to one algorithm")
        ->check(CLI::IsMember({"optimal", "fixed-power", "sequential-rb"}));
    cmd->add_option("--out", o.out, "Output file (default stdout)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--table", o.table, "rows, summary or trace")->check(CLI::IsMember({"rows", "summary", "trace"}));
}

void apply(ExperimentConfig& cfg, const Overrides& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.snapshots) cfg.snapshots = *o.snapshots;
    if (o.workers) cfg.workers = *o.workers;
    if (!o.algorithm.empty()) cfg.algorithms = {*parse_algorithm(o.algorithm)};
}

int emit(const ExperimentConfig& cfg, const Overrides& o, TableKind default_kind) {
    const auto table = run_experiment(cfg);
    TableKind kind = default_kind;
    if (o.table == "rows") kind = TableKind::Rows;
    if (o.table == "summary") kind = TableKind::Summary;
    if (o.table == "trace") kind = TableKind::Trace;
    const auto format = o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (o.out.empty()) {
        write_table(std::cout, table, kind, format);
    } else {
        std::ofstream out(o.out);
        if (!out) throw ConfigError("cannot write '" + o.out + "'");
        write_table(out, table, kind, format);
    }
    int failed = 0;
    for (const auto& r : table.rows) failed += !r.error.empty();
    if (failed) std::cerr << "warning: " << failed << " snapshot runs failed; see the error column\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"H-CRAN energy-efficiency solver and experiments"};
    app.set_version_flag("--version", version_line().substr(2));
    app.require_subcommand(1);

    Overrides o;
    std::string config_path;
    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("--config", config_path, "INI config file")->required();
    add_common(run, o);

    int fig = 0;
    auto* figure = app.add_subcommand("figure", "Run the preset for a figure (3-7)");
    figure->add_option("n", fig, "Figure number")->required()->check(CLI::Range(3, 7));
    add_common(figure, o);

    AcceptanceOptions acc;
    auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
    verify->add_option("--snapshots", acc.snapshots, "Snapshots per full-size run")->check(CLI::PositiveNumber);
    verify->add_option("--seed", acc.seed, "Master seed");
    verify->add_option("--workers", acc.workers, "Worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--tiny", acc.tiny_instances, "Tiny oracle instances")->check(CLI::PositiveNumber);
    verify->add_option("--criteria", acc.only, "Only these criteria")->delimiter(',');

    std::uint64_t snapshot = 0;
    std::string dump_config, dump_out;
    std::uint64_t dump_seed = 1;
    auto* dump = app.add_subcommand("dump-channel", "Write one snapshot's CINR table as CSV");
    dump->add_option("--config", dump_config, "INI config file");
    dump->add_option("--seed", dump_seed, "Master seed");
    dump->add_option("--snapshot", snapshot, "Snapshot index");
    dump->add_option("--out", dump_out, "Output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = load_config(config_path);
            apply(cfg, o);
            cfg.validate();
            return emit(cfg, o, TableKind::Rows);
        }
        if (*figure) {
            auto cfg = figure_config(fig);
            apply(cfg, o);
            cfg.validate();
            return emit(cfg, o, fig == 4 ? TableKind::Trace : TableKind::Summary);
        }
        if (*verify) {
            const auto results =
                run_acceptance(acc, [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; });
            int failed = 0;
            for (const auto& r : results) failed += !r.pass;
            std::cout << results.size() - failed << " passed, " << failed << " failed" << std::endl;
            return failed ? 1 : 0;
        }
        if (*dump) {
            ExperimentConfig cfg;
            if (!dump_config.empty()) cfg = load_config(dump_config);
            if (dump->count("--seed")) cfg.seed = dump_seed;
            const auto sp = make_snapshot_problem(cfg.physical, cfg.seed, snapshot);
            if (dump_out.empty()) {
                write_channel_csv(std::cout, sp.inst.channel);
            } else {
                std::ofstream out(dump_out);
                if (!out) throw ConfigError("cannot write '" + dump_out + "'");
                write_channel_csv(out, sp.inst.channel);
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "error: infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
