#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcran/baselines.hpp"
#include "hcran/optimizer.hpp"
#include "hcran/scenario.hpp"

namespace hcran {

enum class SweepVariable { None, M, EtaHueDb, PMaxRDbm, Omega1Ratio };

std::string_view to_string(SweepVariable v);
std::optional<SweepVariable> parse_sweep(std::string_view name);
void apply_sweep(ScenarioConfig& cfg, SweepVariable v, double value);

struct ExperimentConfig {
    std::vector<ScenarioKind> scenarios{ScenarioKind::TwoTierHcran};
    std::vector<Algorithm> algorithms{Algorithm::Optimal};
    SweepVariable sweep = SweepVariable::None;
    std::vector<double> values{0.0};
    // Optional second variable, one curve per value.
    SweepVariable series = SweepVariable::None;
    std::vector<double> series_values{0.0};
    int snapshots = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    // > 0: also collect per-iteration EE up to this many outer iterations.
    int trace_iterations = 0;

    ScenarioConfig physical;
    OuterConfig outer;
    InnerConfig inner;

    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

// INI text with sections [experiment] [sffr] [population] [geometry] [qos]
// [rrh] [hpn] [pbs] [solver]. Missing keys keep their defaults.
ExperimentConfig parse_config(std::istream& is, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Preset for figure 3..7.
ExperimentConfig figure_config(int figure);

struct ResultRow {
    std::string scenario;
    std::string algorithm;
    double series_value = 0.0;
    double sweep_value = 0.0;
    std::uint64_t snapshot = 0;
    double ee = 0.0;
    double rate = 0.0;
    double power = 0.0;
    bool converged = false;
    int outer_iterations = 0;
    double gap = 0.0;  // NaN when not applicable
    bool infeasible = false;
    bool relaxed = false;
    std::string error;  // non-empty for failed snapshots
    std::vector<double> trace_ee;
};

struct ResultTable {
    ExperimentConfig config;
    std::vector<ResultRow> rows;  // sorted by (series, sweep value, snapshot, subject)
};

ResultTable run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
    std::string scenario;
    std::string algorithm;
    double series_value = 0.0;
    double sweep_value = 0.0;
    int samples = 0;
    double mean_ee = 0.0;
    double ci95 = 0.0;  // half-width
    int infeasible = 0;
    int relaxed = 0;
    int failed = 0;
    double median_gap = 0.0;
};

std::vector<SummaryRow> summarize(const ResultTable& table);

struct TracePoint {
    std::string algorithm;
    double sweep_value = 0.0;
    int iteration = 0;
    double mean_ee = 0.0;
};

// Mean EE after each outer iteration; runs that stopped earlier hold their last value.
std::vector<TracePoint> summarize_trace(const ResultTable& table);

enum class OutputFormat { Csv, Json };
enum class TableKind { Rows, Summary, Trace };

std::string version_line();
void write_table(std::ostream& os, const ResultTable& table, TableKind kind, OutputFormat format);

// Mean and half-width of the two-sided 95% Student-t interval.
struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;
};
MeanCi mean_ci95(const std::vector<double>& xs);

}  // namespace hcran
