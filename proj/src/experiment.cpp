#include "hcran/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "hcran/error.hpp"

namespace hcran {

namespace pt = boost::property_tree;

std::string_view to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::None: return "none";
        case SweepVariable::M: return "m";
        case SweepVariable::EtaHueDb: return "eta_hue_db";
        case SweepVariable::PMaxRDbm: return "p_max_r_dbm";
        case SweepVariable::Omega1Ratio: return "omega1_ratio";
    }
    return "?";
}

std::optional<SweepVariable> parse_sweep(std::string_view name) {
    for (auto v : {SweepVariable::None, SweepVariable::M, SweepVariable::EtaHueDb, SweepVariable::PMaxRDbm,
                   SweepVariable::Omega1Ratio})
        if (to_string(v) == name) return v;
    return std::nullopt;
}

void apply_sweep(ScenarioConfig& cfg, SweepVariable v, double value) {
    switch (v) {
        case SweepVariable::None: break;
        case SweepVariable::M:
            if (value < 0 || value != std::floor(value)) throw ConfigError("m must be a non-negative integer");
            cfg.n_low = static_cast<int>(value);
            break;
        case SweepVariable::EtaHueDb: cfg.eta_hue_db = value; break;
        case SweepVariable::PMaxRDbm: cfg.p_max_r_dbm = value; break;
        case SweepVariable::Omega1Ratio: cfg.omega1_ratio = value; break;
    }
}

void ExperimentConfig::validate() const {
    if (scenarios.empty()) throw ConfigError("experiment.scenarios must not be empty");
    if (algorithms.empty()) throw ConfigError("experiment.algorithms must not be empty");
    if (values.empty()) throw ConfigError("experiment.values must not be empty");
    if (series_values.empty()) throw ConfigError("experiment.series_values must not be empty");
    if (snapshots < 1) throw ConfigError("experiment.snapshots must be >= 1");
    if (workers < 1) throw ConfigError("experiment.workers must be >= 1");
    if (trace_iterations < 0) throw ConfigError("experiment.trace_iterations must be >= 0");
    if (sweep != SweepVariable::None && sweep == series) throw ConfigError("sweep and series must differ");
    outer.validate();
    inner.validate();
    for (double s : series_values)
        for (double v : values) {
            auto c = physical;
            apply_sweep(c, series, s);
            apply_sweep(c, sweep, v);
            c.validate();
        }
}

namespace {

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + f(xs[i]);
    return s;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(v.substr(used)).size() != 0) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<long long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

template <class Sub>
Field real(std::string section, std::string key, Sub ExperimentConfig::*sub, double Sub::*m) {
    return {section, key, [sub, m](const ExperimentConfig& c) { return fmt_double(c.*sub.*m); },
            [sub, m](ExperimentConfig& c, const std::string& name, const std::string& v) { c.*sub.*m = to_double(name, v); }};
}

template <class Sub>
Field integer(std::string section, std::string key, Sub ExperimentConfig::*sub, int Sub::*m) {
    return {section, key, [sub, m](const ExperimentConfig& c) { return std::to_string(c.*sub.*m); },
            [sub, m](ExperimentConfig& c, const std::string& name, const std::string& v) {
                c.*sub.*m = static_cast<int>(to_integer(name, v));
            }};
}

Field top_integer(std::string key, int ExperimentConfig::*m) {
    return {"experiment", key, [m](const ExperimentConfig& c) { return std::to_string(c.*m); },
            [m](ExperimentConfig& c, const std::string& name, const std::string& v) {
                c.*m = static_cast<int>(to_integer(name, v));
            }};
}

constexpr auto phys = &ExperimentConfig::physical;
constexpr auto outer_of = &ExperimentConfig::outer;
constexpr auto inner_of = &ExperimentConfig::inner;

const std::vector<Field>& fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> v;
        v.push_back({"experiment", "scenarios",
                     [](const ExperimentConfig& c) {
                         return join<ScenarioKind>(c.scenarios, [](const ScenarioKind& k) { return std::string(to_string(k)); });
                     },
                     [](ExperimentConfig& c, const std::string& name, const std::string& s) {
                         c.scenarios.clear();
                         for (const auto& item : split_list(s)) {
                             auto k = parse_scenario(item);
                             if (!k) throw ConfigError(name + ": unknown scenario '" + item + "'");
                             c.scenarios.push_back(*k);
                         }
                     }});
        v.push_back({"experiment", "algorithms",
                     [](const ExperimentConfig& c) {
                         return join<Algorithm>(c.algorithms, [](const Algorithm& a) { return std::string(to_string(a)); });
                     },
                     [](ExperimentConfig& c, const std::string& name, const std::string& s) {
                         c.algorithms.clear();
                         for (const auto& item : split_list(s)) {
                             auto a = parse_algorithm(item);
                             if (!a) throw ConfigError(name + ": unknown algorithm '" + item + "'");
                             c.algorithms.push_back(*a);
                         }
                     }});
        auto variable = [](std::string key, SweepVariable ExperimentConfig::*m) {
            return Field{"experiment", key, [m](const ExperimentConfig& c) { return std::string(to_string(c.*m)); },
                         [m](ExperimentConfig& c, const std::string& name, const std::string& s) {
                             auto sv = parse_sweep(s);
                             if (!sv) throw ConfigError(name + ": unknown variable '" + s + "'");
                             c.*m = *sv;
                         }};
        };
        auto list = [](std::string key, std::vector<double> ExperimentConfig::*m) {
            return Field{"experiment", key,
                         [m](const ExperimentConfig& c) { return join<double>(c.*m, [](const double& x) { return fmt_double(x); }); },
                         [m](ExperimentConfig& c, const std::string& name, const std::string& s) {
                             (c.*m).clear();
                             for (const auto& item : split_list(s)) (c.*m).push_back(to_double(name, item));
                         }};
        };
        v.push_back(variable("sweep", &ExperimentConfig::sweep));
        v.push_back(list("values", &ExperimentConfig::values));
        v.push_back(variable("series", &ExperimentConfig::series));
        v.push_back(list("series_values", &ExperimentConfig::series_values));
        v.push_back(top_integer("snapshots", &ExperimentConfig::snapshots));
        v.push_back({"experiment", "seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                     [](ExperimentConfig& c, const std::string& name, const std::string& s) {
                         try {
                             std::size_t used = 0;
                             c.seed = std::stoull(s, &used);
                             if (used != s.size()) throw std::invalid_argument(s);
                         } catch (const std::exception&) {
                             throw ConfigError(name + ": expected an unsigned 64-bit integer, got '" + s + "'");
                         }
                     }});
        v.push_back(top_integer("workers", &ExperimentConfig::workers));
        v.push_back(top_integer("trace_iterations", &ExperimentConfig::trace_iterations));

        v.push_back(integer("sffr", "k_total", phys, &ScenarioConfig::k_total));
        v.push_back(real("sffr", "bandwidth_hz", phys, &ScenarioConfig::bandwidth_hz));
        v.push_back(real("sffr", "omega1_ratio", phys, &ScenarioConfig::omega1_ratio));
        v.push_back(integer("population", "n_high", phys, &ScenarioConfig::n_high));
        v.push_back(integer("population", "n_low", phys, &ScenarioConfig::n_low));
        v.push_back(integer("population", "t_hues", phys, &ScenarioConfig::t_hues));
        v.push_back(integer("population", "l_rrh", phys, &ScenarioConfig::l_rrh));
        v.push_back(integer("population", "scenario_l", phys, &ScenarioConfig::scenario_l));
        v.push_back(real("geometry", "d_high_rrh", phys, &ScenarioConfig::d_high_rrh));
        v.push_back(real("geometry", "d_high_hpn", phys, &ScenarioConfig::d_high_hpn));
        v.push_back(real("geometry", "d_low_rrh", phys, &ScenarioConfig::d_low_rrh));
        v.push_back(real("geometry", "d_low_hpn", phys, &ScenarioConfig::d_low_hpn));
        v.push_back(real("geometry", "d_rrh_hue", phys, &ScenarioConfig::d_rrh_hue));
        v.push_back(real("geometry", "d_hpn_hue", phys, &ScenarioConfig::d_hpn_hue));
        v.push_back(real("geometry", "n0_dbm_hz", phys, &ScenarioConfig::n0_dbm_hz));
        v.push_back(real("qos", "eta_r", phys, &ScenarioConfig::eta_r));
        v.push_back(real("qos", "eta_er", phys, &ScenarioConfig::eta_er));
        v.push_back(real("qos", "eta_hue_db", phys, &ScenarioConfig::eta_hue_db));
        v.push_back({"qos", "relax_floors",
                     [](const ExperimentConfig& c) { return std::string(c.physical.relax_floors ? "true" : "false"); },
                     [](ExperimentConfig& c, const std::string& name, const std::string& s) {
                         c.physical.relax_floors = to_bool(name, s);
                     }});
        v.push_back(real("rrh", "p_max_dbm", phys, &ScenarioConfig::p_max_r_dbm));
        v.push_back(real("rrh", "phi_eff", phys, &ScenarioConfig::phi_r));
        v.push_back(real("rrh", "p_circuit", phys, &ScenarioConfig::pc_r));
        v.push_back(real("rrh", "p_bh", phys, &ScenarioConfig::pbh_r));
        v.push_back(real("hpn", "p_max_dbm", phys, &ScenarioConfig::p_max_m_dbm));
        v.push_back(real("hpn", "phi_eff", phys, &ScenarioConfig::phi_m));
        v.push_back(real("hpn", "p_circuit", phys, &ScenarioConfig::pc_m));
        v.push_back(real("hpn", "p_bh", phys, &ScenarioConfig::pbh_m));
        v.push_back(real("pbs", "p_max_dbm", phys, &ScenarioConfig::p_max_p_dbm));
        v.push_back(real("pbs", "phi_eff", phys, &ScenarioConfig::phi_p));
        v.push_back(real("pbs", "p_circuit", phys, &ScenarioConfig::pc_p));
        v.push_back(real("pbs", "p_bh", phys, &ScenarioConfig::pbh_p));
        v.push_back(integer("solver", "i_max", outer_of, &OuterConfig::i_max));
        v.push_back(real("solver", "eps_gamma", outer_of, &OuterConfig::eps_gamma));
        v.push_back(real("solver", "gamma_floor", outer_of, &OuterConfig::gamma_floor));
        v.push_back(real("solver", "gamma_init", outer_of, &OuterConfig::gamma_init));
        v.push_back(integer("solver", "l_max", inner_of, &InnerConfig::l_max));
        v.push_back(real("solver", "c_beta", inner_of, &InnerConfig::c_beta));
        v.push_back(real("solver", "c_lambda", inner_of, &InnerConfig::c_lambda));
        v.push_back(real("solver", "c_nu", inner_of, &InnerConfig::c_nu));
        v.push_back(real("solver", "residual_tol", inner_of, &InnerConfig::residual_tol));
        v.push_back(real("solver", "movement_tol", inner_of, &InnerConfig::movement_tol));
        return v;
    }();
    return f;
}

}  // namespace

ExperimentConfig parse_config(std::istream& is, const std::string& source) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    std::map<std::string, const Field*> index;
    for (const auto& f : fields()) index[f.section + "." + f.key] = &f;

    ExperimentConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(source + ": key '" + section + "' outside of any section");
        for (const auto& [key, value] : body) {
            const auto name = section + "." + key;
            auto it = index.find(name);
            if (it == index.end()) throw ConfigError(source + ": unknown key '" + name + "'");
            try {
                it->second->set(cfg, name, trim(value.data()));
            } catch (const ConfigError& e) {
                throw ConfigError(source + ": " + e.what());
            }
        }
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(in, path.string());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            out += (section.empty() ? "" : "\n") + std::string("[") + f.section + "]\n";
            section = f.section;
        }
        out += f.key + " = " + f.get(cfg) + "\n";
    }
    return out;
}

ExperimentConfig figure_config(int figure) {
    ExperimentConfig c;
    auto range = [](double from, double to, double step) {
        std::vector<double> v;
        for (double x = from; x <= to + 1e-9; x += step) v.push_back(x);
        return v;
    };
    const std::vector<Algorithm> all(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
    switch (figure) {
        case 3:
            c.scenarios.assign(std::begin(kAllScenarios), std::end(kAllScenarios));
            c.sweep = SweepVariable::M;
            c.values = range(1, 10, 1);
            break;
        case 4:
            c.algorithms = all;
            c.sweep = SweepVariable::EtaHueDb;
            c.values = {0.0, 20.0};
            c.physical.n_low = 3;
            c.trace_iterations = 8;
            break;
        case 5:
            c.algorithms = all;
            c.sweep = SweepVariable::EtaHueDb;
            c.values = range(0, 20, 2);
            c.series = SweepVariable::PMaxRDbm;
            c.series_values = {20.0, 30.0};
            break;
        case 6:
            c.algorithms = all;
            c.sweep = SweepVariable::PMaxRDbm;
            c.values = range(14, 36, 2);
            c.physical.n_low = 4;
            c.outer.i_max = 5;
            break;
        case 7:
            c.sweep = SweepVariable::Omega1Ratio;
            c.values = {0.2, 0.4, 0.6, 0.8};
            c.series = SweepVariable::PMaxRDbm;
            c.series_values = {20.0, 30.0};
            c.physical.n_low = 5;
            break;
        default: throw ConfigError("no preset for figure " + std::to_string(figure) + " (expected 3..7)");
    }
    return c;
}

namespace {

struct Subject {
    ScenarioKind kind;
    Algorithm algo;
};

std::vector<Subject> subjects(const ExperimentConfig& cfg) {
    std::vector<Subject> out;
    for (auto kind : cfg.scenarios) {
        if (kind == ScenarioKind::TwoTierHcran)
            for (auto a : cfg.algorithms) out.push_back({kind, a});
        else
            out.push_back({kind, Algorithm::Optimal});
    }
    return out;
}

ResultRow run_one(const ExperimentConfig& cfg, const Subject& subj, double series, double value, std::uint64_t snap) {
    ResultRow row;
    row.scenario = to_string(subj.kind);
    row.algorithm = policy_name(subj.kind, subj.algo);
    row.series_value = series;
    row.sweep_value = value;
    row.snapshot = snap;
    row.gap = std::numeric_limits<double>::quiet_NaN();
    try {
        auto phys = cfg.physical;
        apply_sweep(phys, cfg.series, series);
        apply_sweep(phys, cfg.sweep, value);
        SnapshotRng rng(cfg.seed, snap);
        const auto s = run_scenario(subj.kind, phys, rng, cfg.outer, cfg.inner, subj.algo);
        row.ee = s.ee;
        row.rate = s.rate;
        row.power = s.power;
        row.converged = s.converged;
        row.outer_iterations = s.outer_iterations;
        row.gap = s.gap;
        row.infeasible = !s.feasible;
        row.relaxed = s.relaxed;
        if (cfg.trace_iterations > 0) row.trace_ee = s.trace_ee;
    } catch (const InfeasibleError&) {
        row.infeasible = true;
    } catch (const std::exception& e) {
        row.error = e.what();
        row.infeasible = true;
    }
    return row;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto subj = subjects(cfg);
    struct Task {
        double series;
        double value;
        std::uint64_t snap;
    };
    std::vector<Task> tasks;
    for (double s : cfg.series_values)
        for (double v : cfg.values)
            for (int i = 0; i < cfg.snapshots; ++i) tasks.push_back({s, v, static_cast<std::uint64_t>(i)});

    ResultTable table;
    table.config = cfg;
    table.rows.resize(tasks.size() * subj.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();)
            for (std::size_t j = 0; j < subj.size(); ++j)
                table.rows[t * subj.size() + j] = run_one(cfg, subj[j], tasks[t].series, tasks[t].value, tasks[t].snap);
    };
    const int workers = std::min<std::size_t>(cfg.workers, std::max<std::size_t>(tasks.size(), 1));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return table;
}

MeanCi mean_ci95(const std::vector<double>& xs) {
    MeanCi r;
    if (xs.empty()) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / xs.size();
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    const double n = static_cast<double>(xs.size());
    const boost::math::students_t dist(n - 1);
    r.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * std::sqrt(ss / (n - 1) / n);
    return r;
}

std::vector<SummaryRow> summarize(const ResultTable& table) {
    // Group in first-appearance order, which follows the sorted rows.
    std::vector<SummaryRow> out;
    std::map<std::tuple<std::string, std::string, double, double>, std::size_t> where;
    std::vector<std::vector<double>> ees, gaps;
    for (const auto& r : table.rows) {
        const auto key = std::make_tuple(r.scenario, r.algorithm, r.series_value, r.sweep_value);
        auto it = where.find(key);
        if (it == where.end()) {
            it = where.emplace(key, out.size()).first;
            out.push_back({r.scenario, r.algorithm, r.series_value, r.sweep_value});
            ees.emplace_back();
            gaps.emplace_back();
        }
        auto& s = out[it->second];
        if (!r.error.empty()) {
            ++s.failed;
            continue;
        }
        if (r.infeasible) {
            ++s.infeasible;
            continue;
        }
        ees[it->second].push_back(r.ee);
        if (!std::isnan(r.gap)) gaps[it->second].push_back(r.gap);
        s.relaxed += r.relaxed;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto m = mean_ci95(ees[i]);
        out[i].samples = static_cast<int>(ees[i].size());
        out[i].mean_ee = ees[i].empty() ? std::numeric_limits<double>::quiet_NaN() : m.mean;
        out[i].ci95 = ees[i].empty() ? std::numeric_limits<double>::quiet_NaN() : m.half_width;
        auto& g = gaps[i];
        if (g.empty()) {
            out[i].median_gap = std::numeric_limits<double>::quiet_NaN();
        } else {
            std::sort(g.begin(), g.end());
            out[i].median_gap = g[g.size() / 2];
        }
    }
    return out;
}

std::vector<TracePoint> summarize_trace(const ResultTable& table) {
    const int iters = std::max(table.config.trace_iterations, 1);
    std::vector<TracePoint> out;
    std::map<std::tuple<std::string, double>, std::size_t> where;
    std::vector<std::vector<double>> sums;
    std::vector<int> counts;
    for (const auto& r : table.rows) {
        if (!r.error.empty() || r.infeasible || r.trace_ee.empty()) continue;
        const auto key = std::make_tuple(r.algorithm, r.sweep_value);
        auto it = where.find(key);
        if (it == where.end()) {
            it = where.emplace(key, sums.size()).first;
            sums.emplace_back(iters, 0.0);
            counts.push_back(0);
        }
        auto& s = sums[it->second];
        for (int i = 0; i < iters; ++i) s[i] += r.trace_ee[std::min<std::size_t>(i, r.trace_ee.size() - 1)];
        ++counts[it->second];
    }
    std::vector<std::pair<std::size_t, std::tuple<std::string, double>>> order;
    for (const auto& [key, idx] : where) order.emplace_back(idx, key);
    std::sort(order.begin(), order.end());
    for (const auto& [idx, key] : order)
        for (int i = 0; i < iters; ++i)
            out.push_back({std::get<0>(key), std::get<1>(key), i + 1, sums[idx][i] / counts[idx]});
    return out;
}

std::string version_line() { return "# hcran " HCRAN_VERSION " rng=" + std::string(SnapshotRng::kName); }

namespace {

std::string csv_double(double x) { return std::isnan(x) ? std::string() : fmt_double(x); }

nlohmann::json json_double(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

void write_table(std::ostream& os, const ResultTable& table, TableKind kind, OutputFormat format) {
    const auto& cfg = table.config;
    const std::string sweep(to_string(cfg.sweep));
    const std::string series(to_string(cfg.series));
    const bool json = format == OutputFormat::Json;
    if (!json) os << version_line() << "\n";

    if (kind == TableKind::Trace) {
        if (!json) os << "algorithm," << sweep << ",iteration,ee\n";
        for (const auto& p : summarize_trace(table)) {
            if (json)
                os << nlohmann::json{{"algorithm", p.algorithm}, {sweep, p.sweep_value}, {"iteration", p.iteration}, {"ee", p.mean_ee}}.dump()
                   << "\n";
            else
                os << p.algorithm << "," << fmt_double(p.sweep_value) << "," << p.iteration << "," << fmt_double(p.mean_ee)
                   << "\n";
        }
        return;
    }

    if (kind == TableKind::Summary) {
        if (!json)
            os << "scenario,algorithm," << series << "," << sweep
               << ",samples,mean_ee,ci95_ee,infeasible,relaxed,failed,median_gap\n";
        for (const auto& s : summarize(table)) {
            if (json) {
                os << nlohmann::json{{"scenario", s.scenario}, {"algorithm", s.algorithm}, {series, s.series_value},
                                     {sweep, s.sweep_value}, {"samples", s.samples}, {"mean_ee", json_double(s.mean_ee)},
                                     {"ci95_ee", json_double(s.ci95)}, {"infeasible", s.infeasible}, {"relaxed", s.relaxed},
                                     {"failed", s.failed}, {"median_gap", json_double(s.median_gap)}}
                          .dump()
                   << "\n";
            } else {
                os << s.scenario << "," << s.algorithm << "," << fmt_double(s.series_value) << ","
                   << fmt_double(s.sweep_value) << "," << s.samples << "," << csv_double(s.mean_ee) << ","
                   << csv_double(s.ci95) << "," << s.infeasible << "," << s.relaxed << "," << s.failed << ","
                   << csv_double(s.median_gap) << "\n";
            }
        }
        return;
    }

    if (!json)
        os << "scenario,algorithm," << series << "," << sweep
           << ",snapshot,ee,rate,power,converged,outer_iterations,gap,infeasible,relaxed,error\n";
    for (const auto& r : table.rows) {
        if (json) {
            os << nlohmann::json{{"scenario", r.scenario}, {"algorithm", r.algorithm}, {series, r.series_value},
                                 {sweep, r.sweep_value}, {"snapshot", r.snapshot}, {"ee", r.ee}, {"rate", r.rate},
                                 {"power", r.power}, {"converged", r.converged}, {"outer_iterations", r.outer_iterations},
                                 {"gap", json_double(r.gap)}, {"infeasible", r.infeasible}, {"relaxed", r.relaxed},
                                 {"error", r.error}}
                      .dump()
               << "\n";
        } else {
            os << r.scenario << "," << r.algorithm << "," << fmt_double(r.series_value) << "," << fmt_double(r.sweep_value)
               << "," << r.snapshot << "," << fmt_double(r.ee) << "," << fmt_double(r.rate) << "," << fmt_double(r.power)
               << "," << r.converged << "," << r.outer_iterations << "," << csv_double(r.gap) << "," << r.infeasible
               << "," << r.relaxed << "," << csv_text(r.error) << "\n";
        }
    }
}

}  // namespace hcran
