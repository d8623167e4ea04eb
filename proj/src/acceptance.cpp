#include "hcran/acceptance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "hcran/error.hpp"
#include "hcran/experiment.hpp"
#include "hcran/oracle.hpp"

namespace hcran {

namespace {

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i; (i = next.fetch_add(1)) < count;) body(i);
    };
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
}

std::string fmt(const char* f, auto... args) {
    std::string out(std::snprintf(nullptr, 0, f, args...), '\0');
    std::snprintf(out.data(), out.size() + 1, f, args...);
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// EE per (scenario/algorithm, series, sweep value, snapshot).
struct Samples {
    std::map<std::tuple<std::string, double, double>, std::vector<double>> ee;
    std::vector<double> values;
    std::vector<double> series;

    explicit Samples(const ResultTable& t) : values(t.config.values), series(t.config.series_values) {
        for (const auto& r : t.rows) {
            const auto key = std::make_tuple(r.scenario == "2-tier-hcran" ? r.algorithm : r.scenario, r.series_value,
                                             r.sweep_value);
            auto& v = ee[key];
            if (v.size() <= r.snapshot) v.resize(r.snapshot + 1, std::numeric_limits<double>::quiet_NaN());
            v[r.snapshot] = r.error.empty() && !r.infeasible ? r.ee : std::numeric_limits<double>::quiet_NaN();
        }
    }
    const std::vector<double>& at(const std::string& who, double s, double v) const {
        return ee.at(std::make_tuple(who, s, v));
    }
};

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    int n = 0;
    for (double x : xs)
        if (!std::isnan(x)) s += x, ++n;
    return n ? s / n : std::numeric_limits<double>::quiet_NaN();
}

MeanCi paired(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        if (!std::isnan(a[i]) && !std::isnan(b[i])) d.push_back(a[i] - b[i]);
    return mean_ci95(d);
}

class Suite {
public:
    explicit Suite(const AcceptanceOptions& opt) : opt_(opt) {}

    CriterionResult run(int id) {
        CriterionResult r;
        r.id = id;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            switch (id) {
                case 1: r.name = "dinkelbach termination"; dinkelbach(r); break;
                case 2: r.name = "monotone outer loop"; monotone(r); break;
                case 3: r.name = "F(gamma) strictly decreasing"; f_monotone(r); break;
                case 4: r.name = "oracle equivalence"; oracle_equivalence(r); break;
                case 5: r.name = "duality gap trend"; gap_trend(r); break;
                case 6: r.name = "convergence speed"; convergence(r); break;
                case 7: r.name = "algorithm ordering"; ordering(r); break;
                case 8: r.name = "eta_hue trend"; eta_trend(r); break;
                case 9: r.name = "power budget trend"; power_trend(r); break;
                case 10: r.name = "s-ffr ratio trend"; ratio_trend(r); break;
                case 11: r.name = "scenario ordering"; scenario_ordering(r); break;
                case 12: r.name = "kkt residual"; kkt(r); break;
                case 13: r.name = "determinism"; determinism(r); break;
                default: throw ConfigError("unknown criterion " + std::to_string(id));
            }
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }

private:
    struct FullRun {
        double residual = 0.0;  // |C - gamma P| / (P max(gamma, 1))
        bool converged = false;
        int iterations = 0;
        int gamma_violations = 0;
        double kkt = 0.0;
        double boundary = 0.0;
        int interior = 0;
        bool infeasible = false;
        std::string error;
    };

    // Default configuration: K = 25, M = 3, eta_hue = 0 dB, 20 dBm.
    const std::vector<FullRun>& full_runs() {
        if (full_) return *full_;
        ScenarioConfig cfg;
        std::vector<FullRun> runs(opt_.snapshots);
        parallel_for(opt_.snapshots, opt_.workers, [&](int i) {
            auto& pr = runs[i];
            try {
                const auto sp = make_snapshot_problem(cfg, opt_.seed, i);
                const auto sol = solve_ee(sp.inst, {}, {}, {sp.certificate.a});
                if (!sol.feasible) {
                    pr.infeasible = true;
                    return;
                }
                pr.residual = std::abs(sol.rate - sol.gamma * sol.power) / sol.power / std::max(sol.gamma, 1.0);
                pr.converged = sol.trace.converged;
                pr.iterations = static_cast<int>(sol.trace.iterations.size());
                const auto& its = sol.trace.iterations;
                for (std::size_t j = 1; j < its.size(); ++j)
                    if (!(its[j].gamma > its[j - 1].gamma)) ++pr.gamma_violations;
                const auto k = oracle::kkt_check(sol.a, sol.p, sol.multipliers, sol.gamma, sp.inst);
                pr.kkt = k.max_residual;
                pr.boundary = k.max_boundary_violation;
                pr.interior = k.interior_points;
            } catch (const InfeasibleError&) {
                pr.infeasible = true;
            } catch (const std::exception& e) {
                pr.error = e.what();
            }
        });
        full_ = std::move(runs);
        return *full_;
    }

    const ResultTable& figure(int n, std::optional<std::vector<double>> values = std::nullopt) {
        auto it = figures_.find(n);
        if (it != figures_.end()) return it->second;
        auto cfg = figure_config(n);
        cfg.snapshots = opt_.snapshots;
        cfg.seed = opt_.seed;
        cfg.workers = opt_.workers;
        cfg.trace_iterations = 0;
        if (values) cfg.values = *values;
        return figures_.emplace(n, run_experiment(cfg)).first->second;
    }

    int failures(const std::vector<FullRun>& runs) {
        int f = 0;
        for (const auto& r : runs) f += !r.error.empty();
        return f;
    }

    int flagged(const std::vector<FullRun>& runs) {
        int f = 0;
        for (const auto& r : runs) f += r.infeasible;
        return f;
    }

    void dinkelbach(CriterionResult& r) {
        const auto& runs = full_runs();
        int ok = 0;
        double worst = 0.0;
        for (const auto& pr : runs) {
            if (!pr.error.empty() || pr.infeasible) continue;
            worst = std::max(worst, pr.residual);
            ok += pr.converged && pr.residual <= 1e-3;
        }
        const int feasible = static_cast<int>(runs.size()) - flagged(runs);
        r.pass = feasible > 0 && ok == feasible;
        r.detail = fmt("%d/%d feasible snapshots terminate with |C-gP|/P <= 1e-3*max(g,1); worst %.3g; "
                       "infeasible %d; errors %d",
                       ok, feasible, worst, flagged(runs), failures(runs));
    }

    void monotone(CriterionResult& r) {
        const auto& runs = full_runs();
        int bad = 0, steps = 0;
        for (const auto& pr : runs) {
            bad += pr.gamma_violations;
            steps += std::max(0, pr.iterations - 1);
        }
        r.pass = bad == 0 && failures(runs) == 0;
        r.detail = fmt("%d violations of gamma(i+1) > gamma(i) over %d steps; errors %d", bad, steps, failures(runs));
    }

    void f_monotone(CriterionResult& r) {
        const int count = opt_.ratio_instances;
        const double fractions[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        std::vector<int> strict(count, 0), pairs(count, 0), negative(count, 0);
        std::vector<std::string> errors(count);
        ScenarioConfig cfg;
        cfg.relax_floors = true;
        parallel_for(count, opt_.workers, [&](int i) {
            try {
                const auto sp = make_snapshot_problem(cfg, opt_.seed + 1, i);
                const auto sol = solve_ee(sp.inst, {}, {}, {sp.certificate.a});
                double prev = 0.0;
                for (int j = 0; j < 6; ++j) {
                    const double g = fractions[j] * sol.ee;
                    const auto in = solve_inner(g, sp.inst, {}, {sp.certificate.a, sol.a});
                    const double f = std::max(in.primal_value, sol.rate - g * sol.power);
                    if (f < -1e-6 * in.rate) ++negative[i];
                    if (j > 0) {
                        ++pairs[i];
                        strict[i] += f < prev;
                    }
                    prev = f;
                }
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
        int s = 0, p = 0, neg = 0, err = 0;
        for (int i = 0; i < count; ++i) s += strict[i], p += pairs[i], neg += negative[i], err += !errors[i].empty();
        const double frac = p ? static_cast<double>(s) / p : 0.0;
        r.pass = err == 0 && neg == 0 && frac >= 0.98;
        r.detail = fmt("strict decreases %d/%d (%.1f%%, need >= 98%%); F < -1e-6 C: %d; errors %d", s, p, 100 * frac, neg, err);
    }

    void oracle_equivalence(CriterionResult& r) {
        const int count = opt_.tiny_instances;
        std::vector<double> gaps(count, std::numeric_limits<double>::quiet_NaN());
        std::vector<std::string> errors(count);
        parallel_for(count, opt_.workers, [&](int i) {
            try {
                const auto tiny = oracle::make_tiny_instance(opt_.seed, i);
                const auto best = oracle::brute_force_ee(tiny);
                const auto sol = solve_ee(tiny.inst);
                gaps[i] = (best.gamma - sol.ee) / best.gamma;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
        int within = 0, err = 0;
        double worst = 0.0;
        std::vector<double> ok;
        for (int i = 0; i < count; ++i) {
            if (!errors[i].empty()) {
                ++err;
                continue;
            }
            ok.push_back(gaps[i]);
            worst = std::max(worst, gaps[i]);
            within += gaps[i] <= 0.02;
        }
        const double med = median(ok);
        r.pass = err == 0 && within == count && med < 0.005;
        r.detail = fmt("%d/%d within 2%% of brute force; median gap %.3g (need < 0.5%%); worst %.3g; errors %d", within,
                       count, med, worst, err);
    }

    void gap_trend(CriterionResult& r) {
        const int ks[] = {4, 8, 16, 25};
        std::vector<double> medians;
        std::string text;
        for (int k : ks) {
            ScenarioConfig cfg;
            cfg.k_total = k;
            cfg.bandwidth_hz = 200e3 * k;
            // Small K cannot host every nominal floor; measure the gap on attainable ones.
            cfg.relax_floors = true;
            std::vector<double> gaps(opt_.snapshots, std::numeric_limits<double>::quiet_NaN());
            parallel_for(opt_.snapshots, opt_.workers, [&](int i) {
                try {
                    const auto sp = make_snapshot_problem(cfg, opt_.seed, i);
                    gaps[i] = oracle::duality_gap(solve_ee(sp.inst, {}, {}, {sp.certificate.a})).relative_gap;
                } catch (const Error&) {
                }
            });
            std::vector<double> ok;
            for (double g : gaps)
                if (!std::isnan(g)) ok.push_back(g);
            medians.push_back(median(ok));
            text += fmt("%sK=%d %.4f", text.empty() ? "" : ", ", k, medians.back());
        }
        bool mono = true;
        for (std::size_t i = 1; i < medians.size(); ++i) mono = mono && medians[i] <= medians[i - 1];
        r.pass = mono && medians.back() < 0.02;
        r.detail = "median (D-F)/C: " + text + (mono ? "; nonincreasing" : "; NOT nonincreasing") + "; K=25 needs < 0.02";
    }

    void convergence(CriterionResult& r) {
        const auto& runs = full_runs();
        std::vector<double> its;
        int within5 = 0;
        for (const auto& pr : runs) {
            if (!pr.error.empty() || pr.infeasible) continue;
            its.push_back(pr.iterations);
            within5 += pr.converged && pr.iterations <= 5;
        }
        const double frac = its.empty() ? 0.0 : static_cast<double>(within5) / its.size();
        const double med = median(its);
        r.pass = frac >= 0.9 && med <= 3 && failures(runs) == 0;
        r.detail = fmt("%.1f%% converge within 5 outer iterations (need >= 90%%); median %.0f (need <= 3); "
                       "infeasible %d",
                       100 * frac, med, flagged(runs));
    }

    void ordering(CriterionResult& r) {
        int both = 0, os = 0, sf = 0, total = 0;
        double m_opt = 0, m_seq = 0, m_fix = 0;
        for (int n : {5, 6}) {
            const Samples s(figure(n));
            for (double se : s.series)
                for (double v : s.values) {
                    const auto& o = s.at("optimal", se, v);
                    const auto& q = s.at("sequential-rb", se, v);
                    const auto& f = s.at("fixed-power", se, v);
                    for (std::size_t i = 0; i < o.size(); ++i) {
                        if (std::isnan(o[i]) || std::isnan(q[i]) || std::isnan(f[i])) continue;
                        const bool a = o[i] >= q[i] * (1 - 1e-9);
                        const bool b = q[i] >= f[i] * (1 - 1e-9);
                        os += a, sf += b, both += a && b, ++total;
                        m_opt += o[i], m_seq += q[i], m_fix += f[i];
                    }
                }
        }
        const double frac = total ? static_cast<double>(both) / total : 0.0;
        r.pass = frac >= 0.95 && m_opt > m_seq && m_seq > m_fix;
        r.detail = fmt("opt>=seq>=fixed on %.1f%% of %d paired snapshots (need >= 95%%); opt>=seq %.1f%%, seq>=fixed "
                       "%.1f%%; means %.4g / %.4g / %.4g",
                       100 * frac, total, 100.0 * os / std::max(total, 1), 100.0 * sf / std::max(total, 1),
                       m_opt / std::max(total, 1), m_seq / std::max(total, 1), m_fix / std::max(total, 1));
    }

    void eta_trend(CriterionResult& r) {
        const Samples s(figure(5));
        int bad = 0, empty = 0;
        std::string text;
        for (const char* who : {"optimal", "sequential-rb", "fixed-power"})
            for (double se : s.series) {
                for (double v : s.values) empty += std::isnan(mean(s.at(who, se, v)));
                for (std::size_t i = 1; i < s.values.size(); ++i) {
                    const auto d = paired(s.at(who, se, s.values[i]), s.at(who, se, s.values[i - 1]));
                    if (d.mean - d.half_width > 0) {
                        ++bad;
                        text += fmt(" %s@%gdBm %g->%g dB rises %.3g (ci %.3g);", who, se, s.values[i - 1], s.values[i],
                                    d.mean, d.half_width);
                    }
                }
                text += fmt(" %s@%gdBm %.4g->%.4g;", who, se, mean(s.at(who, se, s.values.front())),
                            mean(s.at(who, se, s.values.back())));
            }
        r.pass = bad == 0 && empty == 0;
        r.detail = fmt("%d significant increases over eta_hue 0..20 dB; %d points without feasible snapshots;", bad,
                       empty) +
                   text;
    }

    void power_trend(CriterionResult& r) {
        const Samples s(figure(6));
        const double se = s.series.front();
        const auto& v = s.values;
        bool all = true;
        std::string text;
        for (const char* who : {"optimal", "sequential-rb", "fixed-power"}) {
            std::vector<double> m;
            for (double x : v) m.push_back(mean(s.at(who, se, x)));
            int drops = 0;
            for (std::size_t i = 1; i < m.size(); ++i) drops += m[i] < m[i - 1];
            const double first = m[2] - m[0];
            const double last = m[m.size() - 1] - m[m.size() - 3];
            const bool saturates = first > 0 && last < 0.2 * first;
            all = all && drops == 0 && saturates;
            text += fmt(" %s: %.4g@%gdBm..%.4g@%gdBm, %d decreases, first-3 gain %.3g, last-3 gain %.3g;", who, m.front(),
                        v.front(), m.back(), v.back(), drops, first, last);
        }
        r.pass = all;
        r.detail = "nondecreasing and saturating:" + text;
    }

    void ratio_trend(CriterionResult& r) {
        const Samples s(figure(7));
        bool all = true;
        std::string text;
        for (double se : s.series) {
            std::vector<double> m;
            for (double x : s.values) m.push_back(mean(s.at("optimal", se, x)));
            bool strict = true;
            for (std::size_t i = 1; i < m.size(); ++i) strict = strict && m[i] > m[i - 1];
            const double n = static_cast<double>(m.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                const double x = s.values[i], y = m[i];
                sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
            }
            const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
            const double r2 = vy > 0 ? cov * cov / (vx * vy) : 0.0;
            all = all && strict && r2 > 0.9;
            text += fmt(" %gdBm: %s, R^2 %.3f (", se, strict ? "increasing" : "NOT increasing", r2);
            for (std::size_t i = 0; i < m.size(); ++i) text += fmt("%s%.4g", i ? " " : "", m[i]);
            text += ");";
        }
        r.pass = all;
        r.detail = "mean EE over omega1 ratio 0.2..0.8:" + text;
    }

    void scenario_ordering(CriterionResult& r) {
        const auto& t = figure(3, std::vector<double>{3.0});
        const Samples s(t);
        const char* order[] = {"2-tier-hcran", "1-tier-cran", "2-tier-underlaid", "2-tier-overlaid", "1-tier-hpn"};
        bool all = true;
        std::string text;
        for (int i = 0; i < 5; ++i) text += fmt("%s%s %.4g", i ? ", " : " means: ", order[i], mean(s.at(i == 0 ? "optimal" : order[i], 0.0, 3.0)));
        text += ";";
        for (int i = 0; i + 1 < 5; ++i) {
            const auto& a = s.at(i == 0 ? "optimal" : order[i], 0.0, 3.0);
            const auto& b = s.at(order[i + 1], 0.0, 3.0);
            const auto d = paired(a, b);
            const bool ok = d.mean - d.half_width > 0;
            all = all && ok;
            text += fmt(" %s>%s %s (diff %.3g +- %.3g);", order[i], order[i + 1], ok ? "yes" : "NO", d.mean, d.half_width);
        }
        r.pass = all;
        r.detail = "M=3," + text;
    }

    void kkt(CriterionResult& r) {
        const auto& runs = full_runs();
        double worst = 0.0, boundary = 0.0;
        int points = 0, bad = 0, checked = 0;
        for (const auto& pr : runs) {
            if (!pr.error.empty() || pr.infeasible || !pr.converged) continue;
            ++checked;
            worst = std::max(worst, pr.kkt);
            boundary = std::max(boundary, pr.boundary);
            points += pr.interior;
            bad += pr.kkt >= 1e-6 || pr.boundary > 1e-6;
        }
        r.pass = bad == 0 && failures(runs) == 0;
        r.detail = fmt("worst interior residual %.3g over %d RBs in %d converged snapshots (need < 1e-6); worst "
                       "boundary slope %.3g",
                       worst, points, checked, boundary);
    }

    void determinism(CriterionResult& r) {
        int same = 0;
        std::string text;
        for (int n = 3; n <= 7; ++n) {
            std::string out[2];
            for (int pass = 0; pass < 2; ++pass) {
                auto cfg = figure_config(n);
                cfg.snapshots = opt_.determinism_snapshots;
                cfg.seed = opt_.seed;
                cfg.workers = pass == 0 ? 1 : 3;
                const auto t = run_experiment(cfg);
                std::ostringstream os;
                write_table(os, t, TableKind::Rows, OutputFormat::Csv);
                write_table(os, t, n == 4 ? TableKind::Trace : TableKind::Summary, OutputFormat::Csv);
                out[pass] = os.str();
            }
            const bool eq = out[0] == out[1];
            same += eq;
            text += fmt(" fig%d %s;", n, eq ? "identical" : "DIFFERS");
        }
        r.pass = same == 5;
        r.detail = fmt("1 vs 3 workers, %d snapshots:", opt_.determinism_snapshots) + text;
    }

    AcceptanceOptions opt_;
    std::optional<std::vector<FullRun>> full_;
    std::map<int, ResultTable> figures_;
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    Suite suite(opt);
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriteria; ++id) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
        out.push_back(suite.run(id));
        if (on_result) on_result(out.back());
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    return fmt("[%s] %2d %-28s %s (%.1fs)", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
}

}  // namespace hcran
