#include "hcran/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "hcran/error.hpp"

namespace hcran::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rb {
    int k;
    double sigma;
    double cap;
};

double fill(double w, const Rb& rb) { return std::clamp(w - 1.0 / rb.sigma, 0.0, rb.cap); }

double rate_at(double w, const std::vector<Rb>& rbs, double b0) {
    double r = 0.0;
    for (const auto& rb : rbs) r += b0 * std::log2(1.0 + rb.sigma * fill(w, rb));
    return r;
}

double power_at(double w, const std::vector<Rb>& rbs) {
    double s = 0.0;
    for (const auto& rb : rbs) s += fill(w, rb);
    return s;
}

// Level at which every RB of the UE sits at its cap.
double saturation_level(const std::vector<Rb>& rbs) {
    double w = 0.0;
    for (const auto& rb : rbs) w = std::max(w, rb.cap + 1.0 / rb.sigma);
    return w;
}

struct Levels {
    std::vector<double> w;
    bool ok = true;
};

// Water level per UE at price pi: the common level B0 / (ln2 pi), raised until
// the floor holds.
Levels levels_at(double pi, const std::vector<std::vector<Rb>>& ue_rbs, const std::vector<double>& floors, double b0) {
    Levels out;
    out.w.resize(ue_rbs.size(), 0.0);
    const double base = pi > 0.0 ? b0 / (std::numbers::ln2 * pi) : kInf;
    for (std::size_t n = 0; n < ue_rbs.size(); ++n) {
        const auto& rbs = ue_rbs[n];
        const double top = saturation_level(rbs);
        double w = rbs.empty() ? 0.0 : std::min(base, top);
        if (rate_at(w, rbs, b0) < floors[n]) {
            double hi = top;
            if (std::isinf(hi)) {
                hi = std::max(w, 1.0);
                while (rate_at(hi, rbs, b0) < floors[n]) hi *= 2.0;
            }
            if (rbs.empty() || rate_at(hi, rbs, b0) < floors[n]) {
                out.ok = false;
            } else {
                double lo = w;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (rate_at(mid, rbs, b0) < floors[n] ? lo : hi) = mid;
                }
            }
            w = hi;
        }
        out.w[n] = w;
    }
    return out;
}

double total_at(const Levels& lv, const std::vector<std::vector<Rb>>& ue_rbs) {
    double s = 0.0;
    for (std::size_t n = 0; n < ue_rbs.size(); ++n) s += power_at(lv.w[n], ue_rbs[n]);
    return s;
}

struct Split {
    std::vector<std::vector<Rb>> ue_rbs;
};

Split split_rbs(const AllocationMatrix& a, const ProblemInstance& inst) {
    Split s;
    s.ue_rbs.resize(inst.n_ues());
    for (int k = 0; k < inst.n_rbs(); ++k)
        for (int n = 0; n < inst.n_ues(); ++n)
            if (a(n, k)) s.ue_rbs[n].push_back({k, inst.channel.sigma(n, k), std::min(inst.power_cap(k), inst.power.p_max)});
    return s;
}

struct Powers {
    OraclePowers out;
    double pi = 0.0;
    std::vector<double> w;
};

Powers solve_powers(const AllocationMatrix& a, double gamma, const ProblemInstance& inst) {
    const auto s = split_rbs(a, inst);
    const double b0 = inst.b0();
    const double pmax = inst.power.p_max;
    const double pi0 = gamma * inst.power.phi_eff;
    Powers res;
    res.out.p = PowerMatrix(inst.n_ues(), inst.n_rbs());

    // Floors alone must fit the budget.
    const auto minimal = levels_at(kInf, s.ue_rbs, inst.rate_floor, b0);
    if (!minimal.ok || total_at(minimal, s.ue_rbs) > pmax * (1.0 + 1e-12)) return res;

    double pi = pi0;
    Levels lv = levels_at(pi, s.ue_rbs, inst.rate_floor, b0);
    if (pi <= 0.0 || total_at(lv, s.ue_rbs) > pmax) {
        double lo = pi0, hi = std::max(pi0, b0 / (std::numbers::ln2 * pmax));
        while (total_at(levels_at(hi, s.ue_rbs, inst.rate_floor, b0), s.ue_rbs) > pmax) hi *= 4.0;
        for (int it = 0; it < 300; ++it) {
            const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
            if (mid <= lo || mid >= hi) break;
            (total_at(levels_at(mid, s.ue_rbs, inst.rate_floor, b0), s.ue_rbs) > pmax ? lo : hi) = mid;
        }
        pi = hi;
        lv = levels_at(pi, s.ue_rbs, inst.rate_floor, b0);
    }

    double tx = 0.0;
    double rate = 0.0;
    for (int n = 0; n < inst.n_ues(); ++n)
        for (const auto& rb : s.ue_rbs[n]) {
            const double p = fill(lv.w[n], rb);
            res.out.p(n, rb.k) = p;
            tx += p;
            rate += b0 * std::log2(1.0 + rb.sigma * p);
        }
    res.out.rate = rate;
    res.out.power = inst.power.phi_eff * tx + inst.power.static_power();
    res.out.feasible = lv.ok;
    res.pi = pi;
    res.w = lv.w;
    return res;
}

// Grid check of each per-RB term B0 (1 + mu) log2(1 + sigma p) - pi p, with
// 1 + mu = w ln2 pi / B0, against the bisection point.
double grid_excess(const AllocationMatrix& a, const Powers& pw, const ProblemInstance& inst, int points) {
    if (!(pw.pi > 0.0) || points < 2) return 0.0;
    const auto s = split_rbs(a, inst);
    const double b0 = inst.b0();
    double worst = 0.0;
    for (int n = 0; n < inst.n_ues(); ++n) {
        const double weight = pw.w[n] * std::numbers::ln2 * pw.pi / b0;
        for (const auto& rb : s.ue_rbs[n]) {
            const double hi = std::min(rb.cap, inst.power.p_max);
            auto term = [&](double p) { return b0 * weight * std::log2(1.0 + rb.sigma * p) - pw.pi * p; };
            const double at = term(pw.out.p(n, rb.k));
            double best = -kInf;
            for (int i = 0; i < points; ++i) best = std::max(best, term(hi * i / (points - 1)));
            const double scale = std::max(std::abs(at), b0 * weight * 1e-12);
            worst = std::max(worst, (best - at) / scale);
        }
    }
    return worst;
}

struct Candidate {
    double ee = -kInf;
    std::uint64_t index = 0;
    AllocationMatrix a;
    OraclePowers pw;
    double grid = 0.0;
};

AllocationMatrix decode(std::uint64_t idx, const std::vector<std::vector<int>>& options, int ues) {
    AllocationMatrix a(ues, static_cast<int>(options.size()));
    for (std::size_t k = 0; k < options.size(); ++k) {
        const auto& opt = options[k];
        a.assign(opt[idx % opt.size()], static_cast<int>(k));
        idx /= opt.size();
    }
    return a;
}

}  // namespace

std::uint64_t enumeration_size(const ProblemInstance& inst) {
    std::uint64_t count = 1;
    for (int k = 0; k < inst.n_rbs(); ++k) {
        std::uint64_t e = 0;
        for (int n = 0; n < inst.n_ues(); ++n) e += inst.eligible(n, k) ? 1 : 0;
        count *= std::max<std::uint64_t>(e, 1);
        if (count > kEnumerationGuard) return kEnumerationGuard + 1;
    }
    return count;
}

OraclePowers oracle_powers(const AllocationMatrix& a, double gamma, const ProblemInstance& inst) {
    return solve_powers(a, gamma, inst).out;
}

OracleResult brute_force_ee(const ProblemInstance& inst, int grid_points, int workers) {
    inst.validate();
    const auto count = enumeration_size(inst);
    if (count > kEnumerationGuard)
        throw ConfigError("enumeration guard exceeded: more than " + std::to_string(kEnumerationGuard) + " assignments");

    std::vector<std::vector<int>> options(inst.n_rbs());
    for (int k = 0; k < inst.n_rbs(); ++k)
        for (int n = 0; n < inst.n_ues(); ++n)
            if (inst.eligible(n, k)) options[k].push_back(n);

    auto evaluate = [&](std::uint64_t idx) {
        Candidate c;
        c.index = idx;
        c.a = decode(idx, options, inst.n_ues());
        double gamma = 0.0;
        Powers pw;
        for (int it = 0; it < 100; ++it) {
            pw = solve_powers(c.a, gamma, inst);
            if (!pw.out.feasible) return c;
            const double next = pw.out.rate / pw.out.power;
            const bool done = pw.out.rate - gamma * pw.out.power <= 1e-13 * pw.out.rate;
            gamma = next;
            if (done) break;
        }
        c.pw = pw.out;
        c.ee = pw.out.rate / pw.out.power;
        c.grid = grid_excess(c.a, pw, inst, grid_points);
        return c;
    };

    workers = std::max(1, workers);
    std::vector<Candidate> best(workers);
    std::vector<double> grid(workers, 0.0);
    auto run = [&](int w) {
        for (std::uint64_t idx = w; idx < count; idx += workers) {
            auto c = evaluate(idx);
            if (c.ee == -kInf) continue;
            grid[w] = std::max(grid[w], c.grid);
            if (c.ee > best[w].ee || (c.ee == best[w].ee && c.index < best[w].index)) best[w] = std::move(c);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }

    Candidate top;
    double excess = 0.0;
    for (int w = 0; w < workers; ++w) {
        excess = std::max(excess, grid[w]);
        const auto& c = best[w];
        if (c.ee > top.ee || (c.ee == top.ee && c.ee != -kInf && c.index < top.index)) top = c;
    }

    OracleResult r;
    r.assignments = count;
    r.grid_excess = excess;
    if (top.ee == -kInf) return r;
    r.a = top.a;
    r.p = top.pw.p;
    r.rate = top.pw.rate;
    r.power = top.pw.power;
    r.gamma = top.ee;
    r.feasible = true;
    return r;
}

OracleResult brute_force_ee(const TinyInstance& tiny, int workers) {
    return brute_force_ee(tiny.inst, tiny.grid_points, workers);
}

double scan_ee_single(double sigma, double b0, const PowerModel& pm, double cap, int points) {
    const double hi = std::min(cap, pm.p_max);
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        const double p = hi * i / (points - 1);
        best = std::max(best, b0 * std::log2(1.0 + sigma * p) / (pm.phi_eff * p + pm.static_power()));
    }
    return best;
}

TinyInstance make_tiny_instance(std::uint64_t seed, std::uint64_t index, int max_rbs, int max_ues) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        SnapshotRng rng(seed, index, attempt + 1);
        auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)); };
        const int k = pick(1, max_rbs);
        const int u = pick(1, max_ues);
        int exclusive = pick(0, k);
        int n_high = pick(0, u);
        if (exclusive > 0 && n_high == 0) n_high = 1;
        if (exclusive < k && n_high == u) {
            if (u > 1) n_high = u - 1;
            else exclusive = k;
        }
        if (exclusive > 0 && n_high == 0) continue;

        const double b0 = 200e3;
        ProblemInstance inst;
        inst.partition = SffrPartition::split(k, exclusive, b0);
        inst.ues = {n_high, u - n_high};
        inst.power = {2.0, 0.1, 0.2, std::pow(10.0, -2.0 + 1.5 * rng.uniform())};
        inst.channel.sigma = Grid<double>(u, k);
        for (int n = 0; n < u; ++n)
            for (int j = 0; j < k; ++j) inst.channel.sigma(n, j) = std::pow(10.0, 3.5 + 2.5 * rng.uniform()) * rng.exponential();
        inst.channel.g_r2m.resize(k);
        for (int j = 0; j < k; ++j) inst.channel.g_r2m[j] = 1e-11 * (0.2 + rng.exponential());
        inst.delta0 = 1e-11 * inst.power.p_max * (0.05 + 0.5 * rng.uniform());
        inst.channel.seed = seed;
        inst.channel.snapshot_id = index;
        inst.rate_floor.resize(u);
        for (int n = 0; n < u; ++n) inst.rate_floor[n] = (inst.ues.is_high(n) ? 128e3 : 64e3) * rng.uniform();
        inst.eligibility = Eligibility::Sffr;

        TinyInstance tiny{std::move(inst), 2000};
        if (brute_force_ee(tiny).feasible) return tiny;
    }
}

GapReport duality_gap(const EeSolution& sol) {
    GapReport g;
    g.gamma = sol.gamma;
    g.dual_value = sol.dual_value;
    g.primal_value = sol.rate - sol.gamma * sol.power;
    g.rate = sol.rate;
    g.relative_gap = (g.dual_value - g.primal_value) / sol.rate;
    return g;
}

GapReport duality_gap(const ProblemInstance& inst, const OuterConfig& outer, const InnerConfig& inner) {
    return duality_gap(solve_ee(inst, outer, inner));
}

KktReport kkt_check(const AllocationMatrix& a, const PowerMatrix& p, const DualState& dual, double gamma,
                    const ProblemInstance& inst) {
    KktReport rep;
    const double b0 = inst.b0();
    for (int n = 0; n < inst.n_ues(); ++n)
        for (int k = 0; k < inst.n_rbs(); ++k) {
            if (!a(n, k)) continue;
            const double sigma = inst.channel.sigma(n, k);
            const double beta = dual.beta.empty() ? 0.0 : dual.beta[n];
            const double lambda = dual.lambda.empty() ? 0.0 : dual.lambda[k];
            const double g = inst.partition.shared(k) ? inst.channel.g_r2m[k] : 0.0;
            const double price = gamma * inst.power.phi_eff + lambda * g + dual.nu;
            auto term = [&](double x) { return (1.0 + beta) * b0 * std::log2(1.0 + sigma * x) - price * x; };
            const double x = p(n, k);
            const double scale = std::max(price, (1.0 + beta) * b0 * sigma / std::numbers::ln2 * 1e-12);
            if (x <= 0.0) {
                const double h = 1e-9 / sigma;
                const double d = (term(h) - term(0.0)) / h;
                rep.max_boundary_violation = std::max(rep.max_boundary_violation, d / scale);
                ++rep.boundary_points;
                continue;
            }
            const double h = 1e-4 * x;
            const double d = (term(x + h) - term(x - h)) / (2.0 * h);
            rep.max_residual = std::max(rep.max_residual, std::abs(d) / scale);
            ++rep.interior_points;
        }
    return rep;
}

}  // namespace hcran::oracle
