#include "hcran/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

#include "hcran/error.hpp"

namespace hcran {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

double price_of(int k, const DualState& dual, double gamma, const ProblemInstance& inst) {
    double d = gamma * inst.power.phi_eff + dual.nu;
    if (inst.partition.shared(k) && !dual.lambda.empty()) d += dual.lambda[k] * inst.channel.g_r2m[k];
    return d;
}

std::vector<int> owners(const AllocationMatrix& a) {
    std::vector<int> o(a.rbs());
    for (int k = 0; k < a.rbs(); ++k) o[k] = a.owner(k);
    return o;
}

// Base level such that per-RB water-filling on the strongest eligible UE uses p_max.
double initial_nu(const ProblemInstance& inst) {
    std::vector<double> inv;
    for (int k = 0; k < inst.n_rbs(); ++k) {
        double best = 0.0;
        for (int n = 0; n < inst.n_ues(); ++n)
            if (inst.eligible(n, k)) best = std::max(best, inst.channel.sigma(n, k));
        if (best > 0.0) inv.push_back(1.0 / best);
    }
    if (inv.empty()) return 0.0;
    std::sort(inv.begin(), inv.end());
    // Sum over the active set of (u - inv) = p_max.
    double acc = 0.0, u = 0.0;
    for (std::size_t j = 0; j < inv.size(); ++j) {
        acc += inv[j];
        const double cand = (inst.power.p_max + acc) / static_cast<double>(j + 1);
        if (j + 1 == inv.size() || cand <= inv[j + 1]) {
            u = cand;
            break;
        }
    }
    return inst.b0() / (kLn2 * u);
}

}  // namespace

void OuterConfig::validate() const {
    if (i_max < 1) throw ConfigError("i_max must be >= 1");
    if (!(eps_gamma > 0)) throw ConfigError("eps_gamma must be > 0");
    if (!(gamma_floor > 0)) throw ConfigError("gamma_floor must be > 0");
    if (!(gamma_init >= 0)) throw ConfigError("gamma_init must be >= 0");
}

bool OuterConfig::converged(double rate, double power, double gamma) const {
    return (rate - gamma * power) / power < eps_gamma * std::max(gamma, gamma_floor);
}

void InnerConfig::validate() const {
    if (l_max < 1) throw ConfigError("l_max must be >= 1");
    if (!(c_beta > 0 && c_lambda > 0 && c_nu > 0)) throw ConfigError("step constants must be > 0");
    if (!(residual_tol > 0 && movement_tol > 0)) throw ConfigError("tolerances must be > 0");
}

WaterFill water_fill_power(int n, int k, const DualState& dual, double gamma, const ProblemInstance& inst) {
    const double s = inst.channel.sigma(n, k);
    WaterFill w;
    if (!(s > 0.0)) return w;
    const double d = price_of(k, dual, gamma, inst);
    const double beta = dual.beta.empty() ? 0.0 : dual.beta[n];
    if (!(d > 0.0)) {
        w.unbounded = true;
        w.level = kInf;
        w.power = inst.power.p_max;
        return w;
    }
    w.level = inst.b0() * (1.0 + beta) / (kLn2 * d);
    w.power = std::max(0.0, w.level - 1.0 / s);
    return w;
}

double rb_metric_value(double omega_sigma, double beta) {
    if (!(omega_sigma > 1.0)) return 0.0;
    if (std::isinf(omega_sigma)) return kInf;
    return (1.0 + beta) * std::log2(omega_sigma) - (1.0 + beta) / kLn2 * (1.0 - 1.0 / omega_sigma);
}

double rb_metric(int n, int k, const DualState& dual, double gamma, const ProblemInstance& inst) {
    const auto w = water_fill_power(n, k, dual, gamma, inst);
    const double beta = dual.beta.empty() ? 0.0 : dual.beta[n];
    if (w.unbounded) return kInf;
    return rb_metric_value(w.level * inst.channel.sigma(n, k), beta);
}

AllocationMatrix assign_rbs(const DualState& dual, double gamma, const ProblemInstance& inst) {
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    AllocationMatrix a(nu_count, kk);
    for (int k = 0; k < kk; ++k) {
        const double d = price_of(k, dual, gamma, inst);
        int best = -1;
        double best_h = -1.0;
        for (int n = 0; n < nu_count; ++n) {
            if (!inst.eligible(n, k)) continue;
            double h;
            if (!(d > 0.0)) {
                // Unbounded level: the strongest channel dominates.
                h = inst.channel.sigma(n, k);
            } else {
                const double beta = dual.beta.empty() ? 0.0 : dual.beta[n];
                const double omega = inst.b0() * (1.0 + beta) / (kLn2 * d);
                h = rb_metric_value(omega * inst.channel.sigma(n, k), beta);
            }
            if (h > best_h) {
                best = n;
                best_h = h;
            }
        }
        if (best < 0) throw ConfigError("RB " + std::to_string(k) + " has no eligible UE");
        a.assign(best, k);
    }
    return a;
}

PowerMatrix water_fill_assigned(const AllocationMatrix& a, const DualState& dual, double gamma,
                                const ProblemInstance& inst) {
    PowerMatrix p(inst.n_ues(), inst.n_rbs());
    double total = 0.0;
    bool unbounded = false;
    for (int k = 0; k < inst.n_rbs(); ++k) {
        const int n = a.owner(k);
        if (n < 0) continue;
        const auto w = water_fill_power(n, k, dual, gamma, inst);
        p(n, k) = w.power;
        total += w.power;
        unbounded = unbounded || w.unbounded;
    }
    if (unbounded && total > inst.power.p_max) {
        const double scale = inst.power.p_max / total;
        for (int k = 0; k < inst.n_rbs(); ++k) {
            const int n = a.owner(k);
            if (n >= 0) p(n, k) *= scale;
        }
    }
    return p;
}

double dual_value(const DualState& dual, double gamma, const ProblemInstance& inst) {
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    double value = 0.0;
    for (int k = 0; k < kk; ++k) {
        const double d = price_of(k, dual, gamma, inst);
        if (!(d > 0.0)) return kInf;
        double best = 0.0;
        for (int n = 0; n < nu_count; ++n) {
            if (!inst.eligible(n, k)) continue;
            const double beta = dual.beta.empty() ? 0.0 : dual.beta[n];
            const double omega = inst.b0() * (1.0 + beta) / (kLn2 * d);
            best = std::max(best, rb_metric_value(omega * inst.channel.sigma(n, k), beta));
        }
        value += inst.b0() * best;
    }
    value -= gamma * inst.power.static_power();
    for (int n = 0; n < nu_count; ++n) value -= dual.beta[n] * inst.rate_floor[n];
    if (std::isfinite(inst.delta0))
        for (int k : inst.partition.omega2()) value += dual.lambda[k] * inst.delta0;
    value += dual.nu * inst.power.p_max;
    return value;
}

Subgradients subgradients(const AllocationMatrix& a, const PowerMatrix& p, const ProblemInstance& inst) {
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    Subgradients g;
    g.beta.assign(nu_count, 0.0);
    g.lambda.assign(kk, 0.0);
    const auto rates = ue_rates(a, p, inst.channel.sigma, inst.b0());
    for (int n = 0; n < nu_count; ++n) g.beta[n] = rates[n] - inst.rate_floor[n];
    double total = 0.0;
    for (int k = 0; k < kk; ++k) {
        const int n = a.owner(k);
        if (n < 0) continue;
        total += p(n, k);
        if (inst.partition.shared(k) && std::isfinite(inst.delta0))
            g.lambda[k] = inst.delta0 - p(n, k) * inst.channel.g_r2m[k];
    }
    for (int k : inst.partition.omega2())
        if (std::isfinite(inst.delta0) && a.owner(k) < 0) g.lambda[k] = inst.delta0;
    g.nu = inst.power.p_max - total;
    return g;
}

StepScales StepScales::unit(int ues, int rbs) {
    return {std::vector<double>(ues, 1.0), std::vector<double>(rbs, 1.0), 1.0};
}

StepScales StepScales::for_instance(double gamma, const ProblemInstance& inst) {
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    const double p_share = inst.power.p_max / kk;
    const double price_ref = std::max(gamma * inst.power.phi_eff, inst.b0() / (kLn2 * p_share));
    StepScales s;
    s.beta.resize(nu_count);
    for (int n = 0; n < nu_count; ++n) s.beta[n] = 1.0 / std::max(inst.rate_floor[n], inst.b0());
    s.lambda.assign(kk, 0.0);
    if (std::isfinite(inst.delta0)) {
        for (int k : inst.partition.omega2()) {
            const double g = inst.channel.g_r2m[k];
            if (!(g > 0.0)) continue;
            const double budget = std::max(inst.delta0, g * p_share * 1e-6);
            s.lambda[k] = price_ref / g / budget;
        }
    }
    s.nu = price_ref / inst.power.p_max;
    return s;
}

DualState update_duals(const DualState& dual, const Subgradients& grads, int l, const InnerConfig& cfg,
                       const StepScales& scales) {
    if (l < 1) throw ConfigError("iteration index must be >= 1");
    const double root = std::sqrt(static_cast<double>(l));
    DualState next = dual;
    for (std::size_t n = 0; n < next.beta.size(); ++n)
        next.beta[n] = std::max(0.0, dual.beta[n] - cfg.c_beta / root * scales.beta[n] * grads.beta[n]);
    for (std::size_t k = 0; k < next.lambda.size(); ++k)
        next.lambda[k] = std::max(0.0, dual.lambda[k] - cfg.c_lambda / root * scales.lambda[k] * grads.lambda[k]);
    next.nu = std::max(0.0, dual.nu - cfg.c_nu / root * scales.nu * grads.nu);
    return next;
}

DualState update_duals(const DualState& dual, const Subgradients& grads, int l, const InnerConfig& cfg) {
    return update_duals(dual, grads, l, cfg, StepScales::unit(static_cast<int>(dual.beta.size()),
                                                              static_cast<int>(dual.lambda.size())));
}

namespace {

double max_violation(const AllocationMatrix& a, const PowerMatrix& p, const Subgradients& g,
                     const ProblemInstance& inst) {
    double v = 0.0;
    for (std::size_t n = 0; n < g.beta.size(); ++n)
        if (inst.rate_floor[n] > 0.0) v = std::max(v, -g.beta[n] / inst.rate_floor[n]);
    if (std::isfinite(inst.delta0) && inst.delta0 > 0.0)
        for (int k : inst.partition.omega2()) v = std::max(v, -g.lambda[k] / inst.delta0);
    v = std::max(v, -g.nu / inst.power.p_max);
    (void)a;
    (void)p;
    return v;
}

double movement(const DualState& x, const DualState& y, const StepScales& s) {
    double m = 0.0;
    auto rel = [](double a, double b, double ref) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), ref}); };
    for (std::size_t n = 0; n < x.beta.size(); ++n) m = std::max(m, rel(x.beta[n], y.beta[n], 1.0));
    for (std::size_t k = 0; k < x.lambda.size(); ++k)
        if (s.lambda[k] > 0.0) m = std::max(m, rel(x.lambda[k], y.lambda[k], 1.0 / (s.lambda[k] * 1.0)));
    m = std::max(m, rel(x.nu, y.nu, 1.0 / s.nu));
    return m;
}

}  // namespace

InnerResult solve_inner(double gamma, const ProblemInstance& inst, const InnerConfig& cfg,
                        const std::vector<AllocationMatrix>& hints, const DualState* warm) {
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    InnerResult res;
    res.dual_value = kInf;

    std::set<std::vector<int>> seen;
    PowerPlan best;
    bool have_best = false;
    double best_obj = -kInf;

    auto consider = [&](const AllocationMatrix& a) {
        auto key = owners(a);
        if (!seen.insert(std::move(key)).second) return;
        ++res.candidates;
        auto plan = optimize_powers(a, gamma, inst);
        if (!plan.feasible) return;
        const double obj = plan.objective(gamma);
        if (!have_best || obj > best_obj) {
            best_obj = obj;
            best = std::move(plan);
            have_best = true;
            res.a = a;
        }
    };

    for (const auto& h : hints)
        if (h.ues() == nu_count && h.rbs() == kk) consider(h);

    DualState dual = warm ? *warm : DualState::zeros(nu_count, kk);
    if (static_cast<int>(dual.beta.size()) != nu_count || static_cast<int>(dual.lambda.size()) != kk)
        dual = DualState::zeros(nu_count, kk);
    if (gamma * inst.power.phi_eff + dual.nu <= 0.0) dual.nu = initial_nu(inst);
    const auto scales = StepScales::for_instance(gamma, inst);
    std::vector<double> dual_seen;

    int l = 1;
    for (; l <= cfg.l_max; ++l) {
        const auto a = assign_rbs(dual, gamma, inst);
        const auto p = water_fill_assigned(a, dual, gamma, inst);
        const double d = dual_value(dual, gamma, inst);
        if (std::isfinite(d)) {
            res.dual_value = std::min(res.dual_value, d);
            dual_seen.push_back(d);
        }
        consider(a);
        const auto g = subgradients(a, p, inst);
        if (have_best && res.dual_value - best_obj <= 1e-9 * std::max(best.rate, 1.0)) break;
        auto next = update_duals(dual, g, l, cfg, scales);
        const bool settled = max_violation(a, p, g, inst) < cfg.residual_tol && movement(dual, next, scales) < cfg.movement_tol;
        dual = std::move(next);
        if (settled) break;
    }
    res.iterations = std::min(l, cfg.l_max);
    res.iterate = dual;
    if (!have_best) return res;

    for (double d : dual_seen) res.weak_duality_violation = std::max(res.weak_duality_violation, best_obj - d);
    res.p = best.p;
    res.multipliers = best.dual();
    res.primal_value = best_obj;
    res.rate = best.rate;
    res.power = best.power;
    res.rates = best.rates;
    res.feasible = true;
    return res;
}

void SolveTrace::write_csv(std::ostream& os) const {
    os << "iteration,gamma,C,P,F,inner_iters,feasible\n";
    char buf[256];
    for (const auto& it : iterations) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g,%d,%d\n", it.iteration, it.gamma, it.rate, it.power,
                      it.f_value, it.inner_iterations, it.feasible ? 1 : 0);
        os << buf;
    }
}

namespace {

[[noreturn]] void throw_infeasible(const ProblemInstance& inst) {
    // Describe what the best-effort allocation still violates.
    Grid<double> rate(inst.n_ues(), inst.n_rbs());
    const double share = inst.power.p_max / inst.n_rbs();
    for (int n = 0; n < inst.n_ues(); ++n)
        for (int k = 0; k < inst.n_rbs(); ++k)
            rate(n, k) = inst.eligible(n, k)
                             ? inst.b0() * std::log2(1.0 + inst.channel.sigma(n, k) * std::min(share, inst.power_cap(k)))
                             : 0.0;
    const auto a = qos_greedy_assignment(rate, inst.rate_floor, inst);
    const auto plan = optimize_powers_best_effort(a, 0.0, inst);
    const auto report = check_feasibility(a, plan.p, inst);
    if (auto v = report.first_violation())
        throw InfeasibleError(v->name, "index " + std::to_string(v->index) + ", slack " + std::to_string(v->slack));
    throw InfeasibleError("qos", "no feasible assignment found");
}

}  // namespace

EeSolution solve_ee(const ProblemInstance& inst, const OuterConfig& outer, const InnerConfig& inner,
                    const std::vector<AllocationMatrix>& hints) {
    outer.validate();
    inner.validate();
    inst.validate();
    EeSolution sol;
    double gamma = outer.gamma_init;
    std::vector<AllocationMatrix> base = hints;
    std::vector<AllocationMatrix> pool = base;
    DualState warm;
    bool have_warm = false;

    for (int i = 1; i <= outer.i_max; ++i) {
        auto r = solve_inner(gamma, inst, inner, pool, have_warm ? &warm : nullptr);
        if (!r.feasible && i == 1) {
            // Tight floors: seed with an allocation known to meet them.
            auto cert = attainable_floors(inst, inst.rate_floor);
            if (!cert.relaxed) {
                base.push_back(std::move(cert.a));
                pool = base;
                r = solve_inner(gamma, inst, inner, pool);
            }
        }
        if (!r.feasible) {
            if (i == 1) throw_infeasible(inst);
            break;
        }
        OuterIterate it{i, gamma, r.rate, r.power, r.rate - gamma * r.power, r.iterations, true};
        sol.trace.iterations.push_back(it);
        sol.a = r.a;
        sol.p = r.p;
        sol.gamma = gamma;
        sol.rate = r.rate;
        sol.power = r.power;
        sol.multipliers = r.multipliers;
        sol.dual_value = r.dual_value;
        sol.feasible = true;
        if (outer.converged(r.rate, r.power, gamma)) {
            sol.trace.converged = true;
            break;
        }
        gamma = r.rate / r.power;
        pool = base;
        pool.push_back(r.a);
        warm = r.iterate;
        have_warm = true;
    }
    sol.ee = sol.rate / sol.power;
    return sol;
}

EeSolution solve_ee_fixed_assignment(const AllocationMatrix& a, const ProblemInstance& inst, const OuterConfig& outer) {
    outer.validate();
    EeSolution sol;
    sol.a = a;
    double gamma = outer.gamma_init;
    for (int i = 1; i <= outer.i_max; ++i) {
        auto plan = optimize_powers(a, gamma, inst);
        if (!plan.feasible) plan = optimize_powers_best_effort(a, gamma, inst);
        sol.trace.iterations.push_back({i, gamma, plan.rate, plan.power, plan.rate - gamma * plan.power, 0, plan.feasible});
        sol.p = plan.p;
        sol.gamma = gamma;
        sol.rate = plan.rate;
        sol.power = plan.power;
        sol.multipliers = plan.dual();
        sol.feasible = plan.feasible;
        if (outer.converged(plan.rate, plan.power, gamma)) {
            sol.trace.converged = true;
            break;
        }
        gamma = plan.rate / plan.power;
    }
    sol.ee = sol.rate / sol.power;
    return sol;
}

}  // namespace hcran
