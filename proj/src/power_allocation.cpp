#include "hcran/power_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hcran {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kBisectIters = 200;

struct Rb {
    int k;
    double sigma;
    double inv_sigma;
    double cap;
};

struct UeRbs {
    std::vector<Rb> rbs;
    double w_req = 0.0;  // level needed to meet the floor
};

double rb_power(const Rb& rb, double w) {
    if (std::isinf(w)) return rb.cap;
    return std::clamp(w - rb.inv_sigma, 0.0, rb.cap);
}

double ue_power(const UeRbs& ue, double w) {
    double s = 0.0;
    for (const auto& rb : ue.rbs) s += rb_power(rb, w);
    return s;
}

double ue_rate(const UeRbs& ue, double w, double b0) {
    double s = 0.0;
    for (const auto& rb : ue.rbs) s += b0 * std::log2(1.0 + rb.sigma * rb_power(rb, w));
    return s;
}

// Bisection on a monotone predicate over (lo, hi]; returns the smallest
// hi-side point found.
template <class F>
double bisect_up(double lo, double hi, F&& ok) {
    for (int i = 0; i < kBisectIters && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

PowerPlan optimize_powers(const AllocationMatrix& a, double gamma, const ProblemInstance& inst,
                          const std::vector<double>& floors) {
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    const double b0 = inst.b0();
    const double p_max = inst.power.p_max;
    const auto& sigma = inst.channel.sigma;

    PowerPlan plan;
    plan.p = PowerMatrix(nu_count, kk);
    plan.beta.assign(nu_count, 0.0);
    plan.lambda.assign(kk, 0.0);
    plan.rates.assign(nu_count, 0.0);

    std::vector<UeRbs> ues(nu_count);
    for (int k = 0; k < kk; ++k) {
        const int n = a.owner(k);
        if (n < 0) continue;
        const double s = sigma(n, k);
        if (!(s > 0.0)) continue;
        ues[n].rbs.push_back({k, s, 1.0 / s, inst.power_cap(k)});
    }

    bool feasible = true;
    double max_inv_sigma = 0.0;
    for (const auto& ue : ues)
        for (const auto& rb : ue.rbs) max_inv_sigma = std::max(max_inv_sigma, rb.inv_sigma);
    for (int n = 0; n < nu_count; ++n) {
        auto& ue = ues[n];
        const double floor = floors[n];
        if (floor <= 0.0) continue;
        const double r_max = ue_rate(ue, kInf, b0);
        if (ue.rbs.empty() || r_max < floor) {
            feasible = false;
            ue.w_req = kInf;
            continue;
        }
        double hi = 0.0;
        bool all_capped = true;
        for (const auto& rb : ue.rbs) {
            if (std::isinf(rb.cap)) all_capped = false;
            else hi = std::max(hi, rb.cap + rb.inv_sigma);
        }
        if (!all_capped) {
            hi = std::max(hi, 2.0 * max_inv_sigma + 1e-12);
            while (ue_rate(ue, hi, b0) < floor) hi *= 2.0;
        }
        ue.w_req = bisect_up(0.0, hi, [&](double w) { return ue_rate(ue, w, b0) >= floor; });
    }

    auto level = [&](const UeRbs& ue, double u) { return std::max(u, ue.w_req); };
    auto total = [&](double u) {
        double s = 0.0;
        for (const auto& ue : ues) s += ue_power(ue, level(ue, u));
        return s;
    };

    if (feasible && total(0.0) > p_max * (1.0 + 1e-12)) feasible = false;

    const double price0 = gamma * inst.power.phi_eff;
    const double u0 = price0 > 0.0 ? b0 / (std::numbers::ln2 * price0) : kInf;
    double u = u0;
    if (feasible && !(total(u0) <= p_max)) {
        double hi = p_max + max_inv_sigma;
        if (std::isfinite(u0)) hi = std::min(hi, u0);
        double lo = 0.0;
        for (int i = 0; i < kBisectIters && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (total(mid) <= p_max)
                lo = mid;
            else
                hi = mid;
        }
        u = lo;
    }
    if (!feasible) return plan;

    plan.nu = std::isfinite(u) && u < u0 ? b0 / (std::numbers::ln2 * u) - price0 : 0.0;
    plan.nu = std::max(plan.nu, 0.0);
    const double price = price0 + plan.nu;
    double tx = 0.0;
    for (int n = 0; n < nu_count; ++n) {
        const auto& ue = ues[n];
        const double w = level(ue, u);
        if (std::isfinite(w) && std::isfinite(u) && ue.w_req > u) plan.beta[n] = w / u - 1.0;
        for (const auto& rb : ue.rbs) {
            const double pk = rb_power(rb, w);
            plan.p(n, rb.k) = pk;
            tx += pk;
            plan.rates[n] += b0 * std::log2(1.0 + rb.sigma * pk);
            if (std::isfinite(rb.cap) && pk >= rb.cap) {
                const double g = inst.channel.g_r2m[rb.k];
                const double marginal = (1.0 + plan.beta[n]) * b0 * rb.sigma / (std::numbers::ln2 * (1.0 + rb.sigma * pk));
                if (g > 0.0) plan.lambda[rb.k] = std::max(0.0, (marginal - price) / g);
            }
        }
        plan.rate += plan.rates[n];
    }
    plan.power = inst.power.phi_eff * tx + inst.power.static_power();
    plan.feasible = true;
    return plan;
}

PowerPlan optimize_powers(const AllocationMatrix& a, double gamma, const ProblemInstance& inst) {
    return optimize_powers(a, gamma, inst, inst.rate_floor);
}

PowerPlan optimize_powers_best_effort(const AllocationMatrix& a, double gamma, const ProblemInstance& inst) {
    auto plan = optimize_powers(a, gamma, inst, inst.rate_floor);
    if (plan.feasible) return plan;
    auto scaled = [&](double theta) {
        std::vector<double> f(inst.rate_floor);
        for (auto& v : f) v *= theta;
        return optimize_powers(a, gamma, inst, f);
    };
    double lo = 0.0, hi = 1.0;
    PowerPlan best = scaled(0.0);
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        auto trial = scaled(mid);
        if (trial.feasible) {
            lo = mid;
            best = std::move(trial);
        } else {
            hi = mid;
        }
    }
    best.feasible = false;
    best.floor_scale = lo;
    return best;
}

AllocationMatrix qos_greedy_assignment(const Grid<double>& rate, const std::vector<double>& floors,
                                       const ProblemInstance& inst) {
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    AllocationMatrix a(nu_count, kk);
    std::vector<char> taken(kk, 0);
    std::vector<char> stuck(nu_count, 0);
    std::vector<double> r(nu_count, 0.0);

    for (;;) {
        int who = -1;
        double worst = 0.0;
        for (int n = 0; n < nu_count; ++n) {
            if (stuck[n] || !(floors[n] > 0.0) || r[n] >= floors[n]) continue;
            const double deficit = (floors[n] - r[n]) / floors[n];
            if (who < 0 || deficit > worst) {
                who = n;
                worst = deficit;
            }
        }
        if (who < 0) break;
        int best_k = -1;
        for (int k = 0; k < kk; ++k) {
            if (taken[k] || !inst.eligible(who, k) || !(rate(who, k) > 0.0)) continue;
            if (best_k < 0 || rate(who, k) > rate(who, best_k)) best_k = k;
        }
        if (best_k < 0) {
            stuck[who] = 1;
            continue;
        }
        taken[best_k] = 1;
        a.assign(who, best_k);
        r[who] += rate(who, best_k);
    }

    for (int k = 0; k < kk; ++k) {
        if (taken[k]) continue;
        int best_n = -1;
        for (int n = 0; n < nu_count; ++n) {
            if (!inst.eligible(n, k)) continue;
            if (best_n < 0 || rate(n, k) > rate(best_n, k)) best_n = n;
        }
        if (best_n >= 0) a.assign(best_n, k);
    }
    return a;
}

FloorCertificate attainable_floors(const ProblemInstance& inst, const std::vector<double>& nominal) {
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    const double share = inst.power.p_max / kk;
    std::vector<double> pk(kk);
    for (int k = 0; k < kk; ++k) pk[k] = std::min(share, inst.power_cap(k));

    Grid<double> rate(nu_count, kk);
    for (int n = 0; n < nu_count; ++n)
        for (int k = 0; k < kk; ++k)
            rate(n, k) = inst.eligible(n, k) ? inst.b0() * std::log2(1.0 + inst.channel.sigma(n, k) * pk[k]) : 0.0;

    FloorCertificate cert;
    cert.a = qos_greedy_assignment(rate, nominal, inst);
    cert.p = PowerMatrix(nu_count, kk);
    std::vector<double> got(nu_count, 0.0);
    for (int k = 0; k < kk; ++k) {
        const int n = cert.a.owner(k);
        cert.p(n, k) = pk[k];
        got[n] += rate(n, k);
    }
    cert.floors.resize(nu_count);
    for (int n = 0; n < nu_count; ++n) {
        if (got[n] >= nominal[n]) {
            cert.floors[n] = nominal[n];
        } else {
            // Small margin so the certificate stays strictly inside the budget.
            cert.floors[n] = got[n] * (1.0 - 1e-6);
            cert.relaxed = true;
        }
    }
    return cert;
}

}  // namespace hcran
