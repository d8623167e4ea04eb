#include "hcran/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcran/error.hpp"
#include "hcran/units.hpp"

namespace hcran {

namespace {

EeSolution finish(const AllocationMatrix& a, const PowerMatrix& p, const ProblemInstance& inst) {
    EeSolution sol;
    sol.a = a;
    sol.p = p;
    sol.rate = rrh_sum_rate(a, p, inst.channel.sigma, inst.b0());
    sol.power = rrh_power(a, p, inst.power);
    sol.ee = sol.rate / sol.power;
    sol.gamma = sol.ee;
    sol.feasible = check_feasibility(a, p, inst).feasible();
    sol.trace.iterations.push_back({1, sol.gamma, sol.rate, sol.power, 0.0, 0, sol.feasible});
    sol.trace.converged = true;
    return sol;
}

Grid<double> rate_at(const ProblemInstance& inst, const std::vector<double>& pk) {
    Grid<double> rate(inst.n_ues(), inst.n_rbs());
    for (int n = 0; n < inst.n_ues(); ++n)
        for (int k = 0; k < inst.n_rbs(); ++k)
            rate(n, k) = inst.eligible(n, k) ? inst.b0() * std::log2(1.0 + inst.channel.sigma(n, k) * pk[k]) : 0.0;
    return rate;
}

std::vector<double> equal_share(const ProblemInstance& inst) {
    std::vector<double> pk(inst.n_rbs());
    for (int k = 0; k < inst.n_rbs(); ++k) pk[k] = std::min(inst.power.p_max / inst.n_rbs(), inst.power_cap(k));
    return pk;
}

}  // namespace

EeSolution solve_fixed_power(const ProblemInstance& inst) {
    inst.validate();
    const double p_fix = inst.power.p_max / inst.n_rbs();
    std::vector<double> pk(inst.n_rbs(), p_fix);
    for (int k = 0; k < inst.n_rbs(); ++k)
        if (p_fix > inst.power_cap(k) * (1.0 + 1e-12)) pk[k] = 0.0;
    const auto a = qos_greedy_assignment(rate_at(inst, pk), inst.rate_floor, inst);
    PowerMatrix p(inst.n_ues(), inst.n_rbs());
    for (int k = 0; k < inst.n_rbs(); ++k) p(a.owner(k), k) = pk[k];
    return finish(a, p, inst);
}

AllocationMatrix round_robin_assignment(const ProblemInstance& inst) {
    const int nu_count = inst.n_ues(), kk = inst.n_rbs();
    AllocationMatrix a(nu_count, kk);
    // One cursor per band; under full eligibility both bands share one.
    int cursor[2] = {-1, -1};
    for (int k = 0; k < kk; ++k) {
        int& c = cursor[inst.eligibility == Eligibility::Full ? 0 : (inst.partition.shared(k) ? 1 : 0)];
        int pick = -1;
        for (int step = 1; step <= nu_count; ++step) {
            const int n = (c + step) % nu_count;
            if (inst.eligible(n, k)) {
                pick = n;
                break;
            }
        }
        if (pick < 0) throw ConfigError("RB " + std::to_string(k) + " has no eligible UE");
        a.assign(pick, k);
        c = pick;
    }
    return a;
}

EeSolution solve_sequential_rb(const ProblemInstance& inst, const OuterConfig& outer) {
    inst.validate();
    return solve_ee_fixed_assignment(round_robin_assignment(inst), inst, outer);
}

EeSolution solve_classical(const ProblemInstance& inst) {
    inst.validate();
    const auto a = qos_greedy_assignment(rate_at(inst, equal_share(inst)), inst.rate_floor, inst);
    auto plan = optimize_powers(a, 0.0, inst);
    if (!plan.feasible) plan = optimize_powers_best_effort(a, 0.0, inst);
    return finish(a, plan.p, inst);
}

std::string_view to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::Optimal: return "optimal";
        case Algorithm::FixedPower: return "fixed-power";
        case Algorithm::SequentialRb: return "sequential-rb";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (auto a : kAllAlgorithms)
        if (to_string(a) == name) return a;
    return std::nullopt;
}

EeSolution solve(Algorithm algo, const ProblemInstance& inst, const OuterConfig& outer, const InnerConfig& inner,
                 const std::vector<AllocationMatrix>& hints) {
    switch (algo) {
        case Algorithm::Optimal: return solve_ee(inst, outer, inner, hints);
        case Algorithm::FixedPower: return solve_fixed_power(inst);
        case Algorithm::SequentialRb: return solve_sequential_rb(inst, outer);
    }
    throw ConfigError("unknown algorithm");
}

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::OneTierHpn: return "1-tier-hpn";
        case ScenarioKind::TwoTierOverlaid: return "2-tier-overlaid";
        case ScenarioKind::TwoTierUnderlaid: return "2-tier-underlaid";
        case ScenarioKind::OneTierCran: return "1-tier-cran";
        case ScenarioKind::TwoTierHcran: return "2-tier-hcran";
    }
    return "?";
}

std::optional<ScenarioKind> parse_scenario(std::string_view name) {
    for (auto k : kAllScenarios)
        if (to_string(k) == name) return k;
    return std::nullopt;
}

std::string_view policy_name(ScenarioKind kind, Algorithm algo) {
    switch (kind) {
        case ScenarioKind::TwoTierHcran: return to_string(algo);
        case ScenarioKind::TwoTierUnderlaid: return "optimal";
        default: return "classical";
    }
}

namespace {

// Macro node serving its HUEs with equal per-RB power on `rbs`; `ion` is the
// interference-over-noise each RB sees from the low-power tier.
NodeTerms macro_terms(const Grid<double>& sigma_hue, const std::vector<int>& rbs, double per_rb_power,
                      const std::vector<double>& ion, double b0, const PowerModel& pm) {
    NodeTerms t;
    for (int k : rbs) {
        double best = 0.0;
        for (int h = 0; h < sigma_hue.rows(); ++h) best = std::max(best, sigma_hue(h, k));
        if (sigma_hue.rows() > 0) t.rate += b0 * std::log2(1.0 + per_rb_power * best / (1.0 + ion[k]));
    }
    const double tx = sigma_hue.rows() > 0 ? per_rb_power * rbs.size() : 0.0;
    t.power = pm.phi_eff * tx + pm.static_power();
    return t;
}

ProblemInstance make_instance(const LinkBudget& b, const SffrPartition& part, UeLayout ues, const PowerModel& pm,
                              std::vector<double> floors, double delta0, Eligibility elig, SnapshotRng& rng) {
    ProblemInstance inst;
    inst.channel = build_cinr(b, part, rng);
    inst.partition = part;
    inst.ues = ues;
    inst.power = pm;
    inst.rate_floor = std::move(floors);
    inst.delta0 = delta0;
    inst.eligibility = elig;
    return inst;
}

std::vector<double> interference_over_noise(const ProblemInstance& inst, const PowerMatrix& p, double l, double noise) {
    std::vector<double> ion(inst.n_rbs(), 0.0);
    for (int k = 0; k < inst.n_rbs(); ++k)
        for (int n = 0; n < inst.n_ues(); ++n) ion[k] += l * p(n, k) * inst.channel.g_r2m[k] / noise;
    return ion;
}

std::vector<int> all_rbs(int k) {
    std::vector<int> v(k);
    for (int i = 0; i < k; ++i) v[i] = i;
    return v;
}

}  // namespace

ScenarioSample run_scenario(ScenarioKind kind, const ScenarioConfig& cfg, SnapshotRng& rng, const OuterConfig& outer,
                            const InnerConfig& inner, Algorithm algo) {
    cfg.validate();
    const auto part = cfg.partition();
    const double b0 = cfg.b0();
    const double noise = b0 * cfg.noise_psd();
    const auto hpn = cfg.hpn();
    const int k1 = static_cast<int>(part.omega1().size());
    const int k2 = static_cast<int>(part.omega2().size());
    const double l = cfg.scenario_l > 0 ? cfg.scenario_l : 1.0;

    ScenarioSample s;
    NodeTerms node, macro;
    bool has_macro = true;

    auto take = [&](const EeSolution& sol, bool dual) {
        node = {sol.rate, sol.power};
        s.feasible = sol.feasible;
        s.outer_iterations = static_cast<int>(sol.trace.iterations.size());
        s.converged = sol.trace.converged;
        for (const auto& it : sol.trace.iterations) s.trace_ee.push_back(it.rate / it.power);
        if (dual) s.gap = (sol.dual_value - (sol.rate - sol.gamma * sol.power)) / sol.rate;
    };

    switch (kind) {
        case ScenarioKind::TwoTierHcran: {
            ProblemInstance inst;
            inst.channel = build_cinr(cfg.geometry(), part, hpn, cfg.noise_psd(), rng);
            inst.partition = part;
            inst.ues = {cfg.n_high, cfg.n_low};
            inst.power = cfg.rrh_power();
            inst.rate_floor = nominal_floors(inst.ues, cfg.qos());
            inst.delta0 = cfg.delta0();
            auto sp = finish_problem(std::move(inst), cfg, hpn);
            const auto sol = solve(algo, sp.inst, outer, inner, {sp.certificate.a});
            take(sol, algo == Algorithm::Optimal);
            s.relaxed = sp.relaxed;
            macro = macro_terms(sp.inst.channel.sigma_hue, part.omega2(), hpn.per_rb_power,
                                interference_over_noise(sp.inst, sol.p, l, noise), b0, hpn.power_model);
            break;
        }
        case ScenarioKind::TwoTierUnderlaid: {
            LinkBudget b;
            b.serving_gain.assign(cfg.n_high, path_gain(LinkType::RrhToRue, cfg.d_high_rrh));
            b.interferer_gain.assign(cfg.n_high, path_gain(LinkType::HpnToRue, cfg.d_high_hpn));
            b.interferer_power_shared = hpn.per_rb_power;
            b.coupling_gain = path_gain(LinkType::RrhToHue, cfg.d_rrh_hue);
            b.hue_gain = path_gain(LinkType::HpnToHue, cfg.d_hpn_hue);
            b.t_hues = cfg.n_low;
            b.noise_w = noise;
            const double delta0 =
                delta0_from_eta_hue(units::db_to_linear(cfg.eta_hue_db), hpn, cfg.d_hpn_hue, 1, cfg.noise_psd(), b0);
            auto inst = make_instance(b, part, {cfg.n_high, 0}, cfg.pbs_power(),
                                      std::vector<double>(cfg.n_high, cfg.eta_r), delta0, Eligibility::Full, rng);
            auto sp = finish_problem(std::move(inst), cfg, hpn);
            const auto sol = solve_ee(sp.inst, outer, inner, {sp.certificate.a});
            take(sol, true);
            s.relaxed = sp.relaxed;
            macro = macro_terms(sp.inst.channel.sigma_hue, part.omega2(), hpn.per_rb_power,
                                interference_over_noise(sp.inst, sol.p, 1.0, noise), b0, hpn.power_model);
            break;
        }
        case ScenarioKind::TwoTierOverlaid: {
            if (k1 == 0) throw ConfigError("overlaid HetNet needs exclusive RBs");
            const auto sub = SffrPartition::split(k1, k1, b0);
            LinkBudget b;
            b.serving_gain.assign(cfg.n_high, path_gain(LinkType::RrhToRue, cfg.d_high_rrh));
            b.interferer_gain.assign(cfg.n_high, 0.0);
            b.hue_gain = path_gain(LinkType::HpnToHue, cfg.d_hpn_hue);
            b.t_hues = cfg.n_low;
            b.noise_w = noise;
            auto inst = make_instance(b, sub, {cfg.n_high, 0}, cfg.pbs_power(),
                                      std::vector<double>(cfg.n_high, cfg.eta_r),
                                      std::numeric_limits<double>::infinity(), Eligibility::Full, rng);
            auto sp = finish_problem(std::move(inst), cfg, hpn);
            take(solve_classical(sp.inst), false);
            s.relaxed = sp.relaxed;
            // The HPN keeps the shared band to itself.
            auto hue = draw_fading(rng, cfg.n_low, k2);
            Grid<double> sigma_hue(cfg.n_low, k2);
            for (int h = 0; h < cfg.n_low; ++h)
                for (int k = 0; k < k2; ++k) sigma_hue(h, k) = b.hue_gain * hue(h, k) / noise;
            macro = macro_terms(sigma_hue, all_rbs(k2), hpn.per_rb_power, std::vector<double>(k2, 0.0), b0,
                                hpn.power_model);
            break;
        }
        case ScenarioKind::OneTierCran: {
            const auto g = cfg.geometry();
            const double cover_power = cfg.rrh_power().p_max / cfg.k_total;
            LinkBudget b;
            for (int n = 0; n < cfg.n_high + cfg.n_low; ++n) {
                b.serving_gain.push_back(path_gain(LinkType::RrhToRue, g.d_rrh_rue[n]));
                b.interferer_gain.push_back(path_gain(LinkType::RrhToRue, g.d_hpn_rue[n]));
            }
            b.interferer_power_shared = cover_power;
            b.interferer_power_exclusive = cover_power;
            b.hue_gain = path_gain(LinkType::RrhToRue, cfg.d_hpn_hue);
            b.t_hues = cfg.t_hues;
            b.noise_w = noise;
            auto inst = make_instance(b, part, {cfg.n_high, cfg.n_low}, cfg.rrh_power(),
                                      nominal_floors({cfg.n_high, cfg.n_low}, cfg.qos()),
                                      std::numeric_limits<double>::infinity(), Eligibility::Full, rng);
            auto sp = finish_problem(std::move(inst), cfg, hpn);
            take(solve_classical(sp.inst), false);
            s.relaxed = sp.relaxed;
            // The second RRH covers the HUE area at full, equally split power.
            macro = macro_terms(sp.inst.channel.sigma_hue, all_rbs(cfg.k_total), cover_power,
                                std::vector<double>(cfg.k_total, 0.0), b0, cfg.rrh_power());
            break;
        }
        case ScenarioKind::OneTierHpn: {
            const auto pm = cfg.hpn_power();
            double rate = 0.0, tx = 0.0;
            bool feasible = true, relaxed = false;
            if (k1 > 0) {
                // Center zone: rate-maximizing water-filling with the exclusive band's power share.
                LinkBudget b;
                b.serving_gain.assign(cfg.n_high, path_gain(LinkType::HpnToRue, cfg.d_high_rrh));
                b.interferer_gain.assign(cfg.n_high, 0.0);
                b.noise_w = noise;
                auto center_pm = pm;
                center_pm.p_max = pm.p_max * k1 / cfg.k_total;
                auto inst = make_instance(b, SffrPartition::split(k1, k1, b0), {cfg.n_high, 0}, center_pm,
                                          std::vector<double>(cfg.n_high, cfg.eta_r),
                                          std::numeric_limits<double>::infinity(), Eligibility::Full, rng);
                auto sp = finish_problem(std::move(inst), cfg, hpn);
                const auto sol = solve_classical(sp.inst);
                rate += sol.rate;
                tx += (sol.power - center_pm.static_power()) / pm.phi_eff;
                feasible = feasible && sol.feasible;
                relaxed = relaxed || sp.relaxed;
            }
            if (k2 > 0 && cfg.n_low > 0) {
                // Edge zone: just enough power for the floors, against the neighbouring HPN.
                LinkBudget b;
                b.serving_gain.assign(cfg.n_low, path_gain(LinkType::HpnToRue, cfg.d_low_hpn));
                b.interferer_gain.assign(cfg.n_low, path_gain(LinkType::HpnToRue, cfg.d_high_hpn));
                b.interferer_power_exclusive = pm.p_max / cfg.k_total;
                b.noise_w = noise;
                auto edge_pm = pm;
                edge_pm.p_max = pm.p_max * k2 / cfg.k_total;
                auto inst = make_instance(b, SffrPartition::split(k2, k2, b0), {cfg.n_low, 0}, edge_pm,
                                          std::vector<double>(cfg.n_low, cfg.eta_er),
                                          std::numeric_limits<double>::infinity(), Eligibility::Full, rng);
                auto sp = finish_problem(std::move(inst), cfg, hpn);
                const auto a = qos_greedy_assignment(
                    [&] {
                        Grid<double> r(cfg.n_low, k2);
                        for (int n = 0; n < cfg.n_low; ++n)
                            for (int k = 0; k < k2; ++k)
                                r(n, k) = b0 * std::log2(1.0 + sp.inst.channel.sigma(n, k) * edge_pm.p_max / k2);
                        return r;
                    }(),
                    sp.inst.rate_floor, sp.inst);
                // A very large price leaves only the floor-driven water levels.
                auto plan = optimize_powers(a, 1e30, sp.inst);
                if (!plan.feasible) plan = optimize_powers_best_effort(a, 1e30, sp.inst);
                rate += plan.rate;
                tx += (plan.power - edge_pm.static_power()) / pm.phi_eff;
                feasible = feasible && plan.feasible;
                relaxed = relaxed || sp.relaxed;
            }
            node = {rate, pm.phi_eff * tx + pm.static_power()};
            s.feasible = feasible;
            s.relaxed = relaxed;
            s.outer_iterations = 1;
            s.trace_ee.push_back(node.rate / node.power);
            has_macro = false;
            break;
        }
    }

    s.rate = node.rate;
    s.power = node.power;
    s.node_ee = node.rate / node.power;
    s.system_ee = has_macro && cfg.scenario_l > 0 ? system_ee(cfg.scenario_l, node, macro) : s.node_ee;
    s.ee = cfg.scenario_l > 0 ? s.system_ee : s.node_ee;
    return s;
}

}  // namespace hcran
