#include <cmath>

#include "doctest.h"
#include "hcran/baselines.hpp"
#include "hcran/error.hpp"
#include "hcran/oracle.hpp"
#include "support.hpp"

using namespace hcran;
using hcran::test::grid;
using hcran::test::make_instance;

namespace {

double audit_ee(const EeSolution& s, const ProblemInstance& inst) {
    double c = 0.0, tx = 0.0;
    for (int n = 0; n < inst.n_ues(); ++n)
        for (int k = 0; k < inst.n_rbs(); ++k)
            if (s.a(n, k)) {
                c += inst.b0() * std::log2(1.0 + inst.channel.sigma(n, k) * s.p(n, k));
                tx += s.p(n, k);
            }
    return c / (inst.power.phi_eff * tx + inst.power.p_circuit + inst.power.p_bh);
}

double mean_ee(ScenarioKind kind, const ScenarioConfig& cfg, int snaps) {
    double sum = 0.0;
    int used = 0;
    for (int i = 0; i < snaps; ++i) {
        SnapshotRng rng(1, i);
        try {
            sum += run_scenario(kind, cfg, rng).ee;
            ++used;
        } catch (const InfeasibleError&) {
        }
    }
    REQUIRE(used > snaps / 2);
    return sum / used;
}

}  // namespace

TEST_CASE("fixed power") {
    SUBCASE("equal power on every RB") {
        const PowerModel pm{2.0, 0.1, 0.2, 0.08};
        auto inst = make_instance(Grid<double>(2, 4, 1e4), 1, 2, 200e3, pm);
        const auto s = solve_fixed_power(inst);
        for (int k = 0; k < 4; ++k) CHECK(s.p(s.a.owner(k), k) == doctest::Approx(0.02));
        CHECK(s.ee == doctest::Approx(audit_ee(s, inst)).epsilon(1e-12));
    }
    SUBCASE("RBs whose cap is below the fixed power are muted") {
        const PowerModel pm{2.0, 0.1, 0.2, 0.08};
        auto inst = make_instance(Grid<double>(2, 2, 1e4), 1, 1, 200e3, pm, {}, {1.0, 1.0}, 0.01);
        const auto s = solve_fixed_power(inst);
        CHECK(s.p(s.a.owner(0), 0) == doctest::Approx(0.04));
        CHECK(s.p(s.a.owner(1), 1) == 0.0);
        CHECK(check_feasibility(s.a, s.p, inst).feasible());
    }
    SUBCASE("single RB: strictly worse unless p* is the full budget") {
        const PowerModel pm{2.0, 0.1, 0.2, 1.0};
        auto inst = make_instance(grid(1, 1, {1e4}), 1, 1, 200e3, pm);
        CHECK(solve_fixed_power(inst).ee < solve_ee(inst).ee);
        inst.power.p_max = 1e-6;
        CHECK(solve_fixed_power(inst).ee == doctest::Approx(solve_ee(inst).ee).epsilon(1e-6));
    }
}

TEST_CASE("sequential RB") {
    const PowerModel pm{2.0, 0.1, 0.2, 0.1};
    auto inst = make_instance(Grid<double>(3, 6, 1e4), 2, 3, 200e3, pm);
    const auto a = round_robin_assignment(inst);
    CHECK(a.owner(0) == 0);
    CHECK(a.owner(1) == 1);
    CHECK(a.owner(2) == 0);
    for (int k = 3; k < 6; ++k) CHECK(a.owner(k) == 2);

    auto one = make_instance(grid(1, 3, {2e4, 5e3, 9e4}), 1, 3, 200e3, pm);
    CHECK(solve_sequential_rb(one).ee == doctest::Approx(solve_ee(one).ee).epsilon(1e-3));
}

TEST_CASE("baselines never beat the optimum") {
    for (std::uint64_t i = 0; i < 30; ++i) {
        const auto tiny = oracle::make_tiny_instance(17, i);
        const auto best = oracle::brute_force_ee(tiny);
        for (auto algo : {Algorithm::FixedPower, Algorithm::SequentialRb}) {
            const auto s = solve(algo, tiny.inst);
            CHECK(s.ee == doctest::Approx(audit_ee(s, tiny.inst)).epsilon(1e-9));
            CHECK(s.feasible == check_feasibility(s.a, s.p, tiny.inst).feasible());
            if (s.feasible) CHECK(s.ee <= best.gamma * (1.0 + 1e-9));
        }
    }
    ScenarioConfig cfg;
    for (std::uint64_t snap = 0; snap < 6; ++snap) {
        const auto sp = make_snapshot_problem(cfg, 2, snap);
        EeSolution opt;
        try {
            opt = solve_ee(sp.inst, {}, {}, {sp.certificate.a});
        } catch (const InfeasibleError&) {
            continue;
        }
        const auto fixed = solve_fixed_power(sp.inst);
        if (fixed.feasible) CHECK(fixed.ee <= opt.ee * (1.0 + 1e-6));
    }
}

TEST_CASE("names") {
    for (auto a : kAllAlgorithms) CHECK(parse_algorithm(to_string(a)) == a);
    for (auto k : kAllScenarios) CHECK(parse_scenario(to_string(k)) == k);
    CHECK_FALSE(parse_algorithm("greedy"));
    CHECK(policy_name(ScenarioKind::TwoTierHcran, Algorithm::FixedPower) == "fixed-power");
    CHECK(policy_name(ScenarioKind::OneTierHpn, Algorithm::FixedPower) == "classical");
}

TEST_CASE("scenario models") {
    ScenarioConfig cfg;
    cfg.n_low = 3;

    SUBCASE("same snapshot, same answer") {
        for (auto kind : kAllScenarios) {
            SnapshotRng a(4, 2), b(4, 2);
            CHECK(run_scenario(kind, cfg, a).ee == run_scenario(kind, cfg, b).ee);
        }
    }

    SUBCASE("underlaid HetNet beats overlaid HetNet") {
        CHECK(mean_ee(ScenarioKind::TwoTierUnderlaid, cfg, 20) > mean_ee(ScenarioKind::TwoTierOverlaid, cfg, 20));
    }

    SUBCASE("1-tier HPN loses EE as UEs are added") {
        auto few = cfg, many = cfg;
        few.n_low = 1;
        many.n_low = 10;
        CHECK(mean_ee(ScenarioKind::OneTierHpn, few, 20) > mean_ee(ScenarioKind::OneTierHpn, many, 20));
    }

    SUBCASE("system EE with L nodes approaches the dense limit") {
        auto sys = cfg;
        sys.scenario_l = 1000000;
        SnapshotRng a(1, 0), b(1, 0);
        const auto dense = run_scenario(ScenarioKind::TwoTierHcran, cfg, a);
        const auto wide = run_scenario(ScenarioKind::TwoTierHcran, sys, b);
        CHECK(std::abs(wide.ee - dense.ee) / dense.ee < 1e-3);
    }

    SUBCASE("H-CRAN samples carry a duality gap and a trace") {
        SnapshotRng rng(1, 0);
        const auto s = run_scenario(ScenarioKind::TwoTierHcran, cfg, rng);
        CHECK(s.feasible);
        CHECK(std::isfinite(s.gap));
        CHECK(s.trace_ee.size() == static_cast<std::size_t>(s.outer_iterations));
        SnapshotRng r2(1, 0);
        CHECK(std::isnan(run_scenario(ScenarioKind::OneTierCran, cfg, r2).gap));
    }
}
