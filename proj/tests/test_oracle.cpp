#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hcran/error.hpp"
#include "hcran/oracle.hpp"
#include "hcran/scenario.hpp"
#include "support.hpp"

using namespace hcran;
using hcran::test::grid;
using hcran::test::make_instance;

TEST_CASE("single link against a closed scan") {
    const PowerModel pm{1.5, 0.1, 0.2, 0.05};
    auto inst = make_instance(grid(1, 1, {2e4}), 1, 1, 200e3, pm);
    const auto r = oracle::brute_force_ee(inst);
    REQUIRE(r.feasible);
    CHECK(r.assignments == 1);
    double best = 0.0;
    for (int i = 1; i <= 1'000'000; ++i) {
        const double p = 0.05 * i / 1e6;
        best = std::max(best, 200e3 * std::log2(1.0 + 2e4 * p) / (1.5 * p + 0.3));
    }
    CHECK(r.gamma == doctest::Approx(best).epsilon(1e-7));
}

TEST_CASE("relabelling UEs leaves the optimum unchanged") {
    const PowerModel pm{2.0, 0.1, 0.2, 0.1};
    const auto s = grid(2, 3, {3e4, 1e4, 8e4, 5e4, 6e4, 2e3});
    const auto swapped = grid(2, 3, {5e4, 6e4, 2e3, 3e4, 1e4, 8e4});
    const auto a = oracle::brute_force_ee(make_instance(s, 2, 3, 200e3, pm, {1e5, 2e5}));
    const auto b = oracle::brute_force_ee(make_instance(swapped, 2, 3, 200e3, pm, {2e5, 1e5}));
    REQUIRE(a.feasible);
    CHECK(a.gamma == doctest::Approx(b.gamma).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) CHECK(a.a.owner(k) == 1 - b.a.owner(k));
}

TEST_CASE("enumeration guard") {
    const PowerModel pm{2.0, 0.1, 0.2, 0.1};
    auto small = make_instance(Grid<double>(3, 4, 1e4), 3, 4, 200e3, pm);
    CHECK(oracle::enumeration_size(small) == 81);
    auto split = make_instance(Grid<double>(3, 4, 1e4), 2, 2, 200e3, pm);
    CHECK(oracle::enumeration_size(split) == 4);
    auto big = make_instance(Grid<double>(10, 8, 1e4), 10, 8, 200e3, pm);
    CHECK(oracle::enumeration_size(big) > oracle::kEnumerationGuard);
    CHECK_THROWS_AS(oracle::brute_force_ee(big), ConfigError);
}

TEST_CASE("tiny instances") {
    for (std::uint64_t i = 0; i < 40; ++i) {
        const auto tiny = oracle::make_tiny_instance(3, i);
        const auto& inst = tiny.inst;
        CHECK(inst.n_rbs() <= 6);
        CHECK(inst.n_ues() <= 3);
        CHECK(oracle::enumeration_size(inst) <= oracle::kEnumerationGuard);

        const auto best = oracle::brute_force_ee(tiny);
        REQUIRE(best.feasible);
        CHECK(check_feasibility(best.a, best.p, inst).feasible());
        CHECK(best.grid_excess < 1e-9);

        // Same answer with parallel enumeration and a finer grid.
        const auto par = oracle::brute_force_ee(inst, 4000, 3);
        CHECK(par.a == best.a);
        CHECK(std::abs(par.gamma - best.gamma) / best.gamma < 0.005);

        const auto sol = solve_ee(inst);
        CHECK(sol.ee <= best.gamma * (1.0 + 1e-9));
        CHECK(sol.ee >= best.gamma * 0.98);
    }
    CHECK(oracle::make_tiny_instance(3, 7).inst.channel.sigma == oracle::make_tiny_instance(3, 7).inst.channel.sigma);
}

TEST_CASE("independent power solver agrees with the optimizer's") {
    for (std::uint64_t i = 0; i < 40; ++i) {
        const auto tiny = oracle::make_tiny_instance(11, i);
        const auto best = oracle::brute_force_ee(tiny);
        for (double frac : {0.0, 0.5, 1.0}) {
            const double gamma = frac * best.gamma;
            const auto mine = optimize_powers(best.a, gamma, tiny.inst);
            const auto ref = oracle::oracle_powers(best.a, gamma, tiny.inst);
            REQUIRE(ref.feasible == mine.feasible);
            if (!ref.feasible) continue;
            const double scale = std::max(ref.rate, 1.0);
            CHECK((mine.rate - gamma * mine.power) == doctest::Approx(ref.rate - gamma * ref.power).epsilon(1e-6 * scale));
        }
    }
}

TEST_CASE("KKT check") {
    ScenarioConfig cfg;
    int checked = 0;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const auto sp = make_snapshot_problem(cfg, 4, s);
        EeSolution sol;
        try {
            sol = solve_ee(sp.inst, {}, {}, {sp.certificate.a});
        } catch (const InfeasibleError&) {
            continue;
        }
        ++checked;
        const auto k = oracle::kkt_check(sol.a, sol.p, sol.multipliers, sol.gamma, sp.inst);
        CHECK(k.interior_points > 0);
        CHECK(k.max_residual < 1e-6);
        CHECK(k.max_boundary_violation <= 1e-6);

        auto bumped = sol.p;
        for (int n = 0; n < bumped.ues(); ++n)
            for (int r = 0; r < bumped.rbs(); ++r) bumped(n, r) *= 1.1;
        const auto off = oracle::kkt_check(sol.a, bumped, sol.multipliers, sol.gamma, sp.inst);
        CHECK(off.max_residual > 1e-3);
    }
    CHECK(checked >= 3);

    // A zero-power RB whose slope points inward is a boundary violation.
    const PowerModel pm{2.0, 0.1, 0.2, 1.0};
    auto inst = make_instance(grid(1, 1, {100.0}), 1, 1, 1.0, pm);
    AllocationMatrix a(1, 1);
    a.assign(0, 0);
    PowerMatrix zero(1, 1);
    const auto b = oracle::kkt_check(a, zero, {{0.0}, {0.0}, 1.0}, 0.0, inst);
    CHECK(b.boundary_points == 1);
    CHECK(b.max_boundary_violation > 1.0);
    const auto ok = oracle::kkt_check(a, zero, {{0.0}, {0.0}, 1000.0}, 0.0, inst);
    CHECK(ok.max_boundary_violation == 0.0);
}

TEST_CASE("duality gap at full size") {
    ScenarioConfig cfg;
    std::vector<double> gaps;
    for (std::uint64_t s = 0; s < 15; ++s) {
        const auto sp = make_snapshot_problem(cfg, 1, s);
        try {
            const auto g = oracle::duality_gap(solve_ee(sp.inst, {}, {}, {sp.certificate.a}));
            CHECK(g.relative_gap >= -1e-9);
            gaps.push_back(g.relative_gap);
        } catch (const InfeasibleError&) {
        }
    }
    REQUIRE(gaps.size() >= 9);
    std::sort(gaps.begin(), gaps.end());
    CHECK(gaps[gaps.size() / 2] < 0.02);
}
