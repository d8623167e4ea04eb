#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "hcran/channel.hpp"
#include "hcran/error.hpp"
#include "hcran/optimizer.hpp"
#include "hcran/oracle.hpp"
#include "hcran/scenario.hpp"
#include "support.hpp"

using namespace hcran;
using hcran::test::grid;
using hcran::test::make_instance;

namespace {

const double kLn2 = std::numbers::ln2;

// Independent evaluation of C - gamma P.
double objective(const AllocationMatrix& a, const PowerMatrix& p, double gamma, const ProblemInstance& inst) {
    double c = 0.0, tx = 0.0;
    for (int n = 0; n < a.ues(); ++n)
        for (int k = 0; k < a.rbs(); ++k)
            if (a(n, k)) {
                c += inst.b0() * std::log2(1.0 + inst.channel.sigma(n, k) * p(n, k));
                tx += p(n, k);
            }
    return c - gamma * (inst.power.phi_eff * tx + inst.power.p_circuit + inst.power.p_bh);
}

void check_partition_respected(const AllocationMatrix& a, const ProblemInstance& inst) {
    for (int k = 0; k < a.rbs(); ++k) {
        int owners = 0;
        for (int n = 0; n < a.ues(); ++n) {
            if (!a(n, k)) continue;
            ++owners;
            CHECK(inst.eligible(n, k));
        }
        CHECK(owners == 1);
    }
}

}  // namespace

TEST_CASE("water filling") {
    PowerModel pm{2.0, 0.1, 0.2, 100.0};
    auto inst = make_instance(grid(1, 1, {10.0}), 1, 1, 1.0, pm);
    DualState dual{{0.0}, {0.0}, 0.5};
    const auto w = water_fill_power(0, 0, dual, 0.0, inst);
    CHECK(w.level == doctest::Approx(2.8854).epsilon(1e-4));
    CHECK(w.power == doctest::Approx(2.7854).epsilon(1e-4));
    CHECK_FALSE(w.unbounded);

    // p* maximizes log2(1 + 10 p) - 0.5 p on a fine grid.
    double best_p = 0.0, best_v = -1e300;
    for (int i = 0; i <= 1'000'000; ++i) {
        const double p = 10.0 * i / 1e6;
        const double v = std::log2(1.0 + 10.0 * p) - 0.5 * p;
        if (v > best_v) best_v = v, best_p = p;
    }
    CHECK(w.power == doctest::Approx(best_p).epsilon(1e-4));

    dual.beta[0] = 1.0;
    CHECK(water_fill_power(0, 0, dual, 0.0, inst).level == doctest::Approx(2.0 * w.level).epsilon(1e-14));

    inst.channel.sigma(0, 0) = 0.1;
    dual.beta[0] = 0.0;
    dual.nu = 5.0;
    CHECK(water_fill_power(0, 0, dual, 0.0, inst).power == 0.0);

    dual.nu = 0.0;
    const auto open = water_fill_power(0, 0, dual, 0.0, inst);
    CHECK(open.unbounded);
    CHECK(open.power == pm.p_max);

    inst.channel.sigma(0, 0) = 0.0;
    dual.nu = 0.5;
    CHECK(water_fill_power(0, 0, dual, 0.0, inst).power == 0.0);
}

TEST_CASE("RB metric") {
    CHECK(rb_metric_value(1.0, 0.0) == 0.0);
    CHECK(rb_metric_value(0.5, 0.0) == 0.0);
    CHECK(rb_metric_value(2.0, 0.0) == doctest::Approx(1.0 - 1.0 / (2.0 * kLn2)).epsilon(1e-14));
    CHECK(rb_metric_value(2.0, 0.0) == doctest::Approx(0.2787).epsilon(1e-3));

    // Same value from the per-RB term at p*: B0 log2(1 + sigma p*) - price p* with B0 = 1.
    const double omega = 2.0, sigma = 1.0, price = 1.0 / (kLn2 * omega);
    const double p = omega - 1.0 / sigma;
    CHECK(std::log2(1.0 + sigma * p) - price * p == doctest::Approx(rb_metric_value(omega * sigma, 0.0)).epsilon(1e-14));

    double prev = 0.0;
    for (double s = 0.6; s < 50.0; s *= 1.3) {
        const double h = rb_metric_value(2.0 * s, 0.0);
        if (2.0 * s > 1.0) CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("RB assignment") {
    PowerModel pm{2.0, 0.1, 0.2, 1.0};
    SUBCASE("ties go to the lowest index") {
        auto inst = make_instance(Grid<double>(3, 4, 5.0), 3, 4, 1.0, pm);
        const auto a = assign_rbs({{0, 0, 0}, {0, 0, 0, 0}, 1.0}, 0.0, inst);
        for (int k = 0; k < 4; ++k) CHECK(a.owner(k) == 0);
    }
    SUBCASE("a dominant UE takes every exclusive RB") {
        auto s = Grid<double>(3, 4, 1.0);
        for (int k = 0; k < 4; ++k) s(2, k) = 50.0;
        auto inst = make_instance(s, 3, 4, 1.0, pm);
        const auto a = assign_rbs({{0, 0, 0}, {0, 0, 0, 0}, 1.0}, 0.0, inst);
        for (int k = 0; k < 4; ++k) CHECK(a.owner(k) == 2);
    }
    SUBCASE("random duals respect exclusivity and eligibility") {
        ScenarioConfig cfg;
        const auto sp = make_snapshot_problem(cfg, 3, 0);
        SnapshotRng rng(8, 0);
        for (int trial = 0; trial < 50; ++trial) {
            auto dual = DualState::zeros(sp.inst.n_ues(), sp.inst.n_rbs());
            for (auto& b : dual.beta) b = 3.0 * rng.uniform();
            for (int k : sp.inst.partition.omega2()) dual.lambda[k] = 1e12 * rng.uniform();
            dual.nu = 1e6 * rng.uniform();
            check_partition_respected(assign_rbs(dual, 1e7 * rng.uniform(), sp.inst), sp.inst);
        }
    }
}

TEST_CASE("subgradients and dual updates") {
    PowerModel pm{2.0, 0.1, 0.2, 1.0};
    auto inst = make_instance(Grid<double>(2, 2, 3.0), 1, 1, 200e3, pm, {128e3, 64e3}, {0.0, 1e-11}, 1e-13);
    AllocationMatrix a(2, 2);
    a.assign(0, 0);
    a.assign(1, 1);
    PowerMatrix p(2, 2);
    auto g = subgradients(a, p, inst);
    CHECK(g.beta[0] == -128e3);
    CHECK(g.beta[1] == -64e3);
    CHECK(g.lambda[0] == 0.0);
    CHECK(g.lambda[1] == doctest::Approx(1e-13));
    CHECK(g.nu == 1.0);

    p(0, 0) = 0.6;
    p(1, 1) = 0.4;
    g = subgradients(a, p, inst);
    CHECK(g.nu == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g.lambda[0] == 0.0);
    CHECK(g.lambda[1] == doctest::Approx(1e-13 - 0.4e-11));

    const DualState d{{0.5, 0.25}, {0.0, 2.0}, 1.5};
    InnerConfig cfg;
    const auto same = update_duals(d, {{0, 0}, {0, 0}, 0.0}, 1, cfg);
    CHECK(same.beta == d.beta);
    CHECK(same.lambda == d.lambda);
    CHECK(same.nu == d.nu);
    const auto proj = update_duals(d, {{1e9, -1.0}, {0, 1e9}, 1e9}, 4, cfg);
    CHECK(proj.beta[0] == 0.0);
    CHECK(proj.beta[1] == doctest::Approx(0.25 + cfg.c_beta / 2.0));
    CHECK(proj.lambda[1] == 0.0);
    CHECK(proj.nu == 0.0);
    CHECK_THROWS_AS(update_duals(d, g, 0, cfg), ConfigError);
}

TEST_CASE("single UE single RB against a dense scan") {
    const PowerModel pm{1.0, 0.5, 0.5, 1.0};
    auto inst = make_instance(grid(1, 1, {1.0}), 1, 1, 1.0, pm);
    const auto sol = solve_ee(inst);
    double best = 0.0;
    for (int i = 1; i <= 1'000'000; ++i) {
        const double p = i / 1e6;
        best = std::max(best, std::log2(1.0 + p) / (p + 1.0));
    }
    CHECK(sol.ee == doctest::Approx(best).epsilon(1e-6));
    CHECK(sol.trace.converged);
    CHECK(oracle::scan_ee_single(1.0, 1.0, pm, INFINITY, 200000) == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("inner solver") {
    SUBCASE("large gamma drives powers towards zero") {
        ScenarioConfig cfg;
        cfg.eta_r = 0.0;
        cfg.eta_er = 0.0;
        const auto sp = make_snapshot_problem(cfg, 1, 0);
        const auto r = solve_inner(1e12, sp.inst, {});
        REQUIRE(r.feasible);
        double tx = 0.0;
        for (double x : r.p.grid().data()) tx += x;
        CHECK(tx < 1e-6);
        CHECK(r.primal_value < 0.0);
    }

    SUBCASE("weak duality on tiny instances") {
        for (std::uint64_t i = 0; i < 30; ++i) {
            const auto tiny = oracle::make_tiny_instance(5, i);
            const auto best = oracle::brute_force_ee(tiny);
            REQUIRE(best.feasible);
            for (double frac : {0.0, 0.5, 0.9}) {
                const double gamma = frac * best.gamma;
                const auto r = solve_inner(gamma, tiny.inst, {});
                if (!r.feasible) continue;
                CHECK(r.weak_duality_violation <= 1e-9 * std::max(r.rate, 1.0));
                CHECK(r.dual_value >= r.primal_value - 1e-9 * std::max(r.rate, 1.0));
                const double opt = best.rate - gamma * best.power;
                CHECK(r.dual_value >= opt - 1e-7 * std::max(best.rate, 1.0));
                // Any nonnegative multiplier gives an upper bound too.
                SnapshotRng rng(i, 77);
                for (int t = 0; t < 5; ++t) {
                    auto d = DualState::zeros(tiny.inst.n_ues(), tiny.inst.n_rbs());
                    for (auto& b : d.beta) b = rng.uniform();
                    for (int k : tiny.inst.partition.omega2()) d.lambda[k] = 1e10 * rng.uniform();
                    d.nu = 0.1 + 1e6 * rng.uniform();
                    CHECK(dual_value(d, gamma, tiny.inst) >= opt - 1e-7 * std::max(best.rate, 1.0));
                }
            }
        }
    }

    SUBCASE("primal value is the objective of the returned allocation") {
        ScenarioConfig cfg;
        const auto sp = make_snapshot_problem(cfg, 2, 1);
        const auto r = solve_inner(5e7, sp.inst, {}, {sp.certificate.a});
        REQUIRE(r.feasible);
        CHECK(r.primal_value == doctest::Approx(objective(r.a, r.p, 5e7, sp.inst)).epsilon(1e-9));
        check_partition_respected(r.a, sp.inst);
        CHECK(check_feasibility(r.a, r.p, sp.inst).feasible());
    }
}

TEST_CASE("Dinkelbach on full-size snapshots") {
    ScenarioConfig cfg;
    int solved = 0;
    for (std::uint64_t s = 0; s < 12; ++s) {
        const auto sp = make_snapshot_problem(cfg, 21, s);
        EeSolution sol;
        try {
            sol = solve_ee(sp.inst, {}, {}, {sp.certificate.a});
        } catch (const InfeasibleError&) {
            continue;
        }
        ++solved;
        const auto& its = sol.trace.iterations;
        CHECK(sol.trace.converged);
        CHECK(its.size() <= 5);
        CHECK(its.front().gamma == 0.0);
        for (std::size_t i = 1; i < its.size(); ++i) CHECK(its[i].gamma > its[i - 1].gamma);
        CHECK(std::abs(sol.rate - sol.gamma * sol.power) <= 1e-3 * sol.power * std::max(sol.gamma, 1.0));
        CHECK(sol.ee == doctest::Approx(rrh_ee(sol.a, sol.p, sp.inst.channel.sigma, sp.inst.b0(), sp.inst.power)));
        check_partition_respected(sol.a, sp.inst);
        CHECK(check_feasibility(sol.a, sol.p, sp.inst).feasible());

        // Complementary slackness on the shared RBs.
        const auto g = subgradients(sol.a, sol.p, sp.inst);
        for (int k : sp.inst.partition.omega2())
            if (sol.multipliers.lambda[k] > 0.0) CHECK(std::abs(g.lambda[k]) < 1e-3 * sp.inst.delta0);

        // F(gamma) decreases and stays nonnegative below the optimum.
        double prev = INFINITY;
        for (double frac : {0.0, 0.3, 0.6, 0.9}) {
            const double gamma = frac * sol.ee;
            const auto r = solve_inner(gamma, sp.inst, {}, {sp.certificate.a, sol.a});
            const double f = std::max(r.primal_value, sol.rate - gamma * sol.power);
            CHECK(f >= 0.0);
            CHECK(f < prev);
            prev = f;
        }
    }
    CHECK(solved >= 8);
}

TEST_CASE("infeasible floors raise") {
    const PowerModel pm{2.0, 0.1, 0.2, 0.01};
    auto inst = make_instance(grid(1, 1, {1.0}), 1, 1, 1.0, pm, {1e9});
    CHECK_THROWS_AS(solve_ee(inst), InfeasibleError);
    try {
        solve_ee(inst);
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint() == "qos");
    }
}

TEST_CASE("configuration checks and trace output") {
    OuterConfig o;
    o.i_max = 0;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    InnerConfig c;
    c.c_beta = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(OuterConfig{}.converged(100.0, 1.0, 100.0));
    CHECK_FALSE(OuterConfig{}.converged(100.0, 1.0, 50.0));

    SolveTrace t;
    t.iterations.push_back({1, 0.0, 10.0, 2.0, 10.0, 7, true});
    std::ostringstream os;
    t.write_csv(os);
    CHECK(os.str() == "iteration,gamma,C,P,F,inner_iters,feasible\n1,0,10,2,10,7,1\n");
}
