#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hcran/error.hpp"
#include "hcran/experiment.hpp"

using namespace hcran;

namespace {

std::string error_of(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_config(in, "test.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string render(const ResultTable& t, TableKind kind, OutputFormat f = OutputFormat::Csv) {
    std::ostringstream os;
    write_table(os, t, kind, f);
    return os.str();
}

ExperimentConfig small_run() {
    ExperimentConfig c;
    c.algorithms.assign(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
    c.sweep = SweepVariable::EtaHueDb;
    c.values = {0.0, 6.0};
    c.snapshots = 4;
    c.seed = 9;
    return c;
}

}  // namespace

TEST_CASE("defaults follow the reference setup") {
    const ExperimentConfig c;
    CHECK(c.physical.k_total == 25);
    CHECK(c.physical.bandwidth_hz == 5e6);
    CHECK(c.physical.b0() == 200e3);
    CHECK(c.physical.n_high == 10);
    CHECK(c.physical.p_max_m_dbm == 43.0);
    CHECK(c.physical.eta_r == 128e3);
    CHECK(c.physical.eta_er == 64e3);
    CHECK(c.physical.l_rrh == 12);
    CHECK(c.snapshots == 1000);
    CHECK_FALSE(c.physical.relax_floors);
}

TEST_CASE("config round trip") {
    for (int fig = 3; fig <= 7; ++fig) {
        auto c = figure_config(fig);
        c.seed = 0xfedcba9876543210ULL;
        c.physical.d_low_rrh = 0.1 + 0.2;
        c.inner.c_beta = 1.0 / 3.0;
        const auto text = serialize_config(c);
        std::istringstream in(text);
        const auto back = parse_config(in);
        CHECK(back == c);
        CHECK(serialize_config(back) == text);
    }
}

TEST_CASE("config parsing") {
    std::istringstream in("[experiment]\nscenarios = 2-tier-hcran, 1-tier-hpn\nsweep = m\nvalues = 1, 2\n"
                          "snapshots = 3\n[qos]\neta_hue_db = 6\n[solver]\ni_max = 7\n");
    const auto c = parse_config(in);
    CHECK(c.scenarios.size() == 2);
    CHECK(c.sweep == SweepVariable::M);
    CHECK(c.values == std::vector<double>{1.0, 2.0});
    CHECK(c.snapshots == 3);
    CHECK(c.physical.eta_hue_db == 6.0);
    CHECK(c.outer.i_max == 7);
    CHECK(c.physical.k_total == 25);
}

TEST_CASE("config errors name the place") {
    CHECK(error_of("[experiment]\nsnapshots = 3\n[qos\n").find("test.ini:3") != std::string::npos);
    CHECK(error_of("[qos]\neta_x = 1\n").find("qos.eta_x") != std::string::npos);
    CHECK(error_of("[experiment]\nsnapshots = many\n").find("experiment.snapshots") != std::string::npos);
    CHECK(error_of("[experiment]\nsnapshots = 0\n").find("snapshots") != std::string::npos);
    CHECK(error_of("[experiment]\nsweep = color\n").find("experiment.sweep") != std::string::npos);
    CHECK(error_of("snapshots = 3\n").find("outside") != std::string::npos);
    CHECK(error_of("[sffr]\nomega1_ratio = 1.5\n").find("omega1_ratio") != std::string::npos);
    try {
        load_config("/nonexistent/dir/run.ini");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/run.ini") != std::string::npos);
    }
}

TEST_CASE("sweep variables") {
    ScenarioConfig s;
    apply_sweep(s, SweepVariable::M, 7);
    CHECK(s.n_low == 7);
    apply_sweep(s, SweepVariable::PMaxRDbm, 30);
    CHECK(s.p_max_r_dbm == 30.0);
    apply_sweep(s, SweepVariable::Omega1Ratio, 0.4);
    CHECK(s.omega1_ratio == 0.4);
    CHECK_THROWS_AS(apply_sweep(s, SweepVariable::M, 2.5), ConfigError);
    for (auto v : {SweepVariable::None, SweepVariable::M, SweepVariable::EtaHueDb, SweepVariable::PMaxRDbm,
                   SweepVariable::Omega1Ratio})
        CHECK(parse_sweep(to_string(v)) == v);
}

TEST_CASE("figure presets") {
    CHECK(figure_config(3).scenarios.size() == 5);
    CHECK(figure_config(3).values.size() == 10);
    CHECK(figure_config(5).values.size() == 11);
    CHECK(figure_config(5).series_values == std::vector<double>{20.0, 30.0});
    CHECK(figure_config(6).values.front() == 14.0);
    CHECK(figure_config(6).values.back() == 36.0);
    CHECK(figure_config(7).values == std::vector<double>{0.2, 0.4, 0.6, 0.8});
    CHECK_THROWS_AS(figure_config(8), ConfigError);
}

TEST_CASE("confidence intervals") {
    const std::vector<double> xs{1.0, 2.0, 4.0, 7.0, 11.0};
    const auto m = mean_ci95(xs);
    CHECK(m.mean == doctest::Approx(5.0));
    // t(0.975, 4) = 2.7764451051977987, s^2 = 66 / 4
    CHECK(m.half_width == doctest::Approx(2.7764451051977987 * std::sqrt(16.5 / 5.0)).epsilon(1e-12));
    CHECK(mean_ci95({3.0}).half_width == 0.0);
}

TEST_CASE("experiment runs") {
    const auto c = small_run();
    const auto t = run_experiment(c);
    REQUIRE(t.rows.size() == 2 * 4 * 3);
    for (const auto& r : t.rows) {
        CHECK(r.scenario == "2-tier-hcran");
        CHECK(r.ee >= 0.0);
        CHECK(r.error.empty());
    }
    CHECK(t.rows[0].algorithm == "optimal");
    CHECK(t.rows[1].algorithm == "fixed-power");
    CHECK(t.rows[3].snapshot == 1);

    SUBCASE("worker count does not change the output") {
        auto par = c;
        par.workers = 3;
        const auto t2 = run_experiment(par);
        CHECK(render(t, TableKind::Rows) == render(t2, TableKind::Rows));
        CHECK(render(t, TableKind::Summary, OutputFormat::Json) == render(t2, TableKind::Summary, OutputFormat::Json));
    }

    SUBCASE("summaries leave flagged snapshots out") {
        const auto sum = summarize(t);
        REQUIRE(sum.size() == 6);
        for (const auto& s : sum) {
            std::vector<double> ee;
            int flagged = 0;
            for (const auto& r : t.rows)
                if (r.algorithm == s.algorithm && r.sweep_value == s.sweep_value) {
                    if (r.infeasible) ++flagged;
                    else ee.push_back(r.ee);
                }
            CHECK(s.infeasible == flagged);
            CHECK(s.samples == static_cast<int>(ee.size()));
            if (!ee.empty()) CHECK(s.mean_ee == doctest::Approx(mean_ci95(ee).mean));
            else CHECK(std::isnan(s.mean_ee));
        }
    }

    SUBCASE("csv layout") {
        const auto text = render(t, TableKind::Rows);
        CHECK(text.rfind(version_line() + "\n", 0) == 0);
        CHECK(text.find("scenario,algorithm,none,eta_hue_db,snapshot,ee,rate,power,converged,outer_iterations,gap,"
                        "infeasible,relaxed,error\n") != std::string::npos);
        CHECK(version_line() == "# hcran " HCRAN_VERSION " rng=mt19937_64+splitmix64/v1");
    }
}

TEST_CASE("trace table") {
    auto c = figure_config(4);
    c.snapshots = 2;
    c.values = {0.0};
    const auto t = run_experiment(c);
    const auto text = render(t, TableKind::Trace);
    CHECK(text.find("\nalgorithm,eta_hue_db,iteration,ee\n") != std::string::npos);
    const auto pts = summarize_trace(t);
    REQUIRE(!pts.empty());
    CHECK(pts.front().iteration == 1);
}

TEST_CASE("invalid experiments") {
    ExperimentConfig c;
    c.values.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.sweep = SweepVariable::M;
    c.series = SweepVariable::M;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
