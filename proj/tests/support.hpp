#pragma once

#include <vector>

#include "hcran/model.hpp"

namespace hcran::test {

// Instance on an explicit CINR grid; the first `exclusive` RBs form omega1.
inline ProblemInstance make_instance(const Grid<double>& sigma, int n_high, int exclusive, double b0,
                                     const PowerModel& pm, std::vector<double> floors = {},
                                     std::vector<double> g_r2m = {}, double delta0 = 1e300,
                                     Eligibility elig = Eligibility::Sffr) {
    ProblemInstance inst;
    inst.channel.sigma = sigma;
    inst.channel.g_r2m = g_r2m.empty() ? std::vector<double>(sigma.cols(), 0.0) : g_r2m;
    inst.partition = SffrPartition::split(sigma.cols(), exclusive, b0);
    inst.ues = {n_high, sigma.rows() - n_high};
    inst.power = pm;
    inst.rate_floor = floors.empty() ? std::vector<double>(sigma.rows(), 0.0) : floors;
    inst.delta0 = delta0;
    inst.eligibility = elig;
    return inst;
}

inline Grid<double> grid(int rows, int cols, std::vector<double> values) {
    Grid<double> g(rows, cols);
    g.data() = std::move(values);
    return g;
}

}  // namespace hcran::test
