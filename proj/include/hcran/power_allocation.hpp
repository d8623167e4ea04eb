#pragma once

#include <vector>

#include "hcran/model.hpp"

namespace hcran {

// Optimal powers for a fixed RB assignment at a given Dinkelbach parameter,
// with the multipliers that certify them.
struct PowerPlan {
    PowerMatrix p;
    std::vector<double> beta;
    std::vector<double> lambda;
    double nu = 0.0;
    std::vector<double> rates;
    double rate = 0.0;   // bit/s
    double power = 0.0;  // consumed W, static part included
    bool feasible = false;
    double floor_scale = 1.0;  // < 1 when floors had to be scaled down to find any allocation

    double objective(double gamma) const { return rate - gamma * power; }
    DualState dual() const { return {beta, lambda, nu}; }
};

// Maximizes C - gamma * P over powers for assignment `a` subject to the floors,
// the per-RB interference caps and the total power budget.
PowerPlan optimize_powers(const AllocationMatrix& a, double gamma, const ProblemInstance& inst,
                          const std::vector<double>& floors);
PowerPlan optimize_powers(const AllocationMatrix& a, double gamma, const ProblemInstance& inst);

// As above, but when the floors cannot be met the largest common fraction of
// them that can be met is used instead and the plan is marked infeasible.
PowerPlan optimize_powers_best_effort(const AllocationMatrix& a, double gamma, const ProblemInstance& inst);

// Assigns RBs given per-RB rates: UEs below their floor pick first (largest
// relative deficit first, each taking its best free RB), then leftovers go to
// the highest-rate eligible UE.
AllocationMatrix qos_greedy_assignment(const Grid<double>& rate, const std::vector<double>& floors,
                                       const ProblemInstance& inst);

// Floors actually reachable on this snapshot, certified by a concrete allocation.
struct FloorCertificate {
    std::vector<double> floors;
    AllocationMatrix a;
    PowerMatrix p;
    bool relaxed = false;
};
FloorCertificate attainable_floors(const ProblemInstance& inst, const std::vector<double>& nominal);

}  // namespace hcran
