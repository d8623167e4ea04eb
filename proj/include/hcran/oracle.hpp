#pragma once

#include <cstdint>
#include <vector>

#include "hcran/channel.hpp"
#include "hcran/model.hpp"
#include "hcran/optimizer.hpp"

namespace hcran::oracle {

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

struct TinyInstance {
    ProblemInstance inst;
    int grid_points = 2000;  // per RB, for the grid cross-check
};

// Random instance with K <= 6 RBs and at most 3 UEs under the full constraint
// set. Instances on which no allocation meets the floors are redrawn.
TinyInstance make_tiny_instance(std::uint64_t seed, std::uint64_t index, int max_rbs = 6, int max_ues = 3);

// Number of full assignments the enumeration visits.
std::uint64_t enumeration_size(const ProblemInstance& inst);

struct OraclePowers {
    PowerMatrix p;
    double rate = 0.0;
    double power = 0.0;
    bool feasible = false;
};

// max C - gamma P over powers for a fixed assignment, by bisection on the
// per-UE water levels and on the budget price.
OraclePowers oracle_powers(const AllocationMatrix& a, double gamma, const ProblemInstance& inst);

struct OracleResult {
    AllocationMatrix a;
    PowerMatrix p;
    double gamma = 0.0;  // best EE
    double rate = 0.0;
    double power = 0.0;
    bool feasible = false;
    std::uint64_t assignments = 0;
    // Largest relative amount by which a grid point beat the bisection
    // maximizer of a per-RB term.
    double grid_excess = 0.0;
};

// Exhaustive search over assignments; throws ConfigError above the guard.
OracleResult brute_force_ee(const TinyInstance& tiny, int workers = 1);
OracleResult brute_force_ee(const ProblemInstance& inst, int grid_points = 2000, int workers = 1);

// Best EE of a single-UE single-RB instance from a dense scan of p in [0, p_max].
double scan_ee_single(double sigma, double b0, const PowerModel& pm, double cap, int points);

struct GapReport {
    double gamma = 0.0;
    double dual_value = 0.0;
    double primal_value = 0.0;
    double rate = 0.0;
    double relative_gap = 0.0;  // (D - F) / C at gamma
};

// Duality gap of the inner problem at the solver's final gamma, in EE units
// relative to the solver's EE.
GapReport duality_gap(const EeSolution& sol);
GapReport duality_gap(const ProblemInstance& inst, const OuterConfig& outer = {}, const InnerConfig& inner = {});

struct KktReport {
    double max_residual = 0.0;  // interior points, |dL/dp| / price
    double max_boundary_violation = 0.0;
    int interior_points = 0;
    int boundary_points = 0;
};

// Central finite-difference stationarity of the per-RB Lagrangian terms.
KktReport kkt_check(const AllocationMatrix& a, const PowerMatrix& p, const DualState& dual, double gamma,
                    const ProblemInstance& inst);

}  // namespace hcran::oracle
