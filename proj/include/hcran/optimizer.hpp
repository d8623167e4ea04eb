#pragma once

#include <iosfwd>
#include <vector>

#include "hcran/model.hpp"
#include "hcran/power_allocation.hpp"

namespace hcran {

struct OuterConfig {
    int i_max = 20;
    double eps_gamma = 1e-3;    // relative, see converged()
    double gamma_floor = 1.0;   // bit/J
    double gamma_init = 0.0;
    void validate() const;
    // (C - gamma P) / P < eps * max(gamma, gamma_floor)
    bool converged(double rate, double power, double gamma) const;
    bool operator==(const OuterConfig&) const = default;
};

struct InnerConfig {
    int l_max = 200;
    double c_beta = 0.5;
    double c_lambda = 0.1;
    double c_nu = 0.1;
    double residual_tol = 1e-3;
    double movement_tol = 1e-4;
    void validate() const;
    bool operator==(const InnerConfig&) const = default;
};

struct WaterFill {
    double level = 0.0;  // omega
    double power = 0.0;
    bool unbounded = false;
};

WaterFill water_fill_power(int n, int k, const DualState& dual, double gamma, const ProblemInstance& inst);

// H as a function of omega * sigma and beta.
double rb_metric_value(double omega_sigma, double beta);
double rb_metric(int n, int k, const DualState& dual, double gamma, const ProblemInstance& inst);

AllocationMatrix assign_rbs(const DualState& dual, double gamma, const ProblemInstance& inst);

// Water-filling powers on the assigned RBs; unbounded levels are clamped and
// the result scaled down proportionally to fit p_max.
PowerMatrix water_fill_assigned(const AllocationMatrix& a, const DualState& dual, double gamma,
                                const ProblemInstance& inst);

// Lagrange dual function value; +inf when the water level is unbounded.
double dual_value(const DualState& dual, double gamma, const ProblemInstance& inst);

struct Subgradients {
    std::vector<double> beta;
    std::vector<double> lambda;
    double nu = 0.0;
};

Subgradients subgradients(const AllocationMatrix& a, const PowerMatrix& p, const ProblemInstance& inst);

// Per-multiplier normalisation of the step (x -= c / sqrt(l) * scale * grad).
struct StepScales {
    std::vector<double> beta;
    std::vector<double> lambda;
    double nu = 1.0;
    static StepScales unit(int ues, int rbs);
    static StepScales for_instance(double gamma, const ProblemInstance& inst);
};

DualState update_duals(const DualState& dual, const Subgradients& grads, int l, const InnerConfig& cfg,
                       const StepScales& scales);
DualState update_duals(const DualState& dual, const Subgradients& grads, int l, const InnerConfig& cfg);

struct InnerResult {
    AllocationMatrix a;
    PowerMatrix p;
    DualState multipliers;  // certify (a, p) for its assignment
    DualState iterate;      // last subgradient iterate
    double dual_value = 0.0;    // best (smallest) dual value seen
    double primal_value = 0.0;  // C - gamma P of (a, p)
    double rate = 0.0;
    double power = 0.0;
    std::vector<double> rates;
    bool feasible = false;
    int iterations = 0;
    int candidates = 0;  // distinct assignments evaluated
    // Largest dual value any earlier iterate violated weak duality by (should be 0).
    double weak_duality_violation = 0.0;
};

InnerResult solve_inner(double gamma, const ProblemInstance& inst, const InnerConfig& cfg,
                        const std::vector<AllocationMatrix>& hints = {}, const DualState* warm = nullptr);

struct OuterIterate {
    int iteration = 0;
    double gamma = 0.0;
    double rate = 0.0;
    double power = 0.0;
    double f_value = 0.0;
    int inner_iterations = 0;
    bool feasible = false;
};

struct SolveTrace {
    std::vector<OuterIterate> iterations;
    bool converged = false;
    void write_csv(std::ostream& os) const;
};

struct EeSolution {
    AllocationMatrix a;
    PowerMatrix p;
    double gamma = 0.0;  // gamma at termination
    double ee = 0.0;     // C / P of (a, p)
    double rate = 0.0;
    double power = 0.0;
    DualState multipliers;
    double dual_value = 0.0;
    bool feasible = false;
    SolveTrace trace;
};

// Dinkelbach iteration around solve_inner. Throws InfeasibleError when no
// feasible allocation is found at the first iteration.
EeSolution solve_ee(const ProblemInstance& inst, const OuterConfig& outer = {}, const InnerConfig& inner = {},
                    const std::vector<AllocationMatrix>& hints = {});

// Dinkelbach over powers only. Never throws on infeasible floors; the result
// is flagged instead.
EeSolution solve_ee_fixed_assignment(const AllocationMatrix& a, const ProblemInstance& inst,
                                     const OuterConfig& outer = {});

}  // namespace hcran
