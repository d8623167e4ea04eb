#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcran/optimizer.hpp"
#include "hcran/scenario.hpp"

namespace hcran {

// Equal power p_max / K on every RB; RBs whose interference cap is below that
// power are muted. Assignment by the QoS-aware max-rate rule.
EeSolution solve_fixed_power(const ProblemInstance& inst);

AllocationMatrix round_robin_assignment(const ProblemInstance& inst);

// Round-robin assignment, powers from the Dinkelbach loop over powers only.
EeSolution solve_sequential_rb(const ProblemInstance& inst, const OuterConfig& outer = {});

// Max-SINR scheduling with full-power rate-maximizing water-filling.
EeSolution solve_classical(const ProblemInstance& inst);

enum class Algorithm { Optimal, FixedPower, SequentialRb };

std::string_view to_string(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view name);
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Optimal, Algorithm::FixedPower, Algorithm::SequentialRb};

EeSolution solve(Algorithm algo, const ProblemInstance& inst, const OuterConfig& outer = {},
                 const InnerConfig& inner = {}, const std::vector<AllocationMatrix>& hints = {});

enum class ScenarioKind { OneTierHpn, TwoTierOverlaid, TwoTierUnderlaid, OneTierCran, TwoTierHcran };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario(std::string_view name);
// Allocation policy a scenario runs with; only the H-CRAN scenario honours `algo`.
std::string_view policy_name(ScenarioKind kind, Algorithm algo);
inline constexpr ScenarioKind kAllScenarios[] = {ScenarioKind::TwoTierHcran, ScenarioKind::OneTierCran,
                                                 ScenarioKind::TwoTierUnderlaid, ScenarioKind::TwoTierOverlaid,
                                                 ScenarioKind::OneTierHpn};

struct ScenarioSample {
    double ee = 0.0;       // reported EE (dense limit or system EE, per scenario_l)
    double node_ee = 0.0;  // reference low-power node (or HPN) EE
    double system_ee = 0.0;
    double rate = 0.0;
    double power = 0.0;
    bool feasible = false;
    bool relaxed = false;
    int outer_iterations = 0;
    bool converged = true;
    // (D - F) / C at the final gamma for dual-decomposition runs, NaN otherwise.
    double gap = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> trace_ee;  // C / P per outer iteration
};

ScenarioSample run_scenario(ScenarioKind kind, const ScenarioConfig& cfg, SnapshotRng& rng, const OuterConfig& outer = {},
                            const InnerConfig& inner = {}, Algorithm algo = Algorithm::Optimal);

}  // namespace hcran
