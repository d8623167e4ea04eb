#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hcran {

struct AcceptanceOptions {
    int snapshots = 1000;      // full-size runs
    int tiny_instances = 200;  // oracle comparison
    int ratio_instances = 50;
    int determinism_snapshots = 4;
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<int> only;  // criterion ids; empty runs all
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int kCriteria = 13;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result(const CriterionResult& r);

}  // namespace hcran
