#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace umf {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    bool soft = false;  ///< reported, never blocks
    std::string detail;
    double seconds = 0.0;
};

using Tolerances = std::map<std::string, double>;

/// Pinned thresholds of the acceptance suite, by name.
Tolerances default_tolerances();

struct AcceptanceOptions {
    Tolerances overrides;   ///< names must exist in default_tolerances()
    std::size_t threads = 0;
    std::vector<int> only;  ///< empty = every criterion
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// True when every non-soft criterion passed.
bool acceptance_passed(const std::vector<CriterionResult>& results);

/// "[PASS] 01 landau_levels (0.42 s): ..." style line.
std::string format_result(const CriterionResult& r);
nlohmann::json report_json(const std::vector<CriterionResult>& results);

}  // namespace umf
