#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cbtau::tools {

struct AcceptanceOptions {
    bool quick = false;      // smaller fast-scheme orders and fewer timing repeats
    unsigned threads = 1;    // fast-scheme worker threads
    std::uint64_t seed = 20240611;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0;
    // one line per sub-check, failures first
    std::vector<std::string> details;
};

// Criteria 1-9. Every check compares two independent routes or an exact identity residual.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opts);
const std::vector<int>& all_criteria();
std::string criterion_name(int id);

// Runs criteria 3-6 with the given mutation hooks switched on and reports whether any of them failed.
// Both hooks are off again on return.
CriterionResult run_mutated(bool lattice_bound, bool operator_coefficient, const AcceptanceOptions& opts);

}  // namespace cbtau::tools
