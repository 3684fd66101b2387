#ifndef NCYCLE_ACCEPTANCE_H
#define NCYCLE_ACCEPTANCE_H

#include <cstdint>
#include <string>
#include <vector>

namespace ncycle {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string measured;
    std::string expected;
    std::string tolerance;
    bool value_pass = false;
    double seconds = 0;
    double budget_seconds = 0;

    bool pass() const { return value_pass && seconds < budget_seconds; }
};

struct CheckOptions {
    /// Worker threads for the random-trial experiments (0 = hardware concurrency).
    unsigned threads = 0;
    std::uint64_t seed = 20130101;
};

CriterionResult check_bc_max_violation(const CheckOptions &options);
CriterionResult check_entropic_blindness(const CheckOptions &options);
CriterionResult check_activation_threshold(const CheckOptions &options);
CriterionResult check_expansion_consistency(const CheckOptions &options);
CriterionResult check_appendix_experiment(const CheckOptions &options);
CriterionResult check_oracle_equivalence(const CheckOptions &options);
CriterionResult check_depolarization_contract(const CheckOptions &options);
CriterionResult check_vertex_counts_and_bounds(const CheckOptions &options);

/// Every acceptance criterion, in order.
std::vector<CriterionResult> run_acceptance_checks(const CheckOptions &options = {});

/// One row per criterion. Timings are omitted unless requested so the output is reproducible.
std::string checks_table(const std::vector<CriterionResult> &results, bool with_timing);

}  // namespace ncycle

#endif
