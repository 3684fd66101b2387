#include <iostream>

#include "ncycle/acceptance.h"

int main() {
    ncycle::CheckOptions options;
    auto results = ncycle::run_acceptance_checks(options);
    std::cout << ncycle::checks_table(results, true);
    int failed = 0;
    for (const auto &r : results) {
        failed += r.pass() ? 0 : 1;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << results.size() - failed << "/" << results.size() << "\n";
    return failed ? 1 : 0;
}
