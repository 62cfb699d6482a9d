// Runs every acceptance check against its tolerance and runtime budget.
// One PASS/FAIL line per check; details follow failed checks only.

#include "regimesplit/verify.hpp"

#include <chrono>
#include <cstdio>

int main() {
    using clock = std::chrono::steady_clock;
    int failures = 0;
    for (const auto& name : regimesplit::check_names()) {
        const auto start = clock::now();
        const auto r = regimesplit::run_check(name);
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        const bool in_time = secs < r.runtime_budget_seconds;
        const bool pass = r.passed && in_time;
        failures += !pass;
        std::printf("%s [%2d] %-12s %8.3f s (budget %g s)  %s\n", pass ? "PASS" : "FAIL", r.id, r.name.c_str(), secs,
                    r.runtime_budget_seconds, r.claim.c_str());
        if (!pass) {
            if (!in_time) std::printf("       over the runtime budget\n");
            for (const auto& line : r.details) std::printf("       %s\n", line.c_str());
        }
    }
    std::printf("%d/%zu checks passed\n", static_cast<int>(regimesplit::check_names().size()) - failures,
                regimesplit::check_names().size());
    return failures == 0 ? 0 : 1;
}
