#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace regimesplit {

struct VerifyOptions {
    /// Main count of the randomized checks: potentials (lemma), grid points
    /// (monotonicity), draws per case (montecarlo), sample size (oracle), triples (shift).
    std::optional<std::size_t> n;
    std::uint64_t seed = 7;
};

struct CheckResult {
    int id;
    std::string name;
    std::string claim;  ///< the statement under test, in one line
    bool passed;
    std::vector<std::string> details;  ///< computed vs expected
    double runtime_budget_seconds;
};

/// gaussian, two-maxima, hexagon, lemma, monotonicity, weibull, elliptical,
/// montecarlo, oracle, shift; in that order.
const std::vector<std::string>& check_names();

/// Throws DomainError for an unknown name. Solver errors inside a check make it fail
/// with the message in its details rather than propagate.
CheckResult run_check(const std::string& name, const VerifyOptions& opts = {});

std::vector<CheckResult> run_all_checks(const VerifyOptions& opts = {});

}  // namespace regimesplit
