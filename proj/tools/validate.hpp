#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace kfs::cli {

struct Check {
    std::string name;
    // Returns an empty string on success, otherwise a short description of
    // the failure.
    std::function<std::string()> run;
};

std::vector<Check> invariant_checks(int workers);

// Runs every check, printing one PASS/FAIL line each. Returns the number of
// failures.
int run_checks(const std::vector<Check>& checks, std::ostream& os);

}  // namespace kfs::cli
