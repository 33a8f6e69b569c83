#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sade {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceReport {
    std::vector<CriterionResult> criteria;

    bool all_pass() const {
        for (const auto& c : criteria)
            if (!c.pass)
                return false;
        return !criteria.empty();
    }
};

// Runs the full acceptance suite, printing one pass/fail line per criterion
// to `out` as results come in.
AcceptanceReport run_acceptance(std::ostream& out);

} // namespace sade
