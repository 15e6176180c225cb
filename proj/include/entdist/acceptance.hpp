#pragma once

// The release gate: every quantitative claim the simulator makes, run with
// fixed seeds and pinned tolerances. Used by the `verify` CLI command and by
// the acceptance test binary; both print one pass/fail line per criterion.

#include <string>
#include <vector>

namespace entdist::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail; // one-line summary of the measured numbers
};

std::vector<CriterionResult> run_all();

// True iff every criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

// "PASS  3  outcome-routing-and-distribution  (...)" style line.
std::string format_line(const CriterionResult& result);

} // namespace entdist::acceptance
