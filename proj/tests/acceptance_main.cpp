// Acceptance suite runner: one pass/fail line per criterion, exit 0 iff all
// criteria pass. Same criteria the `entdist verify` command runs.

#include <iostream>

#include "entdist/acceptance.hpp"

int main() {
    const auto results = entdist::acceptance::run_all();
    for (const auto& result : results)
        std::cout << entdist::acceptance::format_line(result) << std::endl;
    const bool ok = entdist::acceptance::all_passed(results);
    std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILURES above")
              << std::endl;
    return ok ? 0 : 1;
}
