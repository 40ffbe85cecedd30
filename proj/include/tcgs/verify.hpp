// verify.hpp — Canned invariant suite across all modules; the CLI `verify`
// subcommand runs it and fails on any violated row.

#pragma once

#include <string>
#include <vector>

namespace tcgs {

struct CheckRow {
    std::string name;
    double observed{0.0};
    double limit{0.0};
    std::string comparator; // "<=" or ">="
    bool pass{false};
};

std::vector<CheckRow> run_verification();

} // namespace tcgs
