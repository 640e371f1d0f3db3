#pragma once

#include <string>
#include <vector>

namespace okdrop {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string reference; // expected value or relation
    std::string computed;
    std::string tolerance;
    bool pass = false;
    double seconds = 0.0;
    std::vector<std::string> details; // one line per sub-check
};

// Criteria are numbered 1..12; an empty list selects all.
std::vector<CriterionResult> run_acceptance(const std::vector<int> &ids = {});
CriterionResult run_criterion(int id);
int criterion_count();

} // namespace okdrop
