#pragma once

#include <string>
#include <vector>

#include "wavestab/config.hpp"

namespace wavestab {

/// One reproduction case: model, fixed parameters, the swept energy-level
/// variable with its resolved range, and the figure-caption step size.
struct CaseDefinition {
    std::string name;
    std::string description;
    RunConfig config; // fully resolved, sweep bounds included
    std::vector<std::string> expected_tags;
};

/// The seven benchmark sweeps. Ranges are resolved against the actual well
/// (fractions of the energy interval between the well floor and the barrier)
/// so the catalog needs no stored magic numbers beyond the captions.
const std::vector<CaseDefinition>& benchmark_cases();

const CaseDefinition& find_case(const std::string& name);

} // namespace wavestab
