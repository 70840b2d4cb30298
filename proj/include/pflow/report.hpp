#pragma once

#include <filesystem>

#include "pflow/validation.hpp"

namespace pflow {

/// Everything `validate` needs from a finished run.
struct RunTallies
{
    RunReport run;
    Expectations expected;
    ValidationThresholds thresholds;
};

/// tallies.json: per-facility admissions, LOS sums and daily census, the
/// movement matrix, fleet ICU census, counters and the expectations.
void write_tallies_json(const std::filesystem::path& path, const RunTallies& tallies);
RunTallies read_tallies_json(const std::filesystem::path& path);

/// Replaces expectations with those found in a generator ground-truth file
/// (keys "los", "census" and, when `include_flows`, "four_by_four"). Counts
/// are multiplied by `agent_scale` (n_agents / population_reference).
void apply_ground_truth(const std::filesystem::path& path, Expectations& expected, double agent_scale,
                        bool include_flows = false);

/// The three pattern reports for a run.
std::vector<PatternReport> evaluate(const RunTallies& tallies);

} // namespace pflow
