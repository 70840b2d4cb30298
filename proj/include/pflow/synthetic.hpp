#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>

#include "pflow/scenario.hpp"
#include "pflow/transitions.hpp"

namespace pflow {

/// Size knobs for a generated scenario. Read from flat `key = value` text.
struct SyntheticSpec
{
    int counties = 20;
    int hospitals = 15;
    int ltachs = 2;
    int nhs = 40;
    long long population = 100000;
    std::uint64_t seed = 7;
    double hospital_rate = 1.0; ///< multiplier on the base community hospitalization rates
    double nh_rate = 1.0;       ///< multiplier on the base community-to-NH rate
};

SyntheticSpec parse_synthetic_spec(const std::string& text, const std::string& origin = "<spec>");
SyntheticSpec read_synthetic_spec(const std::filesystem::path& path);

/// Exact steady-state expectations of the generated scenario at its own
/// population (n_agents == population_reference).
struct GroundTruth
{
    struct Los
    {
        double mean = 0.0;
        double sd = 0.0;
    };
    std::unordered_map<FacilityId, Los> los;
    std::unordered_map<FacilityId, double> census; ///< includes placeholders
    std::unordered_map<FacilityId, double> admissions; ///< annual, in-state
    FourByFour four_by_four = FourByFour::Zero();
    double icu_census = 0.0; ///< expected fleet ICU census, placeholders included
    AgeDistribution hospital_age = AgeDistribution::Zero();
};

struct SyntheticScenario
{
    Scenario scenario;
    GroundTruth truth;
};

/// Builds a self-consistent scenario: hospital sizes, LOS tables, disposition
/// counts and community rates are all derived from one steady-state solve of
/// the engine's own movement rules, so the day-0 fill equals the long-run
/// census. InputError for an infeasible spec.
SyntheticScenario generate_synthetic_scenario(const SyntheticSpec& spec);

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);

/// Scenario files plus ground_truth.json.
void write_synthetic_scenario(const SyntheticScenario& s, const std::filesystem::path& directory);

} // namespace pflow
