#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pflow/inputs.hpp"
#include "pflow/parameters.hpp"

namespace pflow {

/// A loaded, cross-checked scenario directory.
///
/// Layout (all CSV with fixed headers):
///   params.txt                 key = value parameters
///   population.csv             county_id,sex,age_years
///   counties.csv               county_id,lat,lon
///   stach.csv ltach.csv nh.csv facility rosters
///   discharges.csv             facility_id,age_group,disposition,count
///   county_shares.csv          facility_id,county_id,discharges
///   los.csv                    facility_id,mean_los_days,sd_los_days,total_discharges
///   community_admissions.csv   county_id,age_group,category,annual_admissions
///   stach_capacity.csv         optional: facility_id,start_nonicu,start_icu
///   distances_{stach,ltach,nh}.csv  optional: county_id,facility_id,miles
struct Scenario
{
    std::filesystem::path directory;
    Parameters parameters;
    ScenarioData data;
    std::vector<std::string> notes; ///< defaulted parameters and other non-fatal findings
};

/// Environment variable naming the default scenario directory for the CLI.
inline constexpr const char* kScenarioEnvVar = "PFLOW_SCENARIO";

/// Reads and validates every file. All cross-reference problems are gathered
/// and reported together in one InputError.
Scenario load_scenario(const std::filesystem::path& directory);

/// Writes every input file (and params.txt) into `directory`.
void save_scenario(const Scenario& scenario, const std::filesystem::path& directory);

/// Distances for one category: the scenario's precomputed file when present,
/// otherwise computed from county centroids and facility geocodes.
DistanceMatrix distances_for(const ScenarioData& data, Category category);

std::vector<CountyCentroid> read_counties_csv(const std::filesystem::path& path);

} // namespace pflow
