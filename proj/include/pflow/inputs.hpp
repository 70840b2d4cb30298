#pragma once

#include <optional>
#include <vector>

#include "pflow/geography.hpp"
#include "pflow/network.hpp"
#include "pflow/population.hpp"
#include "pflow/types.hpp"

namespace pflow {

enum class Disposition : std::uint8_t { Community, Hospital, Ltach, Nh, Death };

Disposition disposition_from_string(std::string_view s);
std::string_view to_string(Disposition d);

/// discharges.csv: facility_id,age_group,disposition,count
struct DischargeRow
{
    FacilityId facility{};
    AgeGroup age = AgeGroup::Under50;
    Disposition disposition = Disposition::Community;
    double count = 0.0;
};

/// county_shares.csv: facility_id,county_id,discharges
struct CountyShareRow
{
    FacilityId facility{};
    CountyId county{};
    double discharges = 0.0;
};

/// los.csv: facility_id,mean_los_days,sd_los_days,total_discharges
struct LosRow
{
    FacilityId facility{};
    double mean_days = 0.0;
    double sd_days = 0.0;
    double total_discharges = 0.0;
};

/// community_admissions.csv: county_id,age_group,category,annual_admissions
struct CommunityAdmissionRow
{
    CountyId county{};
    AgeGroup age = AgeGroup::Under50;
    Category category = Category::Stach;
    double annual_admissions = 0.0;
};

/// stach_capacity.csv: facility_id,start_nonicu,start_icu (unscaled counts)
struct CapacityOverrideRow
{
    FacilityId facility{};
    double start_nonicu = 0.0;
    double start_icu = 0.0;
};

/// Everything read from a scenario directory, before any derived tables.
struct ScenarioData
{
    std::vector<PersonRow> population;
    std::vector<CountyCentroid> counties;
    std::vector<FacilityInfo> stachs;
    std::vector<FacilityInfo> ltachs;
    std::vector<FacilityInfo> nhs;
    std::vector<DischargeRow> discharges;
    std::vector<CountyShareRow> county_shares;
    std::vector<LosRow> los;
    std::vector<CommunityAdmissionRow> community_admissions;
    std::vector<CapacityOverrideRow> capacity_overrides;
    std::optional<DistanceMatrix> stach_distances;
    std::optional<DistanceMatrix> ltach_distances;
    std::optional<DistanceMatrix> nh_distances;
};

} // namespace pflow
