#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "pflow/inputs.hpp"
#include "pflow/parameters.hpp"

namespace pflow {

/// Destination probabilities over {community, STACH, LTACH, NH}.
using TransitionRow = Eigen::Vector4d;
/// Annual movement counts between categories, rows = from, cols = to.
using FourByFour = Eigen::Matrix4d;
/// Shares of hospitalized agents by age group.
using AgeDistribution = Eigen::Vector3d;

struct HospitalRecord
{
    FacilityId id{};
    int beds_nonicu = 0;
    int beds_icu = 0;
    double total_discharges = 0.0; ///< all discharges per year, including out-of-state patients
    double mean_los = 0.0;
    double sd_los = 0.0;
    double out_of_state_share = 0.0;
    /// In-state discharges by county of residence, ascending county id.
    std::vector<std::pair<CountyId, double>> county_discharges;

    int total_beds() const { return beds_nonicu + beds_icu; }
    double county_share(CountyId c) const;
};

struct HospitalRecords
{
    std::vector<HospitalRecord> records; ///< roster order
    std::vector<std::string> warnings;   ///< hospitals dropped for missing data
};

/// Merges roster, LOS summary and county-of-residence data. Hospitals without
/// a LOS row or without county data are dropped with a warning.
HospitalRecords build_hospital_records(const std::vector<FacilityInfo>& stachs, const std::vector<LosRow>& los,
                                       const std::vector<CountyShareRow>& shares);

struct CommunityRates
{
    double p_hospital = 0.0;
    double p_nh = 0.0;
};

/// Population by county and age group.
using PopulationCounts = std::unordered_map<CountyId, std::array<double, kAgeGroupCount>>;

PopulationCounts count_population(const std::vector<PersonRow>& rows, double scale = 1.0);

class CommunityTransitionTable
{
  public:
    /// Zero rates for unknown (county, age) pairs.
    CommunityRates lookup(CountyId c, AgeGroup a) const;
    void set(CountyId c, AgeGroup a, CommunityRates r) { rates_[c][index_of(a)] = r; }
    const std::unordered_map<CountyId, std::array<CommunityRates, kAgeGroupCount>>& rates() const { return rates_; }

  private:
    std::unordered_map<CountyId, std::array<CommunityRates, kAgeGroupCount>> rates_;
};

/// daily p = annual admissions / (population * 365). LTACH rows and NH rows for
/// agents under 65 are dropped with a warning.
CommunityTransitionTable build_community_transitions(const std::vector<CommunityAdmissionRow>& admissions,
                                                     const PopulationCounts& population,
                                                     std::vector<std::string>* warnings = nullptr);

/// Zeroes destinations the age group may not enter and renormalizes.
/// InputError when nothing is left.
TransitionRow adjust_for_age(const TransitionRow& raw, AgeGroup age);

struct FacilityTransitions
{
    std::unordered_map<FacilityId, std::array<TransitionRow, kAgeGroupCount>> hospital;
    std::array<TransitionRow, kAgeGroupCount> ltach;
    std::array<TransitionRow, kAgeGroupCount> nh;

    const TransitionRow& row(Category source, FacilityId facility, AgeGroup age) const;
};

/// Hospital rows come from discharge dispositions (deaths excluded); an age
/// group with no discharges at a hospital uses that hospital's pooled counts.
/// The LTACH and NH collective rows come from the parameters.
FacilityTransitions build_facility_transitions(const std::vector<DischargeRow>& discharges,
                                               const std::vector<HospitalRecord>& hospitals, const Parameters& p);

/// Probability of death at the end of a stay, by category.
struct DeathRates
{
    std::array<double, kCategoryCount> by_category{};
    double at(Category c) const { return by_category[index_of(c)]; }
};

/// STACH: deaths / discharges. LTACH: parameter. NH: the annual parameter
/// converted to a per-discharge probability through the mean NH stay.
DeathRates build_death_rates(const std::vector<DischargeRow>& discharges, double nh_mean_los_days, const Parameters& p);

/// Discharge-weighted mean LOS over the given facilities' LOS rows.
double weighted_mean_los(const std::vector<FacilityInfo>& facilities, const std::vector<LosRow>& los);

AgeDistribution build_hospital_age_distribution(const std::vector<DischargeRow>& discharges);

struct TransitionTables;

/// Annual expected-flow targets, scaled by n_agents / population_reference.
FourByFour build_four_by_four(const ScenarioData& data, const TransitionTables& tables, const Parameters& p);

/// All tables derived once at initialization.
struct TransitionTables
{
    HospitalRecords hospitals;
    PopulationCounts population;
    CommunityTransitionTable community;
    FacilityTransitions facility;
    DeathRates death;
    AgeDistribution hospital_age = AgeDistribution::Zero();
    FourByFour four_by_four = FourByFour::Zero();
    std::vector<std::string> warnings;
};

TransitionTables build_transition_tables(const ScenarioData& data, const Parameters& p);

} // namespace pflow
