#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "pflow/geography.hpp"
#include "pflow/population.hpp"
#include "pflow/types.hpp"

namespace pflow {

/// Static facility attributes as read from a roster file.
struct FacilityInfo
{
    FacilityId id{};
    std::string name;
    Category category = Category::Stach;
    CountyId county{};
    GeoPoint geocode;
    int beds_nonicu = 0;           ///< all beds for LTACH and NH
    int beds_icu = 0;              ///< STACH only
    double out_of_state_pct = 0;   ///< STACH only, percentage in [0, 100]
    int starting_occupancy = 0;    ///< NH only

    int total_beds() const { return beds_nonicu + beds_icu; }
    double out_of_state_share() const { return out_of_state_pct / 100.0; }
};

/// max(1, round_half_up(beds * n / p)).
int scale_beds(int beds, long long n_agents, long long reference_population);

enum class AdmitOutcome { Admitted, Full };

/// One network node with bed bookkeeping. The community is a Facility of
/// category Community with unbounded capacity that only counts its residents.
class Facility
{
  public:
    static Facility community();
    Facility(FacilityInfo info, int capacity_nonicu, int capacity_icu);

    FacilityId id() const { return info_.id; }
    Category category() const { return info_.category; }
    const FacilityInfo& info() const { return info_; }
    bool is_community() const { return info_.category == Category::Community; }

    int capacity(BedType b) const { return b == BedType::Icu ? capacity_icu_ : capacity_nonicu_; }
    int placeholders(BedType b) const { return b == BedType::Icu ? placeholders_icu_ : placeholders_nonicu_; }
    int placeholders() const { return placeholders_icu_ + placeholders_nonicu_; }
    int agents(BedType b) const { return b == BedType::Icu ? agents_icu_ : agents_nonicu_; }
    int agent_count() const { return agents_icu_ + agents_nonicu_; }
    /// Occupied beds including placeholders.
    int occupied(BedType b) const { return agents(b) + placeholders(b); }
    int census() const { return agent_count() + placeholders(); }
    int free_beds(BedType b) const;

    bool has_open_bed(BedRequest request) const;
    bool contains(AgentId id) const { return occupants_.contains(id); }
    const std::unordered_map<AgentId, BedType>& occupants() const { return occupants_; }

    /// Placeholders are fixed once per run; a second call is a LogicError.
    void set_placeholders(int nonicu, int icu);

    AdmitOutcome admit(const Agent& agent, BedType bed);
    /// Returns the bed the agent held. LogicError if the agent is not here.
    BedType discharge(AgentId id);

  private:
    Facility() = default;

    FacilityInfo info_;
    int capacity_nonicu_ = 0;
    int capacity_icu_ = 0;
    int placeholders_nonicu_ = 0;
    int placeholders_icu_ = 0;
    bool placeholders_set_ = false;
    int agents_nonicu_ = 0;
    int agents_icu_ = 0;
    std::unordered_map<AgentId, BedType> occupants_;
};

/// All locations, indexed densely; slot 0 is the community.
class Network
{
  public:
    Network();

    LocationIndex add(Facility facility);

    std::size_t size() const { return slots_.size(); }
    Facility& at(LocationIndex slot) { return slots_.at(static_cast<std::size_t>(slot)); }
    const Facility& at(LocationIndex slot) const { return slots_.at(static_cast<std::size_t>(slot)); }
    Facility& community() { return slots_.front(); }

    bool contains(FacilityId id) const { return by_id_.contains(id); }
    LocationIndex slot_of(FacilityId id) const;
    const std::vector<LocationIndex>& slots_in(Category c) const { return by_category_[index_of(c)]; }
    std::size_t count(Category c) const { return slots_in(c).size(); }

    const std::vector<Facility>& facilities() const { return slots_; }

  private:
    std::vector<Facility> slots_;
    std::unordered_map<FacilityId, LocationIndex> by_id_;
    std::array<std::vector<LocationIndex>, kCategoryCount> by_category_;
};

/// Roster files. STACH: facility_id,name,county_id,lat,lon,beds_nonicu,beds_icu,pct_out_of_state
/// (pct_out_of_state is a percentage 0..100). LTACH: facility_id,name,county_id,lat,lon,beds.
/// NH: facility_id,name,county_id,lat,lon,beds,starting_occupancy.
std::vector<FacilityInfo> read_roster_csv(Category category, const std::filesystem::path& path);
void write_roster_csv(Category category, const std::filesystem::path& path, const std::vector<FacilityInfo>& rows);

} // namespace pflow
