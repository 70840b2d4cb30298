#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pflow/geography.hpp"
#include "pflow/los.hpp"
#include "pflow/network.hpp"
#include "pflow/parameters.hpp"
#include "pflow/population.hpp"
#include "pflow/rng.hpp"
#include "pflow/scenario.hpp"
#include "pflow/transitions.hpp"

namespace pflow {

/// Location of agents who have died.
inline constexpr LocationIndex kDeadLocation = -1;

// ---------------------------------------------------------------------------
// ICU assignment

struct IcuModel
{
    IcuCoefficients coefficients;
    double multiplier = 1.0;

    /// clamp01(multiplier * logistic(linear predictor)).
    double probability(AgeGroup age, bool concurrent_conditions, int los_days, int hospital_beds) const;
};

BedType assign_icu(const IcuModel& model, const Agent& agent, int hospital_beds, int los_days, Rng& rng);

// ---------------------------------------------------------------------------
// Starting capacity

struct StartingCounts
{
    int nonicu = 0;
    int icu = 0;
};

/// Average non-ICU / ICU census implied by discharge data:
/// (beds of that type / total beds) * discharges * mean LOS / 365.
double estimated_nonicu_census(const HospitalRecord& h);
double estimated_icu_census(const HospitalRecord& h);

/// Hospital starting counts. Each estimate is multiplied by a fleet-wide
/// ratio so that total occupancy over total scaled beds equals the fill
/// parameter, then rounded and clamped to the scaled beds. `scale` is
/// n_agents / population_reference; `scaled_beds` is parallel to `records`.
std::vector<StartingCounts> compute_starting_capacity(const std::vector<HospitalRecord>& records,
                                                      const std::vector<StartingCounts>& scaled_beds, double scale,
                                                      double fill_nonicu, double fill_icu);

/// round(capacity * out_of_state_share)
int assign_placeholders(int capacity, double out_of_state_share);

/// Day-0 plan for one hospital: occupied beds, the placeholder part of them
/// (split across bed types in proportion to capacity) and the agent part.
struct HospitalStart
{
    StartingCounts beds;
    StartingCounts start;
    StartingCounts placeholders;
    StartingCounts agents;
};

/// Starting plan for every hospital record (roster order), from either the
/// fill parameters or the per-hospital overrides when enabled.
std::vector<HospitalStart> plan_hospital_starts(const std::vector<HospitalRecord>& records,
                                                const std::vector<FacilityInfo>& stachs,
                                                const std::vector<CapacityOverrideRow>& overrides,
                                                const Parameters& params);

// ---------------------------------------------------------------------------
// Actions, events and tallies

enum class ActionKind : std::uint8_t { CommunityToStach, CommunityToNh, FacilityDischarge };

struct Action
{
    AgentId agent = 0;
    ActionKind kind = ActionKind::FacilityDischarge;
    Day day = 0;

    bool operator==(const Action&) const = default;
};

enum class EventKind : std::uint8_t { Admit, Discharge, Death, TurnedAway, FullyTurnedAway };
std::string_view to_string(EventKind e);

/// Append-only event log: `day,agent_id,event,from,to,detail`. Lines go to an
/// optional stream and/or memory; a running FNV-1a hash covers every byte.
class EventLog
{
  public:
    static constexpr const char* kHeader = "day,agent_id,event,from,to,detail";

    explicit EventLog(std::ostream* sink = nullptr, bool keep_lines = false);

    void record(Day day, AgentId agent, EventKind kind, std::string_view from, std::string_view to,
                std::string_view detail);

    std::uint64_t hash() const { return hash_; }
    std::size_t size() const { return count_; }
    const std::vector<std::string>& lines() const { return lines_; }

  private:
    std::ostream* sink_;
    bool keep_;
    std::uint64_t hash_ = 14695981039346656037ull;
    std::size_t count_ = 0;
    std::vector<std::string> lines_;
    std::string buffer_;
};

struct TurnedAwayRecord
{
    Day day = 0;
    FacilityId facility{}; ///< for fully-turned-away records: the first choice
    CountyId county{};
    AgentId agent = 0;
};

using FlowCounts = Eigen::Matrix<long long, kCategoryCount, kCategoryCount>;

struct FacilityTally
{
    FacilityId id{};
    Category category = Category::Community;
    long long admissions = 0;
    double los_sum = 0.0;
    double los_sq_sum = 0.0;
    std::vector<int> census; ///< end-of-day occupancy including placeholders, one per simulated day
    int placeholders = 0;
};

struct DaySummary
{
    Day day = 0;
    long long admissions = 0;
    long long discharges = 0;
    long long deaths = 0;
    long long turned_away = 0;
    long long fully_turned_away = 0;
    long long skipped_actions = 0;
    int icu_census = 0;
    std::vector<int> census; ///< per network slot
};

/// Occupancy right after initialization.
struct InitialOccupancy
{
    double stach_nonicu_fraction = 0.0;
    double stach_icu_fraction = 0.0;
    double ltach_fraction = 0.0;
    double nh_fraction = 0.0;
    Eigen::Vector3d hospital_age_shares = Eigen::Vector3d::Zero();
    long long hospital_agents = 0;
    std::vector<int> census; ///< per network slot
};

/// Raw run tallies consumed by the pattern checks.
struct RunReport
{
    int days = 0;
    std::vector<FacilityTally> facilities; ///< per network slot; slot 0 is the community
    FlowCounts movements = FlowCounts::Zero();
    std::vector<int> icu_census; ///< fleet ICU census per day
    std::vector<DaySummary> daily;
    long long deaths = 0;
    long long turned_away = 0;
    long long fully_turned_away = 0;
    long long skipped_actions = 0;
    int max_transfer_attempts = 0;
    std::array<int, kCategoryCount> max_community_attempts{};
    InitialOccupancy initial;
    std::uint64_t event_hash = 0;
    std::size_t event_count = 0;
};

// ---------------------------------------------------------------------------
// Model state

struct ModelState
{
    Parameters params;
    std::shared_ptr<const TransitionTables> tables;
    Network network;
    std::vector<Agent> agents;
    IcuModel icu;
    Rng rng{0};
    Day day = 0;

    // Per network slot.
    std::vector<LosDistribution> los;
    std::vector<RemainingLosDistribution> remaining_los;
    std::vector<int> input_beds; ///< unscaled total beds, used by the ICU model

    // Geography, per category, indexed by dense county index.
    std::vector<CountyId> counties;
    std::unordered_map<CountyId, std::size_t> county_index;
    std::array<DistanceMatrix, kCategoryCount> distances;
    /// Community and transfer first choices for hospitals, by county: slots and
    /// discharge-count weights.
    std::vector<std::vector<LocationIndex>> hospital_choice_slots;
    std::vector<std::vector<double>> hospital_choice_weights;
    /// Closest-N in-radius facilities per county for LTACH and NH, ascending distance.
    std::array<std::vector<std::vector<LocationIndex>>, kCategoryCount> closest;
    /// All in-radius facilities per county, ascending distance.
    std::array<std::vector<std::vector<LocationIndex>>, kCategoryCount> in_radius;
    /// Daily community rates per dense county index and age group.
    std::vector<std::array<CommunityRates, kAgeGroupCount>> community_rates;

    /// Dense county index of every agent.
    std::vector<std::uint32_t> agent_county;

    /// Community agents by (dense county, age group); only used while filling
    /// facilities at initialization.
    std::vector<std::array<std::vector<AgentId>, kAgeGroupCount>> init_pool;

    /// Agents due to leave on a given day.
    std::vector<std::vector<AgentId>> calendar;
    DaySummary today;

    EventLog log;
    std::vector<TurnedAwayRecord> turned_away;
    std::vector<TurnedAwayRecord> fully_turned_away;
    RunReport report;

    std::size_t county_of(const Agent& a) const { return agent_county[a.id]; }
    Category category_of(LocationIndex slot) const { return network.at(slot).category(); }
};

struct InitOptions
{
    std::ostream* event_sink = nullptr;
    bool keep_event_lines = false;
    AgingOptions aging;
};

/// Builds tables, roster, network and starting occupancy from a scenario.
ModelState initialize_model(const Scenario& scenario, const InitOptions& options = {});

/// Same, with tables already built (they are immutable and can be shared).
ModelState initialize_model(const Scenario& scenario, std::shared_ptr<const TransitionTables> tables,
                            const InitOptions& options = {});

void fill_hospitals(ModelState& state, const std::vector<StartingCounts>& agent_counts);
void fill_ltachs_and_nhs(ModelState& state);

/// Inverse-distance county weights 1/max(d, 1 mile), normalized over counties.
Eigen::VectorXd inverse_distance_weights(const Eigen::VectorXd& miles);

// Daily loop.
std::vector<Action> select_community_moves(ModelState& state);
std::vector<Action> select_discharges(const ModelState& state);
void shuffle_and_execute(ModelState& state, std::vector<Action>& actions);
void handle_end_of_stay(ModelState& state, Agent& agent);
void handle_community_move(ModelState& state, Agent& agent, Category category);

/// First-choice facility slot, or nullopt when none is reachable. `exclude`
/// removes one slot from consideration (the source of a transfer).
std::optional<LocationIndex> select_first_choice_facility(ModelState& state, const Agent& agent, Category category,
                                                          std::optional<LocationIndex> exclude = std::nullopt);

/// Ordered list of facilities a community arrival tries: the first choice,
/// then home-county facilities, then other in-radius ones by distance,
/// truncated to the category's attempt limit.
std::vector<LocationIndex> fallback_candidates(const ModelState& state, const Agent& agent, Category category,
                                               LocationIndex first_choice);

/// Tries candidates in order and returns the first with an open bed, logging
/// every rejection; nullopt (and a fully-turned-away record) when all are full.
std::optional<LocationIndex> resolve_capacity_fallback(ModelState& state, const Agent& agent, Category category,
                                                       LocationIndex first_choice);

DaySummary step(ModelState& state);
/// Runs `days` more steps and returns the cumulative report.
const RunReport& run(ModelState& state, int days);

/// Structural invariant audit; returns one message per violation.
std::vector<std::string> audit(const ModelState& state);

} // namespace pflow
