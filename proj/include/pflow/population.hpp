#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pflow/rng.hpp"
#include "pflow/types.hpp"

namespace pflow {

enum class Sex : std::uint8_t { Female, Male };

/// One row of the synthetic population file.
struct PersonRow
{
    CountyId county{};
    Sex sex = Sex::Female;
    int age_years = 0;

    bool operator==(const PersonRow&) const = default;
};

/// Probability of concurrent conditions by age group.
inline constexpr std::array<double, kAgeGroupCount> kComorbidityProbability{0.0, 0.2374, 0.5497};

struct Agent
{
    AgentId id = 0;
    AgeGroup age_group = AgeGroup::Under50;
    CountyId county{};
    Sex sex = Sex::Female;
    bool concurrent_conditions = false;
    bool alive = true;
    LocationIndex location = kCommunitySlot;
    std::optional<Day> leave_day;
    std::optional<LocationIndex> previous_location;
    std::optional<BedType> current_bed;

    bool in_community() const { return location == kCommunitySlot; }
};

AgeGroup bin_age(int age_years);

/// Appends uniform duplicates of the original rows until there are `target` rows.
std::vector<PersonRow> expand_population(std::span<const PersonRow> rows, std::size_t target, Rng& rng);

bool assign_comorbidity(AgeGroup group, Rng& rng);

/// Draws n distinct rows uniformly without replacement. Agents get ids 0..n-1 in
/// draw order and start alive in the community. The first k draws do not depend
/// on n, so a seed yields nested rosters.
std::vector<Agent> sample_agents(std::span<const PersonRow> rows, std::size_t n, Rng& rng);

/// Reads `county_id,sex,age_years`.
std::vector<PersonRow> read_population_csv(const std::filesystem::path& path);
void write_population_csv(const std::filesystem::path& path, std::span<const PersonRow> rows);

} // namespace pflow
