#include "pflow/network.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

#include "pflow/csv.hpp"

namespace pflow {

int scale_beds(int beds, long long n_agents, long long reference_population)
{
    if (beds < 1 || n_agents < 1 || reference_population < n_agents)
        throw InputError("scale_beds: need beds >= 1 and 1 <= n <= p");
    // round(B*n/p) half-up in exact integer arithmetic.
    const auto num = static_cast<__int128>(2) * beds * n_agents + reference_population;
    const auto scaled = static_cast<long long>(num / (static_cast<__int128>(2) * reference_population));
    return static_cast<int>(std::max<long long>(1, scaled));
}

Facility Facility::community()
{
    Facility f;
    f.info_.id = FacilityId{-1};
    f.info_.name = "community";
    f.info_.category = Category::Community;
    f.placeholders_set_ = true;
    return f;
}

Facility::Facility(FacilityInfo info, int capacity_nonicu, int capacity_icu)
    : info_(std::move(info)), capacity_nonicu_(capacity_nonicu), capacity_icu_(capacity_icu)
{
    if (info_.category == Category::Community)
        throw LogicError("use Facility::community() for the community node");
    if (capacity_nonicu_ < 0 || capacity_icu_ < 0)
        throw InputError("negative bed capacity for facility " + std::to_string(to_int(info_.id)));
    if (info_.category != Category::Stach && capacity_icu_ != 0)
        throw InputError("only hospitals have ICU beds (facility " + std::to_string(to_int(info_.id)) + ")");
}

int Facility::free_beds(BedType b) const
{
    if (is_community())
        return std::numeric_limits<int>::max();
    return capacity(b) - occupied(b);
}

bool Facility::has_open_bed(BedRequest request) const
{
    switch (request) {
    case BedRequest::NonIcu:
        return free_beds(BedType::NonIcu) > 0;
    case BedRequest::Icu:
        return free_beds(BedType::Icu) > 0;
    case BedRequest::Any:
        return free_beds(BedType::NonIcu) > 0 || free_beds(BedType::Icu) > 0;
    }
    return false;
}

void Facility::set_placeholders(int nonicu, int icu)
{
    if (placeholders_set_)
        throw LogicError("placeholders already fixed for facility " + std::to_string(to_int(info_.id)));
    if (nonicu < 0 || icu < 0 || nonicu > capacity_nonicu_ || icu > capacity_icu_)
        throw LogicError("placeholder count exceeds capacity at facility " + std::to_string(to_int(info_.id)));
    if (agent_count() > 0)
        throw LogicError("placeholders must be set before admitting agents");
    placeholders_nonicu_ = nonicu;
    placeholders_icu_ = icu;
    placeholders_set_ = true;
}

AdmitOutcome Facility::admit(const Agent& agent, BedType bed)
{
    if (!agent.alive)
        throw LogicError("cannot admit dead agent " + std::to_string(agent.id));
    if (is_community()) {
        ++agents_nonicu_;
        return AdmitOutcome::Admitted;
    }
    if (occupants_.contains(agent.id))
        throw LogicError("agent " + std::to_string(agent.id) + " is already at facility " +
                         std::to_string(to_int(info_.id)));
    if (free_beds(bed) <= 0)
        return AdmitOutcome::Full;
    occupants_.emplace(agent.id, bed);
    (bed == BedType::Icu ? agents_icu_ : agents_nonicu_) += 1;
    return AdmitOutcome::Admitted;
}

BedType Facility::discharge(AgentId id)
{
    if (is_community()) {
        if (agents_nonicu_ == 0)
            throw LogicError("community is empty");
        --agents_nonicu_;
        return BedType::NonIcu;
    }
    const auto it = occupants_.find(id);
    if (it == occupants_.end())
        throw LogicError("agent " + std::to_string(id) + " is not an occupant of facility " +
                         std::to_string(to_int(info_.id)));
    const BedType bed = it->second;
    occupants_.erase(it);
    (bed == BedType::Icu ? agents_icu_ : agents_nonicu_) -= 1;
    return bed;
}

Network::Network()
{
    slots_.push_back(Facility::community());
    by_category_[index_of(Category::Community)].push_back(kCommunitySlot);
}

LocationIndex Network::add(Facility facility)
{
    if (facility.is_community())
        throw LogicError("the network already has its community node");
    if (by_id_.contains(facility.id()))
        throw InputError("duplicate facility id " + std::to_string(to_int(facility.id())));
    const auto slot = static_cast<LocationIndex>(slots_.size());
    by_id_.emplace(facility.id(), slot);
    by_category_[index_of(facility.category())].push_back(slot);
    slots_.push_back(std::move(facility));
    return slot;
}

LocationIndex Network::slot_of(FacilityId id) const
{
    const auto it = by_id_.find(id);
    if (it == by_id_.end())
        throw InputError("unknown facility id " + std::to_string(to_int(id)));
    return it->second;
}

namespace {

std::vector<std::string> roster_header(Category c)
{
    switch (c) {
    case Category::Stach:
        return {"facility_id", "name", "county_id", "lat", "lon", "beds_nonicu", "beds_icu", "pct_out_of_state"};
    case Category::Ltach:
        return {"facility_id", "name", "county_id", "lat", "lon", "beds"};
    case Category::Nh:
        return {"facility_id", "name", "county_id", "lat", "lon", "beds", "starting_occupancy"};
    case Category::Community:
        break;
    }
    throw LogicError("no roster file for the community");
}

} // namespace

std::vector<FacilityInfo> read_roster_csv(Category category, const std::filesystem::path& path)
{
    csv::Reader reader(path, roster_header(category));
    std::vector<FacilityInfo> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        FacilityInfo info;
        info.category = category;
        info.id = FacilityId{reader.as_int(f[0], "facility_id")};
        info.name = f[1];
        info.county = CountyId{reader.as_int(f[2], "county_id")};
        info.geocode = {reader.as_double(f[3], "lat"), reader.as_double(f[4], "lon")};
        try {
            validate(info.geocode);
        } catch (const InputError& e) {
            throw InputError(reader.where(e.what()));
        }
        info.beds_nonicu = reader.as_int(f[5], category == Category::Stach ? "beds_nonicu" : "beds");
        if (category == Category::Stach) {
            info.beds_icu = reader.as_int(f[6], "beds_icu");
            const double pct = reader.as_double(f[7], "pct_out_of_state");
            if (pct < 0.0 || pct > 100.0)
                throw InputError(reader.where("pct_out_of_state must be within [0, 100]"));
            info.out_of_state_pct = pct;
        } else if (category == Category::Nh) {
            info.starting_occupancy = reader.as_int(f[6], "starting_occupancy");
            if (info.starting_occupancy < 0 || info.starting_occupancy > info.beds_nonicu)
                throw InputError(reader.where("starting_occupancy must be within [0, beds]"));
        }
        if (info.beds_nonicu < 0 || info.beds_icu < 0 || info.total_beds() < 1)
            throw InputError(reader.where("facility needs at least one bed"));
        rows.push_back(std::move(info));
    }
    return rows;
}

void write_roster_csv(Category category, const std::filesystem::path& path, const std::vector<FacilityInfo>& rows)
{
    std::ofstream out(path);
    if (!out)
        throw InputError(path.string() + ": cannot write");
    const auto header = roster_header(category);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
        out << to_int(r.id) << ',' << csv::escape(r.name) << ',' << to_int(r.county) << ',' << r.geocode.latitude
            << ',' << r.geocode.longitude << ',' << r.beds_nonicu;
        if (category == Category::Stach)
            out << ',' << r.beds_icu << ',' << r.out_of_state_pct;
        else if (category == Category::Nh)
            out << ',' << r.starting_occupancy;
        out << '\n';
    }
}

} // namespace pflow
