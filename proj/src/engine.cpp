#include <algorithm>
#include <ostream>

#include "pflow/engine.hpp"

namespace pflow {

std::string_view to_string(EventKind e)
{
    switch (e) {
    case EventKind::Admit:
        return "admit";
    case EventKind::Discharge:
        return "discharge";
    case EventKind::Death:
        return "death";
    case EventKind::TurnedAway:
        return "turned_away";
    case EventKind::FullyTurnedAway:
        return "fully_turned_away";
    }
    return "unknown";
}

EventLog::EventLog(std::ostream* sink, bool keep_lines) : sink_(sink), keep_(keep_lines) {}

void EventLog::record(Day day, AgentId agent, EventKind kind, std::string_view from, std::string_view to,
                      std::string_view detail)
{
    buffer_.clear();
    buffer_ += std::to_string(day);
    buffer_ += ',';
    buffer_ += std::to_string(agent);
    buffer_ += ',';
    buffer_ += to_string(kind);
    buffer_ += ',';
    buffer_ += from;
    buffer_ += ',';
    buffer_ += to;
    buffer_ += ',';
    buffer_ += detail;
    buffer_ += '\n';
    for (unsigned char c : buffer_) {
        hash_ ^= c;
        hash_ *= 1099511628211ull;
    }
    ++count_;
    if (sink_)
        *sink_ << buffer_;
    if (keep_)
        lines_.emplace_back(buffer_.data(), buffer_.size() - 1);
}

namespace {

std::string label(const ModelState& s, LocationIndex slot)
{
    if (slot == kCommunitySlot)
        return "community";
    if (slot == kDeadLocation)
        return "dead";
    return std::to_string(to_int(s.network.at(slot).id()));
}

BedRequest request_for_category(Category c) { return c == Category::Stach ? BedRequest::Any : BedRequest::NonIcu; }

void schedule(ModelState& s, Agent& agent, Day leave)
{
    agent.leave_day = leave;
    if (s.calendar.size() <= static_cast<std::size_t>(leave))
        s.calendar.resize(static_cast<std::size_t>(leave) + 1);
    s.calendar[static_cast<std::size_t>(leave)].push_back(agent.id);
}

/// Removes the agent from wherever it is now and places it in `slot`, which
/// must have an open bed. LOS comes from the destination; ICU need is drawn for
/// hospitals, falling back to the other bed type when the wanted one is full.
void admit_to(ModelState& s, Agent& agent, LocationIndex slot)
{
    Facility& dest = s.network.at(slot);
    const int los = sample_los(s.los[static_cast<std::size_t>(slot)], s.rng);
    BedType bed = BedType::NonIcu;
    if (dest.category() == Category::Stach) {
        bed = assign_icu(s.icu, agent, s.input_beds[static_cast<std::size_t>(slot)], los, s.rng);
        if (dest.free_beds(bed) <= 0)
            bed = other(bed);
    }
    const LocationIndex from = agent.location;
    s.network.at(from).discharge(agent.id);
    if (dest.admit(agent, bed) != AdmitOutcome::Admitted)
        throw LogicError("admit_to: no open bed at facility " + std::to_string(to_int(dest.id())));
    agent.previous_location = from;
    agent.location = slot;
    agent.current_bed = bed;
    schedule(s, agent, s.day + los);

    auto& tally = s.report.facilities[static_cast<std::size_t>(slot)];
    ++tally.admissions;
    tally.los_sum += los;
    tally.los_sq_sum += static_cast<double>(los) * los;
    s.report.movements(index_of(s.category_of(from)), index_of(dest.category())) += 1;
    ++s.today.admissions;
    s.log.record(s.day, agent.id, EventKind::Admit, label(s, from), label(s, slot),
                 "los=" + std::to_string(los) + (bed == BedType::Icu ? ";bed=icu" : ";bed=nonicu"));
}

void send_home(ModelState& s, Agent& agent, std::string_view detail)
{
    const LocationIndex from = agent.location;
    s.network.at(from).discharge(agent.id);
    s.network.community().admit(agent, BedType::NonIcu);
    agent.previous_location = from;
    agent.location = kCommunitySlot;
    agent.current_bed.reset();
    agent.leave_day.reset();
    s.report.movements(index_of(s.category_of(from)), index_of(Category::Community)) += 1;
    s.log.record(s.day, agent.id, EventKind::Discharge, label(s, from), "community", detail);
}

void record_turned_away(ModelState& s, const Agent& agent, LocationIndex slot)
{
    s.turned_away.push_back({s.day, s.network.at(slot).id(), s.counties[s.county_of(agent)], agent.id});
    ++s.report.turned_away;
    ++s.today.turned_away;
    s.log.record(s.day, agent.id, EventKind::TurnedAway, label(s, agent.location), label(s, slot),
                 "county=" + std::to_string(to_int(s.counties[s.county_of(agent)])));
}

} // namespace

std::vector<Action> select_community_moves(ModelState& s)
{
    std::vector<Action> out;
    for (const Agent& a : s.agents) {
        if (!a.alive || !a.in_community())
            continue;
        const CommunityRates& r = s.community_rates[s.county_of(a)][index_of(a.age_group)];
        const double u = s.rng.uniform01();
        if (u < r.p_hospital)
            out.push_back({a.id, ActionKind::CommunityToStach, s.day});
        else if (u < r.p_hospital + r.p_nh && age_allows(Category::Nh, a.age_group))
            out.push_back({a.id, ActionKind::CommunityToNh, s.day});
    }
    return out;
}

std::vector<Action> select_discharges(const ModelState& s)
{
    std::vector<Action> out;
    if (static_cast<std::size_t>(s.day) >= s.calendar.size())
        return out;
    std::vector<AgentId> due = s.calendar[static_cast<std::size_t>(s.day)];
    std::sort(due.begin(), due.end());
    due.erase(std::unique(due.begin(), due.end()), due.end());
    for (AgentId id : due) {
        const Agent& a = s.agents[id];
        if (a.alive && !a.in_community() && a.leave_day == s.day)
            out.push_back({id, ActionKind::FacilityDischarge, s.day});
    }
    return out;
}

void shuffle_and_execute(ModelState& s, std::vector<Action>& actions)
{
    s.rng.shuffle(actions);
    for (const Action& act : actions) {
        Agent& agent = s.agents[act.agent];
        bool valid = agent.alive && act.day == s.day;
        if (act.kind == ActionKind::FacilityDischarge)
            valid = valid && !agent.in_community() && agent.leave_day == s.day;
        else
            valid = valid && agent.in_community();
        if (!valid) {
            ++s.report.skipped_actions;
            ++s.today.skipped_actions;
            continue;
        }
        switch (act.kind) {
        case ActionKind::CommunityToStach:
            handle_community_move(s, agent, Category::Stach);
            break;
        case ActionKind::CommunityToNh:
            handle_community_move(s, agent, Category::Nh);
            break;
        case ActionKind::FacilityDischarge:
            handle_end_of_stay(s, agent);
            break;
        }
    }
}

void handle_end_of_stay(ModelState& s, Agent& agent)
{
    const LocationIndex source = agent.location;
    const Facility& src = s.network.at(source);
    const Category cat = src.category();

    if (s.rng.bernoulli(s.tables->death.at(cat))) {
        s.network.at(source).discharge(agent.id);
        agent.alive = false;
        agent.previous_location = source;
        agent.location = kDeadLocation;
        agent.current_bed.reset();
        agent.leave_day.reset();
        ++s.report.deaths;
        ++s.today.deaths;
        ++s.today.discharges;
        s.log.record(s.day, agent.id, EventKind::Death, label(s, source), "dead", "");
        return;
    }

    Category dest = Category::Community;
    std::optional<LocationIndex> target;
    const bool from_nh = agent.previous_location && *agent.previous_location > kCommunitySlot &&
                         s.category_of(*agent.previous_location) == Category::Nh;
    if (cat == Category::Stach && from_nh && age_allows(Category::Nh, agent.age_group) &&
        s.rng.bernoulli(s.params.nh_stach_nh)) {
        // Back to the nursing home the agent came from.
        dest = Category::Nh;
        target = *agent.previous_location;
    } else {
        const TransitionRow& row = s.tables->facility.row(cat, src.id(), agent.age_group);
        const std::size_t k = s.rng.weighted_index(std::span<const double>(row.data(), kCategoryCount));
        dest = static_cast<Category>(k);
        if (dest != Category::Community)
            target = select_first_choice_facility(s, agent, dest, source);
    }

    ++s.today.discharges;
    if (dest == Category::Community) {
        send_home(s, agent, "");
        return;
    }
    s.report.max_transfer_attempts = std::max(s.report.max_transfer_attempts, 1);
    if (target && s.network.at(*target).has_open_bed(request_for_category(dest))) {
        s.log.record(s.day, agent.id, EventKind::Discharge, label(s, source), label(s, *target), "transfer");
        admit_to(s, agent, *target);
        return;
    }
    if (target)
        record_turned_away(s, agent, *target);
    send_home(s, agent, "turned_away");
}

void handle_community_move(ModelState& s, Agent& agent, Category category)
{
    const auto first = select_first_choice_facility(s, agent, category);
    std::optional<LocationIndex> slot;
    if (first)
        slot = resolve_capacity_fallback(s, agent, category, *first);
    else {
        s.fully_turned_away.push_back({s.day, FacilityId{-1}, s.counties[s.county_of(agent)], agent.id});
        ++s.report.fully_turned_away;
        ++s.today.fully_turned_away;
        s.log.record(s.day, agent.id, EventKind::FullyTurnedAway, "community", std::string(to_string(category)),
                     "no_facility_in_range");
    }
    if (slot)
        admit_to(s, agent, *slot);
}

std::optional<LocationIndex> select_first_choice_facility(ModelState& s, const Agent& agent, Category category,
                                                          std::optional<LocationIndex> exclude)
{
    if (category == Category::Community)
        throw LogicError("select_first_choice_facility: community is not a facility");
    if (!age_allows(category, agent.age_group))
        return std::nullopt;
    const std::size_t county = s.county_of(agent);
    std::vector<LocationIndex> slots;
    std::vector<double> weights;
    if (category == Category::Stach) {
        slots = s.hospital_choice_slots[county];
        weights = s.hospital_choice_weights[county];
    } else {
        const DistanceMatrix& dm = s.distances[index_of(category)];
        slots = s.closest[index_of(category)][county];
        for (LocationIndex slot : slots)
            weights.push_back(1.0 / std::max(dm.at(s.counties[county], s.network.at(slot).id()), 1.0));
    }
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (exclude && slots[i] == *exclude)
            weights[i] = 0.0;
    double total = 0.0;
    for (double w : weights)
        total += w;
    if (!(total > 0.0))
        return std::nullopt;
    return slots[s.rng.weighted_index(weights)];
}

std::vector<LocationIndex> fallback_candidates(const ModelState& s, const Agent& agent, Category category,
                                               LocationIndex first_choice)
{
    const std::size_t county = s.county_of(agent);
    const CountyId home = s.counties[county];
    const auto& radius = s.in_radius[index_of(category)][county];
    std::vector<LocationIndex> out{first_choice};
    const auto push = [&](LocationIndex slot) {
        if (std::find(out.begin(), out.end(), slot) == out.end())
            out.push_back(slot);
    };
    for (LocationIndex slot : radius)
        if (s.network.at(slot).info().county == home)
            push(slot);
    for (LocationIndex slot : radius)
        push(slot);
    std::size_t limit = out.size();
    if (category == Category::Ltach)
        limit = static_cast<std::size_t>(s.params.ltach_attempts);
    else if (category == Category::Nh)
        limit = static_cast<std::size_t>(s.params.nursing_home_attempts);
    if (out.size() > limit)
        out.resize(limit);
    return out;
}

std::optional<LocationIndex> resolve_capacity_fallback(ModelState& s, const Agent& agent, Category category,
                                                       LocationIndex first_choice)
{
    const auto candidates = fallback_candidates(s, agent, category, first_choice);
    int attempts = 0;
    for (LocationIndex slot : candidates) {
        ++attempts;
        auto& max_attempts = s.report.max_community_attempts[index_of(category)];
        max_attempts = std::max(max_attempts, attempts);
        if (s.network.at(slot).has_open_bed(request_for_category(category)))
            return slot;
        record_turned_away(s, agent, slot);
    }
    s.fully_turned_away.push_back({s.day, s.network.at(first_choice).id(), s.counties[s.county_of(agent)], agent.id});
    ++s.report.fully_turned_away;
    ++s.today.fully_turned_away;
    s.log.record(s.day, agent.id, EventKind::FullyTurnedAway, "community", label(s, first_choice),
                 "attempts=" + std::to_string(attempts));
    return std::nullopt;
}

DaySummary step(ModelState& s)
{
    s.today = DaySummary{};
    s.today.day = s.day;
    std::vector<Action> actions = select_community_moves(s);
    std::vector<Action> discharges = select_discharges(s);
    actions.insert(actions.end(), discharges.begin(), discharges.end());
    shuffle_and_execute(s, actions);
    if (static_cast<std::size_t>(s.day) < s.calendar.size()) {
        s.calendar[static_cast<std::size_t>(s.day)].clear();
        s.calendar[static_cast<std::size_t>(s.day)].shrink_to_fit();
    }

    int icu = 0;
    s.today.census.reserve(s.network.size());
    for (std::size_t slot = 0; slot < s.network.size(); ++slot) {
        const Facility& f = s.network.at(static_cast<LocationIndex>(slot));
        s.today.census.push_back(f.census());
        s.report.facilities[slot].census.push_back(f.census());
        if (f.category() == Category::Stach)
            icu += f.occupied(BedType::Icu);
    }
    s.today.icu_census = icu;
    s.report.icu_census.push_back(icu);
    ++s.day;
    ++s.report.days;
    s.report.event_hash = s.log.hash();
    s.report.event_count = s.log.size();
    s.report.daily.push_back(s.today);
    return s.today;
}

const RunReport& run(ModelState& s, int days)
{
    if (days < 0)
        throw InputError("days must be non-negative");
    for (int d = 0; d < days; ++d)
        step(s);
    return s.report;
}

std::vector<std::string> audit(const ModelState& s)
{
    std::vector<std::string> out;
    long long in_community = 0;
    for (const Agent& a : s.agents) {
        const std::string who = "agent " + std::to_string(a.id);
        if (!a.alive) {
            if (a.location != kDeadLocation)
                out.push_back(who + " is dead but has a location");
            continue;
        }
        if (a.location < 0 || static_cast<std::size_t>(a.location) >= s.network.size()) {
            out.push_back(who + " has an invalid location");
            continue;
        }
        const Facility& f = s.network.at(a.location);
        if (a.in_community()) {
            ++in_community;
            continue;
        }
        if (!f.contains(a.id))
            out.push_back(who + " is not in its facility's occupant list");
        if (!age_allows(f.category(), a.age_group))
            out.push_back(who + " violates the age rule at facility " + std::to_string(to_int(f.id())));
        if (!a.leave_day || *a.leave_day < s.day)
            out.push_back(who + " has no pending leave day");
    }
    if (in_community != s.network.at(kCommunitySlot).agent_count())
        out.push_back("community count does not match agent locations");
    for (std::size_t slot = 1; slot < s.network.size(); ++slot) {
        const Facility& f = s.network.at(static_cast<LocationIndex>(slot));
        for (BedType b : {BedType::NonIcu, BedType::Icu})
            if (f.occupied(b) > f.capacity(b))
                out.push_back("facility " + std::to_string(to_int(f.id())) + " is over capacity");
        if (f.placeholders() != s.report.facilities[slot].placeholders)
            out.push_back("facility " + std::to_string(to_int(f.id())) + " placeholder count changed");
        for (const auto& [id, bed] : f.occupants()) {
            const Agent& a = s.agents[id];
            if (!a.alive || a.location != static_cast<LocationIndex>(slot) || a.current_bed != bed)
                out.push_back("facility " + std::to_string(to_int(f.id())) + " lists agent " + std::to_string(id) +
                              " who is elsewhere");
        }
    }
    return out;
}

} // namespace pflow
