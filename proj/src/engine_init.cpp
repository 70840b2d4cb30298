#include <algorithm>
#include <cmath>
#include <map>

#include "pflow/engine.hpp"

namespace pflow {

double IcuModel::probability(AgeGroup age, bool concurrent_conditions, int los_days, int hospital_beds) const
{
    const auto& c = coefficients;
    const double z = c.intercept + (age == AgeGroup::From50To64 ? c.age1 : 0.0) +
                     (age == AgeGroup::Over65 ? c.age2 : 0.0) + (concurrent_conditions ? c.comorbid : 0.0) +
                     c.los * los_days + c.bedcount * hospital_beds / 100.0;
    const double logistic = 1.0 / (1.0 + std::exp(-z));
    return std::clamp(multiplier * logistic, 0.0, 1.0);
}

BedType assign_icu(const IcuModel& model, const Agent& agent, int hospital_beds, int los_days, Rng& rng)
{
    const double p = model.probability(agent.age_group, agent.concurrent_conditions, los_days, hospital_beds);
    return rng.bernoulli(p) ? BedType::Icu : BedType::NonIcu;
}

double estimated_nonicu_census(const HospitalRecord& h)
{
    return static_cast<double>(h.beds_nonicu) / h.total_beds() * h.total_discharges * h.mean_los / 365.0;
}

double estimated_icu_census(const HospitalRecord& h)
{
    return static_cast<double>(h.beds_icu) / h.total_beds() * h.total_discharges * h.mean_los / 365.0;
}

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

} // namespace

std::vector<StartingCounts> compute_starting_capacity(const std::vector<HospitalRecord>& records,
                                                      const std::vector<StartingCounts>& scaled_beds, double scale,
                                                      double fill_nonicu, double fill_icu)
{
    if (!(fill_nonicu > 0.0) || !(fill_icu > 0.0) || fill_nonicu > 1.0 || fill_icu > 1.0)
        throw InputError("hospital fill parameters must be in (0, 1]");
    if (records.size() != scaled_beds.size())
        throw LogicError("compute_starting_capacity: records and beds differ in length");
    double est_n = 0.0, est_i = 0.0, beds_n = 0.0, beds_i = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        est_n += estimated_nonicu_census(records[k]) * scale;
        est_i += estimated_icu_census(records[k]) * scale;
        beds_n += scaled_beds[k].nonicu;
        beds_i += scaled_beds[k].icu;
    }
    // R = fill / (fleet estimated census / fleet beds)
    const double ratio_n = est_n > 0.0 ? fill_nonicu / (est_n / beds_n) : 0.0;
    const double ratio_i = est_i > 0.0 ? fill_icu / (est_i / beds_i) : 0.0;
    std::vector<StartingCounts> out(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        out[k].nonicu = std::clamp(round_half_up(ratio_n * estimated_nonicu_census(records[k]) * scale), 0,
                                   scaled_beds[k].nonicu);
        out[k].icu =
            std::clamp(round_half_up(ratio_i * estimated_icu_census(records[k]) * scale), 0, scaled_beds[k].icu);
    }
    return out;
}

int assign_placeholders(int capacity, double out_of_state_share)
{
    if (out_of_state_share < 0.0 || out_of_state_share > 1.0)
        throw InputError("out-of-state share must be in [0, 1]");
    return round_half_up(capacity * out_of_state_share);
}

Eigen::VectorXd inverse_distance_weights(const Eigen::VectorXd& miles)
{
    const Eigen::VectorXd w = miles.cwiseMax(1.0).cwiseInverse();
    return w / w.sum();
}

namespace {

void place_initial(ModelState& s, AgentId id, LocationIndex slot, BedType bed)
{
    Agent& agent = s.agents[id];
    Facility& f = s.network.at(slot);
    if (f.admit(agent, bed) != AdmitOutcome::Admitted)
        throw LogicError("initial fill exceeded capacity at facility " + std::to_string(to_int(f.id())));
    s.network.community().discharge(agent.id);
    agent.location = slot;
    agent.current_bed = bed;
    const Day leave = s.day + sample_remaining_los(s.remaining_los[static_cast<std::size_t>(slot)], s.rng);
    agent.leave_day = leave;
    if (s.calendar.size() <= static_cast<std::size_t>(leave))
        s.calendar.resize(static_cast<std::size_t>(leave) + 1);
    s.calendar[static_cast<std::size_t>(leave)].push_back(agent.id);
}

std::optional<AgentId> take_from_pool(ModelState& s, std::size_t county, AgeGroup age)
{
    auto& bucket = s.init_pool[county][index_of(age)];
    if (bucket.empty())
        return std::nullopt;
    const auto k = static_cast<std::size_t>(s.rng.uniform_below(bucket.size()));
    const AgentId id = bucket[k];
    bucket[k] = bucket.back();
    bucket.pop_back();
    return id;
}

constexpr int kMaxFillDraws = 10000;

template <typename DrawCounty, typename DrawAge>
AgentId draw_fill_agent(ModelState& s, const Facility& f, DrawCounty&& draw_county, DrawAge&& draw_age)
{
    for (int attempt = 0; attempt < kMaxFillDraws; ++attempt) {
        const std::size_t county = draw_county();
        const AgeGroup age = draw_age();
        if (auto id = take_from_pool(s, county, age))
            return *id;
    }
    throw InputError("cannot fill facility " + std::to_string(to_int(f.id())) +
                     ": no eligible community agents left in its source counties");
}

} // namespace

void fill_hospitals(ModelState& s, const std::vector<StartingCounts>& agent_counts)
{
    const auto& hospitals = s.network.slots_in(Category::Stach);
    if (agent_counts.size() != hospitals.size())
        throw LogicError("fill_hospitals: one count per hospital expected");
    const auto& age_dist = s.tables->hospital_age;
    const DiscreteSampler age_sampler(std::span<const double>(age_dist.data(), kAgeGroupCount));
    std::unordered_map<FacilityId, const HospitalRecord*> records;
    for (const auto& r : s.tables->hospitals.records)
        records.emplace(r.id, &r);

    for (std::size_t k = 0; k < hospitals.size(); ++k) {
        const LocationIndex slot = hospitals[k];
        const Facility& f = s.network.at(slot);
        const HospitalRecord& rec = *records.at(f.id());
        std::vector<std::size_t> county_idx;
        std::vector<double> weights;
        for (const auto& [county, n] : rec.county_discharges) {
            if (n <= 0.0)
                continue;
            county_idx.push_back(s.county_index.at(county));
            weights.push_back(n);
        }
        if (weights.empty() && (agent_counts[k].nonicu > 0 || agent_counts[k].icu > 0))
            throw InputError("hospital " + std::to_string(to_int(f.id())) + " has no county discharges to fill from");
        const DiscreteSampler county_sampler(weights);
        const auto draw_county = [&] { return county_idx[county_sampler.sample(s.rng)]; };
        const auto draw_age = [&] { return age_group_from_int(static_cast<int>(age_sampler.sample(s.rng))); };
        for (BedType bed : {BedType::NonIcu, BedType::Icu}) {
            const int count = bed == BedType::Icu ? agent_counts[k].icu : agent_counts[k].nonicu;
            for (int i = 0; i < count; ++i)
                place_initial(s, draw_fill_agent(s, f, draw_county, draw_age), slot, bed);
        }
    }
}

void fill_ltachs_and_nhs(ModelState& s)
{
    const double scale = static_cast<double>(s.params.n_agents) / static_cast<double>(s.params.population_reference);
    for (Category cat : {Category::Ltach, Category::Nh}) {
        const DistanceMatrix& dm = s.distances[index_of(cat)];
        for (LocationIndex slot : s.network.slots_in(cat)) {
            const Facility& f = s.network.at(slot);
            int target = 0;
            if (cat == Category::Ltach)
                target = round_half_up(s.params.ltach_fill * f.capacity(BedType::NonIcu));
            else
                target = round_half_up(f.info().starting_occupancy * scale);
            target = std::min(target, f.capacity(BedType::NonIcu));

            const Eigen::VectorXd weights = inverse_distance_weights(dm.miles().col(dm.facility_col(f.id())));
            std::vector<std::size_t> county_idx;
            for (CountyId c : dm.counties())
                county_idx.push_back(s.county_index.at(c));
            const DiscreteSampler county_sampler(
                std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
            const auto draw_county = [&] { return county_idx[county_sampler.sample(s.rng)]; };
            const auto draw_age = [&] {
                if (cat == Category::Nh)
                    return AgeGroup::Over65;
                return s.rng.bernoulli(s.params.ltach_65_plus) ? AgeGroup::Over65 : AgeGroup::From50To64;
            };
            for (int i = 0; i < target; ++i)
                place_initial(s, draw_fill_agent(s, f, draw_county, draw_age), slot, BedType::NonIcu);
        }
    }
}

std::vector<HospitalStart> plan_hospital_starts(const std::vector<HospitalRecord>& records,
                                                const std::vector<FacilityInfo>& stachs,
                                                const std::vector<CapacityOverrideRow>& overrides,
                                                const Parameters& p)
{
    const double scale = static_cast<double>(p.n_agents) / static_cast<double>(p.population_reference);
    std::unordered_map<FacilityId, const FacilityInfo*> info;
    for (const auto& f : stachs)
        info.emplace(f.id, &f);
    const auto scaled = [&](int beds) { return beds > 0 ? scale_beds(beds, p.n_agents, p.population_reference) : 0; };

    std::vector<HospitalStart> plan(records.size());
    std::vector<StartingCounts> beds(records.size());
    for (std::size_t k = 0; k < records.size(); ++k)
        beds[k] = plan[k].beds = {scaled(records[k].beds_nonicu), scaled(records[k].beds_icu)};

    if (p.use_facility_capacity_overrides) {
        std::unordered_map<FacilityId, const CapacityOverrideRow*> by_id;
        for (const auto& row : overrides)
            by_id.emplace(row.facility, &row);
        for (std::size_t k = 0; k < records.size(); ++k) {
            const auto it = by_id.find(records[k].id);
            if (it == by_id.end())
                throw InputError("capacity overrides enabled but hospital " + std::to_string(to_int(records[k].id)) +
                                 " has no row in stach_capacity.csv");
            plan[k].start = {std::clamp(round_half_up(it->second->start_nonicu * scale), 0, beds[k].nonicu),
                             std::clamp(round_half_up(it->second->start_icu * scale), 0, beds[k].icu)};
        }
    } else {
        const auto start = compute_starting_capacity(records, beds, scale, p.non_icu_fill, p.icu_fill);
        for (std::size_t k = 0; k < records.size(); ++k)
            plan[k].start = start[k];
    }

    for (std::size_t k = 0; k < records.size(); ++k) {
        HospitalStart& h = plan[k];
        const int total =
            assign_placeholders(h.start.nonicu + h.start.icu, info.at(records[k].id)->out_of_state_share());
        const double icu_share = static_cast<double>(h.beds.icu) / (h.beds.icu + h.beds.nonicu);
        const int icu = std::min({round_half_up(total * icu_share), h.beds.icu, h.start.icu});
        const int nonicu = std::min(total - icu, h.start.nonicu);
        h.placeholders = {nonicu, icu};
        h.agents = {h.start.nonicu - nonicu, h.start.icu - icu};
    }
    return plan;
}

namespace {

InitialOccupancy snapshot_occupancy(const ModelState& s)
{
    InitialOccupancy init;
    const auto fraction = [&](Category c, BedType b) {
        double occ = 0.0, cap = 0.0;
        for (LocationIndex slot : s.network.slots_in(c)) {
            occ += s.network.at(slot).occupied(b);
            cap += s.network.at(slot).capacity(b);
        }
        return cap > 0.0 ? occ / cap : 0.0;
    };
    init.stach_nonicu_fraction = fraction(Category::Stach, BedType::NonIcu);
    init.stach_icu_fraction = fraction(Category::Stach, BedType::Icu);
    init.ltach_fraction = fraction(Category::Ltach, BedType::NonIcu);
    init.nh_fraction = fraction(Category::Nh, BedType::NonIcu);
    Eigen::Vector3d ages = Eigen::Vector3d::Zero();
    for (LocationIndex slot : s.network.slots_in(Category::Stach))
        for (const auto& [id, bed] : s.network.at(slot).occupants())
            ages(index_of(s.agents[id].age_group)) += 1.0;
    init.hospital_agents = static_cast<long long>(ages.sum());
    if (ages.sum() > 0.0)
        init.hospital_age_shares = ages / ages.sum();
    for (const auto& f : s.network.facilities())
        init.census.push_back(f.census());
    return init;
}

} // namespace

ModelState initialize_model(const Scenario& scenario, const InitOptions& options)
{
    auto tables = std::make_shared<const TransitionTables>(build_transition_tables(scenario.data, scenario.parameters));
    return initialize_model(scenario, std::move(tables), options);
}

ModelState initialize_model(const Scenario& scenario, std::shared_ptr<const TransitionTables> tables,
                            const InitOptions& options)
{
    ModelState s;
    s.params = scenario.parameters;
    s.params.validate();
    s.tables = std::move(tables);
    s.rng = Rng(s.params.seed);
    s.log = EventLog(options.event_sink, options.keep_event_lines);
    const ScenarioData& data = scenario.data;

    for (const auto& c : data.counties) {
        s.county_index.emplace(c.id, s.counties.size());
        s.counties.push_back(c.id);
    }

    // Roster: duplicate up to the reference population, then sample.
    {
        const auto reference = static_cast<std::size_t>(s.params.population_reference);
        if (data.population.size() > reference)
            throw InputError("population file has more rows than population_reference");
        std::vector<PersonRow> expanded = data.population.size() < reference
                                              ? expand_population(data.population, reference, s.rng)
                                              : data.population;
        s.agents = sample_agents(expanded, static_cast<std::size_t>(s.params.n_agents), s.rng);
    }
    s.agent_county.reserve(s.agents.size());
    for (const auto& a : s.agents) {
        const auto it = s.county_index.find(a.county);
        if (it == s.county_index.end())
            throw InputError("population county " + std::to_string(to_int(a.county)) + " missing from counties.csv");
        s.agent_county.push_back(static_cast<std::uint32_t>(it->second));
    }
    for (const auto& a : s.agents)
        s.network.community().admit(a, BedType::NonIcu);

    // Network.
    const auto plan = plan_hospital_starts(s.tables->hospitals.records, data.stachs, data.capacity_overrides, s.params);
    std::unordered_map<FacilityId, const FacilityInfo*> stach_info;
    for (const auto& f : data.stachs)
        stach_info.emplace(f.id, &f);
    for (std::size_t k = 0; k < plan.size(); ++k) {
        const FacilityInfo& info = *stach_info.at(s.tables->hospitals.records[k].id);
        s.network.add(Facility(info, plan[k].beds.nonicu, plan[k].beds.icu));
    }
    const auto scaled = [&](int beds) { return beds > 0 ? scale_beds(beds, s.params.n_agents, s.params.population_reference) : 0; };
    for (const auto& info : data.ltachs)
        s.network.add(Facility(info, scaled(info.total_beds()), 0));
    for (const auto& info : data.nhs)
        s.network.add(Facility(info, scaled(info.total_beds()), 0));

    // LOS per slot.
    std::unordered_map<FacilityId, const LosRow*> los_rows;
    for (const auto& row : data.los)
        los_rows.emplace(row.facility, &row);
    s.los.resize(s.network.size());
    s.remaining_los.resize(s.network.size());
    s.input_beds.assign(s.network.size(), 0);
    std::map<std::pair<double, double>, RemainingLosDistribution> aged;
    for (std::size_t slot = 1; slot < s.network.size(); ++slot) {
        const Facility& f = s.network.at(static_cast<LocationIndex>(slot));
        s.input_beds[slot] = f.info().total_beds();
        if (f.category() == Category::Ltach) {
            s.los[slot] = fit_los(s.params.ltach_los_mean, s.params.ltach_los_sd);
        } else {
            const auto it = los_rows.find(f.id());
            if (it == los_rows.end())
                throw InputError("facility " + std::to_string(to_int(f.id())) + " has no row in los.csv");
            s.los[slot] = fit_los(it->second->mean_days, it->second->sd_days);
        }
        const std::pair key{s.los[slot].mean, s.los[slot].sd};
        auto ait = aged.find(key);
        if (ait == aged.end())
            ait = aged.emplace(key, age_distribution(s.los[slot], s.rng, options.aging)).first;
        s.remaining_los[slot] = ait->second;
    }

    // Geography.
    const std::size_t county_count = s.counties.size();
    for (Category cat : {Category::Stach, Category::Ltach, Category::Nh}) {
        auto& closest = s.closest[index_of(cat)];
        auto& radius = s.in_radius[index_of(cat)];
        closest.assign(county_count, {});
        radius.assign(county_count, {});
        if (s.network.count(cat) == 0)
            continue;
        s.distances[index_of(cat)] = distances_for(data, cat);
        const DistanceMatrix& dm = s.distances[index_of(cat)];
        for (LocationIndex slot : s.network.slots_in(cat))
            if (!dm.has_facility(s.network.at(slot).id()))
                throw InputError("distance file for " + std::string(to_string(cat)) + " lacks facility " +
                                 std::to_string(to_int(s.network.at(slot).id())));
        std::size_t n_closest = s.network.count(cat);
        if (cat == Category::Ltach)
            n_closest = static_cast<std::size_t>(s.params.ltach_closest_n);
        else if (cat == Category::Nh)
            n_closest = static_cast<std::size_t>(s.params.nursing_home_closest_n);
        for (std::size_t c = 0; c < county_count; ++c) {
            if (!dm.has_county(s.counties[c]))
                throw InputError("distance file for " + std::string(to_string(cat)) + " lacks county " +
                                 std::to_string(to_int(s.counties[c])));
            for (FacilityId id : dm.closest_n(s.counties[c], dm.facilities().size(), s.params.max_distance))
                if (s.network.contains(id))
                    radius[c].push_back(s.network.slot_of(id));
            closest[c].assign(radius[c].begin(), radius[c].begin() + static_cast<std::ptrdiff_t>(
                                                                          std::min(n_closest, radius[c].size())));
        }
    }

    s.hospital_choice_slots.assign(county_count, {});
    s.hospital_choice_weights.assign(county_count, {});
    for (const auto& rec : s.tables->hospitals.records) {
        const LocationIndex slot = s.network.slot_of(rec.id);
        for (const auto& [county, n] : rec.county_discharges) {
            const auto it = s.county_index.find(county);
            if (it == s.county_index.end() || n <= 0.0)
                continue;
            s.hospital_choice_slots[it->second].push_back(slot);
            s.hospital_choice_weights[it->second].push_back(n);
        }
    }

    s.community_rates.assign(county_count, {});
    for (std::size_t c = 0; c < county_count; ++c)
        for (int a = 0; a < kAgeGroupCount; ++a)
            s.community_rates[c][a] = s.tables->community.lookup(s.counties[c], age_group_from_int(a));

    s.icu.coefficients = s.params.icu;
    s.icu.multiplier = s.params.icu_multiplier;

    // Placeholders are fixed before anyone is admitted.
    std::vector<StartingCounts> agent_counts;
    const auto& hospital_slots = s.network.slots_in(Category::Stach);
    for (std::size_t k = 0; k < plan.size(); ++k) {
        s.network.at(hospital_slots[k]).set_placeholders(plan[k].placeholders.nonicu, plan[k].placeholders.icu);
        agent_counts.push_back(plan[k].agents);
    }
    for (std::size_t slot = 1; slot < s.network.size(); ++slot) {
        Facility& f = s.network.at(static_cast<LocationIndex>(slot));
        if (f.category() != Category::Stach)
            f.set_placeholders(0, 0);
    }

    // Fill from community pools.
    s.init_pool.assign(county_count, {});
    for (const auto& a : s.agents)
        s.init_pool[s.agent_county[a.id]][index_of(a.age_group)].push_back(a.id);
    fill_hospitals(s, agent_counts);
    fill_ltachs_and_nhs(s);
    s.init_pool.clear();
    s.init_pool.shrink_to_fit();

    // Tallies.
    s.report = RunReport{};
    for (const auto& f : s.network.facilities()) {
        FacilityTally t;
        t.id = f.id();
        t.category = f.category();
        t.placeholders = f.placeholders();
        s.report.facilities.push_back(std::move(t));
    }
    s.report.initial = snapshot_occupancy(s);
    return s;
}

} // namespace pflow
