#include "pflow/transitions.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace pflow {

Disposition disposition_from_string(std::string_view s)
{
    if (s == "community")
        return Disposition::Community;
    if (s == "hospital" || s == "stach")
        return Disposition::Hospital;
    if (s == "ltach")
        return Disposition::Ltach;
    if (s == "nh")
        return Disposition::Nh;
    if (s == "death")
        return Disposition::Death;
    throw InputError("unknown disposition '" + std::string(s) + "'");
}

std::string_view to_string(Disposition d)
{
    switch (d) {
    case Disposition::Community:
        return "community";
    case Disposition::Hospital:
        return "hospital";
    case Disposition::Ltach:
        return "ltach";
    case Disposition::Nh:
        return "nh";
    case Disposition::Death:
        return "death";
    }
    return "unknown";
}

double HospitalRecord::county_share(CountyId c) const
{
    double total = 0.0;
    double mine = 0.0;
    for (const auto& [county, n] : county_discharges) {
        total += n;
        if (county == c)
            mine = n;
    }
    return total > 0.0 ? mine / total : 0.0;
}

HospitalRecords build_hospital_records(const std::vector<FacilityInfo>& stachs, const std::vector<LosRow>& los,
                                       const std::vector<CountyShareRow>& shares)
{
    std::unordered_map<FacilityId, const LosRow*> los_by_id;
    for (const auto& row : los)
        los_by_id.emplace(row.facility, &row);
    std::unordered_map<FacilityId, std::map<int, double>> by_county;
    for (const auto& s : shares)
        by_county[s.facility][to_int(s.county)] += s.discharges;

    HospitalRecords out;
    for (const auto& h : stachs) {
        const auto lit = los_by_id.find(h.id);
        const auto cit = by_county.find(h.id);
        if (lit == los_by_id.end() || lit->second->total_discharges <= 0.0) {
            out.warnings.push_back("hospital " + std::to_string(to_int(h.id)) +
                                   " has no discharge summary and is excluded");
            continue;
        }
        if (cit == by_county.end()) {
            out.warnings.push_back("hospital " + std::to_string(to_int(h.id)) +
                                   " has no county-of-residence data and is excluded");
            continue;
        }
        HospitalRecord r;
        r.id = h.id;
        r.beds_nonicu = h.beds_nonicu;
        r.beds_icu = h.beds_icu;
        r.total_discharges = lit->second->total_discharges;
        r.mean_los = lit->second->mean_days;
        r.sd_los = lit->second->sd_days;
        r.out_of_state_share = h.out_of_state_share();
        for (const auto& [county, n] : cit->second)
            r.county_discharges.emplace_back(CountyId{county}, n);
        out.records.push_back(std::move(r));
    }
    return out;
}

PopulationCounts count_population(const std::vector<PersonRow>& rows, double scale)
{
    PopulationCounts counts;
    for (const auto& r : rows) {
        auto [it, inserted] = counts.try_emplace(r.county);
        if (inserted)
            it->second.fill(0.0);
        it->second[index_of(bin_age(r.age_years))] += scale;
    }
    return counts;
}

CommunityRates CommunityTransitionTable::lookup(CountyId c, AgeGroup a) const
{
    const auto it = rates_.find(c);
    return it == rates_.end() ? CommunityRates{} : it->second[index_of(a)];
}

CommunityTransitionTable build_community_transitions(const std::vector<CommunityAdmissionRow>& admissions,
                                                     const PopulationCounts& population,
                                                     std::vector<std::string>* warnings)
{
    const auto warn = [&](std::string msg) {
        if (warnings)
            warnings->push_back(std::move(msg));
    };
    CommunityTransitionTable table;
    for (const auto& row : admissions) {
        if (row.annual_admissions < 0.0)
            throw InputError("negative community admissions for county " + std::to_string(to_int(row.county)));
        if (row.category == Category::Ltach || row.category == Category::Community) {
            warn("community admissions to " + std::string(to_string(row.category)) + " ignored");
            continue;
        }
        if (row.category == Category::Nh && !age_allows(Category::Nh, row.age)) {
            if (row.annual_admissions > 0.0)
                warn("community NH admissions for age group " + std::to_string(index_of(row.age)) +
                     " in county " + std::to_string(to_int(row.county)) + " ignored");
            continue;
        }
        if (row.annual_admissions == 0.0)
            continue;
        const auto pit = population.find(row.county);
        const double pop = pit == population.end() ? 0.0 : pit->second[index_of(row.age)];
        if (!(pop > 0.0))
            throw InputError("community admissions for county " + std::to_string(to_int(row.county)) +
                             ", age group " + std::to_string(index_of(row.age)) + " but no population");
        const double daily = row.annual_admissions / (pop * 365.0);
        CommunityRates r = table.lookup(row.county, row.age);
        (row.category == Category::Stach ? r.p_hospital : r.p_nh) += daily;
        if (r.p_hospital > 1.0 || r.p_nh > 1.0 || r.p_hospital + r.p_nh > 1.0)
            throw InputError("daily community movement probability exceeds 1 for county " +
                             std::to_string(to_int(row.county)));
        table.set(row.county, row.age, r);
    }
    return table;
}

TransitionRow adjust_for_age(const TransitionRow& raw, AgeGroup age)
{
    TransitionRow row = raw;
    for (Category c : {Category::Ltach, Category::Nh})
        if (!age_allows(c, age))
            row(index_of(c)) = 0.0;
    const double total = row.sum();
    if (!(total > 0.0) || (row.array() < 0.0).any())
        throw InputError("transition row for age group " + std::to_string(index_of(age)) +
                         " has no allowed destination");
    return row / total;
}

const TransitionRow& FacilityTransitions::row(Category source, FacilityId facility, AgeGroup age) const
{
    switch (source) {
    case Category::Ltach:
        return ltach[index_of(age)];
    case Category::Nh:
        return nh[index_of(age)];
    case Category::Stach: {
        const auto it = hospital.find(facility);
        if (it == hospital.end())
            throw LogicError("no transition rows for hospital " + std::to_string(to_int(facility)));
        return it->second[index_of(age)];
    }
    case Category::Community:
        break;
    }
    throw LogicError("the community has no discharge transitions");
}

FacilityTransitions build_facility_transitions(const std::vector<DischargeRow>& discharges,
                                               const std::vector<HospitalRecord>& hospitals, const Parameters& p)
{
    std::unordered_map<FacilityId, std::array<TransitionRow, kAgeGroupCount>> raw;
    for (const auto& h : hospitals)
        raw[h.id].fill(TransitionRow::Zero());
    for (const auto& d : discharges) {
        if (d.count < 0.0)
            throw InputError("negative discharge count for facility " + std::to_string(to_int(d.facility)));
        if (d.disposition == Disposition::Death)
            continue;
        const auto it = raw.find(d.facility);
        if (it == raw.end())
            continue;
        it->second[index_of(d.age)](static_cast<int>(d.disposition)) += d.count;
    }

    FacilityTransitions out;
    for (auto& [id, rows] : raw) {
        TransitionRow pooled = TransitionRow::Zero();
        for (const auto& r : rows)
            pooled += r;
        auto& adjusted = out.hospital[id];
        for (int a = 0; a < kAgeGroupCount; ++a) {
            const AgeGroup age = age_group_from_int(a);
            const TransitionRow& source = rows[a].sum() > 0.0 ? rows[a] : pooled;
            try {
                adjusted[a] = adjust_for_age(source, age);
            } catch (const InputError& e) {
                throw InputError("hospital " + std::to_string(to_int(id)) + ": " + e.what());
            }
        }
    }

    const TransitionRow ltach_raw(1.0 - p.ltach_hospital - p.ltach_nh, p.ltach_hospital, 0.0, p.ltach_nh);
    const TransitionRow nh_raw(p.nh_community, 1.0 - p.nh_community, 0.0, 0.0);
    for (int a = 0; a < kAgeGroupCount; ++a) {
        out.ltach[a] = adjust_for_age(ltach_raw, age_group_from_int(a));
        out.nh[a] = adjust_for_age(nh_raw, age_group_from_int(a));
    }
    return out;
}

DeathRates build_death_rates(const std::vector<DischargeRow>& discharges, double nh_mean_los_days, const Parameters& p)
{
    double deaths = 0.0;
    double total = 0.0;
    for (const auto& d : discharges) {
        total += d.count;
        if (d.disposition == Disposition::Death)
            deaths += d.count;
    }
    if (!(total > 0.0))
        throw InputError("discharge data has no discharges");
    DeathRates r;
    r.by_category[index_of(Category::Stach)] = deaths / total;
    r.by_category[index_of(Category::Ltach)] = p.ltach_death;
    r.by_category[index_of(Category::Nh)] = std::min(1.0, p.nursing_home_death * nh_mean_los_days / 365.0);
    return r;
}

double weighted_mean_los(const std::vector<FacilityInfo>& facilities, const std::vector<LosRow>& los)
{
    std::unordered_set<FacilityId> ids;
    for (const auto& f : facilities)
        ids.insert(f.id);
    double days = 0.0;
    double weight = 0.0;
    for (const auto& row : los) {
        if (!ids.contains(row.facility))
            continue;
        days += row.mean_days * row.total_discharges;
        weight += row.total_discharges;
    }
    return weight > 0.0 ? days / weight : 0.0;
}

AgeDistribution build_hospital_age_distribution(const std::vector<DischargeRow>& discharges)
{
    AgeDistribution counts = AgeDistribution::Zero();
    for (const auto& d : discharges) {
        if (d.count < 0.0)
            throw InputError("negative discharge count");
        counts(index_of(d.age)) += d.count;
    }
    if (!(counts.sum() > 0.0))
        throw InputError("hospital age distribution: all discharge counts are zero");
    return counts / counts.sum();
}

FourByFour build_four_by_four(const ScenarioData& data, const TransitionTables& tables, const Parameters& p)
{
    const double scale = static_cast<double>(p.n_agents) / static_cast<double>(p.population_reference);
    FourByFour flows = FourByFour::Zero();
    const int C = index_of(Category::Community);
    const int S = index_of(Category::Stach);
    const int L = index_of(Category::Ltach);
    const int N = index_of(Category::Nh);

    for (const auto& [county, rates] : tables.community.rates()) {
        const auto pit = tables.population.find(county);
        if (pit == tables.population.end())
            continue;
        for (int a = 0; a < kAgeGroupCount; ++a) {
            flows(C, S) += rates[a].p_hospital * pit->second[a] * 365.0;
            flows(C, N) += rates[a].p_nh * pit->second[a] * 365.0;
        }
    }

    std::unordered_map<FacilityId, const HospitalRecord*> records;
    for (const auto& r : tables.hospitals.records)
        records.emplace(r.id, &r);
    for (const auto& d : data.discharges) {
        if (d.disposition == Disposition::Death)
            continue;
        const auto it = records.find(d.facility);
        if (it == records.end())
            continue;
        const double survivors = d.count * (1.0 - it->second->out_of_state_share);
        flows.row(S) += survivors * tables.facility.row(Category::Stach, d.facility, d.age).transpose();
    }

    if (!data.ltachs.empty()) {
        double beds = 0.0;
        for (const auto& f : data.ltachs)
            beds += f.total_beds();
        const double survivors = p.ltach_fill * beds * 365.0 / p.ltach_los_mean * (1.0 - tables.death.at(Category::Ltach));
        flows.row(L) += survivors * (1.0 - p.ltach_65_plus) *
                            tables.facility.ltach[index_of(AgeGroup::From50To64)].transpose() +
                        survivors * p.ltach_65_plus * tables.facility.ltach[index_of(AgeGroup::Over65)].transpose();
    }

    std::unordered_map<FacilityId, double> nh_los;
    for (const auto& row : data.los)
        nh_los.emplace(row.facility, row.mean_days);
    for (const auto& f : data.nhs) {
        const auto it = nh_los.find(f.id);
        if (it == nh_los.end() || it->second <= 0.0)
            continue;
        const double survivors = f.starting_occupancy * 365.0 / it->second * (1.0 - tables.death.at(Category::Nh));
        flows.row(N) += survivors * tables.facility.nh[index_of(AgeGroup::Over65)].transpose();
    }

    flows(C, C) = 0.0;
    return flows * scale;
}

TransitionTables build_transition_tables(const ScenarioData& data, const Parameters& p)
{
    TransitionTables t;
    t.hospitals = build_hospital_records(data.stachs, data.los, data.county_shares);
    t.warnings = t.hospitals.warnings;
    const double pop_scale = data.population.empty()
                                 ? 1.0
                                 : static_cast<double>(p.population_reference) / static_cast<double>(data.population.size());
    t.population = count_population(data.population, pop_scale);
    t.community = build_community_transitions(data.community_admissions, t.population, &t.warnings);
    t.facility = build_facility_transitions(data.discharges, t.hospitals.records, p);
    t.death = build_death_rates(data.discharges, weighted_mean_los(data.nhs, data.los), p);
    t.hospital_age = build_hospital_age_distribution(data.discharges);
    t.four_by_four = build_four_by_four(data, t, p);
    return t;
}

} // namespace pflow
