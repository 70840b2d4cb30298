#include "pflow/scenario.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_set>

#include "pflow/csv.hpp"

namespace pflow {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw InputError(path.string() + ": cannot write");
    out << std::setprecision(17);
    return out;
}

double non_negative(const csv::Reader& r, const std::string& field, std::string_view column)
{
    const double v = r.as_double(field, column);
    if (!(v >= 0.0))
        throw InputError(r.where(std::string(column) + " must be non-negative"));
    return v;
}

AgeGroup age_field(const csv::Reader& r, const std::string& field)
{
    const int g = r.as_int(field, "age_group");
    if (g < 0 || g >= kAgeGroupCount)
        throw InputError(r.where("age_group must be 0, 1 or 2"));
    return age_group_from_int(g);
}

template <typename T, typename Parse>
std::vector<T> read_rows(const fs::path& path, const std::vector<std::string>& header, Parse&& parse)
{
    csv::Reader reader(path, header);
    std::vector<T> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        try {
            rows.push_back(parse(reader, f));
        } catch (const InputError& e) {
            const std::string msg = e.what();
            if (msg.rfind(path.string(), 0) == 0)
                throw;
            throw InputError(reader.where(msg));
        }
    }
    return rows;
}

std::vector<DischargeRow> read_discharges(const fs::path& path)
{
    return read_rows<DischargeRow>(path, {"facility_id", "age_group", "disposition", "count"},
                                   [](const csv::Reader& r, const std::vector<std::string>& f) {
                                       return DischargeRow{FacilityId{r.as_int(f[0], "facility_id")},
                                                           age_field(r, f[1]), disposition_from_string(f[2]),
                                                           non_negative(r, f[3], "count")};
                                   });
}

std::vector<CountyShareRow> read_county_shares(const fs::path& path)
{
    return read_rows<CountyShareRow>(path, {"facility_id", "county_id", "discharges"},
                                     [](const csv::Reader& r, const std::vector<std::string>& f) {
                                         return CountyShareRow{FacilityId{r.as_int(f[0], "facility_id")},
                                                               CountyId{r.as_int(f[1], "county_id")},
                                                               non_negative(r, f[2], "discharges")};
                                     });
}

std::vector<LosRow> read_los(const fs::path& path)
{
    return read_rows<LosRow>(path, {"facility_id", "mean_los_days", "sd_los_days", "total_discharges"},
                             [](const csv::Reader& r, const std::vector<std::string>& f) {
                                 LosRow row{FacilityId{r.as_int(f[0], "facility_id")},
                                            non_negative(r, f[1], "mean_los_days"),
                                            non_negative(r, f[2], "sd_los_days"),
                                            non_negative(r, f[3], "total_discharges")};
                                 if (row.mean_days < 1.0)
                                     throw InputError("mean_los_days must be at least 1");
                                 return row;
                             });
}

std::vector<CommunityAdmissionRow> read_admissions(const fs::path& path)
{
    return read_rows<CommunityAdmissionRow>(
        path, {"county_id", "age_group", "category", "annual_admissions"},
        [](const csv::Reader& r, const std::vector<std::string>& f) {
            return CommunityAdmissionRow{CountyId{r.as_int(f[0], "county_id")}, age_field(r, f[1]),
                                         category_from_string(f[2]), non_negative(r, f[3], "annual_admissions")};
        });
}

std::vector<CapacityOverrideRow> read_capacity(const fs::path& path)
{
    return read_rows<CapacityOverrideRow>(path, {"facility_id", "start_nonicu", "start_icu"},
                                          [](const csv::Reader& r, const std::vector<std::string>& f) {
                                              return CapacityOverrideRow{FacilityId{r.as_int(f[0], "facility_id")},
                                                                         non_negative(r, f[1], "start_nonicu"),
                                                                         non_negative(r, f[2], "start_icu")};
                                          });
}

/// Gathers every cross-reference problem so the user sees them all at once.
std::vector<std::string> cross_check(const ScenarioData& d, const Parameters& p)
{
    std::vector<std::string> errors;
    std::unordered_set<CountyId> counties;
    for (const auto& c : d.counties)
        if (!counties.insert(c.id).second)
            errors.push_back("counties.csv: duplicate county " + std::to_string(to_int(c.id)));

    std::unordered_set<FacilityId> all, stach, nh;
    for (const auto* roster : {&d.stachs, &d.ltachs, &d.nhs})
        for (const auto& f : *roster) {
            if (!all.insert(f.id).second)
                errors.push_back("facility id " + std::to_string(to_int(f.id)) + " appears in more than one roster row");
            if (!counties.contains(f.county))
                errors.push_back(std::string(to_string(f.category)) + " facility " + std::to_string(to_int(f.id)) +
                                 " is in unknown county " + std::to_string(to_int(f.county)));
            if (f.category == Category::Stach)
                stach.insert(f.id);
            if (f.category == Category::Nh)
                nh.insert(f.id);
        }

    std::set<int> missing_pop;
    for (const auto& row : d.population)
        if (!counties.contains(row.county))
            missing_pop.insert(to_int(row.county));
    for (int c : missing_pop)
        errors.push_back("population.csv: county " + std::to_string(c) + " is not in counties.csv");
    if (static_cast<long long>(d.population.size()) > p.population_reference)
        errors.push_back("population.csv has more rows than population_reference");
    if (static_cast<long long>(d.population.size()) < 1)
        errors.push_back("population.csv is empty");

    std::set<int> bad;
    for (const auto& row : d.discharges)
        if (!stach.contains(row.facility))
            bad.insert(to_int(row.facility));
    for (int id : bad)
        errors.push_back("discharges.csv: facility " + std::to_string(id) + " is not a STACH");
    bad.clear();
    for (const auto& row : d.county_shares) {
        if (!stach.contains(row.facility))
            bad.insert(to_int(row.facility));
        if (!counties.contains(row.county))
            errors.push_back("county_shares.csv: unknown county " + std::to_string(to_int(row.county)));
    }
    for (int id : bad)
        errors.push_back("county_shares.csv: facility " + std::to_string(id) + " is not a STACH");

    std::unordered_set<FacilityId> los_ids;
    for (const auto& row : d.los) {
        if (!stach.contains(row.facility) && !nh.contains(row.facility))
            errors.push_back("los.csv: facility " + std::to_string(to_int(row.facility)) + " is not a STACH or NH");
        if (!los_ids.insert(row.facility).second)
            errors.push_back("los.csv: duplicate facility " + std::to_string(to_int(row.facility)));
    }
    for (const auto& f : d.nhs)
        if (!los_ids.contains(f.id))
            errors.push_back("los.csv: nursing home " + std::to_string(to_int(f.id)) + " has no LOS row");

    for (const auto& row : d.community_admissions)
        if (!counties.contains(row.county))
            errors.push_back("community_admissions.csv: unknown county " + std::to_string(to_int(row.county)));
    for (const auto& row : d.capacity_overrides)
        if (!stach.contains(row.facility))
            errors.push_back("stach_capacity.csv: facility " + std::to_string(to_int(row.facility)) +
                             " is not a STACH");
    if (p.use_facility_capacity_overrides && d.capacity_overrides.empty())
        errors.push_back("use_facility_capacity_overrides is set but stach_capacity.csv is missing or empty");
    if (d.stachs.empty())
        errors.push_back("stach.csv has no hospitals");
    return errors;
}

} // namespace

std::vector<CountyCentroid> read_counties_csv(const fs::path& path)
{
    return read_rows<CountyCentroid>(path, {"county_id", "lat", "lon"},
                                     [](const csv::Reader& r, const std::vector<std::string>& f) {
                                         CountyCentroid c{CountyId{r.as_int(f[0], "county_id")},
                                                          {r.as_double(f[1], "lat"), r.as_double(f[2], "lon")}};
                                         validate(c.centroid);
                                         return c;
                                     });
}

Scenario load_scenario(const fs::path& directory)
{
    if (!fs::is_directory(directory))
        throw InputError(directory.string() + ": scenario directory not found");
    Scenario s;
    s.directory = directory;
    const auto file = [&](const char* name) { return directory / name; };

    if (fs::exists(file("params.txt"))) {
        auto loaded = read_parameters(file("params.txt"));
        s.parameters = loaded.parameters;
        for (const auto& key : loaded.defaulted)
            s.notes.push_back("parameter " + key + " defaulted");
    } else {
        s.notes.push_back("params.txt absent; all parameters defaulted");
    }

    ScenarioData& d = s.data;
    d.population = read_population_csv(file("population.csv"));
    d.counties = read_counties_csv(file("counties.csv"));
    d.stachs = read_roster_csv(Category::Stach, file("stach.csv"));
    d.ltachs = fs::exists(file("ltach.csv")) ? read_roster_csv(Category::Ltach, file("ltach.csv"))
                                             : std::vector<FacilityInfo>{};
    d.nhs = fs::exists(file("nh.csv")) ? read_roster_csv(Category::Nh, file("nh.csv")) : std::vector<FacilityInfo>{};
    d.discharges = read_discharges(file("discharges.csv"));
    d.county_shares = read_county_shares(file("county_shares.csv"));
    d.los = read_los(file("los.csv"));
    d.community_admissions = read_admissions(file("community_admissions.csv"));
    if (fs::exists(file("stach_capacity.csv")))
        d.capacity_overrides = read_capacity(file("stach_capacity.csv"));
    if (fs::exists(file("distances_stach.csv")))
        d.stach_distances = DistanceMatrix::read_csv(Category::Stach, file("distances_stach.csv"));
    if (fs::exists(file("distances_ltach.csv")))
        d.ltach_distances = DistanceMatrix::read_csv(Category::Ltach, file("distances_ltach.csv"));
    if (fs::exists(file("distances_nh.csv")))
        d.nh_distances = DistanceMatrix::read_csv(Category::Nh, file("distances_nh.csv"));

    const auto errors = cross_check(d, s.parameters);
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << directory.string() << ": " << errors.size() << " input problem(s)";
        for (const auto& e : errors)
            msg << "\n  " << e;
        throw InputError(msg.str());
    }
    return s;
}

void save_scenario(const Scenario& scenario, const fs::path& directory)
{
    fs::create_directories(directory);
    const ScenarioData& d = scenario.data;
    write_parameters(directory / "params.txt", scenario.parameters);
    write_population_csv(directory / "population.csv", d.population);
    {
        auto out = open_out(directory / "counties.csv");
        out << "county_id,lat,lon\n";
        for (const auto& c : d.counties)
            out << to_int(c.id) << ',' << c.centroid.latitude << ',' << c.centroid.longitude << '\n';
    }
    write_roster_csv(Category::Stach, directory / "stach.csv", d.stachs);
    write_roster_csv(Category::Ltach, directory / "ltach.csv", d.ltachs);
    write_roster_csv(Category::Nh, directory / "nh.csv", d.nhs);
    {
        auto out = open_out(directory / "discharges.csv");
        out << "facility_id,age_group,disposition,count\n";
        for (const auto& r : d.discharges)
            out << to_int(r.facility) << ',' << index_of(r.age) << ',' << to_string(r.disposition) << ',' << r.count
                << '\n';
    }
    {
        auto out = open_out(directory / "county_shares.csv");
        out << "facility_id,county_id,discharges\n";
        for (const auto& r : d.county_shares)
            out << to_int(r.facility) << ',' << to_int(r.county) << ',' << r.discharges << '\n';
    }
    {
        auto out = open_out(directory / "los.csv");
        out << "facility_id,mean_los_days,sd_los_days,total_discharges\n";
        for (const auto& r : d.los)
            out << to_int(r.facility) << ',' << r.mean_days << ',' << r.sd_days << ',' << r.total_discharges << '\n';
    }
    {
        auto out = open_out(directory / "community_admissions.csv");
        out << "county_id,age_group,category,annual_admissions\n";
        for (const auto& r : d.community_admissions)
            out << to_int(r.county) << ',' << index_of(r.age) << ',' << to_string(r.category) << ','
                << r.annual_admissions << '\n';
    }
    if (!d.capacity_overrides.empty()) {
        auto out = open_out(directory / "stach_capacity.csv");
        out << "facility_id,start_nonicu,start_icu\n";
        for (const auto& r : d.capacity_overrides)
            out << to_int(r.facility) << ',' << r.start_nonicu << ',' << r.start_icu << '\n';
    }
    if (d.stach_distances)
        d.stach_distances->write_csv(directory / "distances_stach.csv");
    if (d.ltach_distances)
        d.ltach_distances->write_csv(directory / "distances_ltach.csv");
    if (d.nh_distances)
        d.nh_distances->write_csv(directory / "distances_nh.csv");
}

DistanceMatrix distances_for(const ScenarioData& data, Category category)
{
    const std::optional<DistanceMatrix>* stored = nullptr;
    const std::vector<FacilityInfo>* roster = nullptr;
    switch (category) {
    case Category::Stach:
        stored = &data.stach_distances;
        roster = &data.stachs;
        break;
    case Category::Ltach:
        stored = &data.ltach_distances;
        roster = &data.ltachs;
        break;
    case Category::Nh:
        stored = &data.nh_distances;
        roster = &data.nhs;
        break;
    case Category::Community:
        throw LogicError("distances_for: the community has no distance matrix");
    }
    if (stored->has_value())
        return **stored;
    std::vector<FacilityLocation> locations;
    locations.reserve(roster->size());
    for (const auto& f : *roster)
        locations.push_back({f.id, f.geocode});
    return build_distance_matrix(category, data.counties, locations);
}

} // namespace pflow
