#include "pflow/report.hpp"

#include <fstream>

#include "json.hpp"

namespace pflow {

using nlohmann::json;

namespace {

json matrix_to_json(const FourByFour& m)
{
    json rows = json::array();
    for (int i = 0; i < kCategoryCount; ++i)
        rows.push_back({m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
    return rows;
}

FourByFour matrix_from_json(const json& j)
{
    FourByFour m;
    if (!j.is_array() || j.size() != kCategoryCount)
        throw InputError("four_by_four must be a 4x4 array");
    for (int i = 0; i < kCategoryCount; ++i) {
        if (!j[i].is_array() || j[i].size() != kCategoryCount)
            throw InputError("four_by_four must be a 4x4 array");
        for (int k = 0; k < kCategoryCount; ++k)
            m(i, k) = j[i][k].get<double>();
    }
    return m;
}

json load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError(path.string() + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

} // namespace

void write_tallies_json(const std::filesystem::path& path, const RunTallies& t)
{
    const RunReport& r = t.run;
    json j;
    j["days"] = r.days;
    json facilities = json::array();
    for (const auto& f : r.facilities)
        facilities.push_back({{"id", to_int(f.id)},
                              {"category", to_string(f.category)},
                              {"admissions", f.admissions},
                              {"los_sum", f.los_sum},
                              {"los_sq_sum", f.los_sq_sum},
                              {"placeholders", f.placeholders},
                              {"census", f.census}});
    j["facilities"] = facilities;
    json movements = json::array();
    for (int i = 0; i < kCategoryCount; ++i)
        movements.push_back({r.movements(i, 0), r.movements(i, 1), r.movements(i, 2), r.movements(i, 3)});
    j["movements"] = movements;
    j["icu_census"] = r.icu_census;
    j["deaths"] = r.deaths;
    j["turned_away"] = r.turned_away;
    j["fully_turned_away"] = r.fully_turned_away;
    j["skipped_actions"] = r.skipped_actions;
    j["max_transfer_attempts"] = r.max_transfer_attempts;
    j["max_community_attempts"] = r.max_community_attempts;
    j["event_hash"] = r.event_hash;
    j["event_count"] = r.event_count;
    j["initial"] = {{"stach_nonicu_fraction", r.initial.stach_nonicu_fraction},
                    {"stach_icu_fraction", r.initial.stach_icu_fraction},
                    {"ltach_fraction", r.initial.ltach_fraction},
                    {"nh_fraction", r.initial.nh_fraction},
                    {"hospital_age_shares",
                     {r.initial.hospital_age_shares(0), r.initial.hospital_age_shares(1),
                      r.initial.hospital_age_shares(2)}},
                    {"hospital_agents", r.initial.hospital_agents},
                    {"census", r.initial.census}};

    json los = json::array(), census = json::array();
    for (const auto& [id, v] : t.expected.los)
        los.push_back({{"id", to_int(id)}, {"mean", v.mean}, {"sd", v.sd}});
    for (const auto& [id, v] : t.expected.census)
        census.push_back({{"id", to_int(id)}, {"census", v}});
    const auto by_id = [](const json& a, const json& b) { return a["id"].get<int>() < b["id"].get<int>(); };
    std::sort(los.begin(), los.end(), by_id);
    std::sort(census.begin(), census.end(), by_id);
    j["expected"] = {{"los", los}, {"census", census}, {"four_by_four", matrix_to_json(t.expected.four_by_four)}};
    const auto& th = t.thresholds;
    j["thresholds"] = {{"pattern1_min_admissions", th.pattern1_min_admissions},
                       {"pattern1_mean_tolerance", th.pattern1_mean_tolerance},
                       {"pattern1_sd_tolerance", th.pattern1_sd_tolerance},
                       {"pattern2_min_capacity", th.pattern2_min_capacity},
                       {"pattern2_tolerance", th.pattern2_tolerance},
                       {"pattern2_slope_tolerance", th.pattern2_slope_tolerance},
                       {"pattern3_min_target", th.pattern3_min_target},
                       {"pattern3_tolerance", th.pattern3_tolerance}};

    std::ofstream out(path);
    if (!out)
        throw InputError(path.string() + ": cannot write");
    out << j.dump(1) << '\n';
}

RunTallies read_tallies_json(const std::filesystem::path& path)
{
    const json j = load(path);
    RunTallies t;
    try {
        RunReport& r = t.run;
        r.days = j.at("days").get<int>();
        for (const auto& f : j.at("facilities")) {
            FacilityTally tally;
            tally.id = FacilityId{f.at("id").get<int>()};
            tally.category = category_from_string(f.at("category").get<std::string>());
            tally.admissions = f.at("admissions").get<long long>();
            tally.los_sum = f.at("los_sum").get<double>();
            tally.los_sq_sum = f.at("los_sq_sum").get<double>();
            tally.placeholders = f.at("placeholders").get<int>();
            tally.census = f.at("census").get<std::vector<int>>();
            r.facilities.push_back(std::move(tally));
        }
        const auto& mv = j.at("movements");
        for (int i = 0; i < kCategoryCount; ++i)
            for (int k = 0; k < kCategoryCount; ++k)
                r.movements(i, k) = mv.at(i).at(k).get<long long>();
        r.icu_census = j.at("icu_census").get<std::vector<int>>();
        r.deaths = j.at("deaths").get<long long>();
        r.turned_away = j.at("turned_away").get<long long>();
        r.fully_turned_away = j.at("fully_turned_away").get<long long>();
        r.skipped_actions = j.at("skipped_actions").get<long long>();
        r.max_transfer_attempts = j.at("max_transfer_attempts").get<int>();
        r.max_community_attempts = j.at("max_community_attempts").get<std::array<int, kCategoryCount>>();
        r.event_hash = j.at("event_hash").get<std::uint64_t>();
        r.event_count = j.at("event_count").get<std::size_t>();
        const auto& init = j.at("initial");
        r.initial.stach_nonicu_fraction = init.at("stach_nonicu_fraction").get<double>();
        r.initial.stach_icu_fraction = init.at("stach_icu_fraction").get<double>();
        r.initial.ltach_fraction = init.at("ltach_fraction").get<double>();
        r.initial.nh_fraction = init.at("nh_fraction").get<double>();
        const auto ages = init.at("hospital_age_shares").get<std::vector<double>>();
        if (ages.size() != 3)
            throw InputError("hospital_age_shares needs three values");
        r.initial.hospital_age_shares = Eigen::Vector3d(ages[0], ages[1], ages[2]);
        r.initial.hospital_agents = init.at("hospital_agents").get<long long>();
        r.initial.census = init.at("census").get<std::vector<int>>();

        const auto& e = j.at("expected");
        for (const auto& row : e.at("los"))
            t.expected.los[FacilityId{row.at("id").get<int>()}] = {row.at("mean").get<double>(),
                                                                   row.at("sd").get<double>()};
        for (const auto& row : e.at("census"))
            t.expected.census[FacilityId{row.at("id").get<int>()}] = row.at("census").get<double>();
        t.expected.four_by_four = matrix_from_json(e.at("four_by_four"));
        const auto& th = j.at("thresholds");
        t.thresholds.pattern1_min_admissions = th.at("pattern1_min_admissions").get<long long>();
        t.thresholds.pattern1_mean_tolerance = th.at("pattern1_mean_tolerance").get<double>();
        t.thresholds.pattern1_sd_tolerance = th.at("pattern1_sd_tolerance").get<double>();
        t.thresholds.pattern2_min_capacity = th.at("pattern2_min_capacity").get<double>();
        t.thresholds.pattern2_tolerance = th.at("pattern2_tolerance").get<double>();
        t.thresholds.pattern2_slope_tolerance = th.at("pattern2_slope_tolerance").get<double>();
        t.thresholds.pattern3_min_target = th.at("pattern3_min_target").get<double>();
        t.thresholds.pattern3_tolerance = th.at("pattern3_tolerance").get<double>();
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return t;
}

void apply_ground_truth(const std::filesystem::path& path, Expectations& expected, double agent_scale,
                        bool include_flows)
{
    const json j = load(path);
    try {
        if (j.contains("los"))
            for (const auto& row : j["los"])
                expected.los[FacilityId{row.at("id").get<int>()}] = {row.at("mean").get<double>(),
                                                                     row.at("sd").get<double>()};
        if (j.contains("census"))
            for (const auto& row : j["census"])
                expected.census[FacilityId{row.at("id").get<int>()}] = row.at("census").get<double>() * agent_scale;
        if (include_flows && j.contains("four_by_four"))
            expected.four_by_four = matrix_from_json(j["four_by_four"]) * agent_scale;
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::vector<PatternReport> evaluate(const RunTallies& t)
{
    return {pattern1_los(t.run, t.expected, t.thresholds), pattern2_capacity(t.run, t.expected, t.thresholds),
            pattern3_flows(t.run, t.expected, t.thresholds)};
}

} // namespace pflow
