#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pflow/report.hpp"
#include "pflow/validation.hpp"

using namespace pflow;

namespace {

const PatternRow& row_named(const PatternReport& r, const std::string& entity)
{
    for (const auto& row : r.rows)
        if (row.entity == entity)
            return row;
    FAIL("missing row " << entity);
    return r.rows.front();
}

FacilityTally tally(int id, Category c, std::vector<int> census)
{
    FacilityTally t;
    t.id = FacilityId{id};
    t.category = c;
    t.census = std::move(census);
    return t;
}

} // namespace

TEST_CASE("relative error uses a floor of one in the denominator")
{
    CHECK(relative_error(110, 100) == doctest::Approx(0.1));
    CHECK(relative_error(0.5, 0.0) == doctest::Approx(0.5));
    CHECK(relative_error(90, 100) == doctest::Approx(0.1));
}

TEST_CASE("OLS slope and drift")
{
    CHECK(ols_slope(std::vector<double>(50, 7.0)) == doctest::Approx(0.0));
    CHECK(relative_drift(std::vector<double>(50, 7.0)) == doctest::Approx(0.0));
    std::vector<double> line;
    for (int i = 0; i < 11; ++i)
        line.push_back(3.0 + 2.0 * i);
    CHECK(ols_slope(line) == doctest::Approx(2.0));
    // Mean 13, fitted change 20.
    CHECK(relative_drift(line) == doctest::Approx(20.0 / 13.0));
}

TEST_CASE("pattern 2: flat census passes, 10% yearly drift fails")
{
    RunReport run;
    run.days = 365;
    run.facilities.push_back(tally(-1, Category::Community, {}));
    std::vector<int> flat(365, 200), rising(365), small(365, 50);
    for (int d = 0; d < 365; ++d)
        rising[d] = static_cast<int>(std::lround(190.0 + 20.0 * d / 364.0)); // +10% of the mean
    run.facilities.push_back(tally(100, Category::Stach, flat));
    run.facilities.push_back(tally(101, Category::Stach, rising));
    run.facilities.push_back(tally(102, Category::Nh, small));
    Expectations e;
    e.census = {{FacilityId{100}, 200.0}, {FacilityId{101}, 200.0}, {FacilityId{102}, 80.0}};
    const auto r = pattern2_capacity(run, e, ValidationThresholds{});
    CHECK(row_named(r, "100:mean_census").pass);
    CHECK(row_named(r, "100:trend").pass);
    CHECK(row_named(r, "101:mean_census").pass);
    const auto& trend = row_named(r, "101:trend");
    CHECK(trend.modeled == doctest::Approx(0.1).epsilon(0.02));
    CHECK_FALSE(trend.pass);
    // Below the 100-bed cutoff the 37.5% miss is reported but not judged.
    const auto& small_row = row_named(r, "102:mean_census");
    CHECK_FALSE(small_row.judged);
    CHECK_FALSE(small_row.pass);
    CHECK_FALSE(r.pass);
}

TEST_CASE("pattern 1: mean and sample sd from the LOS sums")
{
    RunReport run;
    run.days = 365;
    auto t = tally(100, Category::Stach, {});
    // Stays of 4 and 6 days, 600 each: mean 5, sample sd sqrt(1200/1199).
    t.admissions = 1200;
    t.los_sum = 600 * 4.0 + 600 * 6.0;
    t.los_sq_sum = 600 * 16.0 + 600 * 36.0;
    run.facilities.push_back(t);
    Expectations e;
    e.los[FacilityId{100}] = {5.0, 1.0};
    const auto r = pattern1_los(run, e, ValidationThresholds{});
    const auto& mean = row_named(r, "100:mean_los");
    const auto& sd = row_named(r, "100:sd_los");
    CHECK(mean.modeled == doctest::Approx(5.0));
    CHECK(sd.modeled == doctest::Approx(std::sqrt(1200.0 / 1199.0)));
    CHECK(mean.judged);
    CHECK(mean.pass);
    CHECK(sd.pass);
    e.los[FacilityId{100}] = {4.8, 1.0};
    CHECK_FALSE(pattern1_los(run, e, ValidationThresholds{}).pass);
    run.facilities[0].admissions = 999;
    CHECK_FALSE(row_named(pattern1_los(run, e, ValidationThresholds{}), "100:mean_los").judged);
}

TEST_CASE("pattern 3: prorated targets and structural zeros")
{
    RunReport run;
    run.days = 73; // one fifth of a year
    Expectations e;
    e.four_by_four(0, 1) = 50000; // target 10000 over the run
    e.four_by_four(1, 0) = 5000;  // below the judging cutoff
    run.movements(0, 1) = 10400;
    run.movements(1, 0) = 3000;
    auto r = pattern3_flows(run, e, ValidationThresholds{});
    CHECK(row_named(r, "community->stach").expected == doctest::Approx(10000));
    CHECK(row_named(r, "community->stach").pass);
    CHECK_FALSE(row_named(r, "stach->community").judged);
    CHECK(r.pass);
    run.movements(0, 2) = 1;
    r = pattern3_flows(run, e, ValidationThresholds{});
    CHECK_FALSE(row_named(r, "community->ltach").pass);
    CHECK_FALSE(r.pass);
}

TEST_CASE("report CSV format")
{
    PatternReport r{2, {}, true};
    r.rows.push_back({2, "100:trend", 0.01, 0.0, 0.01, true, true});
    r.rows.push_back({2, "101:trend", 0.03, 0.0, 0.03, false, false});
    std::ostringstream out;
    write_report_csv(out, {r});
    std::istringstream in(out.str());
    std::string header, a, b;
    std::getline(in, header);
    std::getline(in, a);
    std::getline(in, b);
    CHECK(header == "pattern,entity,modeled,expected,rel_error,pass");
    CHECK(a.rfind("2,100:trend,", 0) == 0);
    CHECK(a.substr(a.size() - 5) == ",true");
    CHECK(b.substr(b.size() - 4) == ",n/a");
}

TEST_CASE("tallies JSON round trip")
{
    RunTallies t;
    t.run.days = 3;
    auto f = tally(100, Category::Stach, {5, 6, 7});
    f.admissions = 12;
    f.los_sum = 50.5;
    f.los_sq_sum = 300.25;
    f.placeholders = 2;
    t.run.facilities = {tally(-1, Category::Community, {}), f};
    t.run.movements(0, 1) = 9;
    t.run.icu_census = {1, 2, 3};
    t.run.event_hash = 0xfeedfacecafebeefULL;
    t.expected.census[FacilityId{100}] = 6.5;
    t.expected.los[FacilityId{100}] = {4.0, 2.0};
    t.expected.four_by_four(1, 0) = 123.5;
    t.thresholds.pattern2_tolerance = 0.07;
    const auto path = std::filesystem::temp_directory_path() / "pflow_t_tallies.json";
    write_tallies_json(path, t);
    const auto back = read_tallies_json(path);
    CHECK(back.run.days == 3);
    REQUIRE(back.run.facilities.size() == 2);
    CHECK(back.run.facilities[1].census == std::vector<int>{5, 6, 7});
    CHECK(back.run.facilities[1].los_sq_sum == 300.25);
    CHECK(back.run.movements(0, 1) == 9);
    CHECK(back.run.icu_census == t.run.icu_census);
    CHECK(back.run.event_hash == t.run.event_hash);
    CHECK(back.expected.census.at(FacilityId{100}) == 6.5);
    CHECK(back.expected.four_by_four(1, 0) == 123.5);
    CHECK(back.thresholds.pattern2_tolerance == 0.07);
    const auto reports = evaluate(back);
    CHECK(reports.size() == 3);
    std::filesystem::remove(path);
}

TEST_CASE("ground truth replaces expectations, scaled")
{
    const auto path = std::filesystem::temp_directory_path() / "pflow_t_truth.json";
    std::ofstream(path) << R"({"los":[{"id":100,"mean":5.0,"sd":2.0}],"census":[{"id":100,"census":400.0}],)"
                        << R"("four_by_four":[[0,100,0,10],[90,5,3,2],[1,1,0,1],[2,2,0,0]]})";
    Expectations e;
    apply_ground_truth(path, e, 0.5);
    CHECK(e.los.at(FacilityId{100}).mean == 5.0);
    CHECK(e.census.at(FacilityId{100}) == 200.0);
    CHECK(e.four_by_four(0, 1) == 0.0);
    apply_ground_truth(path, e, 0.5, true);
    CHECK(e.four_by_four(0, 1) == 50.0);
    std::filesystem::remove(path);
}
