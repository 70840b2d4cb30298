#include <doctest.h>

#include "pflow/transitions.hpp"

using namespace pflow;

namespace {

FacilityInfo fac(int id, Category c, int county, int beds, int icu = 0)
{
    FacilityInfo f;
    f.id = FacilityId{id};
    f.name = "f" + std::to_string(id);
    f.category = c;
    f.county = CountyId{county};
    f.geocode = {35.0, -79.0};
    f.beds_nonicu = beds;
    f.beds_icu = icu;
    return f;
}

DischargeRow dis(int age, Disposition d, double n) { return {FacilityId{100}, age_group_from_int(age), d, n}; }

// Two counties, one of each facility type, ten people, counts chosen so every
// derived value is easy to work out by hand.
ScenarioData tiny()
{
    ScenarioData s;
    for (int age : {30, 30, 55, 70})
        s.population.push_back({CountyId{1}, Sex::Female, age});
    for (int age : {30, 70, 70, 80, 60, 20})
        s.population.push_back({CountyId{2}, Sex::Male, age});
    s.counties = {{CountyId{1}, {35.0, -79.0}}, {CountyId{2}, {35.5, -79.5}}};
    auto h = fac(100, Category::Stach, 1, 8, 2);
    h.out_of_state_pct = 10.0;
    s.stachs = {h};
    s.ltachs = {fac(500, Category::Ltach, 1, 10)};
    auto nh = fac(1000, Category::Nh, 2, 5);
    nh.starting_occupancy = 4;
    s.nhs = {nh};
    s.discharges = {dis(0, Disposition::Community, 80), dis(0, Disposition::Hospital, 10),
                    dis(0, Disposition::Ltach, 5),      dis(0, Disposition::Nh, 5),
                    dis(2, Disposition::Community, 50), dis(2, Disposition::Nh, 30),
                    dis(2, Disposition::Ltach, 10),     dis(2, Disposition::Hospital, 5),
                    dis(2, Disposition::Death, 5)};
    s.county_shares = {{FacilityId{100}, CountyId{1}, 60}, {FacilityId{100}, CountyId{2}, 40}};
    s.los = {{FacilityId{100}, 5.0, 2.0, 200}, {FacilityId{1000}, 100.0, 50.0, 10}};
    s.community_admissions = {{CountyId{1}, AgeGroup::Under50, Category::Stach, 365},
                              {CountyId{2}, AgeGroup::Over65, Category::Nh, 73},
                              {CountyId{2}, AgeGroup::Under50, Category::Nh, 10},
                              {CountyId{1}, AgeGroup::Over65, Category::Ltach, 10}};
    return s;
}

Parameters tiny_params()
{
    Parameters p;
    p.n_agents = 10;
    p.population_reference = 10;
    return p;
}

void check_row(const TransitionRow& got, const TransitionRow& want)
{
    for (int i = 0; i < 4; ++i)
        CHECK(got(i) == doctest::Approx(want(i)));
}

} // namespace

TEST_CASE("LTACH and NH rows from the default movement parameters")
{
    const auto t = build_transition_tables(tiny(), tiny_params());
    check_row(t.facility.nh[2], TransitionRow(0.67, 0.33, 0.0, 0.0));
    check_row(t.facility.ltach[2], TransitionRow(0.48, 0.071, 0.0, 0.449));
    // Under 65 cannot go to a nursing home; the rest renormalizes.
    check_row(t.facility.ltach[1], TransitionRow(0.48 / 0.551, 0.071 / 0.551, 0.0, 0.0));
}

TEST_CASE("hospital rows: deaths excluded, age rules applied, pooled fallback")
{
    const auto t = build_transition_tables(tiny(), tiny_params());
    const FacilityId h{100};
    check_row(t.facility.row(Category::Stach, h, AgeGroup::Under50), TransitionRow(80, 10, 0, 0) / 90.0);
    check_row(t.facility.row(Category::Stach, h, AgeGroup::Over65), TransitionRow(50, 5, 10, 30) / 95.0);
    // No age-1 discharges: pooled counts with the NH column removed.
    check_row(t.facility.row(Category::Stach, h, AgeGroup::From50To64), TransitionRow(130, 15, 15, 0) / 160.0);
    for (const auto& [id, rows] : t.facility.hospital)
        for (const auto& r : rows)
            CHECK(r.sum() == doctest::Approx(1.0));
}

TEST_CASE("death rates")
{
    const auto t = build_transition_tables(tiny(), tiny_params());
    CHECK(t.death.at(Category::Stach) == doctest::Approx(5.0 / 200.0));
    CHECK(t.death.at(Category::Ltach) == doctest::Approx(0.01));
    CHECK(t.death.at(Category::Nh) == doctest::Approx(0.15 * 100.0 / 365.0));
}

TEST_CASE("community rates are annual admissions over population-days")
{
    const auto t = build_transition_tables(tiny(), tiny_params());
    CHECK(t.community.lookup(CountyId{1}, AgeGroup::Under50).p_hospital == doctest::Approx(0.5));
    CHECK(t.community.lookup(CountyId{2}, AgeGroup::Over65).p_nh == doctest::Approx(73.0 / (3 * 365.0)));
    // Under-65 NH and LTACH rows are dropped with warnings.
    CHECK(t.community.lookup(CountyId{2}, AgeGroup::Under50).p_nh == 0.0);
    CHECK(t.community.lookup(CountyId{9}, AgeGroup::Under50).p_hospital == 0.0);
    CHECK(t.warnings.size() >= 2);
}

TEST_CASE("hospital records merge roster, LOS and county shares")
{
    const auto t = build_transition_tables(tiny(), tiny_params());
    REQUIRE(t.hospitals.records.size() == 1);
    const auto& r = t.hospitals.records[0];
    CHECK(r.mean_los == 5.0);
    CHECK(r.out_of_state_share == doctest::Approx(0.1));
    CHECK(r.county_share(CountyId{1}) == doctest::Approx(0.6));
    CHECK(r.county_share(CountyId{3}) == 0.0);
}

TEST_CASE("hospital age distribution")
{
    const auto t = build_transition_tables(tiny(), tiny_params());
    CHECK(t.hospital_age(0) == doctest::Approx(0.5));
    CHECK(t.hospital_age(1) == doctest::Approx(0.0));
    CHECK(t.hospital_age(2) == doctest::Approx(0.5));
}

TEST_CASE("four-by-four expected flows")
{
    const auto t = build_transition_tables(tiny(), tiny_params());
    const auto& f = t.four_by_four;
    CHECK(f(0, 0) == 0.0);
    CHECK(f(0, 1) == doctest::Approx(365.0));
    CHECK(f(0, 2) == 0.0);
    CHECK(f(0, 3) == doctest::Approx(73.0));
    // 90% in-state survivors times each age row.
    CHECK(f(1, 0) == doctest::Approx(80 + 45));
    CHECK(f(1, 1) == doctest::Approx(10 + 4.5));
    CHECK(f(1, 2) == doctest::Approx(9));
    CHECK(f(1, 3) == doctest::Approx(27));
    const double ltach_out = 0.9 * 10 * 365.0 / 25.0 * 0.99;
    const TransitionRow mix = 0.25 * TransitionRow(0.48, 0.071, 0, 0) / 0.551 + 0.75 * TransitionRow(0.48, 0.071, 0, 0.449);
    for (int j = 0; j < 4; ++j)
        CHECK(f(2, j) == doctest::Approx(ltach_out * mix(j)));
    const double nh_out = 4 * 365.0 / 100.0 * (1.0 - 0.15 * 100.0 / 365.0);
    CHECK(f(3, 0) == doctest::Approx(nh_out * 0.67));
    CHECK(f(3, 1) == doctest::Approx(nh_out * 0.33));
    CHECK(f(3, 2) == 0.0);
}

TEST_CASE("four-by-four scales linearly with the agent count")
{
    auto p = tiny_params();
    p.population_reference = 1000;
    p.n_agents = 250;
    const auto a = build_transition_tables(tiny(), p).four_by_four;
    p.n_agents = 500;
    const auto b = build_transition_tables(tiny(), p).four_by_four;
    CHECK((b - 2.0 * a).cwiseAbs().maxCoeff() < 1e-9 * b.cwiseAbs().maxCoeff());
}

TEST_CASE("bad inputs")
{
    CHECK_THROWS_AS(adjust_for_age(TransitionRow(0, 0, 0, 1), AgeGroup::Under50), InputError);
    auto s = tiny();
    s.discharges.push_back(dis(1, Disposition::Community, -1));
    CHECK_THROWS_AS(build_transition_tables(s, tiny_params()), InputError);
    s = tiny();
    s.community_admissions.push_back({CountyId{1}, AgeGroup::From50To64, Category::Stach, 10});
    s.population.erase(s.population.begin() + 2); // the only 55-year-old in county 1
    CHECK_THROWS_AS(build_transition_tables(s, tiny_params()), InputError);
}
