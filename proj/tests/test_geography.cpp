#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "pflow/geography.hpp"
#include "pflow/rng.hpp"

using namespace pflow;

namespace {

// Independent oracle: spherical law of cosines.
double cosine_law_miles(GeoPoint a, GeoPoint b)
{
    const double d2r = std::numbers::pi / 180.0;
    const double c = std::sin(a.latitude * d2r) * std::sin(b.latitude * d2r) +
                     std::cos(a.latitude * d2r) * std::cos(b.latitude * d2r) * std::cos((b.longitude - a.longitude) * d2r);
    return kEarthRadiusMiles * std::acos(std::clamp(c, -1.0, 1.0));
}

} // namespace

TEST_CASE("great-circle distance: known values")
{
    const GeoPoint p{35.0, -79.0};
    CHECK(great_circle_miles(p, p) == 0.0);
    // One degree of latitude is R * pi / 180 miles.
    CHECK(great_circle_miles({0, 0}, {1, 0}) == doctest::Approx(kEarthRadiusMiles * std::numbers::pi / 180.0));
    // Antipodes are half the circumference apart.
    CHECK(great_circle_miles({0, 0}, {0, 180}) == doctest::Approx(kEarthRadiusMiles * std::numbers::pi));
}

TEST_CASE("great-circle distance agrees with the law of cosines")
{
    Rng r(11);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint a{-80 + 160 * r.uniform01(), -180 + 360 * r.uniform01()};
        const GeoPoint b{-80 + 160 * r.uniform01(), -180 + 360 * r.uniform01()};
        const double d = great_circle_miles(a, b);
        CHECK(d == doctest::Approx(cosine_law_miles(a, b)).epsilon(1e-6));
        CHECK(d == doctest::Approx(great_circle_miles(b, a)));
    }
}

TEST_CASE("invalid coordinates are rejected")
{
    CHECK_THROWS_AS(validate({91.0, 0.0}), InputError);
    CHECK_THROWS_AS(validate({0.0, -181.0}), InputError);
    CHECK_THROWS_AS(validate({std::nan(""), 0.0}), InputError);
    CHECK_NOTHROW(validate({-90.0, 180.0}));
}

namespace {

struct Layout
{
    std::vector<CountyCentroid> counties;
    std::vector<FacilityLocation> facilities;
};

Layout random_layout(std::uint64_t seed, int nc, int nf)
{
    Rng r(seed);
    Layout l;
    for (int i = 0; i < nc; ++i)
        l.counties.push_back({CountyId{i + 1}, {34 + 3 * r.uniform01(), -83 + 6 * r.uniform01()}});
    for (int j = 0; j < nf; ++j)
        l.facilities.push_back({FacilityId{100 + j}, {34 + 3 * r.uniform01(), -83 + 6 * r.uniform01()}});
    return l;
}

} // namespace

TEST_CASE("distance matrix entries recompute from the geocodes")
{
    const auto l = random_layout(12, 9, 14);
    const auto m = build_distance_matrix(Category::Stach, l.counties, l.facilities);
    REQUIRE(m.miles().rows() == 9);
    REQUIRE(m.miles().cols() == 14);
    for (const auto& c : l.counties)
        for (const auto& f : l.facilities)
            CHECK(m.at(c.id, f.id) == doctest::Approx(cosine_law_miles(c.centroid, f.geocode)).epsilon(1e-6));
    CHECK_THROWS_AS(m.county_row(CountyId{999}), InputError);
}

TEST_CASE("closest_n matches a brute-force sort")
{
    const auto l = random_layout(13, 6, 40);
    const auto m = build_distance_matrix(Category::Nh, l.counties, l.facilities);
    for (const auto& c : l.counties) {
        for (const double radius : {50.0, 150.0, 1e9}) {
            std::vector<std::pair<double, int>> all;
            for (const auto& f : l.facilities) {
                const double d = great_circle_miles(c.centroid, f.geocode);
                if (d <= radius)
                    all.emplace_back(d, to_int(f.id));
            }
            std::sort(all.begin(), all.end());
            const auto got = m.closest_n(c.id, 10, radius);
            REQUIRE(got.size() == std::min<std::size_t>(10, all.size()));
            for (std::size_t k = 0; k < got.size(); ++k)
                CHECK(to_int(got[k]) == all[k].second);
        }
    }
}

TEST_CASE("closest_n breaks distance ties by facility id")
{
    const std::vector<CountyCentroid> counties{{CountyId{1}, {35, -79}}};
    const std::vector<FacilityLocation> fac{{FacilityId{9}, {35.5, -79}}, {FacilityId{3}, {35.5, -79}}, {FacilityId{5}, {35.1, -79}}};
    const auto m = build_distance_matrix(Category::Ltach, counties, fac);
    const auto got = m.closest_n(CountyId{1}, 3, 1000);
    REQUIRE(got.size() == 3);
    CHECK(to_int(got[0]) == 5);
    CHECK(to_int(got[1]) == 3);
    CHECK(to_int(got[2]) == 9);
}

TEST_CASE("distance matrix CSV round trip")
{
    const auto l = random_layout(14, 4, 5);
    const auto m = build_distance_matrix(Category::Stach, l.counties, l.facilities);
    const auto path = std::filesystem::temp_directory_path() / "pflow_test_distances.csv";
    m.write_csv(path);
    const auto back = DistanceMatrix::read_csv(Category::Stach, path);
    CHECK(back.counties() == m.counties());
    CHECK(back.facilities() == m.facilities());
    CHECK((back.miles() - m.miles()).cwiseAbs().maxCoeff() < 1e-9);
    std::filesystem::remove(path);
}
