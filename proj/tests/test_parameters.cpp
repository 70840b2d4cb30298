#include <doctest.h>

#include <filesystem>

#include "pflow/parameters.hpp"
#include "pflow/types.hpp"

using namespace pflow;

TEST_CASE("reference defaults")
{
    const Parameters p;
    CHECK(p.ltach_fill == 0.9);
    CHECK(p.non_icu_fill == 0.65);
    CHECK(p.icu_fill == 0.50);
    CHECK(p.nursing_home_death == 0.15);
    CHECK(p.ltach_hospital == 0.071);
    CHECK(p.ltach_nh == 0.449);
    CHECK(p.ltach_death == 0.01);
    CHECK(p.ltach_65_plus == 0.75);
    CHECK(p.nh_stach_nh == 0.80);
    CHECK(p.nh_community == 0.67);
    CHECK(p.nursing_home_closest_n == 30);
    CHECK(p.nursing_home_attempts == 30);
    CHECK(p.ltach_closest_n == 10);
    CHECK(p.ltach_attempts == 3);
    CHECK(p.max_distance == 200.0);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("parse reports defaulted keys and rejects unknown ones")
{
    const auto loaded = parse_parameters("# comment\nseed = 9\nmax_distance = 150 # inline\n");
    CHECK(loaded.parameters.seed == 9);
    CHECK(loaded.parameters.max_distance == 150.0);
    CHECK(std::find(loaded.defaulted.begin(), loaded.defaulted.end(), "seed") == loaded.defaulted.end());
    CHECK(std::find(loaded.defaulted.begin(), loaded.defaulted.end(), "ltach_fill") != loaded.defaulted.end());
    CHECK_THROWS_AS(parse_parameters("no_such_key = 1\n"), InputError);
    CHECK_THROWS_AS(parse_parameters("seed = abc\n"), InputError);
    CHECK_THROWS_AS(parse_parameters("seed 9\n"), InputError);
}

TEST_CASE("validation rejects out-of-range values")
{
    CHECK_THROWS_AS(parse_parameters("ltach_fill = 1.5\n"), InputError);
    CHECK_THROWS_AS(parse_parameters("ltach_hospital = 0.6\nltach_nh = 0.6\n"), InputError);
    CHECK_THROWS_AS(parse_parameters("n_agents = 20\npopulation_reference = 10\n"), InputError);
    CHECK_THROWS_AS(parse_parameters("days = 0\n"), InputError);
}

TEST_CASE("format and parse round trip")
{
    Parameters p;
    p.seed = 123456789012345ULL;
    p.icu_multiplier = 1.2345678901234;
    p.use_facility_capacity_overrides = true;
    const auto back = parse_parameters(format_parameters(p)).parameters;
    CHECK(back.seed == p.seed);
    CHECK(back.icu_multiplier == p.icu_multiplier);
    CHECK(back.use_facility_capacity_overrides);
    const auto path = std::filesystem::temp_directory_path() / "pflow_t_params.txt";
    write_parameters(path, p);
    const auto file = read_parameters(path);
    CHECK(file.defaulted.empty());
    CHECK(file.parameters.seed == p.seed);
    std::filesystem::remove(path);
}
