#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pflow/scenario.hpp"
#include "pflow/synthetic.hpp"

using namespace pflow;
namespace fs = std::filesystem;

namespace {

const Scenario& base()
{
    static const Scenario s = [] {
        SyntheticSpec spec;
        spec.counties = 4;
        spec.hospitals = 3;
        spec.ltachs = 1;
        spec.nhs = 4;
        spec.population = 5000;
        return generate_synthetic_scenario(spec).scenario;
    }();
    return s;
}

fs::path fresh_dir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string load_error(const fs::path& dir)
{
    try {
        load_scenario(dir);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

void append(const fs::path& file, const std::string& text) { std::ofstream(file, std::ios::app) << text; }

} // namespace

TEST_CASE("save and load round trip")
{
    const auto dir = fresh_dir("pflow_t_scn_rt");
    save_scenario(base(), dir);
    const auto back = load_scenario(dir);
    CHECK(back.data.population == base().data.population);
    CHECK(back.data.stachs.size() == base().data.stachs.size());
    CHECK(back.data.nhs.size() == base().data.nhs.size());
    CHECK(back.data.discharges.size() == base().data.discharges.size());
    CHECK(back.data.los.size() == base().data.los.size());
    CHECK(back.parameters.seed == base().parameters.seed);
    CHECK(back.parameters.n_agents == base().parameters.n_agents);
    fs::remove_all(dir);
}

TEST_CASE("missing required file")
{
    const auto dir = fresh_dir("pflow_t_scn_missing");
    save_scenario(base(), dir);
    fs::remove(dir / "discharges.csv");
    CHECK(load_error(dir).find("discharges.csv") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("bad row reports file and line")
{
    const auto dir = fresh_dir("pflow_t_scn_badrow");
    save_scenario(base(), dir);
    append(dir / "los.csv", "100,abc,1,5\n");
    const auto msg = load_error(dir);
    CHECK(msg.find("los.csv") != std::string::npos);
    CHECK(msg.find("abc") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cross-reference problems are reported together")
{
    const auto dir = fresh_dir("pflow_t_scn_xref");
    save_scenario(base(), dir);
    append(dir / "county_shares.csv", "999999,1,5\n");                  // not a hospital
    append(dir / "community_admissions.csv", "424242,0,stach,10\n");     // unknown county
    const auto msg = load_error(dir);
    CHECK(msg.find("999999") != std::string::npos);
    CHECK(msg.find("424242") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("duplicate facility ids across rosters are rejected")
{
    auto s = base();
    s.data.nhs.front().id = s.data.stachs.front().id;
    const auto dir = fresh_dir("pflow_t_scn_dup");
    save_scenario(s, dir);
    CHECK(load_error(dir).find(std::to_string(to_int(s.data.stachs.front().id))) != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("optional files: parameters default, distances computed")
{
    const auto dir = fresh_dir("pflow_t_scn_opt");
    save_scenario(base(), dir);
    fs::remove(dir / "params.txt");
    for (const char* f : {"distances_stach.csv", "distances_ltach.csv", "distances_nh.csv"})
        fs::remove(dir / f);
    const auto back = load_scenario(dir);
    CHECK_FALSE(back.notes.empty());
    CHECK_FALSE(back.data.stach_distances.has_value());
    const auto m = distances_for(back.data, Category::Stach);
    CHECK(m.miles().rows() == static_cast<Eigen::Index>(back.data.counties.size()));
    CHECK(m.miles().cols() == static_cast<Eigen::Index>(back.data.stachs.size()));
    CHECK((m.miles().array() >= 0.0).all());
    fs::remove_all(dir);
}

TEST_CASE("capacity overrides flag without a file is an error")
{
    const auto dir = fresh_dir("pflow_t_scn_ovr");
    auto s = base();
    s.parameters.use_facility_capacity_overrides = true;
    save_scenario(s, dir);
    fs::remove(dir / "stach_capacity.csv");
    CHECK_FALSE(load_error(dir).empty());
    fs::remove_all(dir);
}
