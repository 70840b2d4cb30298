#include <doctest.h>

#include <filesystem>
#include <map>

#include "pflow/network.hpp"
#include "pflow/rng.hpp"

using namespace pflow;

namespace {

FacilityInfo info(int id, Category c, int beds, int icu = 0)
{
    FacilityInfo f;
    f.id = FacilityId{id};
    f.name = "f" + std::to_string(id);
    f.category = c;
    f.county = CountyId{1};
    f.geocode = {35.0, -79.0};
    f.beds_nonicu = beds;
    f.beds_icu = icu;
    return f;
}

Agent agent(AgentId id)
{
    Agent a;
    a.id = id;
    return a;
}

} // namespace

TEST_CASE("bed scaling rounds half up and never drops below one")
{
    CHECK(scale_beds(100, 1, 100) == 1);
    CHECK(scale_beds(3, 1, 2) == 2);     // 1.5 -> 2
    CHECK(scale_beds(5, 1, 4) == 1);     // 1.25 -> 1
    CHECK(scale_beds(7, 1, 4) == 2);     // 1.75 -> 2
    CHECK(scale_beds(1, 1, 1000) == 1);  // floor at one bed
    CHECK(scale_beds(25000, 100000, 10600823) == 236); // 235.83
    CHECK(scale_beds(250, 100000, 100000) == 250);
    CHECK_THROWS_AS(scale_beds(0, 1, 1), InputError);
    CHECK_THROWS_AS(scale_beds(1, 2, 1), InputError);
}

TEST_CASE("bed scaling against a floating-point oracle")
{
    Rng r(31);
    for (int i = 0; i < 10000; ++i) {
        const int beds = 1 + static_cast<int>(r.uniform_below(3000));
        const long long p = 1000 + static_cast<long long>(r.uniform_below(20000000));
        const long long n = 1 + static_cast<long long>(r.uniform_below(static_cast<std::uint64_t>(p)));
        const double exact = static_cast<double>(beds) * n / p;
        const int got = scale_beds(beds, n, p);
        CHECK(got >= 1);
        CHECK(std::abs(got - std::max(1.0, exact)) <= 0.5 + 1e-9);
    }
}

TEST_CASE("admit and discharge keep the bed counts")
{
    Facility f(info(100, Category::Stach, 2, 1), 2, 1);
    f.set_placeholders(1, 0);
    CHECK(f.free_beds(BedType::NonIcu) == 1);
    CHECK(f.admit(agent(1), BedType::NonIcu) == AdmitOutcome::Admitted);
    CHECK(f.admit(agent(2), BedType::NonIcu) == AdmitOutcome::Full);
    CHECK(f.has_open_bed(BedRequest::Icu));
    CHECK(f.has_open_bed(BedRequest::Any));
    CHECK_FALSE(f.has_open_bed(BedRequest::NonIcu));
    CHECK(f.admit(agent(2), BedType::Icu) == AdmitOutcome::Admitted);
    CHECK(f.census() == 3);
    CHECK_THROWS_AS(f.admit(agent(2), BedType::Icu), LogicError);
    CHECK(f.discharge(2) == BedType::Icu);
    CHECK_THROWS_AS(f.discharge(2), LogicError);
    CHECK(f.census() == 2);
}

TEST_CASE("placeholders are fixed once and bounded by capacity")
{
    Facility f(info(100, Category::Stach, 2, 1), 2, 1);
    CHECK_THROWS_AS(f.set_placeholders(3, 0), LogicError);
    f.set_placeholders(1, 1);
    CHECK_THROWS_AS(f.set_placeholders(0, 0), LogicError);
    CHECK(f.placeholders() == 2);
}

TEST_CASE("dead agents cannot be admitted")
{
    Facility f(info(1000, Category::Nh, 5), 5, 0);
    f.set_placeholders(0, 0);
    Agent a = agent(3);
    a.alive = false;
    CHECK_THROWS_AS(f.admit(a, BedType::NonIcu), LogicError);
}

TEST_CASE("only hospitals have ICU beds")
{
    CHECK_THROWS_AS(Facility(info(500, Category::Ltach, 5), 5, 1), InputError);
    CHECK_THROWS_AS(Facility(info(500, Category::Ltach, 5), -1, 0), InputError);
}

TEST_CASE("admit/discharge fuzz never exceeds capacity")
{
    Facility f(info(100, Category::Stach, 20, 5), 20, 5);
    f.set_placeholders(3, 1);
    Rng r(32);
    std::map<AgentId, BedType> oracle;
    for (int step = 0; step < 20000; ++step) {
        const AgentId id = static_cast<AgentId>(r.uniform_below(60));
        if (oracle.contains(id)) {
            CHECK(f.discharge(id) == oracle[id]);
            oracle.erase(id);
        } else {
            const BedType b = r.bernoulli(0.3) ? BedType::Icu : BedType::NonIcu;
            int used = 0;
            for (const auto& [k, v] : oracle)
                used += v == b;
            const bool room = used + f.placeholders(b) < f.capacity(b);
            const auto out = f.admit(agent(id), b);
            CHECK((out == AdmitOutcome::Admitted) == room);
            if (out == AdmitOutcome::Admitted)
                oracle[id] = b;
        }
        REQUIRE(f.occupied(BedType::NonIcu) <= f.capacity(BedType::NonIcu));
        REQUIRE(f.occupied(BedType::Icu) <= f.capacity(BedType::Icu));
        REQUIRE(f.agent_count() == static_cast<int>(oracle.size()));
    }
}

TEST_CASE("network slots and lookups")
{
    Network n;
    CHECK(n.size() == 1);
    CHECK(n.at(kCommunitySlot).is_community());
    const auto s = n.add(Facility(info(100, Category::Stach, 10, 2), 10, 2));
    const auto l = n.add(Facility(info(500, Category::Ltach, 10), 10, 0));
    CHECK(n.slot_of(FacilityId{100}) == s);
    CHECK(n.slot_of(FacilityId{500}) == l);
    CHECK(n.count(Category::Stach) == 1);
    CHECK(n.count(Category::Nh) == 0);
    CHECK_THROWS_AS(n.add(Facility(info(100, Category::Nh, 10), 10, 0)), InputError);
    CHECK_THROWS_AS(n.slot_of(FacilityId{7}), InputError);
}

TEST_CASE("roster CSV round trip")
{
    auto h = info(100, Category::Stach, 40, 6);
    h.out_of_state_pct = 2.5;
    auto nh = info(1000, Category::Nh, 50);
    nh.starting_occupancy = 44;
    const auto dir = std::filesystem::temp_directory_path();
    write_roster_csv(Category::Stach, dir / "pflow_t_stach.csv", {h});
    write_roster_csv(Category::Nh, dir / "pflow_t_nh.csv", {nh});
    const auto hs = read_roster_csv(Category::Stach, dir / "pflow_t_stach.csv");
    const auto ns = read_roster_csv(Category::Nh, dir / "pflow_t_nh.csv");
    REQUIRE(hs.size() == 1);
    REQUIRE(ns.size() == 1);
    CHECK(hs[0].beds_icu == 6);
    CHECK(hs[0].out_of_state_pct == 2.5);
    CHECK(ns[0].starting_occupancy == 44);
    nh.starting_occupancy = 51;
    write_roster_csv(Category::Nh, dir / "pflow_t_nh.csv", {nh});
    CHECK_THROWS_AS(read_roster_csv(Category::Nh, dir / "pflow_t_nh.csv"), InputError);
}
