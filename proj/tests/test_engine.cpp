#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pflow/engine.hpp"
#include "pflow/synthetic.hpp"

using namespace pflow;

namespace {

const SyntheticScenario& small_world()
{
    static const SyntheticScenario s = [] {
        SyntheticSpec spec;
        spec.counties = 6;
        spec.hospitals = 5;
        spec.ltachs = 1;
        spec.nhs = 8;
        spec.population = 20000;
        spec.seed = 3;
        return generate_synthetic_scenario(spec);
    }();
    return s;
}

Scenario scenario_with_seed(std::uint64_t seed)
{
    Scenario sc = small_world().scenario;
    sc.parameters.seed = seed;
    return sc;
}

InitOptions fast_aging(bool keep_lines = false)
{
    InitOptions o;
    o.keep_event_lines = keep_lines;
    o.aging.empirical_draws = 20000;
    return o;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ','))
        out.push_back(f);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

TEST_CASE("ICU probability is a clamped, scaled logistic")
{
    IcuModel m;
    // -2.2 + 0.6 + 0.5 + 0.05 * 5 + 0.1 * 2.5 = -0.6
    const double p = 1.0 / (1.0 + std::exp(0.6));
    CHECK(m.probability(AgeGroup::Over65, true, 5, 250) == doctest::Approx(p));
    m.multiplier = 2.0;
    CHECK(m.probability(AgeGroup::Over65, true, 5, 250) == doctest::Approx(2.0 * p));
    m.multiplier = 4.0;
    CHECK(m.probability(AgeGroup::Over65, true, 5, 250) == 1.0);
    m.multiplier = 1.0;
    // -2.2 + 0.3 + 0.05 * 2 + 0.1 * 1 = -1.7
    CHECK(m.probability(AgeGroup::From50To64, false, 2, 100) == doctest::Approx(1.0 / (1.0 + std::exp(1.7))));
}

TEST_CASE("ICU assignment frequency follows the probability")
{
    IcuModel m;
    Agent a;
    a.age_group = AgeGroup::Over65;
    a.concurrent_conditions = true;
    Rng r(51);
    int icu = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        icu += assign_icu(m, a, 250, 5, r) == BedType::Icu;
    CHECK(icu / double(n) == doctest::Approx(m.probability(a.age_group, true, 5, 250)).epsilon(0.02));
}

TEST_CASE("placeholders round half up")
{
    CHECK(assign_placeholders(100, 0.025) == 3);
    CHECK(assign_placeholders(100, 0.024) == 2);
    CHECK(assign_placeholders(10, 0.0) == 0);
    CHECK_THROWS_AS(assign_placeholders(10, 1.5), InputError);
}

TEST_CASE("inverse-distance weights floor distances at one mile")
{
    Eigen::VectorXd d(3);
    d << 0.5, 2.0, 4.0;
    const auto w = inverse_distance_weights(d);
    const double total = 1.0 + 0.5 + 0.25;
    CHECK(w(0) == doctest::Approx(1.0 / total));
    CHECK(w(1) == doctest::Approx(0.5 / total));
    CHECK(w(2) == doctest::Approx(0.25 / total));
}

TEST_CASE("starting capacity: census estimates and fleet fill")
{
    HospitalRecord a;
    a.id = FacilityId{1};
    a.beds_nonicu = 80;
    a.beds_icu = 20;
    a.total_discharges = 3650;
    a.mean_los = 5.0;
    CHECK(estimated_nonicu_census(a) == doctest::Approx(40.0));
    CHECK(estimated_icu_census(a) == doctest::Approx(10.0));
    HospitalRecord b = a;
    b.id = FacilityId{2};
    b.total_discharges = 7300;
    const std::vector<StartingCounts> beds{{80, 20}, {80, 20}};
    const auto s = compute_starting_capacity({a, b}, beds, 1.0, 0.65, 0.5);
    REQUIRE(s.size() == 2);
    // Fleet totals hit the fill fraction; shares follow the estimates (1:2).
    CHECK(std::abs(s[0].nonicu + s[1].nonicu - 0.65 * 160) <= 1.0);
    CHECK(std::abs(s[0].icu + s[1].icu - 0.5 * 40) <= 1.0);
    CHECK(std::abs(2 * s[0].nonicu - s[1].nonicu) <= 2);
    CHECK(s[1].nonicu <= 80);
}

TEST_CASE("initialization fills and conserves agents")
{
    auto st = initialize_model(scenario_with_seed(1), fast_aging());
    CHECK(audit(st).empty());
    const auto& init = st.report.initial;
    CHECK(init.stach_nonicu_fraction == doctest::Approx(0.65).epsilon(0.05));
    CHECK(init.ltach_fraction == doctest::Approx(0.9).epsilon(0.1));
    CHECK(init.hospital_agents > 0);
    long long placed = 0;
    for (const auto& a : st.agents)
        placed += a.in_community() ? 0 : 1;
    long long in_facilities = 0;
    for (std::size_t k = 1; k < st.network.size(); ++k)
        in_facilities += st.network.at(static_cast<LocationIndex>(k)).agent_count();
    CHECK(placed == in_facilities);
    CHECK(st.network.at(kCommunitySlot).agent_count() == static_cast<int>(st.agents.size() - placed));
}

TEST_CASE("same seed gives the same run; a different seed does not")
{
    auto a = initialize_model(scenario_with_seed(5), fast_aging());
    auto b = initialize_model(scenario_with_seed(5), fast_aging());
    auto c = initialize_model(scenario_with_seed(6), fast_aging());
    CHECK(run(a, 60).event_hash == run(b, 60).event_hash);
    CHECK(a.report.event_hash != run(c, 60).event_hash);
}

TEST_CASE("replay: run(100) then run(265) equals run(365)")
{
    auto a = initialize_model(scenario_with_seed(7), fast_aging());
    auto b = initialize_model(scenario_with_seed(7), fast_aging());
    run(a, 100);
    run(a, 265);
    run(b, 365);
    CHECK(a.report.event_hash == b.report.event_hash);
    CHECK(a.report.event_count == b.report.event_count);
    CHECK(a.report.movements == b.report.movements);
    CHECK(a.report.days == 365);
}

TEST_CASE("invariants hold every day")
{
    auto st = initialize_model(scenario_with_seed(8), fast_aging());
    std::vector<int> placeholders;
    for (const auto& f : st.network.facilities())
        placeholders.push_back(f.placeholders());
    for (int d = 0; d < 120; ++d) {
        step(st);
        const auto problems = audit(st);
        REQUIRE_MESSAGE(problems.empty(), problems.front());
        for (std::size_t k = 0; k < st.network.size(); ++k)
            REQUIRE(st.network.facilities()[k].placeholders() == placeholders[k]);
    }
    CHECK(st.report.max_transfer_attempts <= 1);
    CHECK(st.report.max_community_attempts[index_of(Category::Nh)] <= st.params.nursing_home_attempts);
    CHECK(st.report.max_community_attempts[index_of(Category::Stach)] <= static_cast<int>(st.network.count(Category::Stach)));
}

TEST_CASE("discharges selected are exactly the agents due today")
{
    auto st = initialize_model(scenario_with_seed(9), fast_aging());
    for (int d = 0; d < 10; ++d) {
        std::vector<AgentId> want;
        for (const auto& a : st.agents)
            if (a.alive && !a.in_community() && a.leave_day && *a.leave_day == st.day)
                want.push_back(a.id);
        std::vector<AgentId> got;
        for (const auto& act : select_discharges(st)) {
            CHECK(act.kind == ActionKind::FacilityDischarge);
            got.push_back(act.agent);
        }
        std::sort(got.begin(), got.end());
        CHECK(got == want);
        step(st);
    }
}

TEST_CASE("event log replays to the final agent locations")
{
    auto st = initialize_model(scenario_with_seed(10), fast_aging(true));
    // Day-0 placements are not events; start from the initial locations.
    std::unordered_map<AgentId, std::string> where;
    for (const auto& a : st.agents)
        where[a.id] = a.in_community() ? "community" : std::to_string(to_int(st.network.at(a.location).id()));
    const auto start_lines = st.log.lines().size();
    run(st, 200);
    std::set<AgentId> dead;
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < st.log.lines().size(); ++i) {
        const auto& line = st.log.lines()[i];
        for (char ch : line + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
        if (i < start_lines)
            continue;
        const auto f = split(line);
        REQUIRE(f.size() == 6);
        AgentId id = 0;
        std::from_chars(f[1].data(), f[1].data() + f[1].size(), id);
        REQUIRE_FALSE(dead.contains(id));
        const Agent& agent = st.agents[id];
        const std::string& ev = f[2];
        if (ev == "admit" || ev == "discharge" || ev == "death") {
            CHECK(f[3] == where[id]);
            // A transfer discharge names the target; the admit that follows moves the agent.
            if (f[5] != "transfer")
                where[id] = f[4];
        }
        if (ev == "death")
            dead.insert(id);
        if (ev == "admit") {
            const auto slot = st.network.slot_of(FacilityId{std::stoi(f[4])});
            const auto cat = st.category_of(slot);
            CHECK(age_allows(cat, agent.age_group));
            if (f[5].find("bed=icu") != std::string::npos)
                CHECK(cat == Category::Stach);
        }
    }
    CHECK(h == st.log.hash());
    for (const auto& a : st.agents) {
        const std::string want = !a.alive ? "dead" : a.in_community() ? "community"
                                                   : std::to_string(to_int(st.network.at(a.location).id()));
        CHECK(where[a.id] == want);
    }
}

TEST_CASE("movement tallies match the event log")
{
    auto st = initialize_model(scenario_with_seed(11), fast_aging(true));
    run(st, 90);
    long long admits = 0;
    for (const auto& line : st.log.lines())
        admits += split(line)[2] == "admit";
    CHECK(admits == st.report.movements.block(0, 1, 4, 3).sum());
    CHECK(st.report.movements(0, 0) == 0);
    CHECK(st.report.movements(0, 2) == 0);
}
