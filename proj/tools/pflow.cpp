// Command-line driver: gen, distances, run, validate, replay-check.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pflow/engine.hpp"
#include "pflow/report.hpp"
#include "pflow/scenario.hpp"
#include "pflow/synthetic.hpp"
#include "pflow/validation.hpp"

namespace fs = std::filesystem;
using namespace pflow;

namespace {

std::string default_scenario()
{
    const char* env = std::getenv(kScenarioEnvVar);
    return env ? env : "";
}

fs::path require_scenario(const std::string& dir)
{
    if (dir.empty())
        throw InputError(std::string("no scenario directory: pass --scenario or set ") + kScenarioEnvVar);
    return dir;
}

void print_reports(const std::vector<PatternReport>& reports)
{
    for (const auto& r : reports) {
        int judged = 0, failed = 0;
        for (const auto& row : r.rows)
            if (row.judged) {
                ++judged;
                failed += row.pass ? 0 : 1;
            }
        std::cout << "pattern " << r.pattern << ": " << (r.pass ? "PASS" : "FAIL") << " (" << judged
                  << " judged rows, " << failed << " failed)\n";
        for (const auto& row : r.rows)
            if (row.judged && !row.pass)
                std::cout << "  " << row.entity << " modeled=" << row.modeled << " expected=" << row.expected
                          << " rel_error=" << row.rel_error << '\n';
    }
}

int cmd_gen(const std::string& spec_path, std::optional<std::uint64_t> seed, const fs::path& out)
{
    SyntheticSpec spec = spec_path.empty() ? SyntheticSpec{} : read_synthetic_spec(spec_path);
    if (seed)
        spec.seed = *seed;
    const auto generated = generate_synthetic_scenario(spec);
    write_synthetic_scenario(generated, out);
    std::cout << "wrote scenario to " << out.string() << " (" << spec.counties << " counties, " << spec.hospitals
              << " hospitals, " << spec.ltachs << " LTACHs, " << spec.nhs << " nursing homes, " << spec.population
              << " people)\n";
    return 0;
}

int cmd_distances(const fs::path& scenario_dir, const std::string& out_dir)
{
    const Scenario sc = load_scenario(scenario_dir);
    const fs::path out = out_dir.empty() ? scenario_dir : fs::path(out_dir);
    fs::create_directories(out);
    for (Category c : {Category::Stach, Category::Ltach, Category::Nh}) {
        const auto& roster = c == Category::Stach ? sc.data.stachs : c == Category::Ltach ? sc.data.ltachs : sc.data.nhs;
        if (roster.empty())
            continue;
        const fs::path path = out / ("distances_" + std::string(to_string(c)) + ".csv");
        distances_for(sc.data, c).write_csv(path);
        std::cout << "wrote " << path.string() << '\n';
    }
    return 0;
}

struct RunOptions
{
    std::string scenario;
    std::optional<int> days;
    std::optional<std::uint64_t> seed;
    std::optional<long long> agents;
    std::string out = "run_out";
    bool no_events = false;
};

int cmd_run(const RunOptions& o)
{
    const fs::path dir = require_scenario(o.scenario);
    Scenario sc = load_scenario(dir);
    for (const auto& note : sc.notes)
        std::cerr << "note: " << note << '\n';
    if (o.days)
        sc.parameters.days = *o.days;
    if (o.seed)
        sc.parameters.seed = *o.seed;
    if (o.agents)
        sc.parameters.n_agents = *o.agents;
    sc.parameters.validate();

    fs::create_directories(o.out);
    std::ofstream events;
    InitOptions init;
    if (!o.no_events) {
        events.open(fs::path(o.out) / "events.csv");
        if (!events)
            throw InputError(o.out + "/events.csv: cannot write");
        events << EventLog::kHeader << '\n';
        init.event_sink = &events;
    }
    const auto t0 = std::chrono::steady_clock::now();
    ModelState state = initialize_model(sc, init);
    for (const auto& w : state.tables->warnings)
        std::cerr << "warning: " << w << '\n';
    const auto t1 = std::chrono::steady_clock::now();
    run(state, sc.parameters.days);
    const auto t2 = std::chrono::steady_clock::now();

    RunTallies tallies{state.report, expectations_from_state(state), sc.parameters.thresholds};
    if (fs::exists(dir / "ground_truth.json"))
        apply_ground_truth(dir / "ground_truth.json", tallies.expected,
                           static_cast<double>(sc.parameters.n_agents) /
                               static_cast<double>(sc.parameters.population_reference));
    write_tallies_json(fs::path(o.out) / "tallies.json", tallies);
    const auto reports = evaluate(tallies);
    std::ofstream report(fs::path(o.out) / "report.csv");
    write_report_csv(report, reports);

    const auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
    std::cout << "days " << state.report.days << ", agents " << state.agents.size() << ", events "
              << state.report.event_count << ", deaths " << state.report.deaths << ", turned away "
              << state.report.turned_away << " (fully " << state.report.fully_turned_away << ")\n";
    std::cout << "init " << secs(t0, t1) << " s, run " << secs(t1, t2) << " s\n";
    std::cout << "event log hash " << std::hex << state.report.event_hash << std::dec << '\n';
    print_reports(reports);
    return 0;
}

int cmd_validate(const std::string& run_dir, const std::string& truth, bool truth_flows)
{
    RunTallies tallies = read_tallies_json(fs::path(run_dir) / "tallies.json");
    if (!truth.empty())
        apply_ground_truth(truth, tallies.expected, 1.0, truth_flows);
    const auto reports = evaluate(tallies);
    std::ofstream report(fs::path(run_dir) / "report.csv");
    write_report_csv(report, reports);
    print_reports(reports);
    const bool pass = std::all_of(reports.begin(), reports.end(), [](const PatternReport& r) { return r.pass; });
    return pass ? 0 : 1;
}

int cmd_replay(const std::string& scenario, std::uint64_t seed, int days, std::optional<long long> agents)
{
    Scenario sc = load_scenario(require_scenario(scenario));
    if (agents)
        sc.parameters.n_agents = *agents;
    const auto result = determinism_check(sc, seed, days);
    if (result.identical) {
        std::cout << "identical: " << result.events << " events over " << days << " days\n";
        return 0;
    }
    std::cout << "DIVERGED at record " << *result.first_divergence << "\n  first:  " << result.first_line
              << "\n  second: " << result.second_line << '\n';
    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Patient-flow agent-based model"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic scenario");
    std::string spec_path, gen_out = "scenario";
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--spec", spec_path, "Size spec (key = value)")->check(CLI::ExistingFile);
    gen->add_option("--seed", gen_seed, "Generator seed (overrides the spec)");
    gen->add_option("--out", gen_out, "Output directory");

    auto* dist = app.add_subcommand("distances", "Precompute county-to-facility distance files");
    std::string dist_scenario = default_scenario(), dist_out;
    dist->add_option("--scenario", dist_scenario, "Scenario directory");
    dist->add_option("--out", dist_out, "Output directory (default: the scenario)");

    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario");
    RunOptions ro;
    ro.scenario = default_scenario();
    run_cmd->add_option("--scenario", ro.scenario, "Scenario directory");
    run_cmd->add_option("--days", ro.days, "Days to simulate")->check(CLI::Range(1, 100000));
    run_cmd->add_option("--seed", ro.seed, "Random seed");
    run_cmd->add_option("--agents", ro.agents, "Number of agents")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", ro.out, "Output directory");
    run_cmd->add_flag("--no-events", ro.no_events, "Skip writing events.csv");

    auto* val = app.add_subcommand("validate", "Check the three patterns on a finished run");
    std::string val_run = "run_out", val_truth;
    bool val_truth_flows = false;
    val->add_option("--run", val_run, "Run output directory");
    val->add_option("--truth", val_truth, "Ground-truth file to compare against")->check(CLI::ExistingFile);
    val->add_flag("--truth-flows", val_truth_flows, "Also take four-by-four targets from the ground truth");

    auto* replay = app.add_subcommand("replay-check", "Run twice with one seed and compare event logs");
    std::string rp_scenario = default_scenario();
    std::uint64_t rp_seed = 42;
    int rp_days = 365;
    std::optional<long long> rp_agents;
    replay->add_option("--scenario", rp_scenario, "Scenario directory");
    replay->add_option("--seed", rp_seed, "Random seed");
    replay->add_option("--days", rp_days, "Days to simulate")->check(CLI::Range(1, 100000));
    replay->add_option("--agents", rp_agents, "Number of agents")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* failing = &app;
        for (auto* sub : app.get_subcommands())
            failing = sub;
        std::cerr << failing->help();
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        if (*gen)
            return cmd_gen(spec_path, gen_seed, gen_out);
        if (*dist)
            return cmd_distances(require_scenario(dist_scenario), dist_out);
        if (*run_cmd)
            return cmd_run(ro);
        if (*val)
            return cmd_validate(val_run, val_truth, val_truth_flows);
        if (*replay)
            return cmd_replay(rp_scenario, rp_seed, rp_days, rp_agents);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
