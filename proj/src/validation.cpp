#include "pflow/validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pflow {

double relative_error(double modeled, double expected)
{
    return std::abs(modeled - expected) / std::max(expected, 1.0);
}

Expectations expectations_from_state(const ModelState& s)
{
    Expectations e;
    for (std::size_t slot = 1; slot < s.network.size(); ++slot) {
        const FacilityId id = s.network.at(static_cast<LocationIndex>(slot)).id();
        e.los[id] = {s.los[slot].mean, s.los[slot].sd};
        e.census[id] = s.report.initial.census.at(slot);
    }
    e.four_by_four = s.tables->four_by_four;
    return e;
}

double ols_slope(const std::vector<double>& y)
{
    const auto n = static_cast<double>(y.size());
    if (y.size() < 2)
        return 0.0;
    const double xbar = (n - 1.0) / 2.0;
    double ybar = 0.0;
    for (double v : y)
        ybar += v;
    ybar /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double dx = static_cast<double>(i) - xbar;
        sxy += dx * (y[i] - ybar);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

double relative_drift(const std::vector<double>& y)
{
    if (y.size() < 2)
        return 0.0;
    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(y.size());
    if (mean == 0.0)
        return 0.0;
    return ols_slope(y) * static_cast<double>(y.size() - 1) / mean;
}

namespace {

void finish(PatternReport& r)
{
    r.pass = std::all_of(r.rows.begin(), r.rows.end(), [](const PatternRow& row) { return !row.judged || row.pass; });
}

std::string id_of(FacilityId id) { return std::to_string(to_int(id)); }

} // namespace

PatternReport pattern1_los(const RunReport& run, const Expectations& expected, const ValidationThresholds& t)
{
    PatternReport r{1, {}, true};
    for (const auto& f : run.facilities) {
        if (f.category == Category::Community || f.admissions == 0)
            continue;
        const auto it = expected.los.find(f.id);
        if (it == expected.los.end())
            continue;
        const auto n = static_cast<double>(f.admissions);
        const double mean = f.los_sum / n;
        const double var = n > 1.0 ? std::max(0.0, (f.los_sq_sum - n * mean * mean) / (n - 1.0)) : 0.0;
        const bool judged = f.admissions >= t.pattern1_min_admissions;
        PatternRow m{1, id_of(f.id) + ":mean_los", mean, it->second.mean, relative_error(mean, it->second.mean),
                     judged, true};
        m.pass = m.rel_error <= t.pattern1_mean_tolerance;
        PatternRow s{1, id_of(f.id) + ":sd_los", std::sqrt(var), it->second.sd,
                     relative_error(std::sqrt(var), it->second.sd), judged, true};
        s.pass = s.rel_error <= t.pattern1_sd_tolerance;
        PatternRow a{1, id_of(f.id) + ":admissions", n, n, 0.0, false, true};
        r.rows.push_back(a);
        r.rows.push_back(m);
        r.rows.push_back(s);
    }
    finish(r);
    return r;
}

PatternReport pattern2_capacity(const RunReport& run, const Expectations& expected, const ValidationThresholds& t)
{
    PatternReport r{2, {}, true};
    for (const auto& f : run.facilities) {
        if (f.category == Category::Community || f.census.empty())
            continue;
        const auto it = expected.census.find(f.id);
        if (it == expected.census.end())
            continue;
        const std::vector<double> y(f.census.begin(), f.census.end());
        double mean = 0.0;
        for (double v : y)
            mean += v;
        mean /= static_cast<double>(y.size());
        const bool judged = it->second >= t.pattern2_min_capacity;
        PatternRow m{2, id_of(f.id) + ":mean_census", mean, it->second, relative_error(mean, it->second), judged,
                     true};
        m.pass = m.rel_error <= t.pattern2_tolerance;
        const double drift = relative_drift(y);
        PatternRow d{2, id_of(f.id) + ":trend", drift, 0.0, std::abs(drift), judged, true};
        d.pass = std::abs(drift) <= t.pattern2_slope_tolerance;
        r.rows.push_back(m);
        r.rows.push_back(d);
    }
    finish(r);
    return r;
}

PatternReport pattern3_flows(const RunReport& run, const Expectations& expected, const ValidationThresholds& t)
{
    PatternReport r{3, {}, true};
    const double years = run.days / 365.0;
    for (int i = 0; i < kCategoryCount; ++i)
        for (int j = 0; j < kCategoryCount; ++j) {
            const auto from = static_cast<Category>(i), to = static_cast<Category>(j);
            const double modeled = static_cast<double>(run.movements(i, j));
            const double target = expected.four_by_four(i, j) * years;
            PatternRow row{3, std::string(to_string(from)) + "->" + std::string(to_string(to)), modeled, target,
                           relative_error(modeled, target), false, true};
            const bool structural_zero =
                from == Category::Community && (to == Category::Community || to == Category::Ltach);
            if (structural_zero) {
                row.judged = true;
                row.pass = modeled == 0.0;
            } else if (expected.four_by_four(i, j) >= t.pattern3_min_target) {
                row.judged = true;
                row.pass = row.rel_error <= t.pattern3_tolerance;
            }
            r.rows.push_back(row);
        }
    finish(r);
    return r;
}

DeterminismResult determinism_check(const Scenario& scenario, std::uint64_t seed, int days,
                                    const InitOptions& options)
{
    Scenario sc = scenario;
    sc.parameters.seed = seed;
    auto tables = std::make_shared<const TransitionTables>(build_transition_tables(sc.data, sc.parameters));
    std::vector<std::string> logs[2];
    for (auto& log : logs) {
        InitOptions opt = options;
        opt.event_sink = nullptr;
        opt.keep_event_lines = true;
        ModelState state = initialize_model(sc, tables, opt);
        run(state, days);
        log = state.log.lines();
    }
    DeterminismResult out;
    out.events = logs[0].size();
    const std::size_t n = std::min(logs[0].size(), logs[1].size());
    for (std::size_t i = 0; i < n; ++i)
        if (logs[0][i] != logs[1][i]) {
            out.first_divergence = i;
            out.first_line = logs[0][i];
            out.second_line = logs[1][i];
            return out;
        }
    if (logs[0].size() != logs[1].size()) {
        out.first_divergence = n;
        out.first_line = n < logs[0].size() ? logs[0][n] : "<end>";
        out.second_line = n < logs[1].size() ? logs[1][n] : "<end>";
        return out;
    }
    out.identical = true;
    return out;
}

void write_report_csv(std::ostream& out, const std::vector<PatternReport>& reports)
{
    out << "pattern,entity,modeled,expected,rel_error,pass\n";
    for (const auto& r : reports)
        for (const auto& row : r.rows) {
            out << row.pattern << ',' << row.entity << ',' << std::setprecision(10) << row.modeled << ','
                << row.expected << ',' << row.rel_error << ',' << (row.judged ? (row.pass ? "true" : "false") : "n/a")
                << '\n';
        }
}

} // namespace pflow
