#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pflow/engine.hpp"

namespace pflow {

struct PatternRow
{
    int pattern = 0;
    std::string entity;
    double modeled = 0.0;
    double expected = 0.0;
    double rel_error = 0.0; ///< |modeled - expected| / max(expected, 1)
    bool judged = false;    ///< false for rows below the size cutoff
    bool pass = true;
};

struct PatternReport
{
    int pattern = 0;
    std::vector<PatternRow> rows;
    bool pass = true; ///< all judged rows pass
};

double relative_error(double modeled, double expected);

/// What a run is compared against.
struct Expectations
{
    struct Los
    {
        double mean = 0.0;
        double sd = 0.0;
    };
    std::unordered_map<FacilityId, Los> los;
    std::unordered_map<FacilityId, double> census;
    FourByFour four_by_four = FourByFour::Zero(); ///< annual, already scaled to the run's agent count
};

/// Defaults from a model: LOS inputs per facility, the day-0 census as the
/// expected census, and the tables' four-by-four.
Expectations expectations_from_state(const ModelState& state);

/// Ordinary least-squares slope of y against 0..n-1.
double ols_slope(const std::vector<double>& y);
/// Fitted change over the series relative to its mean: slope * (n - 1) / mean.
double relative_drift(const std::vector<double>& y);

PatternReport pattern1_los(const RunReport& run, const Expectations& expected, const ValidationThresholds& t);
PatternReport pattern2_capacity(const RunReport& run, const Expectations& expected, const ValidationThresholds& t);
/// Targets are annual; modeled counts are compared against target * days / 365.
PatternReport pattern3_flows(const RunReport& run, const Expectations& expected, const ValidationThresholds& t);

struct DeterminismResult
{
    bool identical = false;
    std::size_t events = 0;
    std::optional<std::size_t> first_divergence; ///< 0-based record index
    std::string first_line;
    std::string second_line;
};

/// Runs the scenario twice from scratch with the same seed and compares the
/// event logs record by record.
DeterminismResult determinism_check(const Scenario& scenario, std::uint64_t seed, int days,
                                    const InitOptions& options = {});

/// `pattern,entity,modeled,expected,rel_error,pass` (pass is "true", "false" or
/// "n/a" for rows below the size cutoff).
void write_report_csv(std::ostream& out, const std::vector<PatternReport>& reports);

} // namespace pflow
