#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pflow {

/// Logistic ICU-need model. Coefficients apply per unit of each predictor;
/// bed count enters per 100 beds.
struct IcuCoefficients
{
    double intercept = -2.2;
    double age1 = 0.3;
    double age2 = 0.6;
    double comorbid = 0.5;
    double los = 0.05;
    double bedcount = 0.1;
};

/// Thresholds used by the pattern checks.
struct ValidationThresholds
{
    long long pattern1_min_admissions = 1000;
    double pattern1_mean_tolerance = 0.02;
    double pattern1_sd_tolerance = 0.05;
    double pattern2_min_capacity = 100.0;
    double pattern2_tolerance = 0.05;
    double pattern2_slope_tolerance = 0.02;
    double pattern3_min_target = 10000.0;
    double pattern3_tolerance = 0.05;
};

/// Every model parameter. Defaults are the reference starting-capacity,
/// movement and distance values; the rest are engine settings.
struct Parameters
{
    // Starting capacities.
    double ltach_fill = 0.9;
    double non_icu_fill = 0.65;
    double icu_fill = 0.50;

    // Location movement.
    double nursing_home_death = 0.15;
    double ltach_hospital = 0.071;
    double ltach_nh = 0.449;
    double ltach_death = 0.01;
    double ltach_65_plus = 0.75;
    double nh_stach_nh = 0.80;
    double nh_community = 0.67;

    // Distances.
    int nursing_home_closest_n = 30;
    int nursing_home_attempts = 30;
    int ltach_closest_n = 10;
    int ltach_attempts = 3;
    double max_distance = 200.0;

    // Run setup.
    long long n_agents = 100000;
    long long population_reference = 10600823;
    int days = 365;
    std::uint64_t seed = 0;
    bool use_facility_capacity_overrides = false;
    bool readmission_enabled = false;

    // LOS and ICU.
    double ltach_los_mean = 25.0;
    double ltach_los_sd = 10.0;
    double icu_multiplier = 1.0;
    IcuCoefficients icu;

    ValidationThresholds thresholds;

    /// Throws InputError naming the first out-of-range value.
    void validate() const;
};

struct LoadedParameters
{
    Parameters parameters;
    std::vector<std::string> defaulted; ///< keys absent from the file
};

/// Flat `key = value` text; `#` starts a comment. Unknown keys are errors.
LoadedParameters read_parameters(const std::filesystem::path& path);
LoadedParameters parse_parameters(const std::string& text, const std::string& origin = "<parameters>");
void write_parameters(const std::filesystem::path& path, const Parameters& p);
std::string format_parameters(const Parameters& p);

} // namespace pflow
