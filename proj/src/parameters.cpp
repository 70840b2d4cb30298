#include "pflow/parameters.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "pflow/types.hpp"

namespace pflow {

namespace {

/// Calls f(key, field&) for every parameter, in file order.
template <typename P, typename F>
void for_each_field(P& p, F&& f)
{
    f("ltach_fill", p.ltach_fill);
    f("non_icu_fill", p.non_icu_fill);
    f("icu_fill", p.icu_fill);
    f("nursing_home_death", p.nursing_home_death);
    f("ltach_hospital", p.ltach_hospital);
    f("ltach_nh", p.ltach_nh);
    f("ltach_death", p.ltach_death);
    f("ltach_65_plus", p.ltach_65_plus);
    f("nh_stach_nh", p.nh_stach_nh);
    f("nh_community", p.nh_community);
    f("nursing_home_closest_n", p.nursing_home_closest_n);
    f("nursing_home_attempts", p.nursing_home_attempts);
    f("ltach_closest_n", p.ltach_closest_n);
    f("ltach_attempts", p.ltach_attempts);
    f("max_distance", p.max_distance);
    f("n_agents", p.n_agents);
    f("population_reference", p.population_reference);
    f("days", p.days);
    f("seed", p.seed);
    f("use_facility_capacity_overrides", p.use_facility_capacity_overrides);
    f("readmission_enabled", p.readmission_enabled);
    f("ltach_los_mean", p.ltach_los_mean);
    f("ltach_los_sd", p.ltach_los_sd);
    f("icu_multiplier", p.icu_multiplier);
    f("icu_intercept", p.icu.intercept);
    f("icu_b_age1", p.icu.age1);
    f("icu_b_age2", p.icu.age2);
    f("icu_b_comorbid", p.icu.comorbid);
    f("icu_b_los", p.icu.los);
    f("icu_b_bedcount", p.icu.bedcount);
    f("pattern1_min_admissions", p.thresholds.pattern1_min_admissions);
    f("pattern1_mean_tolerance", p.thresholds.pattern1_mean_tolerance);
    f("pattern1_sd_tolerance", p.thresholds.pattern1_sd_tolerance);
    f("pattern2_min_capacity", p.thresholds.pattern2_min_capacity);
    f("pattern2_tolerance", p.thresholds.pattern2_tolerance);
    f("pattern2_slope_tolerance", p.thresholds.pattern2_slope_tolerance);
    f("pattern3_min_target", p.thresholds.pattern3_min_target);
    f("pattern3_tolerance", p.thresholds.pattern3_tolerance);
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out)
{
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_value(const std::string& text, bool& out)
{
    if (text == "true" || text == "1") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0") {
        out = false;
        return true;
    }
    return false;
}

bool parse_value(const std::string& text, double& out) { return parse_number(text, out) && std::isfinite(out); }
bool parse_value(const std::string& text, int& out) { return parse_number(text, out); }
bool parse_value(const std::string& text, long long& out) { return parse_number(text, out); }
bool parse_value(const std::string& text, std::uint64_t& out) { return parse_number(text, out); }

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw InputError("parameter out of range: " + what);
}

bool proportion(double x) { return x >= 0.0 && x <= 1.0; }

} // namespace

void Parameters::validate() const
{
    require(ltach_fill > 0.0 && ltach_fill <= 1.0, "ltach_fill must be in (0, 1]");
    require(non_icu_fill > 0.0 && non_icu_fill <= 1.0, "non_icu_fill must be in (0, 1]");
    require(icu_fill > 0.0 && icu_fill <= 1.0, "icu_fill must be in (0, 1]");
    for (const auto& [name, value] :
         {std::pair{"nursing_home_death", nursing_home_death}, {"ltach_hospital", ltach_hospital},
          {"ltach_nh", ltach_nh}, {"ltach_death", ltach_death}, {"ltach_65_plus", ltach_65_plus},
          {"nh_stach_nh", nh_stach_nh}, {"nh_community", nh_community}})
        require(proportion(value), std::string(name) + " must be in [0, 1]");
    require(ltach_hospital + ltach_nh <= 1.0, "ltach_hospital + ltach_nh must not exceed 1");
    require(nursing_home_closest_n >= 1 && nursing_home_attempts >= 1, "nursing home counts must be >= 1");
    require(ltach_closest_n >= 1 && ltach_attempts >= 1, "LTACH counts must be >= 1");
    require(max_distance > 0.0, "max_distance must be positive");
    require(n_agents >= 1, "n_agents must be >= 1");
    require(population_reference >= n_agents, "population_reference must be >= n_agents");
    require(days >= 1, "days must be >= 1");
    require(ltach_los_mean > 0.0 && ltach_los_sd >= 0.0, "LTACH LOS mean must be positive and sd non-negative");
    require(icu_multiplier >= 0.0, "icu_multiplier must be non-negative");
    if (readmission_enabled)
        throw InputError("readmission_enabled: the readmission pathway is not active in this model");
}

LoadedParameters parse_parameters(const std::string& text, const std::string& origin)
{
    std::map<std::string, std::string> values;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw InputError(origin + ":" + std::to_string(number) + ": expected key = value");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (!values.emplace(key, value).second)
            throw InputError(origin + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
    }

    LoadedParameters out;
    for_each_field(out.parameters, [&](const char* key, auto& field) {
        const auto it = values.find(key);
        if (it == values.end()) {
            out.defaulted.emplace_back(key);
            return;
        }
        if (!parse_value(it->second, field))
            throw InputError(origin + ": bad value for '" + it->first + "': '" + it->second + "'");
        values.erase(it);
    });
    if (!values.empty())
        throw InputError(origin + ": unknown parameter '" + values.begin()->first + "'");
    out.parameters.validate();
    return out;
}

LoadedParameters read_parameters(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError(path.string() + ": cannot open parameter file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_parameters(buffer.str(), path.string());
}

std::string format_parameters(const Parameters& p)
{
    std::ostringstream out;
    out.precision(17);
    for_each_field(p, [&](const char* key, const auto& field) {
        out << key << " = ";
        if constexpr (std::is_same_v<std::decay_t<decltype(field)>, bool>)
            out << (field ? "true" : "false");
        else
            out << field;
        out << '\n';
    });
    return out.str();
}

void write_parameters(const std::filesystem::path& path, const Parameters& p)
{
    std::ofstream out(path);
    if (!out)
        throw InputError(path.string() + ": cannot write");
    out << format_parameters(p);
}

} // namespace pflow
