#include "pflow/population.hpp"

#include <fstream>
#include <numeric>

#include "pflow/csv.hpp"

namespace pflow {

AgeGroup bin_age(int age_years)
{
    if (age_years < 0)
        throw InputError("negative age: " + std::to_string(age_years));
    if (age_years < 50)
        return AgeGroup::Under50;
    if (age_years < 65)
        return AgeGroup::From50To64;
    return AgeGroup::Over65;
}

std::vector<PersonRow> expand_population(std::span<const PersonRow> rows, std::size_t target, Rng& rng)
{
    if (rows.empty())
        throw InputError("expand_population: no rows to expand");
    if (target < rows.size())
        throw InputError("expand_population: target " + std::to_string(target) + " is below the " +
                         std::to_string(rows.size()) + " available rows");
    std::vector<PersonRow> out(rows.begin(), rows.end());
    out.reserve(target);
    while (out.size() < target)
        out.push_back(rows[rng.uniform_below(rows.size())]);
    return out;
}

bool assign_comorbidity(AgeGroup group, Rng& rng)
{
    const double p = kComorbidityProbability[index_of(group)];
    // Group 0 consumes no draw.
    return p > 0.0 && rng.bernoulli(p);
}

std::vector<Agent> sample_agents(std::span<const PersonRow> rows, std::size_t n, Rng& rng)
{
    if (n < 1 || n > rows.size())
        throw InputError("sample_agents: need 1 <= n <= " + std::to_string(rows.size()) + ", got " +
                         std::to_string(n));
    // Partial Fisher-Yates over row indices.
    std::vector<std::uint32_t> index(rows.size());
    std::iota(index.begin(), index.end(), 0u);
    std::vector<Agent> agents;
    agents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_below(rows.size() - i));
        std::swap(index[i], index[j]);
        const PersonRow& row = rows[index[i]];
        Agent a;
        a.id = static_cast<AgentId>(i);
        a.county = row.county;
        a.sex = row.sex;
        a.age_group = bin_age(row.age_years);
        a.concurrent_conditions = assign_comorbidity(a.age_group, rng);
        agents.push_back(a);
    }
    return agents;
}

std::vector<PersonRow> read_population_csv(const std::filesystem::path& path)
{
    csv::Reader reader(path, {"county_id", "sex", "age_years"});
    std::vector<PersonRow> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        PersonRow r;
        r.county = CountyId{reader.as_int(f[0], "county_id")};
        if (f[1] == "female" || f[1] == "F" || f[1] == "f")
            r.sex = Sex::Female;
        else if (f[1] == "male" || f[1] == "M" || f[1] == "m")
            r.sex = Sex::Male;
        else
            throw InputError(reader.where("sex must be female or male, got '" + f[1] + "'"));
        r.age_years = reader.as_int(f[2], "age_years");
        if (r.age_years < 0 || r.age_years > 120)
            throw InputError(reader.where("age_years out of range [0, 120]"));
        rows.push_back(r);
    }
    if (rows.empty())
        throw InputError(path.string() + ": population file has no rows");
    return rows;
}

void write_population_csv(const std::filesystem::path& path, std::span<const PersonRow> rows)
{
    std::ofstream out(path);
    if (!out)
        throw InputError(path.string() + ": cannot write");
    out << "county_id,sex,age_years\n";
    for (const auto& r : rows)
        out << to_int(r.county) << ',' << (r.sex == Sex::Female ? "female" : "male") << ',' << r.age_years << '\n';
}

} // namespace pflow
