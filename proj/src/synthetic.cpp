#include "pflow/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Sparse>

#include "json.hpp"
#include "pflow/engine.hpp"
#include "pflow/los.hpp"

namespace pflow {

namespace {

// Bounding box for county centroids, roughly a 170 x 300 mile state.
constexpr double kLatMin = 34.0, kLatMax = 36.5;
constexpr double kLonMin = -82.5, kLonMax = -77.0;

constexpr std::array<double, kAgeGroupCount> kAgeShares{0.62, 0.20, 0.18};
constexpr std::array<int, kAgeGroupCount> kAgeLow{0, 50, 65};
constexpr std::array<int, kAgeGroupCount> kAgeHigh{49, 64, 99};
// Annual community hospitalizations per person, well above real-world rates
// so that a 100k-agent desk run has flows large enough to validate.
constexpr std::array<double, kAgeGroupCount> kBaseHospitalRate{0.20, 0.30, 0.60};
constexpr double kBaseNhRate = 0.03;
constexpr std::array<double, kAgeGroupCount> kTargetHospitalAge{0.4099, 0.2012, 0.3890};
constexpr double kHospitalDeath = 0.02;
constexpr double kIcuBedShare = 0.12;
constexpr double kNhOccupancy = 0.85;
constexpr double kChoiceDecayMiles = 40.0;
// Survivor disposition rows (community, hospital, LTACH, NH) before per-hospital jitter.
const std::array<TransitionRow, kAgeGroupCount> kBaseRows{TransitionRow(0.97, 0.03, 0.0, 0.0),
                                                         TransitionRow(0.93, 0.04, 0.03, 0.0),
                                                         TransitionRow(0.76, 0.04, 0.04, 0.16)};

constexpr int kToCommunity = -1;
constexpr int kToDeath = -2;

struct Edge
{
    int to;
    double p;
};

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

GeoPoint near(const GeoPoint& p, Rng& rng)
{
    return {std::clamp(p.latitude + uniform(rng, -0.1, 0.1), -90.0, 90.0),
            std::clamp(p.longitude + uniform(rng, -0.1, 0.1), -180.0, 180.0)};
}

double pmf_mean(const Eigen::VectorXd& pmf)
{
    double m = 0.0;
    for (Eigen::Index k = 0; k < pmf.size(); ++k)
        m += static_cast<double>(k + 1) * pmf(k);
    return m / pmf.sum();
}

/// Inverse-distance choice over the closest in-radius facilities, as the engine does it.
std::vector<std::vector<std::pair<int, double>>> distance_choice(const DistanceMatrix& dm,
                                                                 const std::vector<CountyCentroid>& counties,
                                                                 std::size_t n, double max_miles)
{
    std::unordered_map<FacilityId, int> col;
    for (std::size_t j = 0; j < dm.facilities().size(); ++j)
        col.emplace(dm.facilities()[j], static_cast<int>(j));
    std::vector<std::vector<std::pair<int, double>>> out(counties.size());
    for (std::size_t c = 0; c < counties.size(); ++c) {
        double total = 0.0;
        for (FacilityId id : dm.closest_n(counties[c].id, n, max_miles)) {
            const double w = 1.0 / std::max(dm.at(counties[c].id, id), 1.0);
            out[c].push_back({col.at(id), w});
            total += w;
        }
        for (auto& [j, w] : out[c])
            w /= total;
    }
    return out;
}

/// Steady-state expected flows for the whole generated world.
struct World
{
    int H = 0, L = 0, N = 0;
    std::vector<std::array<double, kAgeGroupCount>> pop;    ///< by county
    std::vector<std::vector<double>> w;                      ///< hospital choice by county
    std::vector<std::vector<std::pair<int, double>>> u, v;   ///< LTACH and NH choice by county
    std::vector<std::array<TransitionRow, kAgeGroupCount>> rows; ///< hospital survivor rows
    std::array<TransitionRow, kAgeGroupCount> ltach_row, nh_row;
    std::vector<double> hospital_los, nh_los; ///< expected whole-day LOS
    double ltach_los = 0.0;
    double death_s = kHospitalDeath, death_l = 0.01, death_n = 0.0;
    double nh_return = 0.8;
    std::array<double, kAgeGroupCount> lambda{}; ///< annual hospitalizations per community resident
    double mu = 0.0;                            ///< annual community-to-NH admissions per resident 65+

    // Results.
    std::vector<std::array<double, kAgeGroupCount>> hospital_adm; ///< [h][age]
    std::vector<std::vector<std::array<double, kAgeGroupCount>>> hospital_adm_county; ///< [h][c][age]
    std::vector<double> ltach_adm, nh_adm;
    FourByFour flows = FourByFour::Zero();
    double residents_in_facilities = 0.0;

    int n_states(int a) const { return H + L + N + (a == 2 ? H * N : 0); }
    int hosp(int h) const { return h; }
    int ltach(int l) const { return H + l; }
    int nh(int k) const { return H + L + k; }
    int hosp_from_nh(int h, int k) const { return H + L + N + h * N + k; }

    Category category(int state) const
    {
        if (state < H)
            return Category::Stach;
        if (state < H + L)
            return Category::Ltach;
        if (state < H + L + N)
            return Category::Nh;
        return Category::Stach;
    }

    double los_of(int state) const
    {
        if (state < H)
            return hospital_los[static_cast<std::size_t>(state)];
        if (state < H + L)
            return ltach_los;
        if (state < H + L + N)
            return nh_los[static_cast<std::size_t>(state - H - L)];
        return hospital_los[static_cast<std::size_t>((state - H - L - N) / N)];
    }

    /// Adds survivor destinations for one row: hospitals by county weight
    /// (excluding `exclude`), LTACH and NH by distance; unreachable ones go home.
    void spread(std::vector<Edge>& out, std::size_t c, const TransitionRow& row, double mass, int exclude) const
    {
        out.push_back({kToCommunity, mass * row(0)});
        if (row(1) > 0.0) {
            double total = 0.0;
            for (int h = 0; h < H; ++h)
                if (h != exclude)
                    total += w[c][static_cast<std::size_t>(h)];
            if (total > 0.0) {
                for (int h = 0; h < H; ++h)
                    if (h != exclude)
                        out.push_back({hosp(h), mass * row(1) * w[c][static_cast<std::size_t>(h)] / total});
            } else {
                out.push_back({kToCommunity, mass * row(1)});
            }
        }
        const auto facility = [&](double p, const std::vector<std::pair<int, double>>& choice, auto index) {
            if (p <= 0.0)
                return;
            if (choice.empty()) {
                out.push_back({kToCommunity, mass * p});
                return;
            }
            for (const auto& [j, q] : choice)
                out.push_back({index(j), mass * p * q});
        };
        facility(row(2), u[c], [&](int j) { return ltach(j); });
        facility(row(3), v[c], [&](int j) { return nh(j); });
    }

    std::vector<Edge> edges(int state, std::size_t c, int a) const
    {
        std::vector<Edge> out;
        if (state < H) {
            out.push_back({kToDeath, death_s});
            spread(out, c, rows[static_cast<std::size_t>(state)][a], 1.0 - death_s, state);
        } else if (state < H + L) {
            out.push_back({kToDeath, death_l});
            spread(out, c, ltach_row[a], 1.0 - death_l, -1);
        } else if (state < H + L + N) {
            // Only hospital and community destinations; hospital stays remember the NH.
            const int k = state - H - L;
            out.push_back({kToDeath, death_n});
            const TransitionRow& row = nh_row[a];
            out.push_back({kToCommunity, (1.0 - death_n) * row(0)});
            double total = 0.0;
            for (double x : w[c])
                total += x;
            for (int h = 0; h < H && n_states(a) > H + L + N; ++h)
                out.push_back({hosp_from_nh(h, k), (1.0 - death_n) * row(1) * w[c][static_cast<std::size_t>(h)] / total});
        } else {
            const int h = (state - H - L - N) / N;
            const int k = (state - H - L - N) % N;
            out.push_back({kToDeath, death_s});
            out.push_back({nh(k), (1.0 - death_s) * nh_return});
            spread(out, c, rows[static_cast<std::size_t>(h)][a], (1.0 - death_s) * (1.0 - nh_return), h);
        }
        return out;
    }

    void solve()
    {
        const std::size_t C = pop.size();
        hospital_adm.assign(static_cast<std::size_t>(H), {});
        hospital_adm_county.assign(static_cast<std::size_t>(H),
                                   std::vector<std::array<double, kAgeGroupCount>>(C, std::array<double, kAgeGroupCount>{}));
        ltach_adm.assign(static_cast<std::size_t>(L), 0.0);
        nh_adm.assign(static_cast<std::size_t>(N), 0.0);
        flows.setZero();
        residents_in_facilities = 0.0;
        for (std::size_t c = 0; c < C; ++c)
            for (int a = 0; a < kAgeGroupCount; ++a) {
                if (pop[c][a] <= 0.0)
                    continue;
                const int n = n_states(a);
                Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
                for (int h = 0; h < H; ++h)
                    b(hosp(h)) += lambda[a] * w[c][static_cast<std::size_t>(h)];
                if (age_allows(Category::Nh, age_group_from_int(a)))
                    for (const auto& [k, q] : v[c])
                        b(nh(k)) += mu * q;

                std::vector<Eigen::Triplet<double>> trip;
                std::vector<std::vector<Edge>> all(static_cast<std::size_t>(n));
                for (int x = 0; x < n; ++x) {
                    trip.emplace_back(x, x, 1.0);
                    all[static_cast<std::size_t>(x)] = edges(x, c, a);
                    for (const Edge& e : all[static_cast<std::size_t>(x)])
                        if (e.to >= 0)
                            trip.emplace_back(e.to, x, -e.p);
                }
                Eigen::SparseMatrix<double> m(n, n);
                m.setFromTriplets(trip.begin(), trip.end());
                Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
                lu.compute(m);
                if (lu.info() != Eigen::Success)
                    throw LogicError("synthetic steady state: singular flow system");
                const Eigen::VectorXd per_unit = lu.solve(b);

                // Community size: everyone not in a facility.
                double k_census = 0.0;
                for (int x = 0; x < n; ++x)
                    k_census += per_unit(x) * los_of(x) / 365.0;
                const double comm = pop[c][a] / (1.0 + k_census);
                const Eigen::VectorXd adm = per_unit * comm;
                residents_in_facilities += comm * k_census;

                for (int x = 0; x < n; ++x) {
                    const Category cat = category(x);
                    if (cat == Category::Stach) {
                        const int h = x < H ? x : (x - H - L - N) / N;
                        hospital_adm[static_cast<std::size_t>(h)][a] += adm(x);
                        hospital_adm_county[static_cast<std::size_t>(h)][c][a] += adm(x);
                    } else if (cat == Category::Ltach) {
                        ltach_adm[static_cast<std::size_t>(x - H)] += adm(x);
                    } else {
                        nh_adm[static_cast<std::size_t>(x - H - L)] += adm(x);
                    }
                    for (const Edge& e : all[static_cast<std::size_t>(x)]) {
                        if (e.to == kToDeath)
                            continue;
                        const Category to = e.to == kToCommunity ? Category::Community : category(e.to);
                        flows(index_of(cat), index_of(to)) += adm(x) * e.p;
                    }
                    flows(index_of(Category::Community), index_of(cat)) += comm * b(x);
                }
            }
    }
};

} // namespace

SyntheticSpec parse_synthetic_spec(const std::string& text, const std::string& origin)
{
    SyntheticSpec s;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto trim = [](std::string x) {
            const auto b = x.find_first_not_of(" \t\r");
            const auto e = x.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty() || line.front() == '[')
            continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(number) + ": ";
        if (eq == std::string::npos)
            throw InputError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            std::size_t used = 0;
            if (key == "counties")
                s.counties = std::stoi(value, &used);
            else if (key == "hospitals")
                s.hospitals = std::stoi(value, &used);
            else if (key == "ltachs")
                s.ltachs = std::stoi(value, &used);
            else if (key == "nhs" || key == "nursing_homes")
                s.nhs = std::stoi(value, &used);
            else if (key == "population" || key == "agents")
                s.population = std::stoll(value, &used);
            else if (key == "seed")
                s.seed = std::stoull(value, &used);
            else if (key == "hospital_rate")
                s.hospital_rate = std::stod(value, &used);
            else if (key == "nh_rate")
                s.nh_rate = std::stod(value, &used);
            else
                throw InputError(where + "unknown key '" + key + "'");
            if (used != value.size())
                throw std::invalid_argument(value);
        } catch (const std::logic_error&) {
            throw InputError(where + "bad value '" + value + "' for " + key);
        }
    }
    return s;
}

SyntheticSpec read_synthetic_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError(path.string() + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_synthetic_spec(buf.str(), path.string());
}

SyntheticScenario generate_synthetic_scenario(const SyntheticSpec& spec)
{
    if (spec.counties < 1 || spec.hospitals < 1 || spec.ltachs < 0 || spec.nhs < 0)
        throw InputError("synthetic spec needs at least one county and one hospital");
    if (spec.population < spec.counties || spec.population > 20'000'000)
        throw InputError("synthetic spec: population must be between the county count and 20 million");
    if (!(spec.hospital_rate > 0.0) || !(spec.nh_rate >= 0.0))
        throw InputError("synthetic spec: rates must be positive");
    for (double r : kBaseHospitalRate)
        if (r * spec.hospital_rate >= 365.0)
            throw InputError("synthetic spec: hospital_rate implies more than one admission per person-day");

    Rng rng(spec.seed);
    SyntheticScenario out;
    Scenario& sc = out.scenario;
    ScenarioData& d = sc.data;
    Parameters& p = sc.parameters;
    p.n_agents = spec.population;
    p.population_reference = spec.population;
    p.seed = spec.seed;

    // Counties and people.
    std::vector<double> county_weight;
    for (int c = 0; c < spec.counties; ++c) {
        d.counties.push_back(
            {CountyId{c + 1}, {uniform(rng, kLatMin, kLatMax), uniform(rng, kLonMin, kLonMax)}});
        county_weight.push_back(std::exp(rng.standard_normal()));
    }
    const DiscreteSampler county_sampler(county_weight);
    const DiscreteSampler age_sampler(kAgeShares);
    std::vector<std::array<double, kAgeGroupCount>> pop(static_cast<std::size_t>(spec.counties));
    for (long long i = 0; i < spec.population; ++i) {
        const std::size_t c = county_sampler.sample(rng);
        const std::size_t a = age_sampler.sample(rng);
        const int age = kAgeLow[a] + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(kAgeHigh[a] - kAgeLow[a] + 1)));
        d.population.push_back({d.counties[c].id, rng.bernoulli(0.5) ? Sex::Male : Sex::Female, age});
        pop[c][a] += 1.0;
    }

    const auto place = [&](Category cat, int id, const std::string& prefix) {
        FacilityInfo f;
        f.id = FacilityId{id};
        f.category = cat;
        const std::size_t c = county_sampler.sample(rng);
        f.county = d.counties[c].id;
        f.geocode = near(d.counties[c].centroid, rng);
        f.name = prefix + " " + std::to_string(id);
        return f;
    };
    for (int h = 0; h < spec.hospitals; ++h)
        d.stachs.push_back(place(Category::Stach, 100 + h, "General Hospital"));
    for (int l = 0; l < spec.ltachs; ++l)
        d.ltachs.push_back(place(Category::Ltach, 500 + l, "Specialty Hospital"));
    for (int n = 0; n < spec.nhs; ++n)
        d.nhs.push_back(place(Category::Nh, 1000 + n, "Care Center"));

    // Facility attributes.
    World world;
    world.H = spec.hospitals;
    world.L = spec.ltachs;
    world.N = spec.nhs;
    world.pop = pop;
    std::vector<double> attract;
    std::vector<LosDistribution> hospital_los;
    for (auto& f : d.stachs) {
        attract.push_back(std::exp(0.9 * rng.standard_normal()));
        const double mean = uniform(rng, 3.5, 6.5);
        const double sd = mean * uniform(rng, 0.5, 0.8);
        hospital_los.push_back(fit_los(mean, sd));
        world.hospital_los.push_back(pmf_mean(los_pmf(hospital_los.back())));
        f.out_of_state_pct = std::round(uniform(rng, 0.0, 8.0) * 100.0) / 100.0;
        std::array<TransitionRow, kAgeGroupCount> rows;
        for (int a = 0; a < kAgeGroupCount; ++a) {
            TransitionRow r = kBaseRows[a];
            for (int k = 0; k < kCategoryCount; ++k)
                r(k) *= uniform(rng, 0.8, 1.25);
            rows[a] = r / r.sum();
        }
        world.rows.push_back(rows);
    }
    std::vector<LosDistribution> nh_los;
    for (std::size_t n = 0; n < d.nhs.size(); ++n) {
        const double mean = uniform(rng, 60.0, 200.0);
        nh_los.push_back(fit_los(mean, 0.8 * mean));
        world.nh_los.push_back(pmf_mean(los_pmf(nh_los.back())));
    }
    world.ltach_los = pmf_mean(los_pmf(fit_los(p.ltach_los_mean, p.ltach_los_sd)));
    world.death_l = p.ltach_death;
    world.nh_return = p.nh_stach_nh;
    const TransitionRow ltach_raw(1.0 - p.ltach_hospital - p.ltach_nh, p.ltach_hospital, 0.0, p.ltach_nh);
    const TransitionRow nh_raw(p.nh_community, 1.0 - p.nh_community, 0.0, 0.0);
    for (int a = 0; a < kAgeGroupCount; ++a) {
        world.ltach_row[a] = a == 0 ? TransitionRow::Zero() : adjust_for_age(ltach_raw, age_group_from_int(a));
        world.nh_row[a] = a == 2 ? adjust_for_age(nh_raw, age_group_from_int(a)) : TransitionRow::Zero();
    }

    // Choice sets.
    std::vector<FacilityLocation> loc;
    for (const auto& f : d.stachs)
        loc.push_back({f.id, f.geocode});
    const DistanceMatrix hd = build_distance_matrix(Category::Stach, d.counties, loc);
    for (std::size_t c = 0; c < d.counties.size(); ++c) {
        std::vector<double> row;
        double total = 0.0;
        for (std::size_t h = 0; h < d.stachs.size(); ++h) {
            row.push_back(attract[h] * std::exp(-hd.miles()(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(h)) /
                                                kChoiceDecayMiles));
            total += row.back();
        }
        for (double& x : row)
            x = std::max(x / total, 1e-9);
        world.w.push_back(row);
    }
    const auto choice = [&](Category cat, const std::vector<FacilityInfo>& roster, int closest) {
        if (roster.empty())
            return std::vector<std::vector<std::pair<int, double>>>(d.counties.size());
        std::vector<FacilityLocation> l;
        for (const auto& f : roster)
            l.push_back({f.id, f.geocode});
        return distance_choice(build_distance_matrix(cat, d.counties, l), d.counties,
                               static_cast<std::size_t>(closest), p.max_distance);
    };
    world.u = choice(Category::Ltach, d.ltachs, p.ltach_closest_n);
    world.v = choice(Category::Nh, d.nhs, p.nursing_home_closest_n);

    // Calibrate community rates so hospital discharges by age match the target
    // shares; the NH death rate follows the discharge-weighted NH LOS.
    for (int a = 0; a < kAgeGroupCount; ++a)
        world.lambda[a] = kBaseHospitalRate[a] * spec.hospital_rate;
    world.mu = kBaseNhRate * spec.nh_rate;
    const auto nh_los_input = [&](std::size_t n) { return nh_los[n].mean; };
    for (int iter = 0; iter < 12; ++iter) {
        double wsum = 0.0, days = 0.0;
        for (std::size_t n = 0; n < d.nhs.size(); ++n) {
            const double weight = world.nh_adm.empty() ? 1.0 : world.nh_adm[n];
            wsum += weight;
            days += weight * nh_los_input(n);
        }
        world.death_n = wsum > 0.0 ? std::min(1.0, p.nursing_home_death * (days / wsum) / 365.0) : 0.0;
        world.solve();
        if (iter == 11)
            break;
        std::array<double, kAgeGroupCount> by_age{};
        double total = 0.0;
        for (const auto& h : world.hospital_adm)
            for (int a = 0; a < kAgeGroupCount; ++a) {
                by_age[a] += h[a];
                total += h[a];
            }
        for (int a = 0; a < kAgeGroupCount; ++a)
            world.lambda[a] *= kTargetHospitalAge[a] / (by_age[a] / total);
    }
    if (world.residents_in_facilities > 0.5 * static_cast<double>(spec.population))
        throw InputError("synthetic spec is infeasible: more than half the population would be in facilities");
    for (double l : world.lambda)
        if (l / 365.0 >= 1.0)
            throw InputError("synthetic spec is infeasible: daily hospitalization probability reaches 1");

    // Input tables from the solved flows.
    const double rho = p.non_icu_fill * (1.0 - kIcuBedShare) + p.icu_fill * kIcuBedShare;
    GroundTruth& truth = out.truth;
    std::vector<double> hospital_census(d.stachs.size());
    for (std::size_t h = 0; h < d.stachs.size(); ++h) {
        FacilityInfo& f = d.stachs[h];
        const double oos = f.out_of_state_share();
        double in_state = 0.0;
        for (int a = 0; a < kAgeGroupCount; ++a)
            in_state += world.hospital_adm[h][a];
        hospital_census[h] = in_state * world.hospital_los[h] / 365.0;
        const int total_beds = std::max(2, static_cast<int>(std::lround(hospital_census[h] / (1.0 - oos) / rho)));
        // Even ICU counts keep the 50% starting fill whole at every hospital.
        f.beds_icu = 2 * std::max(1, static_cast<int>(std::lround(kIcuBedShare * total_beds / 2.0)));
        f.beds_nonicu = std::max(1, total_beds - f.beds_icu);
        const double all = in_state / (1.0 - oos);
        d.los.push_back({f.id, hospital_los[h].mean, hospital_los[h].sd, all});
        for (int a = 0; a < kAgeGroupCount; ++a) {
            const double n = world.hospital_adm[h][a] / (1.0 - oos);
            if (n <= 0.0)
                continue;
            d.discharges.push_back({f.id, age_group_from_int(a), Disposition::Death, n * world.death_s});
            for (int k = 0; k < kCategoryCount; ++k)
                if (world.rows[h][a](k) > 0.0)
                    d.discharges.push_back(
                        {f.id, age_group_from_int(a), static_cast<Disposition>(k), n * (1.0 - world.death_s) * world.rows[h][a](k)});
        }
        truth.los[f.id] = {hospital_los[h].mean, hospital_los[h].sd};
        truth.admissions[f.id] = in_state;
    }
    // Hospital choice weights: proportional to the county's choice probabilities.
    for (std::size_t c = 0; c < d.counties.size(); ++c) {
        double county_total = 0.0;
        for (std::size_t h = 0; h < d.stachs.size(); ++h)
            for (int a = 0; a < kAgeGroupCount; ++a)
                county_total += world.hospital_adm_county[h][c][a];
        if (county_total <= 0.0)
            continue;
        for (std::size_t h = 0; h < d.stachs.size(); ++h)
            d.county_shares.push_back({d.stachs[h].id, d.counties[c].id, world.w[c][h] * county_total});
    }
    for (std::size_t l = 0; l < d.ltachs.size(); ++l) {
        const double census = world.ltach_adm[l] * world.ltach_los / 365.0;
        // Multiples of ten keep the 90% starting fill whole.
        d.ltachs[l].beds_nonicu = 10 * std::max(1, static_cast<int>(std::lround(census / p.ltach_fill / 10.0)));
        truth.los[d.ltachs[l].id] = {p.ltach_los_mean, p.ltach_los_sd};
        truth.census[d.ltachs[l].id] = census;
        truth.admissions[d.ltachs[l].id] = world.ltach_adm[l];
    }
    for (std::size_t n = 0; n < d.nhs.size(); ++n) {
        const double census = world.nh_adm[n] * world.nh_los[n] / 365.0;
        FacilityInfo& f = d.nhs[n];
        f.starting_occupancy = static_cast<int>(std::lround(census));
        f.beds_nonicu = std::max({1, f.starting_occupancy, static_cast<int>(std::ceil(census / kNhOccupancy))});
        d.los.push_back({f.id, nh_los[n].mean, nh_los[n].sd, world.nh_adm[n]});
        truth.los[f.id] = {nh_los[n].mean, nh_los[n].sd};
        truth.census[f.id] = census;
        truth.admissions[f.id] = world.nh_adm[n];
    }
    for (std::size_t c = 0; c < d.counties.size(); ++c)
        for (int a = 0; a < kAgeGroupCount; ++a) {
            if (pop[c][a] <= 0.0)
                continue;
            d.community_admissions.push_back(
                {d.counties[c].id, age_group_from_int(a), Category::Stach, world.lambda[a] * pop[c][a]});
            if (a == 2 && world.mu > 0.0 && !d.nhs.empty())
                d.community_admissions.push_back(
                    {d.counties[c].id, age_group_from_int(a), Category::Nh, world.mu * pop[c][a]});
        }

    // Day-0 hospital plan, then the ICU multiplier that holds the ICU census
    // at its starting level.
    const auto records = build_hospital_records(d.stachs, d.los, d.county_shares);
    const auto plan = plan_hospital_starts(records.records, d.stachs, d.capacity_overrides, p);
    double icu_target = 0.0, icu_placeholders = 0.0;
    for (std::size_t h = 0; h < plan.size(); ++h) {
        icu_target += plan[h].agents.icu;
        icu_placeholders += plan[h].placeholders.icu;
        truth.census[d.stachs[h].id] = hospital_census[h] + plan[h].placeholders.nonicu + plan[h].placeholders.icu;
    }
    struct IcuTerm
    {
        double weight; // admissions per day * P(length) * length
        double logistic;
    };
    std::vector<IcuTerm> terms;
    for (std::size_t h = 0; h < d.stachs.size(); ++h) {
        const Eigen::VectorXd pmf = los_pmf(hospital_los[h]);
        for (int a = 0; a < kAgeGroupCount; ++a)
            for (int cc = 0; cc < 2; ++cc) {
                const double share = cc ? kComorbidityProbability[a] : 1.0 - kComorbidityProbability[a];
                const double adm = world.hospital_adm[h][a] * share / 365.0;
                if (adm <= 0.0)
                    continue;
                IcuModel unit{p.icu, 1.0};
                for (Eigen::Index k = 0; k < pmf.size(); ++k) {
                    const int los = static_cast<int>(k + 1);
                    terms.push_back({adm * pmf(k) * los,
                                     unit.probability(age_group_from_int(a), cc == 1, los, d.stachs[h].total_beds())});
                }
            }
    }
    const auto icu_census = [&](double m) {
        double total = 0.0;
        for (const auto& t : terms)
            total += t.weight * std::min(1.0, m * t.logistic);
        return total;
    };
    double lo = 0.0, hi = 100.0;
    if (icu_census(hi) < icu_target)
        throw InputError("synthetic spec is infeasible: ICU demand cannot reach the starting ICU census");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (icu_census(mid) < icu_target ? lo : hi) = mid;
    }
    p.icu_multiplier = 0.5 * (lo + hi);
    truth.icu_census = icu_census(p.icu_multiplier) + icu_placeholders;

    truth.four_by_four = world.flows;
    truth.four_by_four(0, 0) = 0.0;
    for (const auto& h : world.hospital_adm)
        for (int a = 0; a < kAgeGroupCount; ++a)
            truth.hospital_age(a) += h[a];
    truth.hospital_age /= truth.hospital_age.sum();
    sc.notes.push_back("generated from seed " + std::to_string(spec.seed));
    return out;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth)
{
    using nlohmann::json;
    const auto rows = [](const auto& map, const char* key) {
        std::map<int, double> sorted;
        for (const auto& [id, v] : map)
            sorted[to_int(id)] = v;
        json out = json::array();
        for (const auto& [id, v] : sorted)
            out.push_back({{"id", id}, {key, v}});
        return out;
    };
    std::map<int, GroundTruth::Los> los;
    for (const auto& [id, v] : truth.los)
        los[to_int(id)] = v;
    json j;
    j["los"] = json::array();
    for (const auto& [id, v] : los)
        j["los"].push_back({{"id", id}, {"mean", v.mean}, {"sd", v.sd}});
    j["census"] = rows(truth.census, "census");
    j["admissions"] = rows(truth.admissions, "admissions");
    j["four_by_four"] = json::array();
    for (int i = 0; i < kCategoryCount; ++i)
        j["four_by_four"].push_back({truth.four_by_four(i, 0), truth.four_by_four(i, 1), truth.four_by_four(i, 2),
                                     truth.four_by_four(i, 3)});
    j["icu_census"] = truth.icu_census;
    j["hospital_age"] = {truth.hospital_age(0), truth.hospital_age(1), truth.hospital_age(2)};
    std::ofstream out(path);
    if (!out)
        throw InputError(path.string() + ": cannot write");
    out << std::setprecision(17) << j.dump(1) << '\n';
}

void write_synthetic_scenario(const SyntheticScenario& s, const std::filesystem::path& directory)
{
    save_scenario(s.scenario, directory);
    write_ground_truth(directory / "ground_truth.json", s.truth);
}

} // namespace pflow
