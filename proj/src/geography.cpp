#include "pflow/geography.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <unordered_set>

#include "pflow/csv.hpp"

namespace pflow {

namespace {

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

} // namespace

void validate(const GeoPoint& p)
{
    if (!std::isfinite(p.latitude) || p.latitude < -90.0 || p.latitude > 90.0)
        throw InputError("latitude out of range: " + std::to_string(p.latitude));
    if (!std::isfinite(p.longitude) || p.longitude < -180.0 || p.longitude > 180.0)
        throw InputError("longitude out of range: " + std::to_string(p.longitude));
}

double great_circle_miles(const GeoPoint& a, const GeoPoint& b)
{
    validate(a);
    validate(b);
    const double phi1 = radians(a.latitude);
    const double phi2 = radians(b.latitude);
    const double dphi = phi2 - phi1;
    const double dlambda = radians(b.longitude - a.longitude);
    const double s = std::sin(dphi / 2.0);
    const double t = std::sin(dlambda / 2.0);
    const double h = std::clamp(s * s + std::cos(phi1) * std::cos(phi2) * t * t, 0.0, 1.0);
    return 2.0 * kEarthRadiusMiles * std::asin(std::sqrt(h));
}

DistanceMatrix::DistanceMatrix(Category category, std::vector<CountyId> counties, std::vector<FacilityId> facilities,
                               Eigen::MatrixXd miles)
    : category_(category), counties_(std::move(counties)), facilities_(std::move(facilities)), miles_(std::move(miles))
{
    if (miles_.rows() != static_cast<Eigen::Index>(counties_.size()) ||
        miles_.cols() != static_cast<Eigen::Index>(facilities_.size()))
        throw InputError("distance matrix shape does not match county/facility lists");
    if ((miles_.array() < 0.0).any() || !miles_.allFinite())
        throw InputError("distance matrix has negative or non-finite entries");
    build_indices();
}

void DistanceMatrix::build_indices()
{
    county_index_.clear();
    facility_index_.clear();
    for (std::size_t i = 0; i < counties_.size(); ++i)
        if (!county_index_.emplace(counties_[i], static_cast<Eigen::Index>(i)).second)
            throw InputError("duplicate county id " + std::to_string(to_int(counties_[i])));
    for (std::size_t j = 0; j < facilities_.size(); ++j)
        if (!facility_index_.emplace(facilities_[j], static_cast<Eigen::Index>(j)).second)
            throw InputError("duplicate facility id " + std::to_string(to_int(facilities_[j])));
}

Eigen::Index DistanceMatrix::county_row(CountyId c) const
{
    const auto it = county_index_.find(c);
    if (it == county_index_.end())
        throw InputError("unknown county id " + std::to_string(to_int(c)));
    return it->second;
}

Eigen::Index DistanceMatrix::facility_col(FacilityId f) const
{
    const auto it = facility_index_.find(f);
    if (it == facility_index_.end())
        throw InputError("unknown facility id " + std::to_string(to_int(f)));
    return it->second;
}

std::vector<FacilityId> DistanceMatrix::closest_n(CountyId county, std::size_t n, double max_miles) const
{
    const Eigen::Index row = county_row(county);
    std::vector<Eigen::Index> cols;
    cols.reserve(facilities_.size());
    for (Eigen::Index j = 0; j < miles_.cols(); ++j)
        if (miles_(row, j) <= max_miles)
            cols.push_back(j);
    const auto closer = [&](Eigen::Index a, Eigen::Index b) {
        const double da = miles_(row, a);
        const double db = miles_(row, b);
        if (da != db)
            return da < db;
        return to_int(facilities_[a]) < to_int(facilities_[b]);
    };
    const std::size_t keep = std::min(n, cols.size());
    std::partial_sort(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(keep), cols.end(), closer);
    std::vector<FacilityId> out;
    out.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k)
        out.push_back(facilities_[cols[k]]);
    return out;
}

void DistanceMatrix::write_csv(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out)
        throw InputError(path.string() + ": cannot write");
    out << "county_id,facility_id,miles\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < miles_.rows(); ++i)
        for (Eigen::Index j = 0; j < miles_.cols(); ++j)
            out << to_int(counties_[i]) << ',' << to_int(facilities_[j]) << ',' << miles_(i, j) << '\n';
}

DistanceMatrix DistanceMatrix::read_csv(Category category, const std::filesystem::path& path)
{
    csv::Reader reader(path, {"county_id", "facility_id", "miles"});
    std::vector<CountyId> counties;
    std::vector<FacilityId> facilities;
    std::unordered_map<CountyId, Eigen::Index> ci;
    std::unordered_map<FacilityId, Eigen::Index> fi;
    std::map<std::pair<Eigen::Index, Eigen::Index>, double> entries;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const CountyId c{reader.as_int(f[0], "county_id")};
        const FacilityId fac{reader.as_int(f[1], "facility_id")};
        const double d = reader.as_double(f[2], "miles");
        if (d < 0.0)
            throw InputError(reader.where("negative distance"));
        const auto [cit, cnew] = ci.emplace(c, static_cast<Eigen::Index>(counties.size()));
        if (cnew)
            counties.push_back(c);
        const auto [fit, fnew] = fi.emplace(fac, static_cast<Eigen::Index>(facilities.size()));
        if (fnew)
            facilities.push_back(fac);
        if (!entries.emplace(std::pair{cit->second, fit->second}, d).second)
            throw InputError(reader.where("duplicate (county, facility) pair"));
    }
    if (entries.size() != counties.size() * facilities.size())
        throw InputError(path.string() + ": distance file is not a complete county x facility grid");
    Eigen::MatrixXd miles(static_cast<Eigen::Index>(counties.size()), static_cast<Eigen::Index>(facilities.size()));
    for (const auto& [key, d] : entries)
        miles(key.first, key.second) = d;
    return DistanceMatrix(category, std::move(counties), std::move(facilities), std::move(miles));
}

DistanceMatrix build_distance_matrix(Category category, std::span<const CountyCentroid> counties,
                                     std::span<const FacilityLocation> facilities)
{
    if (counties.empty() || facilities.empty())
        throw InputError("build_distance_matrix: counties and facilities must be non-empty");
    std::vector<CountyId> county_ids;
    std::vector<FacilityId> facility_ids;
    Eigen::MatrixXd miles(static_cast<Eigen::Index>(counties.size()), static_cast<Eigen::Index>(facilities.size()));
    for (const auto& c : counties)
        county_ids.push_back(c.id);
    for (const auto& f : facilities)
        facility_ids.push_back(f.id);
    for (std::size_t i = 0; i < counties.size(); ++i)
        for (std::size_t j = 0; j < facilities.size(); ++j)
            miles(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                great_circle_miles(counties[i].centroid, facilities[j].geocode);
    return DistanceMatrix(category, std::move(county_ids), std::move(facility_ids), std::move(miles));
}

} // namespace pflow
