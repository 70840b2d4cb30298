#pragma once

#include <filesystem>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pflow/types.hpp"

namespace pflow {

inline constexpr double kEarthRadiusMiles = 3958.8;

struct GeoPoint
{
    double latitude = 0.0;  ///< decimal degrees, [-90, 90]
    double longitude = 0.0; ///< decimal degrees, [-180, 180]
};

/// Throws InputError when a coordinate is out of range or not finite.
void validate(const GeoPoint& p);

/// Haversine great-circle distance in miles.
double great_circle_miles(const GeoPoint& a, const GeoPoint& b);

struct CountyCentroid
{
    CountyId id;
    GeoPoint centroid;
};

struct FacilityLocation
{
    FacilityId id;
    GeoPoint geocode;
};

/// County-centroid to facility distances for one facility category.
/// Rows are counties, columns facilities, both in input order.
class DistanceMatrix
{
  public:
    DistanceMatrix() = default;
    DistanceMatrix(Category category, std::vector<CountyId> counties, std::vector<FacilityId> facilities,
                   Eigen::MatrixXd miles);

    Category category() const { return category_; }
    const std::vector<CountyId>& counties() const { return counties_; }
    const std::vector<FacilityId>& facilities() const { return facilities_; }
    const Eigen::MatrixXd& miles() const { return miles_; }

    bool has_county(CountyId c) const { return county_index_.contains(c); }
    bool has_facility(FacilityId f) const { return facility_index_.contains(f); }
    Eigen::Index county_row(CountyId c) const;
    Eigen::Index facility_col(FacilityId f) const;

    double at(CountyId c, FacilityId f) const { return miles_(county_row(c), facility_col(f)); }

    /// Facilities ordered by ascending distance from the county centroid (ties by
    /// ascending facility id), at most n of them, none beyond max_miles.
    std::vector<FacilityId> closest_n(CountyId county, std::size_t n, double max_miles) const;

    void write_csv(const std::filesystem::path& path) const;
    static DistanceMatrix read_csv(Category category, const std::filesystem::path& path);

  private:
    void build_indices();

    Category category_ = Category::Stach;
    std::vector<CountyId> counties_;
    std::vector<FacilityId> facilities_;
    Eigen::MatrixXd miles_;
    std::unordered_map<CountyId, Eigen::Index> county_index_;
    std::unordered_map<FacilityId, Eigen::Index> facility_index_;
};

DistanceMatrix build_distance_matrix(Category category, std::span<const CountyCentroid> counties,
                                     std::span<const FacilityLocation> facilities);

} // namespace pflow
