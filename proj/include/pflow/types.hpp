#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pflow {

/// Bad or inconsistent scenario input (files, parameters, arguments).
class InputError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Violated internal precondition, e.g. discharging an agent who is not there.
class LogicError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

enum class CountyId : std::int32_t {};
enum class FacilityId : std::int32_t {};

using AgentId = std::uint32_t;
using Day = std::int32_t;

/// Dense index of a location inside a Network. Slot 0 is always the community.
using LocationIndex = std::int32_t;
inline constexpr LocationIndex kCommunitySlot = 0;

constexpr std::int32_t to_int(CountyId c) { return static_cast<std::int32_t>(c); }
constexpr std::int32_t to_int(FacilityId f) { return static_cast<std::int32_t>(f); }

/// Location categories, in the row/column order of every 4x4 flow matrix.
enum class Category : std::uint8_t { Community = 0, Stach = 1, Ltach = 2, Nh = 3 };
inline constexpr int kCategoryCount = 4;

constexpr int index_of(Category c) { return static_cast<int>(c); }

std::string_view to_string(Category c);
Category category_from_string(std::string_view s);

enum class AgeGroup : std::uint8_t { Under50 = 0, From50To64 = 1, Over65 = 2 };
inline constexpr int kAgeGroupCount = 3;

constexpr int index_of(AgeGroup a) { return static_cast<int>(a); }
AgeGroup age_group_from_int(int g);

enum class BedType : std::uint8_t { NonIcu = 0, Icu = 1 };
enum class BedRequest : std::uint8_t { NonIcu, Icu, Any };

constexpr BedType other(BedType b) { return b == BedType::Icu ? BedType::NonIcu : BedType::Icu; }
constexpr BedRequest request_for(BedType b)
{
    return b == BedType::Icu ? BedRequest::Icu : BedRequest::NonIcu;
}

/// Age rules: nursing homes admit 65+ only, LTACHs 50+ only.
constexpr bool age_allows(Category destination, AgeGroup age)
{
    switch (destination) {
    case Category::Nh:
        return age == AgeGroup::Over65;
    case Category::Ltach:
        return age != AgeGroup::Under50;
    default:
        return true;
    }
}

} // namespace pflow
