#include "pflow/types.hpp"

namespace pflow {

std::string_view to_string(Category c)
{
    switch (c) {
    case Category::Community:
        return "community";
    case Category::Stach:
        return "stach";
    case Category::Ltach:
        return "ltach";
    case Category::Nh:
        return "nh";
    }
    return "unknown";
}

Category category_from_string(std::string_view s)
{
    if (s == "community")
        return Category::Community;
    if (s == "stach" || s == "hospital")
        return Category::Stach;
    if (s == "ltach")
        return Category::Ltach;
    if (s == "nh")
        return Category::Nh;
    throw InputError("unknown location category '" + std::string(s) + "'");
}

AgeGroup age_group_from_int(int g)
{
    if (g < 0 || g >= kAgeGroupCount)
        throw InputError("age group must be 0, 1 or 2, got " + std::to_string(g));
    return static_cast<AgeGroup>(g);
}

} // namespace pflow
