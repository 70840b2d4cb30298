#include "pflow/csv.hpp"

#include <charconv>
#include <cstdint>
#include <cmath>

#include "pflow/types.hpp"

namespace pflow::csv {

std::vector<std::string> split_record(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string escape(std::string_view field)
{
    if (field.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"')
            out += "\"\"";
        else
            out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

Reader::Reader(const std::filesystem::path& path, const std::vector<std::string>& expected_header)
    : path_(path), in_(path), columns_(expected_header.size())
{
    if (!in_)
        throw InputError(path.string() + ": cannot open file");
    std::string header;
    if (!std::getline(in_, header))
        throw InputError(path.string() + ": empty file, expected header");
    line_ = 1;
    if (split_record(header) != expected_header) {
        std::string want;
        for (const auto& h : expected_header)
            want += (want.empty() ? "" : ",") + h;
        throw InputError(where("bad header '" + header + "', expected '" + want + "'"));
    }
}

bool Reader::next(std::vector<std::string>& fields)
{
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (text.empty() || text == "\r")
            continue;
        fields = split_record(text);
        if (fields.size() != columns_)
            throw InputError(where("expected " + std::to_string(columns_) + " fields, found " +
                                   std::to_string(fields.size())));
        return true;
    }
    return false;
}

std::string Reader::where(std::string_view message) const
{
    return path_.string() + ":" + std::to_string(line_) + ": " + std::string(message);
}

long long Reader::as_int64(const std::string& field, std::string_view column) const
{
    long long value = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw InputError(where("column '" + std::string(column) + "': not an integer: '" + field + "'"));
    return value;
}

int Reader::as_int(const std::string& field, std::string_view column) const
{
    const long long v = as_int64(field, column);
    if (v < INT32_MIN || v > INT32_MAX)
        throw InputError(where("column '" + std::string(column) + "': integer out of range"));
    return static_cast<int>(v);
}

double Reader::as_double(const std::string& field, std::string_view column) const
{
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw InputError(where("column '" + std::string(column) + "': not a number: '" + field + "'"));
    return value;
}

} // namespace pflow::csv
