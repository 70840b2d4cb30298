#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace pflow::csv {

/// Split one CSV record. Fields may be double-quoted; "" escapes a quote.
std::vector<std::string> split_record(std::string_view line);

/// Quote a field only when it needs it.
std::string escape(std::string_view field);

/// Line-oriented reader that checks the header and tracks line numbers for
/// error messages ("file:line: ...").
class Reader
{
  public:
    Reader(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

    /// Next data row; false at end of file. Blank lines are skipped.
    bool next(std::vector<std::string>& fields);

    std::size_t line() const { return line_; }
    const std::filesystem::path& path() const { return path_; }

    /// "path:line: message"
    std::string where(std::string_view message) const;

    int as_int(const std::string& field, std::string_view column) const;
    long long as_int64(const std::string& field, std::string_view column) const;
    double as_double(const std::string& field, std::string_view column) const;

  private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_ = 0;
    std::size_t columns_ = 0;
};

} // namespace pflow::csv
