#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace multierg::io {

/// 12 significant digits, '.' separator; nan/inf spelled "nan", "inf", "-inf".
std::string format_number(double v);

/// Count that may exceed double range: printed from its natural log when the
/// value itself overflowed.
std::string format_count(double count, double log_count);

using Cell = std::variant<double, std::int64_t, std::uint64_t, bool, std::string>;

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    void row(std::initializer_list<Cell> cells);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

} // namespace multierg::io
