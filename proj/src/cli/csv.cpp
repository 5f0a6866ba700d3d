#include "multierg/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace multierg::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0"; // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_count(double count, double log_count) {
    if (std::isfinite(count)) return format_number(count);
    if (!std::isfinite(log_count)) return format_number(count);
    const double e10 = log_count / std::log(10.0);
    const double exponent = std::floor(e10);
    const double mantissa = std::pow(10.0, e10 - exponent);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.11fe+%.0f", mantissa, exponent);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<Cell> cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width does not match header");
    bool first = true;
    for (const Cell& c : cells) {
        if (!first) out_ << ',';
        first = false;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) out_ << format_number(v);
                else if constexpr (std::is_same_v<T, bool>) out_ << (v ? "true" : "false");
                else out_ << v;
            },
            c);
    }
    out_ << '\n';
}

} // namespace multierg::io
