#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fxlab::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws ValidationError when absent.
    std::size_t column(const std::string& name) const;
    /// Numeric column; cells that are not numbers become NaN.
    std::vector<double> numbers(const std::string& name) const;
};

/// Plain comma-separated values without quoting; fields never contain commas.
Table read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Table& table);

} // namespace fxlab::csv
