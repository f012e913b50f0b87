#include "fxlab/csv.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "fxlab/error.hpp"

namespace fxlab::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name)
            return i;
    }
    throw ValidationError("CSV has no column '" + name + "'");
}

std::vector<double> Table::numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        double v = std::numeric_limits<double>::quiet_NaN();
        if (c < row.size()) {
            const auto& cell = row[c];
            double parsed = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
            if (ec == std::errc{} && ptr == cell.data() + cell.size())
                v = parsed;
        }
        out.push_back(v);
    }
    return out;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(path.string() + ": empty CSV");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        t.rows.push_back(split(line));
    }
    return t;
}

void write(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    const auto emit = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i)
                out << ',';
            out << fields[i];
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows)
        emit(row);
    if (!out)
        throw IoError("failed writing " + path.string());
}

} // namespace fxlab::csv
