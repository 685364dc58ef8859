#include "openbo/scan.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace openbo {

void ScanTable::add_header(std::string key, std::string value)
{
    header_.emplace_back(std::move(key), std::move(value));
}

void ScanTable::add_row(std::vector<double> row)
{
    if (row.size() != columns_.size())
        throw Error(ErrorCode::DimensionMismatch, "row width differs from the column count");
    rows_.push_back(std::move(row));
}

std::size_t ScanTable::column_index(const std::string& name) const
{
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name)
            return i;
    throw Error(ErrorCode::InvalidArgument, "no column named " + name);
}

std::string format_number(double value)
{
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value == 0.0 ? 0.0 : value);
    return buffer;
}

void ScanTable::write_csv(std::ostream& out) const
{
    for (const auto& [key, value] : header_)
        out << "# " << key << '=' << value << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i)
        out << (i ? "," : "") << columns_[i].name << '[' << columns_[i].unit << ']';
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

std::string ScanTable::to_csv() const
{
    std::ostringstream out;
    write_csv(out);
    return out.str();
}

} // namespace openbo
