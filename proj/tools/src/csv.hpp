#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbi::cli {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Comma-separated, header row, %.17g numbers.
void write_csv(std::ostream& os, const Table& t);
void write_csv_file(const std::string& path, const Table& t);

/// Inverse of write_csv; throws ValidationError on ragged or non-numeric rows.
Table read_csv(std::istream& is);

}  // namespace cbi::cli
