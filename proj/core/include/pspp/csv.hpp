#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pspp/linalg.hpp"

namespace pspp {

struct CsvSchema {
    // Column to drop (a time index); must exist in the header when named.
    std::optional<std::string> time_column;
    // Columns to ingest, in this order; empty selects every remaining
    // column in file order.
    std::vector<std::string> value_columns;
};

// Reads a rectangular, headered, comma-separated file into an ordered
// sequence of p-vectors.  No imputation: any non-numeric or missing cell
// is a hard error naming the row and column.
std::vector<Vector> ingest_csv(const std::string& path,
                               const CsvSchema& schema = {});

// Writes rows under the given header, shortest round-trip decimals,
// atomically (temp file + rename).
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<Vector>& rows);

// Atomic whole-file write used by every report writer.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace pspp
