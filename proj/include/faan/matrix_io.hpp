#pragma once

// Plain-text matrix files: CSV, one row per line, no header, '.' decimal
// separator. Returns files carry a header row of asset identifiers.

#include "faan/covmodel.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace faan {

/// Thrown when a file cannot be opened; parse errors use std::runtime_error.
class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Matrix parse_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::string& path);

void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);

struct ReturnsTable {
    std::vector<std::string> assets;
    Matrix returns;  // T x n, one row per trading day
};

ReturnsTable parse_returns_csv(std::istream& in);
ReturnsTable read_returns_csv(const std::string& path);
void write_returns_csv(std::ostream& out, const ReturnsTable& table);

}  // namespace faan
