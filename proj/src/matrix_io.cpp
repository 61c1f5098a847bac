#include "faan/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace faan {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_number(const std::string& text, std::size_t line_no) {
    double value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse number '" +
                                 text + "'");
    return value;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::runtime_error("matrix file is empty");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write '" + path + "'");
    return out;
}

}  // namespace

Matrix parse_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& field : split_fields(line)) row.push_back(parse_number(field, line_no));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(rows.front().size()) + " columns, got " +
                                     std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    return rows_to_matrix(rows);
}

Matrix read_matrix_csv(const std::string& path) {
    auto in = open_input(path);
    return parse_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    auto out = open_output(path);
    write_matrix_csv(out, m);
}

ReturnsTable parse_returns_csv(std::istream& in) {
    ReturnsTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw std::runtime_error("returns file is empty");
    table.assets = split_fields(line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& field : split_fields(line)) row.push_back(parse_number(field, line_no));
        if (row.size() != table.assets.size())
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(table.assets.size()) + " columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("returns file has no data rows");
    table.returns = rows_to_matrix(rows);
    return table;
}

ReturnsTable read_returns_csv(const std::string& path) {
    auto in = open_input(path);
    return parse_returns_csv(in);
}

void write_returns_csv(std::ostream& out, const ReturnsTable& table) {
    for (std::size_t j = 0; j < table.assets.size(); ++j) {
        if (j) out << ',';
        out << table.assets[j];
    }
    out << '\n';
    write_matrix_csv(out, table.returns);
}

}  // namespace faan
