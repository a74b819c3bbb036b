#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "krigopt/numerics.hpp"

namespace krigopt::io {

// Shortest decimal representation that round-trips to exactly the same
// double (std::to_chars); "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double value);

// Strict, locale-independent parse of a full token; throws InvalidParameter
// on anything but a complete numeric value ("nan"/"inf" accepted).
double parse_double(const std::string& token, const std::string& context);

// All-numeric CSV table: one header line of column names, then rows of
// values.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;

  int rows() const { return static_cast<int>(values.rows()); }

  // Column index by exact name; throws InvalidParameter when absent.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& context);

std::string to_csv(const std::vector<std::string>& header, const Matrix& values);

// Writes via a temporary file in the same directory plus an atomic rename,
// so readers never observe a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values);

// Reads and parses a JSON document; parse failures become InvalidParameter.
nlohmann::json read_json(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Campaign file schemas shared by the command-line tool and the tests:
// design files carry columns x1..xd, evaluation files add y, proposal files
// add ei, history files carry x1..xd,y,ei.
std::vector<std::string> point_header(int dimension);
std::string design_csv(const Matrix& points);
std::string proposals_csv(const Matrix& points, const Vector& ei);
std::string history_csv(const Matrix& points, const Vector& values, const Vector& ei);

}  // namespace krigopt::io
