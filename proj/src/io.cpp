#include "krigopt/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace krigopt::io {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(trimmed(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(trimmed(current));
  return fields;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& token, const std::string& context) {
  // Strict: the whole token must be the number; callers strip any framing.
  const std::string& t = token;
  if (t.empty()) {
    throw InvalidParameter(context + ": empty numeric field");
  }
  // std::from_chars rejects a leading '+'; accept it for friendliness.
  std::size_t offset = 0;
  if (t[0] == '+') {
    offset = 1;
  }
  double value = 0.0;
  const char* begin = t.data() + offset;
  const char* end = t.data() + t.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw InvalidParameter(context + ": could not parse '" + token + "' as a number");
  }
  return value;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return static_cast<int>(i);
    }
  }
  throw InvalidParameter("missing required column '" + name + "'");
}

CsvTable parse_csv(const std::string& text, const std::string& context) {
  std::vector<std::string> lines;
  std::string current;
  for (char ch : text) {
    if (ch == '\n') {
      if (!current.empty() && current.back() == '\r') {
        current.pop_back();
      }
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) {
    lines.push_back(current);
  }
  while (!lines.empty() && trimmed(lines.back()).empty()) {
    lines.pop_back();
  }
  if (lines.empty()) {
    throw InvalidParameter(context + ": file is empty (expected a header line)");
  }

  CsvTable table;
  table.header = split_fields(lines[0]);
  if (table.header.empty() || (table.header.size() == 1 && table.header[0].empty())) {
    throw InvalidParameter(context + ": header line has no column names");
  }
  const std::size_t cols = table.header.size();

  table.values.resize(static_cast<Eigen::Index>(lines.size() - 1),
                      static_cast<Eigen::Index>(cols));
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::vector<std::string> fields = split_fields(lines[row]);
    if (fields.size() != cols) {
      throw InvalidParameter(context + ": line " + std::to_string(row + 1) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(cols));
    }
    for (std::size_t col = 0; col < cols; ++col) {
      table.values(static_cast<Eigen::Index>(row - 1), static_cast<Eigen::Index>(col)) =
          parse_double(fields[col],
                       context + ": line " + std::to_string(row + 1) + ", column '" +
                           table.header[col] + "'");
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidParameter("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.string());
}

std::string to_csv(const std::vector<std::string>& header, const Matrix& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols()) {
    throw DimensionMismatch("to_csv: " + std::to_string(header.size()) + " header names for " +
                            std::to_string(values.cols()) + " columns");
  }
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) {
      out.push_back(',');
    }
    out += header[i];
  }
  out.push_back('\n');
  for (Eigen::Index row = 0; row < values.rows(); ++row) {
    for (Eigen::Index col = 0; col < values.cols(); ++col) {
      if (col > 0) {
        out.push_back(',');
      }
      out += format_double(values(row, col));
    }
    out.push_back('\n');
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path parent = path.parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  const std::filesystem::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw InvalidParameter("cannot open '" + temp.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw InvalidParameter("failed writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    throw InvalidParameter("failed to move '" + temp.string() + "' into place: " + ec.message());
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values) {
  write_text_atomic(path, to_csv(header, values));
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidParameter("cannot open '" + path.string() + "' for reading");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParameter(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

std::vector<std::string> point_header(int dimension) {
  if (dimension < 1) {
    throw InvalidParameter("point_header: dimension must be positive");
  }
  std::vector<std::string> header;
  header.reserve(static_cast<std::size_t>(dimension));
  for (int j = 1; j <= dimension; ++j) {
    header.push_back("x" + std::to_string(j));
  }
  return header;
}

std::string design_csv(const Matrix& points) {
  return to_csv(point_header(static_cast<int>(points.cols())), points);
}

std::string proposals_csv(const Matrix& points, const Vector& ei) {
  if (ei.size() != points.rows()) {
    throw DimensionMismatch("proposals_csv: ei length mismatch");
  }
  std::vector<std::string> header = point_header(static_cast<int>(points.cols()));
  header.push_back("ei");
  Matrix table(points.rows(), points.cols() + 1);
  table.leftCols(points.cols()) = points;
  table.col(points.cols()) = ei;
  return to_csv(header, table);
}

std::string history_csv(const Matrix& points, const Vector& values, const Vector& ei) {
  if (values.size() != points.rows() || ei.size() != points.rows()) {
    throw DimensionMismatch("history_csv: column length mismatch");
  }
  std::vector<std::string> header = point_header(static_cast<int>(points.cols()));
  header.push_back("y");
  header.push_back("ei");
  Matrix table(points.rows(), points.cols() + 2);
  table.leftCols(points.cols()) = points;
  table.col(points.cols()) = values;
  table.col(points.cols() + 1) = ei;
  return to_csv(header, table);
}

}  // namespace krigopt::io
