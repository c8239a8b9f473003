#include "heatflow/field_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "heatflow/error.hpp"

namespace heatflow {
namespace {

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void FieldStack::validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != values.cols())
    throw DimensionError("field stack has " + std::to_string(values.cols()) + " columns but " +
                         std::to_string(labels.size()) + " labels");
  if (!values.allFinite()) throw NumericError("field stack contains non-finite values");
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream out(path);
  if (path.empty() || !out) throw IoError("cannot write field file '" + path.string() + "'");
  for (Eigen::Index i = 0; i < field.size(); ++i) out << format_double(field[i]) << '\n';
  if (!out) throw IoError("failed writing field file '" + path.string() + "'");
}

ScalarField read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open field file '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    double v = 0.0;
    if (!parse_double(line, v) || !std::isfinite(v))
      throw ParseError(path.string(), line_no, "expected one finite number, got '" + line + "'");
    values.push_back(v);
  }
  return Eigen::Map<ScalarField>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_stack_csv(const std::filesystem::path& path, const FieldStack& stack) {
  stack.validate();
  std::ofstream out(path);
  if (path.empty() || !out) throw IoError("cannot write stack file '" + path.string() + "'");
  for (std::size_t c = 0; c < stack.labels.size(); ++c) out << (c ? "," : "") << stack.labels[c];
  out << '\n';
  for (Eigen::Index i = 0; i < stack.values.rows(); ++i) {
    for (Eigen::Index c = 0; c < stack.values.cols(); ++c)
      out << (c ? "," : "") << format_double(stack.values(i, c));
    out << '\n';
  }
  if (!out) throw IoError("failed writing stack file '" + path.string() + "'");
}

FieldStack read_stack_csv(const std::filesystem::path& path, StackAxis axis) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stack file '" + path.string() + "'");
  FieldStack stack;
  stack.axis = axis;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    if (!header_seen) {
      for (auto& c : cells) stack.labels.push_back(trim(c));
      width = cells.size();
      header_seen = true;
      continue;
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!parse_double(cells[c], row[c]))
        throw ParseError(path.string(), line_no, "non-numeric cell '" + cells[c] + "'");
    if (row.size() != width)
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(width) + " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError(path.string(), 1, "empty stack file");
  stack.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      stack.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  stack.validate();
  return stack;
}

}  // namespace heatflow
