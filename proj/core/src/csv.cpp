#include "vsrlab/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

#include "vsrlab/error.hpp"

namespace vsr {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("not a number: '" + s + "'");
  return v;
}

long parse_long(const std::string& s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("not an integer: '" + s + "'");
  return v;
}

namespace {

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    const std::string& field = row[i];
    if (field.find_first_of(",\n") != std::string::npos)
      throw Error("CSV fields must not contain commas or newlines");
    if (i > 0) out.push_back(',');
    out += field;
  }
  out.push_back('\n');
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string CsvTable::to_string() const {
  std::string out;
  append_row(out, header);
  for (const auto& row : rows) append_row(out, row);
  return out;
}

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      table.header = split_row(line);
      first = false;
    } else {
      auto row = split_row(line);
      if (row.size() != table.header.size())
        throw ParseError("CSV row width does not match header");
      table.rows.push_back(std::move(row));
    }
  }
  if (first) throw ParseError("CSV has no header row");
  return table;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  throw ParseError("CSV has no column named '" + name + "'");
}

CsvTable load_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw MissingRun("missing CSV file: " + path.string());
  return CsvTable::parse(read_text_file(path));
}

void save_csv(const CsvTable& table, const std::filesystem::path& path) {
  write_text_file_atomic(path, table.to_string());
}

void write_text_file_atomic(const std::filesystem::path& path,
                            const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace vsr
