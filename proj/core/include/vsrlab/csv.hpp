#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace vsr {

// Shortest round-trip decimal form of a double (via std::to_chars), so that
// parse -> re-emit is byte-identical and deterministic.
std::string format_double(double v);

double parse_double(const std::string& s);  // throws ParseError
long parse_long(const std::string& s);      // throws ParseError

// Minimal CSV: comma-separated, newline-terminated rows, no quoting (fields
// must not contain commas or newlines).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  static CsvTable parse(const std::string& text);  // throws ParseError
  int column(const std::string& name) const;       // throws ParseError
};

CsvTable load_csv(const std::filesystem::path& path);  // throws MissingRun
void save_csv(const CsvTable& table, const std::filesystem::path& path);

// Write-new-then-rename, so readers never observe partial files.
void write_text_file_atomic(const std::filesystem::path& path,
                            const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace vsr
