#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace bqr {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
// Fixed number of significant digits, for console output.
std::string format_sig(double v, int digits = 6);

// Parses a double from the whole of `text` (surrounding blanks allowed).
// Returns false for empty or non-numeric text.
bool parse_double(const std::string& text, double& out);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void comment(const std::string& line);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> comments;  // '#' lines without the marker
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // source line of each row

  std::size_t column(const std::string& name) const;  // throws MissingColumn
};

// RFC 4180 style: comma separated, double-quoted fields may hold commas,
// quotes ("") and newlines. Leading '#' lines before the header are comments.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace bqr
