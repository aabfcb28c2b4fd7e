#include "bqr/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bqr/errors.hpp"

namespace bqr {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_sig(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

bool parse_double(const std::string& text, double& out) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
  while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
  if (b == e) return false;
  const char* first = text.data() + b;
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, text.data() + e, out);
  return res.ec == std::errc() && res.ptr == text.data() + e;
}

namespace {

std::string quote(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string q = "\"";
  for (char c : f) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
}

void CsvWriter::comment(const std::string& line) { out_ << '#' << ' ' << line << '\n'; }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << '\n';
  if (!out_) throw IoError("write failed on " + path_.string());
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("closing " + path_.string() + " failed");
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw MissingColumn("column '" + name + "' not found");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  CsvTable table;
  std::size_t pos = 0;
  std::size_t line = 1;
  bool have_header = false;
  while (pos < text.size()) {
    const std::size_t record_line = line;
    if (!have_header && text[pos] == '#') {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      std::string c = text.substr(pos + 1, end - pos - 1);
      if (!c.empty() && c.back() == '\r') c.pop_back();
      if (!c.empty() && c.front() == ' ') c.erase(0, 1);
      table.comments.push_back(std::move(c));
      pos = end + 1;
      ++line;
      continue;
    }
    std::vector<std::string> fields(1);
    bool in_quotes = false;
    bool done = false;
    while (pos < text.size() && !done) {
      const char c = text[pos++];
      if (in_quotes) {
        if (c == '"') {
          if (pos < text.size() && text[pos] == '"') {
            fields.back() += '"';
            ++pos;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line;
          fields.back() += c;
        }
      } else if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        fields.emplace_back();
      } else if (c == '\n') {
        ++line;
        done = true;
      } else if (c != '\r') {
        fields.back() += c;
      }
    }
    if (in_quotes) {
      throw IoError(path.string() + ":" + std::to_string(record_line) + ": unterminated quote");
    }
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size()) {
        throw IoError(path.string() + ":" + std::to_string(record_line) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
      table.line_numbers.push_back(record_line);
    }
  }
  if (!have_header) throw IoError(path.string() + ": no header row");
  return table;
}

}  // namespace bqr
