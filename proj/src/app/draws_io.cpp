#include <string>

#include "bqr/app.hpp"
#include "bqr/csv.hpp"
#include "bqr/errors.hpp"

namespace bqr::app {

void write_draws(const std::filesystem::path& path, const DrawStore& draws,
                 const std::vector<std::pair<std::string, std::string>>& metadata) {
  CsvWriter w(path);
  const IterationMeta& meta = draws.meta();
  w.comment("bqr draws");
  for (const auto& [k, v] : metadata) w.comment(k + ": " + v);
  w.comment("iterations: " + std::to_string(meta.total));
  w.comment("burn_in: " + std::to_string(meta.burn_in));
  w.comment("thin: " + std::to_string(meta.thin));

  std::vector<std::string> header = {"chain", "iteration"};
  header.insert(header.end(), draws.names().begin(), draws.names().end());
  w.row(header);
  std::vector<std::string> fields(header.size());
  for (std::size_t c = 0; c < draws.chains(); ++c) {
    for (std::size_t t = 0; t < draws.draws_per_chain(); ++t) {
      fields[0] = std::to_string(c + 1);
      fields[1] = std::to_string(meta.burn_in + static_cast<long>(t + 1) * meta.thin);
      const auto row = draws.row(c, t);
      for (std::size_t j = 0; j < row.size(); ++j) fields[j + 2] = format_double(row[j]);
      w.row(fields);
    }
  }
  w.close();
}

DrawFile read_draws(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  DrawFile file;
  for (const auto& c : table.comments) {
    const auto colon = c.find(": ");
    if (colon != std::string::npos) file.metadata[c.substr(0, colon)] = c.substr(colon + 2);
  }
  if (table.header.size() < 3 || table.header[0] != "chain" || table.header[1] != "iteration") {
    throw IoError(path.string() + ": not a draws file (expected chain,iteration,... header)");
  }
  auto meta_long = [&](const std::string& key, long fallback) {
    const auto it = file.metadata.find(key);
    return it == file.metadata.end() ? fallback : std::stol(it->second);
  };
  IterationMeta meta;
  meta.total = meta_long("iterations", 0);
  meta.burn_in = meta_long("burn_in", 0);
  meta.thin = meta_long("thin", 1);

  std::vector<std::string> names(table.header.begin() + 2, table.header.end());
  file.draws = DrawStore(names, meta);
  long current = 0;
  std::size_t chain = 0;
  std::vector<double> row(names.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const std::string where = path.string() + ":" + std::to_string(table.line_numbers[r]);
    double cv = 0.0;
    if (!parse_double(fields[0], cv) || cv < 1.0) throw IoError(where + ": bad chain index");
    const long c = static_cast<long>(cv);
    if (c != current) {
      if (c != current + 1) throw IoError(where + ": chains must appear in order 1, 2, ...");
      chain = file.draws.add_chain();
      current = c;
    }
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (!parse_double(fields[j + 2], row[j])) {
        throw IoError(where + ": non-numeric value in column '" + names[j] + "'");
      }
    }
    file.draws.append(chain, row);
  }
  if (file.draws.chains() == 0) throw EmptyDraws(path.string() + ": no draws");
  file.draws.check_balanced();
  return file;
}

}  // namespace bqr::app
