#include <algorithm>
#include <cmath>

#include "bqr/app.hpp"
#include "bqr/csv.hpp"
#include "bqr/errors.hpp"

namespace bqr::app {

IngestResult ingest_csv(const std::filesystem::path& path, const std::string& outcome,
                        const std::vector<std::string>& covariates) {
  const CsvTable table = read_csv(path);
  auto locate = [&](const std::string& name) {
    try {
      return table.column(name);
    } catch (const MissingColumn&) {
      throw MissingColumn(path.string() + ": column '" + name + "' not found");
    }
  };
  const std::size_t y_col = locate(outcome);
  std::vector<std::size_t> x_cols;
  for (const auto& c : covariates) x_cols.push_back(locate(c));

  std::vector<std::uint8_t> y;
  std::vector<std::vector<double>> cols(covariates.size());
  std::size_t dropped = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    double yv = 0.0;
    bool complete = parse_double(row[y_col], yv);
    std::vector<double> xs(x_cols.size());
    for (std::size_t j = 0; complete && j < x_cols.size(); ++j) {
      complete = parse_double(row[x_cols[j]], xs[j]) && std::isfinite(xs[j]);
    }
    if (!complete || !std::isfinite(yv)) {
      ++dropped;
      continue;
    }
    if (yv != 0.0 && yv != 1.0) {
      throw NonBinaryOutcome(path.string() + ":" + std::to_string(table.line_numbers[r]) +
                             ": outcome '" + outcome + "' has value " + row[y_col] +
                             ", expected 0 or 1");
    }
    y.push_back(yv == 1.0 ? 1 : 0);
    for (std::size_t j = 0; j < xs.size(); ++j) cols[j].push_back(xs[j]);
  }
  if (y.empty()) {
    throw EmptyAfterFiltering(path.string() + ": no complete rows among " +
                              std::to_string(table.rows.size()));
  }

  DesignMatrix x(y.size(), covariates.size() + 1);
  for (std::size_t i = 0; i < y.size(); ++i) x(i, 0) = 1.0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::copy(cols[j].begin(), cols[j].end(), x.column(j + 1).begin());
  }
  std::vector<std::string> names = {"(Intercept)"};
  names.insert(names.end(), covariates.begin(), covariates.end());
  return {Dataset(std::move(x), std::move(y), std::move(names)), dropped};
}

StandardizeResult standardize(const Dataset& data, const std::vector<std::string>& continuous) {
  DesignMatrix x = data.x();
  const auto& names = data.column_names();
  StandardizeResult result;
  for (const auto& name : continuous) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw MissingColumn("standardize: column '" + name + "' not found");
    const auto j = static_cast<std::size_t>(it - names.begin());
    if (j == 0) throw DomainError("standardize: the intercept cannot be standardized");
    auto col = x.column(j);
    const double n = static_cast<double>(col.size());
    if (col.size() < 2) throw ZeroVariance("standardize: '" + name + "' needs at least two rows");
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw ZeroVariance("standardize: column '" + name + "' is constant");
    for (double& v : col) v = (v - mean) / sd;
    result.scaling.push_back({name, mean, sd});
  }
  result.data = Dataset(std::move(x), data.y_obs(), names);
  return result;
}

}  // namespace bqr::app
