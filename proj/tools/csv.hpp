// Commented-header CSV: "# key=value" metadata lines, one column-name line,
// then numeric rows. Empty cells stand for missing values.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freqent/rotation_estimator.hpp"

namespace freqent::cli {

// Metadata key of the one line allowed to differ between identical runs.
inline constexpr std::string_view kTimestampKey = "generated";

struct CsvDocument {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;

  void add_meta(std::string key, std::string value);
  void add_meta(std::string key, double value);
  std::optional<std::string> meta(std::string_view key) const;
  // Throws Error(InvalidInput) when the column is absent.
  std::size_t column_index(std::string_view name) const;
};

void write_csv(std::ostream& os, const CsvDocument& doc);

// Throws Error(InvalidInput) on a missing header, ragged rows or cells that
// are not numbers.
CsvDocument read_csv(std::istream& is);

// Columns tau_s,p. Reads noise_sigma and seed from the metadata when present.
NoisyTrace trace_from_csv(const CsvDocument& doc);

}  // namespace freqent::cli
