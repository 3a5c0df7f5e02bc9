#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "freqent/errors.hpp"
#include "freqent/numfmt.hpp"

namespace freqent::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  const auto b = std::find_if(s.begin(), s.end(), not_space);
  const auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_cell(std::string_view cell, std::size_t line_no) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw Error(ErrorKind::InvalidInput,
                "line " + std::to_string(line_no) + ": not a number: '" + std::string(cell) + "'");
  return value;
}

}  // namespace

void CsvDocument::add_meta(std::string key, std::string value) {
  metadata.emplace_back(std::move(key), std::move(value));
}

void CsvDocument::add_meta(std::string key, double value) {
  metadata.emplace_back(std::move(key), format_number(value));
}

std::optional<std::string> CsvDocument::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return std::nullopt;
}

std::size_t CsvDocument::column_index(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end())
    throw Error(ErrorKind::InvalidInput, "missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

void write_csv(std::ostream& os, const CsvDocument& doc) {
  for (const auto& [k, v] : doc.metadata) os << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < doc.columns.size(); ++i)
    os << (i ? "," : "") << doc.columns[i];
  os << "\n";
  std::string line;
  for (const auto& row : doc.rows) {
    line.clear();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += ',';
      if (row[i]) line += format_number(*row[i]);
    }
    line += '\n';
    os << line;
  }
}

CsvDocument read_csv(std::istream& is) {
  CsvDocument doc;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos)
        doc.add_meta(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
      continue;
    }
    const auto cells = split(line);
    if (!have_header) {
      for (auto c : cells) {
        if (c.empty()) throw Error(ErrorKind::InvalidInput, "empty column name");
        doc.columns.emplace_back(c);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != doc.columns.size())
      throw Error(ErrorKind::InvalidInput,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(doc.columns.size()) + " cells, got " +
                      std::to_string(cells.size()));
    auto& row = doc.rows.emplace_back();
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_cell(c, line_no));
  }
  if (!have_header) throw Error(ErrorKind::InvalidInput, "no column header found");
  return doc;
}

NoisyTrace trace_from_csv(const CsvDocument& doc) {
  const auto it = doc.column_index("tau_s");
  const auto ip = doc.column_index("p");
  NoisyTrace trace;
  trace.samples.reserve(doc.rows.size());
  for (const auto& row : doc.rows) {
    if (!row[it] || !row[ip]) throw Error(ErrorKind::InvalidInput, "trace has empty cells");
    trace.samples.push_back({*row[it], *row[ip]});
  }
  if (const auto s = doc.meta("noise_sigma")) {
    if (auto v = parse_cell(*s, 0)) trace.noise_sigma = *v;
  }
  if (const auto s = doc.meta("seed")) {
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), seed);
    if (ec == std::errc{} && ptr == s->data() + s->size()) trace.rng_seed = seed;
  }
  trace.validate();
  return trace;
}

}  // namespace freqent::cli
