#include "errmodel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "errmodel/error.hpp"

namespace errmodel {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

int decimals_of(std::string_view cell) {
  const auto dot = cell.find('.');
  if (dot == std::string_view::npos) return 0;
  const auto exp = cell.find_first_of("eE", dot);
  const auto end = exp == std::string_view::npos ? cell.size() : exp;
  return static_cast<int>(end - dot - 1);
}

double parse_cell(std::string_view cell, std::size_t row,
                  const std::string& column) {
  if (cell.empty()) throw ParseError(row, column, "empty cell");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(row, column,
                     "not a number: '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(row, column, "non-finite value");
  }
  return value;
}

// Comment lines of the form "# key: value".
struct Preamble {
  std::string label;
  std::map<std::string, std::string> units;
  std::optional<std::string> all_units;
};

void read_comment(std::string_view line, Preamble& pre) {
  line = trim(line.substr(1));
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) return;
  const auto key = trim(line.substr(0, colon));
  const auto value = trim(line.substr(colon + 1));
  if (key == "label") {
    pre.label = std::string(value);
  } else if (key == "units") {
    std::istringstream in{std::string(value)};
    std::string token;
    while (in >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        pre.all_units = token;
      } else {
        pre.units[token.substr(0, eq)] = token.substr(eq + 1);
      }
    }
  }
}

// Reads comments, header and data lines; data lines are returned split.
struct RawTable {
  Preamble preamble;
  std::vector<std::string_view> header;
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::string> storage;
};

RawTable read_table(std::istream& in) {
  RawTable table;
  std::string line;
  bool header_seen = false;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  table.storage = std::move(lines);

  for (const auto& stored : table.storage) {
    const auto view = trim(stored);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (!header_seen) read_comment(view, table.preamble);
      continue;
    }
    if (!header_seen) {
      table.header = split_csv(view);
      header_seen = true;
      continue;
    }
    table.rows.push_back(split_csv(view));
  }
  if (!header_seen) throw EmptyInputError("input has no header row");
  if (table.rows.empty()) throw EmptyInputError("input has no data rows");
  return table;
}

std::optional<std::size_t> find_column(const std::vector<std::string_view>& header,
                                       std::string_view name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::string_view cell_at(const std::vector<std::string_view>& row,
                         std::size_t index, std::size_t row_number,
                         const std::string& column) {
  if (index >= row.size()) throw ParseError(row_number, column, "missing cell");
  return row[index];
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("no such input: " + path.string());
  return in;
}

void write_fixed(std::ostream& out, double value, int decimals) {
  out << std::fixed << std::setprecision(decimals) << value;
}

}  // namespace

std::string_view unit_symbol(Unit unit) {
  switch (unit) {
    case Unit::dimensionless: return "1";
    case Unit::celsius: return "degC";
    case Unit::megahertz: return "MHz";
    case Unit::metre: return "m";
    case Unit::millimetre: return "mm";
    case Unit::ppm: return "ppm";
  }
  return "?";
}

Unit parse_unit(std::string_view symbol) {
  for (auto unit : {Unit::dimensionless, Unit::celsius, Unit::megahertz,
                    Unit::metre, Unit::millimetre, Unit::ppm}) {
    if (unit_symbol(unit) == symbol) return unit;
  }
  throw InputError("unknown unit '" + std::string(symbol) + "'");
}

MeasurementSeries::MeasurementSeries(std::vector<MeasurementRow> rows,
                                     Unit condition_unit, Unit value_unit,
                                     std::string label, double sanity_fraction)
    : rows_(std::move(rows)),
      condition_unit_(condition_unit),
      value_unit_(value_unit),
      label_(std::move(label)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    if (!std::isfinite(row.condition)) {
      throw ParseError(i + 1, "condition", "non-finite value");
    }
    if (!std::isfinite(row.observed)) {
      throw ParseError(i + 1, "observed", "non-finite value");
    }
    if (row.reference) {
      if (!std::isfinite(*row.reference)) {
        throw ParseError(i + 1, "reference", "non-finite value");
      }
      if (std::abs(row.observed - *row.reference) >=
          sanity_fraction * std::abs(row.observed)) {
        throw ParseError(i + 1, "reference",
                         "observed and reference differ by more than the "
                         "sanity bound");
      }
    }
  }
}

bool MeasurementSeries::has_reference() const noexcept {
  return !rows_.empty() &&
         std::all_of(rows_.begin(), rows_.end(),
                     [](const MeasurementRow& r) { return r.reference.has_value(); });
}

std::vector<double> MeasurementSeries::conditions() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.condition);
  return out;
}

std::vector<double> MeasurementSeries::observed() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.observed);
  return out;
}

MeasurementSeries parse_series(std::istream& in, const LoadSchema& schema) {
  const auto table = read_table(in);

  const auto condition_col = find_column(table.header, schema.condition_column);
  const auto observed_col = find_column(table.header, schema.observed_column);
  const auto reference_col = find_column(table.header, schema.reference_column);
  if (!condition_col) {
    throw InputError("header lacks column '" + schema.condition_column + "'");
  }
  if (!observed_col) {
    throw InputError("header lacks column '" + schema.observed_column + "'");
  }

  auto unit_for = [&](const char* key, std::optional<Unit> fallback) {
    const auto& units = table.preamble.units;
    if (auto it = units.find(key); it != units.end()) return parse_unit(it->second);
    if (table.preamble.all_units) return parse_unit(*table.preamble.all_units);
    if (fallback) return *fallback;
    return Unit::dimensionless;
  };
  const Unit condition_unit = unit_for("condition", schema.condition_unit);
  const Unit value_unit = unit_for("observed", schema.value_unit);
  if (reference_col) {
    const auto& units = table.preamble.units;
    if (auto it = units.find("reference");
        it != units.end() && parse_unit(it->second) != value_unit) {
      throw InputError("reference unit must match observed unit");
    }
  }

  std::vector<MeasurementRow> rows;
  ColumnDecimals decimals{0, 0, 0};
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& raw = table.rows[i];
    const std::size_t number = i + 1;
    MeasurementRow row;
    auto cond_cell = cell_at(raw, *condition_col, number, schema.condition_column);
    auto obs_cell = cell_at(raw, *observed_col, number, schema.observed_column);
    row.condition = parse_cell(cond_cell, number, schema.condition_column);
    row.observed = parse_cell(obs_cell, number, schema.observed_column);
    decimals.condition = std::max(decimals.condition, decimals_of(cond_cell));
    decimals.observed = std::max(decimals.observed, decimals_of(obs_cell));
    if (reference_col) {
      auto ref_cell = cell_at(raw, *reference_col, number, schema.reference_column);
      row.reference = parse_cell(ref_cell, number, schema.reference_column);
      decimals.reference = std::max(decimals.reference, decimals_of(ref_cell));
    }
    rows.push_back(row);
  }

  MeasurementSeries series(std::move(rows), condition_unit, value_unit,
                           table.preamble.label, schema.sanity_fraction);
  series.set_decimals(decimals);
  return series;
}

MeasurementSeries load_series(const std::filesystem::path& path,
                              const LoadSchema& schema) {
  auto in = open_input(path);
  return parse_series(in, schema);
}

void write_csv(const MeasurementSeries& series, std::ostream& out) {
  const bool with_reference = series.has_reference();
  if (!series.label().empty()) out << "# label: " << series.label() << '\n';
  out << "# units: condition=" << unit_symbol(series.condition_unit())
      << " observed=" << unit_symbol(series.value_unit());
  if (with_reference) out << " reference=" << unit_symbol(series.value_unit());
  out << '\n';
  out << (with_reference ? "condition,observed,reference\n"
                         : "condition,observed\n");
  const auto& dec = series.decimals();
  for (const auto& row : series.rows()) {
    write_fixed(out, row.condition, dec.condition);
    out << ',';
    write_fixed(out, row.observed, dec.observed);
    if (with_reference) {
      out << ',';
      write_fixed(out, *row.reference, dec.reference);
    }
    out << '\n';
  }
}

std::vector<double> DifferentialTable::differences() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.difference());
  return out;
}

DifferentialTable parse_differential(std::istream& in) {
  const auto table = read_table(in);
  const std::vector<std::string> names{"s_ab", "s_ac", "s2", "s1"};
  std::vector<std::size_t> cols;
  for (const auto& name : names) {
    const auto col = find_column(table.header, name);
    if (!col) throw InputError("header lacks column '" + name + "'");
    cols.push_back(*col);
  }

  DifferentialTable out;
  out.label = table.preamble.label;
  out.nominal_decimals = 0;
  out.reading_decimals = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& raw = table.rows[i];
    const std::size_t number = i + 1;
    double v[4];
    for (std::size_t c = 0; c < 4; ++c) {
      const auto cell = cell_at(raw, cols[c], number, names[c]);
      v[c] = parse_cell(cell, number, names[c]);
      auto& dec = c < 2 ? out.nominal_decimals : out.reading_decimals;
      dec = std::max(dec, decimals_of(cell));
    }
    if (!(v[3] > v[2])) {
      throw ParseError(number, "s1", "s1 must exceed s2");
    }
    out.nominal.push_back({v[0], v[1]});
    out.rows.push_back({v[3], v[2]});
  }
  return out;
}

DifferentialTable load_differential(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_differential(in);
}

void write_differential(const DifferentialTable& table, std::ostream& out) {
  if (!table.label.empty()) out << "# label: " << table.label << '\n';
  out << "# units: m\ns_ab,s_ac,s2,s1\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const NominalPair nominal = i < table.nominal.size() ? table.nominal[i]
                                                         : NominalPair{};
    write_fixed(out, nominal.s_ab, table.nominal_decimals);
    out << ',';
    write_fixed(out, nominal.s_ac, table.nominal_decimals);
    out << ',';
    write_fixed(out, table.rows[i].s2, table.reading_decimals);
    out << ',';
    write_fixed(out, table.rows[i].s1, table.reading_decimals);
    out << '\n';
  }
}

std::vector<ErrorSample> to_error_samples(const MeasurementSeries& series,
                                          ReferenceRule rule, double quantum) {
  if (series.empty()) throw InsufficientDataError("series is empty");
  auto quantize = [quantum](double e) {
    return quantum > 0.0 ? std::round(e / quantum) * quantum : e;
  };

  std::vector<ErrorSample> samples;
  samples.reserve(series.size());
  if (rule == ReferenceRule::explicit_reference) {
    // Reference minus observed; metres are reported in mm.
    const double scale = series.value_unit() == Unit::metre ? 1000.0 : 1.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto& row = series.rows()[i];
      if (!row.reference) {
        throw ParseError(i + 1, "reference",
                         "explicit-reference rule needs a reference value");
      }
      samples.push_back(
          {row.condition, quantize((*row.reference - row.observed) * scale)});
    }
    return samples;
  }

  const auto values = series.observed();
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) /
      static_cast<double>(values.size());
  if (mean == 0.0) throw InputError("mean-reference rule needs a nonzero mean");
  for (const auto& row : series.rows()) {
    samples.push_back({row.condition, quantize((row.observed - mean) / mean * 1e6)});
  }
  return samples;
}

std::vector<double> sample_conditions(std::span<const ErrorSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.condition);
  return out;
}

std::vector<double> sample_errors(std::span<const ErrorSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.error);
  return out;
}

}  // namespace errmodel
