#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace errmodel {

enum class Unit { dimensionless, celsius, megahertz, metre, millimetre, ppm };

std::string_view unit_symbol(Unit unit);
/// Accepts the symbols written by unit_symbol ("degC", "MHz", "m", "mm", "ppm", "1").
Unit parse_unit(std::string_view symbol);

struct MeasurementRow {
  double condition = 0.0;
  double observed = 0.0;
  std::optional<double> reference;
};

/// Decimal places per CSV column, recorded on load so fixtures write back unchanged.
struct ColumnDecimals {
  int condition = 6;
  int observed = 6;
  int reference = 6;
};

class MeasurementSeries {
 public:
  /// Validates every row: finite values and, where a reference is present,
  /// |observed - reference| < sanity_fraction * |observed|.
  MeasurementSeries(std::vector<MeasurementRow> rows, Unit condition_unit,
                    Unit value_unit, std::string label = {},
                    double sanity_fraction = 0.01);

  const std::vector<MeasurementRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  Unit condition_unit() const noexcept { return condition_unit_; }
  Unit value_unit() const noexcept { return value_unit_; }
  const std::string& label() const noexcept { return label_; }
  bool has_reference() const noexcept;

  std::vector<double> conditions() const;
  std::vector<double> observed() const;

  const ColumnDecimals& decimals() const noexcept { return decimals_; }
  void set_decimals(ColumnDecimals decimals) noexcept { decimals_ = decimals; }

 private:
  std::vector<MeasurementRow> rows_;
  Unit condition_unit_;
  Unit value_unit_;
  std::string label_;
  ColumnDecimals decimals_;
};

/// Column mapping for load_series. Units default to the file's `# units:` line;
/// the overrides apply when the file has none.
struct LoadSchema {
  std::string condition_column = "condition";
  std::string observed_column = "observed";
  std::string reference_column = "reference";
  std::optional<Unit> condition_unit;
  std::optional<Unit> value_unit;
  double sanity_fraction = 0.01;
};

MeasurementSeries load_series(const std::filesystem::path& path,
                              const LoadSchema& schema = {});
MeasurementSeries parse_series(std::istream& in, const LoadSchema& schema = {});
void write_csv(const MeasurementSeries& series, std::ostream& out);

/// One differential observation: s1 is the longer leg, s2 the shorter.
struct DifferentialRow {
  double s1 = 0.0;
  double s2 = 0.0;

  double difference() const noexcept { return s1 - s2; }
};

/// Nominal leg lengths of a differential design (simulation metadata).
struct NominalPair {
  double s_ab = 0.0;
  double s_ac = 0.0;
};

struct DifferentialTable {
  std::vector<NominalPair> nominal;
  std::vector<DifferentialRow> rows;
  std::string label;
  int nominal_decimals = 0;
  int reading_decimals = 4;

  std::vector<double> differences() const;
};

/// Reads `s_ab,s_ac,s2,s1` CSV. Every row must satisfy s1 > s2.
DifferentialTable load_differential(const std::filesystem::path& path);
DifferentialTable parse_differential(std::istream& in);
void write_differential(const DifferentialTable& table, std::ostream& out);

struct ErrorSample {
  double condition = 0.0;
  double error = 0.0;
};

enum class ReferenceRule {
  /// error = (reference - observed) expressed in mm.
  explicit_reference,
  /// error = (observed - mean) / mean * 1e6, in ppm.
  mean_reference,
};

/// Converts a series into error samples. A positive `quantum` rounds each
/// error to the nearest multiple of it (half away from zero), matching tables
/// that print errors at a fixed resolution.
std::vector<ErrorSample> to_error_samples(const MeasurementSeries& series,
                                          ReferenceRule rule,
                                          double quantum = 0.0);

std::vector<double> sample_conditions(std::span<const ErrorSample> samples);
std::vector<double> sample_errors(std::span<const ErrorSample> samples);

}  // namespace errmodel
