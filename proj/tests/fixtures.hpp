#pragma once

#include <filesystem>
#include <string>

#include "errmodel/dataset.hpp"

namespace errmodel::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(ERRMODEL_DATA_DIR) / name;
}

inline MeasurementSeries table1() { return load_series(data_path("table1.csv")); }
inline MeasurementSeries table2() { return load_series(data_path("table2.csv")); }
inline DifferentialTable table3() { return load_differential(data_path("table3.csv")); }

// Error column of Table 1, ppm.
inline constexpr double kTable1Errors[] = {-30, -15, -2, 7,  13,  12, 4, -3,
                                           -8,  -11, -11, -8, -1, 15, 37};
// Error column of Table 2, mm.
inline constexpr double kTable2Errors[] = {0.5,  1.1,  3.9,  5.9,  6.7,  7.5,  6.0,
                                           4.5,  3.1,  0.5,  -0.1, -1.5, -1.8, -3.9,
                                           -5.8, -5.2, -5.1, -3.6, -2.0, -0.6, 0.0};

// Reference cubic coefficients.
inline constexpr double kReferenceCubic[] = {9.983251, -0.013518, -0.018601, 0.000214};

}  // namespace errmodel::testing
