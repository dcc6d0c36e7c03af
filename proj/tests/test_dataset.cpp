#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "errmodel/dataset.hpp"
#include "errmodel/error.hpp"
#include "fixtures.hpp"

namespace errmodel {
namespace {

using testing::data_path;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(LoadSeries, Table1ShapeAndUnits) {
  const auto s = testing::table1();
  ASSERT_EQ(s.size(), 15u);
  EXPECT_EQ(s.condition_unit(), Unit::celsius);
  EXPECT_EQ(s.value_unit(), Unit::megahertz);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s.rows()[i].condition, -40.0 + 10.0 * static_cast<double>(i));
  }
  EXPECT_DOUBLE_EQ(s.rows().front().observed, 4.999900);
  EXPECT_DOUBLE_EQ(s.rows().back().observed, 5.000235);
  EXPECT_FALSE(s.has_reference());
}

TEST(LoadSeries, Table2ReferenceColumn) {
  const auto s = testing::table2();
  ASSERT_EQ(s.size(), 21u);
  ASSERT_TRUE(s.has_reference());
  EXPECT_DOUBLE_EQ(*s.rows().front().reference, 6.0237);
  EXPECT_DOUBLE_EQ(*s.rows().back().reference, 26.0272);
  EXPECT_EQ(s.value_unit(), Unit::metre);
}

TEST(LoadSeries, NonNumericCellNamesRowAndColumn) {
  std::istringstream in("condition,observed\n1,2\n3,abc\n");
  try {
    parse_series(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "observed");
  }
}

TEST(LoadSeries, EmptyInputIsDistinct) {
  std::istringstream empty("");
  EXPECT_THROW(parse_series(empty), EmptyInputError);
  std::istringstream header_only("# units: m\ncondition,observed\n");
  EXPECT_THROW(parse_series(header_only), EmptyInputError);
}

TEST(LoadSeries, MissingFile) {
  EXPECT_THROW(load_series(data_path("nope.csv")), InputError);
}

TEST(LoadSeries, ReferenceSanityBound) {
  std::istringstream in("condition,observed,reference\n1,10.0,10.5\n");
  EXPECT_THROW(parse_series(in), ParseError);
}

TEST(LoadSeries, TrailingGarbageRejected) {
  std::istringstream in("condition,observed\n1,2.5x\n");
  EXPECT_THROW(parse_series(in), ParseError);
}

TEST(WriteCsv, FixturesRoundTripByteForByte) {
  for (const char* name : {"table1.csv", "table2.csv"}) {
    const auto series = load_series(data_path(name));
    std::ostringstream out;
    write_csv(series, out);
    EXPECT_EQ(out.str(), slurp(data_path(name))) << name;
  }
  const auto table = testing::table3();
  std::ostringstream out;
  write_differential(table, out);
  EXPECT_EQ(out.str(), slurp(data_path("table3.csv")));
}

TEST(LoadDifferential, Table3) {
  const auto t = testing::table3();
  ASSERT_EQ(t.rows.size(), 15u);
  EXPECT_DOUBLE_EQ(t.rows[0].s2, 9.9965);
  EXPECT_DOUBLE_EQ(t.rows[0].s1, 18.0008);
  EXPECT_EQ(t.nominal[14].s_ab, 42.0);
  EXPECT_EQ(t.nominal[14].s_ac, 50.0);
}

TEST(LoadDifferential, RejectsShorterLongLeg) {
  std::istringstream in("s_ab,s_ac,s2,s1\n10,18,18.1,18.0\n");
  EXPECT_THROW(parse_differential(in), ParseError);
}

TEST(ToErrorSamples, Table2ExplicitReferenceMatchesErrorColumn) {
  const auto samples = to_error_samples(testing::table2(), ReferenceRule::explicit_reference);
  ASSERT_EQ(samples.size(), 21u);
  EXPECT_NEAR(samples[0].error, 0.5, 1e-9);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(std::round(samples[i].error * 10.0) / 10.0, testing::kTable2Errors[i])
        << "row " << i + 1;
  }
}

TEST(ToErrorSamples, Table1MeanReferenceMatchesErrorColumn) {
  const auto samples = to_error_samples(testing::table1(), ReferenceRule::mean_reference);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(std::round(samples[i].error), testing::kTable1Errors[i]) << "row " << i + 1;
  }
  EXPECT_EQ(std::round(samples[4].error), 13.0);  // 0 degC
  const auto quantized =
      to_error_samples(testing::table1(), ReferenceRule::mean_reference, 1.0);
  for (std::size_t i = 0; i < quantized.size(); ++i) {
    EXPECT_EQ(quantized[i].error, testing::kTable1Errors[i]);
  }
}

TEST(ToErrorSamples, IdentityGivesZero) {
  MeasurementSeries s({{1, 5.0, 5.0}, {2, 6.0, 6.0}}, Unit::metre, Unit::metre);
  for (const auto& e : to_error_samples(s, ReferenceRule::explicit_reference)) {
    EXPECT_EQ(e.error, 0.0);
  }
}

TEST(ToErrorSamples, ExplicitRuleNeedsReference) {
  EXPECT_THROW(to_error_samples(testing::table1(), ReferenceRule::explicit_reference),
               InputError);
}

}  // namespace
}  // namespace errmodel
