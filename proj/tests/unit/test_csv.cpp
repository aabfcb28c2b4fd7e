#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "bqr/csv.hpp"
#include "bqr/errors.hpp"
#include "bqr/rng.hpp"

namespace bqr {
namespace {

namespace fs = std::filesystem;

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path p = fs::path(BQR_TEST_TMPDIR) / name;
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

TEST(FormatDouble, RoundTripsExactly) {
  RngStream rng(1);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.uniform() * 200) - 100);
    double back = 0.0;
    ASSERT_TRUE(parse_double(format_double(v), back));
    ASSERT_EQ(back, v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(FormatSig, SixDigits) {
  EXPECT_EQ(format_sig(3.14159265), "3.14159");
  EXPECT_EQ(format_sig(1234567.0), "1.23457e+06");
  EXPECT_EQ(format_sig(0.5), "0.5");
}

TEST(ParseDouble, AcceptsAndRejects) {
  double v = 0.0;
  EXPECT_TRUE(parse_double(" 2.5 ", v));
  EXPECT_EQ(v, 2.5);
  EXPECT_TRUE(parse_double("+1e-3\r", v));
  EXPECT_EQ(v, 1e-3);
  EXPECT_FALSE(parse_double("", v));
  EXPECT_FALSE(parse_double("NA", v));
  EXPECT_FALSE(parse_double("1.5x", v));
  EXPECT_FALSE(parse_double("  ", v));
}

TEST(Csv, WriteReadRoundTrip) {
  const fs::path p = fs::path(BQR_TEST_TMPDIR) / "rt.csv";
  {
    CsvWriter w(p);
    w.comment("seed: 7");
    w.row({"a", "b,c", "d"});
    w.row({"1", "say \"hi\"", "two\nlines"});
    w.close();
  }
  const CsvTable t = read_csv(p);
  EXPECT_EQ(t.comments, (std::vector<std::string>{"seed: 7"}));
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b,c", "d"}));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
  EXPECT_EQ(t.rows[0][2], "two\nlines");
  EXPECT_EQ(t.line_numbers[0], 3u);
  EXPECT_EQ(t.column("d"), 2u);
  EXPECT_THROW(t.column("zzz"), MissingColumn);
}

TEST(Csv, CrlfAndBlankLines) {
  const CsvTable t = read_csv(write_text("crlf.csv", "x,y\r\n1,2\r\n\r\n3,4\r\n"));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"3", "4"}));
  EXPECT_EQ(t.line_numbers[1], 4u);
}

TEST(Csv, ErrorsCarryLineNumbers) {
  try {
    read_csv(write_text("ragged.csv", "x,y\n1,2\n3\n"));
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("ragged.csv:3:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_csv(write_text("quote.csv", "x\n\"open\n")), IoError);
  EXPECT_THROW(read_csv(write_text("empty.csv", "")), IoError);
  EXPECT_THROW(read_csv(fs::path(BQR_TEST_TMPDIR) / "does_not_exist.csv"), IoError);
}

}  // namespace
}  // namespace bqr
