#include <gtest/gtest.h>

#include "bioquake/table_io.hpp"

using namespace bioquake;

TEST(ParseCount, Suffixes) {
  EXPECT_EQ(parse_count("140"), 140);
  EXPECT_EQ(parse_count("45K"), 45'000);
  EXPECT_EQ(parse_count("45.8K"), 45'800);
  EXPECT_EQ(parse_count("9.7k"), 9'700);
  EXPECT_EQ(parse_count("4M"), 4'000'000);
  EXPECT_EQ(parse_count("4.2M"), 4'200'000);
  EXPECT_EQ(parse_count("330.1B"), 330'100'000'000);
  EXPECT_EQ(parse_count("11.1b"), 11'100'000'000);
}

TEST(ParseCount, IsStrict) {
  for (const char* bad : {"", "4.5", "1.0005K", "K", "-3", "3 K", "1e6", "4M5", "4.", ".5K", "12x"}) {
    EXPECT_THROW(parse_count(bad), ParseError) << bad;
  }
  EXPECT_THROW(parse_count("99999999999999B"), ParseError);
}

TEST(ParseReal, IsStrict) {
  EXPECT_EQ(parse_real("0.02"), 0.02);
  EXPECT_EQ(parse_real("+1e-7"), 1e-7);
  for (const char* bad : {"", "1,5", "abc", "0.5%", " 1"}) EXPECT_THROW(parse_real(bad), ParseError) << bad;
}

TEST(FormatReal, RoundTrips) {
  for (const double v : {0.1, 1.0 / 3.0, 6.4439e-2, 1e-300, 12345678901234.0}) {
    EXPECT_EQ(parse_real(format_real(v)), v);
  }
  EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(ReadCsv, QuotesCommentsAndLineEndings) {
  const auto rows = read_csv("\xEF\xBB\xBF" "a,b\r\n# note\n\n\"x,1\",\"say \"\"hi\"\"\"\r\nlast,\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].cells, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(rows[1].cells, (std::vector<std::string>{"x,1", "say \"hi\""}));
  EXPECT_EQ(rows[1].line, 4u);
  EXPECT_EQ(rows[2].cells, (std::vector<std::string>{"last", ""}));
  EXPECT_THROW(read_csv("a,\"open\n"), ParseError);
}

TEST(CsvEscape, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("q\""), "\"q\"\"\"");
  const auto rows = read_csv(csv_escape("a,\"b\"") + "\n");
  EXPECT_EQ(rows[0].cells[0], "a,\"b\"");
}
