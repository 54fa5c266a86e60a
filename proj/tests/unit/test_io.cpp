#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "biphoton/io.hpp"

using namespace biphoton;

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(io::fnv1a_64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(io::fnv1a_64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(io::fnv1a_64("foobar"), 0x85944171f73967e8ULL);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(2.0), "2");
  const double x = 0.20710678118654752;
  EXPECT_EQ(std::stod(io::format_double(x)), x);
}

TEST(Metadata, HeaderLines) {
  std::ostringstream out;
  io::write_metadata(out, {"ch-optimize", 42, 0xabcULL});
  EXPECT_EQ(out.str(),
            "# biphoton 1.0.0\n# command=ch-optimize\n# seed=42\n# config_hash=0000000000000abc\n");
}

TEST(LoopholeCsv, RoundTrip) {
  bell::LoopholeMap m;
  m.f_axis = {0.5, 1.0};
  m.eta_axis = {0.6, 0.8, 1.0};
  m.ch_over_n = {-0.2, -0.05, 0.1, -0.1, 0.02, 0.2071067811865476};
  m.contour_levels = {0.0, 0.1};
  std::ostringstream out;
  io::write_loophole_csv(out, m, {"loophole-map", 1, 2});
  std::istringstream in(out.str());
  const auto back = io::read_loophole_csv(in);
  EXPECT_EQ(back.f_axis, m.f_axis);
  EXPECT_EQ(back.eta_axis, m.eta_axis);
  EXPECT_EQ(back.ch_over_n, m.ch_over_n);
}

TEST(LoopholeCsv, MalformedInputRejected) {
  std::istringstream in("f\\eta,0.5,1\n0.5,abc,1\n");
  EXPECT_THROW(io::read_loophole_csv(in), std::runtime_error);
  std::istringstream ragged("f\\eta,0.5,1\n0.5,1\n");
  EXPECT_THROW(io::read_loophole_csv(ragged), std::runtime_error);
}

TEST(ZeroContour, InterpolatesCrossing) {
  bell::LoopholeMap m;
  m.f_axis = {0.5, 1.0};
  m.eta_axis = {0.6, 0.8, 1.0};
  m.ch_over_n = {-0.2, -0.1, -0.05, -0.1, 0.1, 0.2};
  const auto z = io::zero_contour(m);
  EXPECT_TRUE(std::isnan(z[0]));
  EXPECT_NEAR(z[1], 0.7, 1e-12);
}

TEST(CountCsv, SkipsCommentsAndHeader) {
  std::istringstream in("# data\nposition,counts,stderr\n0.001,10,3.1\n0.002,12,3.4\n");
  const auto d = io::read_count_csv(in);
  ASSERT_EQ(d.position.size(), 2u);
  EXPECT_DOUBLE_EQ(d.counts[1], 12.0);
  EXPECT_DOUBLE_EQ(d.uncertainty[0], 3.1);
  std::istringstream bad("0.001,10\n");
  EXPECT_THROW(io::read_count_csv(bad), std::runtime_error);
}

TEST(Transcript, OneSortedObjectPerLine) {
  qkd::RoundRecord r;
  r.round = 3;
  r.alice_pol = 1;
  std::ostringstream out;
  io::write_transcript(out, {r, r});
  const auto s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
  EXPECT_NE(s.find("\"pol\":1"), std::string::npos);
  EXPECT_NE(s.find("\"pol\":null"), std::string::npos);
  EXPECT_LT(s.find("\"alice\""), s.find("\"bob\""));
  EXPECT_LT(s.find("\"phase\""), s.find("\"pol\""));
}
