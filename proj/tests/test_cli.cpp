#include <gtest/gtest.h>

#include "cli_contract.hpp"

using namespace cli_contract;

class CommandExample : public ::testing::TestWithParam<NamedCheck> {};

TEST_P(CommandExample, MatchesContract) {
  const auto failure = GetParam().check();
  EXPECT_TRUE(failure.empty()) << failure;
}

INSTANTIATE_TEST_SUITE_P(Cli, CommandExample, ::testing::ValuesIn(examples()),
                         [](const auto &info) { return info.param.name; });

TEST(Cli, GridRoundTrip) {
  const auto failure = grid_round_trip();
  EXPECT_TRUE(failure.empty()) << failure;
}

TEST(Cli, GridShapes) {
  const auto s = run({"eval", golden("sphere_p1.json").string(), "--grid", "5"});
  ASSERT_EQ(s.status, 0);
  EXPECT_EQ(s.out, "-1.0,-1.0\n-0.5,-0.5\n0.0,0.0\n0.5,0.5\n1.0,1.0\n");

  const auto st = run({"eval", golden("st_gaussian.json").string(), "--grid", "3", "--tmax", "2"});
  ASSERT_EQ(st.status, 0);
  EXPECT_EQ(csv(st.out).size(), 9u);

  const auto p = run({"eval", golden("product_p1p1.json").string(), "--grid", "4"});
  ASSERT_EQ(p.status, 0);
  const auto rows = csv(p.out);
  ASSERT_EQ(rows.size(), 16u);
  for (const auto &r : rows) EXPECT_NEAR(r[2], r[0] * r[1], 1e-15);
}

TEST(Cli, SeedFromEnvironment) {
  const auto spec = golden("sphere_smooth.json").string();
  const auto flag = run({"simulate", spec, "--random", "4", "--samples", "3", "--seed", "12"});
  const std::string cmd = "SPHERECOV_SEED=12 " + quote(SPHERECOV_CLI) + " simulate " + quote(spec) +
                          " --random 4 --samples 3";
  FILE *pipe = ::popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  EXPECT_EQ(::pclose(pipe), 0);
  EXPECT_EQ(out, flag.out);
}

TEST(Cli, SpectralSamplerOnSphere) {
  const auto r = run({"simulate", golden("sphere_p1.json").string(), "--points", golden("points_cos_half.csv").string(),
                      "--samples", "10000", "--seed", "4", "--method", "spectral"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NEAR(empirical_cov01(r.out.substr(r.out.find('\n') + 1)), 0.5, 0.04);
}

TEST(Cli, ProductAndSpaceTimeSimulation) {
  const auto p = run({"simulate", golden("product_outer.json").string(), "--random", "5", "--samples", "2"});
  ASSERT_EQ(p.status, 0) << p.err;
  EXPECT_EQ(std::count(p.out.begin(), p.out.end(), '\n'), 3);

  const auto dir = scratch();
  const auto pts = dir / "st_points.csv";
  std::ofstream(pts) << "0,0,1,0.0\n0,1,0,0.5\n";
  const auto st = run({"simulate", golden("st_gaussian.json").string(), "--points", pts.string(), "--samples", "2"});
  ASSERT_EQ(st.status, 0) << st.err;
  EXPECT_EQ(st.out.substr(0, st.out.find('\n')), "0.0 0.0 1.0 0.0,0.0 1.0 0.0 0.5");

  const auto wrong = run({"simulate", golden("st_gaussian.json").string(), "--points",
                          golden("points_three.csv").string(), "--samples", "2"});
  EXPECT_TRUE(expect_json_error(wrong, 3).empty()) << wrong.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_TRUE(expect_json_error(run({"bogus"}), 2).empty());
  EXPECT_TRUE(expect_json_error(run({"coeffs", "--expr", "nope"}), 2).empty());
  EXPECT_TRUE(expect_json_error(run({"coeffs", "--expr", "x", "--table", "t.csv"}), 2).empty());
  EXPECT_TRUE(expect_json_error(run({"separable", golden("sphere_p1.json").string()}), 2).empty());
  EXPECT_TRUE(expect_json_error(run({"eval", "/nonexistent.json", "--x", "0"}), 2).empty());
  EXPECT_TRUE(expect_json_error(run({"simulate", golden("sphere_p1.json").string(), "--samples", "2"}), 2).empty());
}
