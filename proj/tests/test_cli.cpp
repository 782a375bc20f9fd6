#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dcube/cli.hpp"
#include "dcube/return_times.hpp"
#include "helpers.hpp"

using json = nlohmann::json;
using testing_support::fixture_path;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  std::vector<std::string_view> views(args.begin(), args.end());
  std::ostringstream out, err;
  Outcome o;
  o.code = dcube::cli::run(views, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dcube_test_" + name)).string();
}

}  // namespace

TEST(Cli, UcppOnRot6) {
  auto o = run({"ucpp", fixture_path("rot6.fsys")});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = o.report();
  EXPECT_EQ(r["command"], "ucpp");
  EXPECT_EQ(r["result"]["Q_size"], 108);
  EXPECT_EQ(r["result"]["ucpp"], true);
  EXPECT_EQ(r["exit_code"], 0);
  EXPECT_FALSE(r.contains("timings_ms"));
}

TEST(Cli, UcppFailureExitsOne) {
  auto o = run({"ucpp", fixture_path("rot5_d1.fsys")});
  EXPECT_EQ(o.code, 1);
  EXPECT_EQ(o.report()["result"]["ucpp"], false);
  EXPECT_TRUE(o.report()["result"].contains("witness"));
}

TEST(Cli, CubesCensus) {
  auto o = run({"cubes", fixture_path("rot6.fsys"), "--basepoint", "0"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["result"]["K_size"], 18);
}

TEST(Cli, ValidateExitCodes) {
  auto o = run({"validate", fixture_path("invalid/noncommuting.fsys")});
  EXPECT_EQ(o.code, 1);
  EXPECT_EQ(o.report()["result"]["valid"], false);
  EXPECT_TRUE(o.report()["result"].contains("witness"));
  EXPECT_EQ(run({"validate", fixture_path("rot6.fsys")}).code, 0);
  EXPECT_EQ(run({"validate", fixture_path("missing.fsys")}).code, 3);
  EXPECT_EQ(run({"validate", fixture_path("example83.affine")}).code, 0);
  EXPECT_EQ(run({"validate", fixture_path("parityB1.pset")}).code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 3);
  EXPECT_EQ(run({"frobnicate"}).code, 3);
  EXPECT_EQ(run({"ucpp"}).code, 3);
  EXPECT_EQ(run({"ucpp", fixture_path("rot6.fsys"), "--threads", "0"}).code, 3);
  auto o = run({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("verify"), std::string::npos);
}

TEST(Cli, RppAndQuotient) {
  auto o = run({"rpp", fixture_path("rot6.fsys")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["result"]["R_trivial"], true);

  auto out = temp_file("quotient.fsys");
  o = run({"quotient", fixture_path("rot6.fsys"), "--relation", "qh", "--gens", "2", "-o", out});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["result"]["quotient_points"], 2);
  EXPECT_EQ(run({"validate", out}).code, 0);
  std::filesystem::remove(out);

  o = run({"rpp", fixture_path("two_rot3.fsys")});
  EXPECT_EQ(o.code, 2);
}

TEST(Cli, StructureUnmetOnNonClosing) {
  EXPECT_EQ(run({"structure", fixture_path("rot12_d3.fsys")}).code, 0);
  EXPECT_EQ(run({"structure", fixture_path("rot5_d1.fsys")}).code, 2);
}

TEST(Cli, AffineCommands) {
  auto o = run({"affine-check", fixture_path("example83.affine")});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = o.report()["result"];
  EXPECT_EQ(r["unipotent"], true);
  EXPECT_EQ(r["MatCond1"], true);

  o = run({"formula-test", fixture_path("jordan.affine"), "--range", "2", "--q", "1,2,4"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["result"]["outcome"], "witness found");

  auto out = temp_file("rot6_disc.fsys");
  o = run({"discretize", fixture_path("rot6.affine"), "--q", "6", "-o", out});
  ASSERT_EQ(o.code, 0) << o.err;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(dcube::load_system(ss.str()), testing_support::load("rot6.fsys"));
  std::filesystem::remove(out);

  EXPECT_EQ(run({"discretize", fixture_path("jordan.affine"), "--q", "2"}).code, 3);
}

TEST(Cli, ReturnTimesAndJoining) {
  auto out = temp_file("returns.pset");
  auto o = run({"return-times", fixture_path("rot6.fsys"), "--point", "0", "--target", "0", "--containment", "-o", out});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["result"]["set"]["moduli"], json::array({6, 3}));
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(dcube::parse_periodic_set(ss.str()).residue_count(), 3U);
  std::filesystem::remove(out);

  o = run({"joining", fixture_path("parityB1.pset"), fixture_path("parityB1.pset"), fixture_path("parityB2.pset")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["result"]["empty"], true);

  EXPECT_EQ(run({"return-times", fixture_path("rot6.fsys"), "--point", "0", "--target", "1", "--containment"}).code, 3);
  EXPECT_EQ(run({"return-times", fixture_path("two_rot3.fsys"), "--point", "0", "--target", "0", "--containment"}).code, 2);
}

TEST(Cli, HumanOutputAndTimings) {
  auto o = run({"verify", fixture_path("rot6.fsys"), "--human"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("pass"), std::string::npos);
  EXPECT_EQ(o.out.find('{'), std::string::npos);
  o = run({"ucpp", fixture_path("rot6.fsys"), "--timings"});
  EXPECT_TRUE(o.report().contains("timings_ms"));
}

TEST(Cli, VerifyEveryFixture) {
  std::vector<std::string> names = testing_support::minimal_fixtures();
  for (const auto& n : testing_support::nonminimal_fixtures()) names.push_back(n);
  for (const auto& n : testing_support::affine_fixtures()) names.push_back(n);
  names.push_back("parityB1.pset");
  for (const auto& name : names) {
    auto o = run({"verify", fixture_path(name)});
    EXPECT_EQ(o.code, 0) << name << "\n" << o.err;
    auto r = o.report();
    EXPECT_EQ(r["result"]["failed"], 0) << name;
  }
}
