#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "abscompat/cli.hpp"
#include "abscompat/m2_geometry.hpp"

using namespace abscompat;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = ABSCOMPAT_FIXTURES;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "abscompat");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("abscompat_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CheckFixturePair) {
  const Result r = run({"check", fixture("m2_a.json"), fixture("m2_b.json")});
  EXPECT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["compatible"].get<bool>());
  EXPECT_LE(j["residual"].get<double>(), 1e-12);
}

TEST_F(CliTest, CheckHalfIdentity) {
  const Result r = run({"check", fixture("half.json"), fixture("half.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NEAR(Json::parse(r.out)["residual"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, CheckMalformed) {
  const Result r = run({"check", fixture("malformed.json"), fixture("half.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("ParseError"), std::string::npos);
}

TEST_F(CliTest, CheckDimensionMismatch) {
  EXPECT_EQ(run({"check", fixture("half.json"), fixture("odd_a.json")}).code, 1);
}

TEST_F(CliTest, DecomposeFixture) {
  const Result r = run({"decompose", fixture("m2_a.json"), fixture("m2_b.json"), "--blocks", tmp("blocks.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["x0"][0].get<double>(), 0.5, 1e-12);
  EXPECT_LE(j["residual"]["max"].get<double>(), 1e-7);
  EXPECT_EQ(read_json_file(tmp("blocks.json"))["blocks"]["s"]["rank"], 2);
}

TEST_F(CliTest, DecomposeErrors) {
  EXPECT_EQ(run({"decompose", fixture("half.json"), fixture("half.json")}).code, 2);
  EXPECT_EQ(run({"decompose", fixture("half.json"), fixture("projection.json")}).code, 3);
}

TEST_F(CliTest, GenPairThenCheckAndDecompose) {
  const Result g = run({"gen", "pair", "--n", "4", "--seed", "1", "--prefix", tmp("pair")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_EQ(Json::parse(g.out)["seed"], 1);
  EXPECT_EQ(run({"check", tmp("pair_a.json"), tmp("pair_b.json")}).code, 0);

  ASSERT_EQ(run({"gen", "pair", "--n", "8", "--seed", "5", "--prefix", tmp("big")}).code, 0);
  const Result d = run({"decompose", tmp("big_a.json"), tmp("big_b.json")});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_LE(Json::parse(d.out)["residual"]["max"].get<double>(), 1e-7);
}

TEST_F(CliTest, GenStrictProjection) {
  ASSERT_EQ(run({"gen", "projection", "--strict", "--sites", "3", "--prefix", tmp("p")}).code, 0);
  const M2OverDiag p = extract(read_matrix_file(tmp("p.json")));
  EXPECT_EQ(p.sites(), 3);
  EXPECT_TRUE(is_strict_projection(p));
}

TEST_F(CliTest, GenOtherKinds) {
  EXPECT_EQ(run({"gen", "unitary", "--n", "3", "--prefix", tmp("u")}).code, 0);
  EXPECT_NO_THROW(Unitary::from(read_matrix_file(tmp("u.json"))));
  EXPECT_EQ(run({"gen", "unitary", "--strict", "--sites", "2", "--prefix", tmp("su")}).code, 0);
  EXPECT_TRUE(is_strict_unitary(extract(read_matrix_file(tmp("su.json")))));
  EXPECT_EQ(run({"gen", "commuting", "--n", "3", "--prefix", tmp("c")}).code, 0);
  EXPECT_EQ(run({"gen", "projection", "--n", "4", "--rank", "1", "--prefix", tmp("r")}).code, 0);
  EXPECT_EQ(Projection::from(read_matrix_file(tmp("r.json"))).rank(), 1);
}

TEST_F(CliTest, GenErrors) {
  const Result odd = run({"gen", "pair", "--n", "3", "--prefix", tmp("x")});
  EXPECT_EQ(odd.code, 1);
  EXPECT_NE(odd.err.find("OddDimension"), std::string::npos);
  EXPECT_EQ(run({"gen", "pair", "--delta", "0.6", "--prefix", tmp("x")}).code, 1);
  EXPECT_EQ(run({"gen", "bogus"}).code, 1);
}

TEST_F(CliTest, GeometryFromFlags) {
  const Result r = run({"geometry", "--P", "0,0,0", "--Q", "0.5,0.5,0", "--lambda", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& [name, v] : Json::parse(r.out)["residuals"].items()) EXPECT_LE(v.get<double>(), 1e-12) << name;
}

TEST_F(CliTest, GeometryCsvSamples) {
  const Result r =
      run({"geometry", "--P", "0,0,0", "--Q", "0.5,0.5,0", "--lambda", "0.5", "--format", "csv", "--sample", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  int samples = 0, residuals = 0;
  while (std::getline(is, line)) {
    if (line.rfind("sample,", 0) == 0) ++samples;
    if (line.rfind("residual,", 0) == 0) ++residuals;
  }
  EXPECT_EQ(samples, 64);
  EXPECT_EQ(residuals, 5);
}

TEST_F(CliTest, GeometryFromFiles) {
  const Result r = run({"geometry", fixture("m2_a.json"), fixture("m2_b.json"), "--out", tmp("g.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(read_json_file(tmp("g.json"))["pivotal"]["index"].get<double>(), 0.5, 1e-12);
  EXPECT_EQ(run({"geometry", fixture("half.json"), fixture("projection.json")}).code, 3);
}

TEST_F(CliTest, FuzzM2) {
  const Result r = run({"fuzz", "m2", "--trials", "500", "--seed", "42"});
  ASSERT_EQ(r.code, 0) << r.out;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["all_passed"].get<bool>());
  for (const Json& p : j["properties"]) {
    EXPECT_EQ(p["passed"], 500);
    EXPECT_TRUE(p["worst_residual"].is_number());
  }
}

TEST_F(CliTest, FuzzEquivalences) {
  EXPECT_EQ(run({"fuzz", "equivalences", "--trials", "500"}).code, 0);
}

TEST_F(CliTest, FuzzIsReproducible) {
  const Result a = run({"fuzz", "geometry", "--trials", "30", "--seed", "9"});
  const Result b = run({"fuzz", "geometry", "--trials", "30", "--seed", "9"});
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, FuzzFailureWritesBundle) {
  // An absurdly tight compatibility bound forces failures.
  const Result r = run({"--tol-compat", "1e-300", "fuzz", "m2", "--trials", "3", "--fail-out", tmp("m2.fail.json")});
  EXPECT_EQ(r.code, 4);
  const Json bundle = read_json_file(tmp("m2.fail.json"));
  ASSERT_FALSE(bundle.empty());
  EXPECT_TRUE(bundle[0]["instance"].contains("P"));
}

TEST_F(CliTest, FuzzUnknownSuite) {
  const Result r = run({"fuzz", "bogus"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("UnknownSuite"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"check", fixture("m2_a.json")}).code, 1);
  EXPECT_EQ(run({"--tol-compat", "-1", "check", fixture("m2_a.json"), fixture("m2_b.json")}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(cli::exit_code_for(ErrorKind::NotStrict), 3);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::NotAbsolutelyCompatible), 2);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::PairingFailure), 4);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::ParseError), 1);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::OddDimension), 1);
}
