#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "igauge/cli.hpp"

using namespace igauge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
  std::map<std::string, std::string> kv;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome r{run_command(args, out, err), out.str(), err.str(), {}};
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);)
    if (const auto eq = line.find('='); eq != std::string::npos) r.kv[line.substr(0, eq)] = line.substr(eq + 1);
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("igauge_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                       "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_F(Cli, GeneratedFlatConnectionSitsOnLattice) {
  const Outcome g = run({"gen-flat", "--size", "16", "--seed", "3", "--degree", "0", "--out", path("b.igf")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_EQ(g.kv.at("command"), "gen-flat");
  EXPECT_EQ(g.kv.at("config.size"), "16");
  const Outcome c = run({"cs", "--in", path("b.igf")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.kv.at("lattice_k"), "0");
  EXPECT_LT(std::abs(std::stod(c.kv.at("cs"))), 1e-10);
  EXPECT_EQ(c.kv.at("config.size_phi"), "16");
}

TEST_F(Cli, OutputIsDeterministic) {
  const Outcome a = run({"gen-random", "--size", "12", "--seed", "5", "--out", path("a.igf")});
  const Outcome b = run({"gen-random", "--size", "12", "--seed", "5", "--out", path("b.igf")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(slurp(path("a.igf")), slurp(path("b.igf")));
  EXPECT_EQ(run({"cs", "--in", path("a.igf")}).out, run({"cs", "--in", path("b.igf")}).out);
}

TEST_F(Cli, FlagsOverrideConfigFile) {
  std::ofstream(path("run.cfg")) << "# comment\nsize = 10\nseed=7\nbandlimit=1\n";
  const Outcome r = run({"gen-random", "--config", path("run.cfg"), "--seed", "9", "--out", path("x.igf")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.at("config.size"), "10");
  EXPECT_EQ(r.kv.at("config.seed"), "9");
  EXPECT_EQ(r.kv.at("config.bandlimit"), "1");
}

TEST_F(Cli, UsageErrors) {
  std::ofstream(path("bad.cfg")) << "sise=10\n";
  EXPECT_EQ(run({"gen-random", "--config", path("bad.cfg"), "--out", path("x.igf")}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({"cs"}).code, 2);
  EXPECT_EQ(run({"cs", "--in", path("missing.igf")}).code, 2);
  EXPECT_EQ(run({"gen-flat", "--order", "3", "--out", path("x.igf")}).code, 2);
  ASSERT_EQ(run({"gen-random", "--dim", "4", "--size", "6", "--radial", "5", "--bandlimit", "1", "--out", path("f4.igf")}).code, 0);
  EXPECT_EQ(run({"cs", "--in", path("f4.igf")}).code, 2);
  EXPECT_EQ(run({"cs", "--in", path("f4.igf"), "--group", "SO3"}).code, 2);
}

TEST_F(Cli, MalformedFileIsFormatError) {
  ASSERT_EQ(run({"gen-flat", "--size", "8", "--out", path("b.igf")}).code, 0);
  std::string bytes = slurp(path("b.igf"));
  std::ofstream(path("t.igf"), std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  const Outcome r = run({"cs", "--in", path("t.igf")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("byte " + std::to_string(bytes.size() - 8)), std::string::npos) << r.err;
}

TEST_F(Cli, FlatGaugeRecoversDegree) {
  ASSERT_EQ(run({"gen-flat", "--size", "48", "--degree", "2", "--seed", "4", "--out", path("b.igf")}).code, 0);
  const Outcome r = run({"flat-gauge", "--in", path("b.igf"), "--out", path("w.igf")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.at("deg_w"), "-2");
  EXPECT_EQ(r.kv.at("lattice_k"), "-2");
  EXPECT_EQ(r.kv.at("consistent"), "1");
  const Outcome d = run({"degree", "--in", path("w.igf")});
  EXPECT_EQ(d.kv.at("degree"), "-2");
}

TEST_F(Cli, GaugeLawAndDegree) {
  ASSERT_EQ(run({"gen-gauge", "--size", "48", "--degree", "-1", "--out", path("u.igf")}).code, 0);
  ASSERT_EQ(run({"gen-random", "--size", "48", "--out", path("b.igf")}).code, 0);
  const Outcome r = run({"gauge-law", "--in", path("b.igf"), "--gauge", path("u.igf")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.at("degree"), "-1");
  EXPECT_LT(std::stod(r.kv.at("law_residual_over_kappa")), 1e-2);
  EXPECT_EQ(run({"degree", "--in", path("b.igf")}).code, 2);
}

TEST_F(Cli, FourDimensionalCommands) {
  ASSERT_EQ(run({"gen-random", "--dim", "4", "--size", "8", "--radial", "7", "--out", path("x.igf")}).code, 0);
  const Outcome c = run({"charge", "--in", path("x.igf")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_LT(std::stod(c.kv.at("identity_residual")), 1e-10 * std::stod(c.kv.at("energy")));
  EXPECT_EQ(c.kv.at("config.radial"), "7");
  const Outcome p = run({"profile", "--in", path("x.igf"), "--csv", path("p.csv")});
  ASSERT_EQ(p.code, 0) << p.err;
  const std::string csv = slurp(path("p.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,fB_norm2,cs");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
  const Outcome r = run({"relax", "--in", path("x.igf"), "--steps", "5", "--csv", path("t.csv"), "--out", path("y.igf")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(std::stod(r.kv.at("sd_energy_final")), std::stod(r.kv.at("sd_energy_initial")));
  EXPECT_EQ(slurp(path("t.csv")).substr(0, 15), "step,sd_energy\n");
  const Outcome a = run({"asd", "--in", path("y.igf")});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.kv.at("sd_energy"), r.kv.at("sd_energy_final"));
  const Outcome bad = run({"relax", "--in", path("x.igf"), "--steps", "40", "--step-size", "1", "--out", path("z.igf")});
  EXPECT_EQ(bad.code, 4);
  EXPECT_TRUE(bad.kv.count("diagnostic"));
}

TEST_F(Cli, SelftestFaultInjection) {
  const Outcome ok = run({"selftest", "--only", "5"});
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("criterion_5=PASS"), std::string::npos);
  const Outcome flip = run({"selftest", "--only", "5", "--inject-sign-flip"});
  EXPECT_EQ(flip.code, 4);
  EXPECT_NE(flip.out.find("criterion_5=FAIL"), std::string::npos);
  const Outcome down = run({"selftest", "--only", "1", "--inject-order-downgrade"});
  EXPECT_EQ(down.code, 4);
  const auto at = down.out.find("min_rate=");
  ASSERT_NE(at, std::string::npos);
  EXPECT_NEAR(std::stod(down.out.substr(at + 9)), 2.0, 0.5);
}

TEST_F(Cli, RealBinaryExitCodes) {
  const std::string bin = IGAUGE_CLI_PATH;
  const std::string out = path("o.txt");
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " gen-flat --size 8 --degree 0 --out " + path("b.igf") + " > " + out).c_str())), 0);
  EXPECT_NE(slurp(out).find("lattice_k=0"), std::string::npos);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " bogus > " + out + " 2>&1").c_str())), 2);
  std::ofstream(path("junk.igf")) << "nope";
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " cs --in " + path("junk.igf") + " > " + out + " 2>&1").c_str())), 3);
}
