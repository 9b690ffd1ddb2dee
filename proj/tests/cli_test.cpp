#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dphase/cli/commands.hpp"
#include "dphase/cli/config.hpp"

using namespace dphase::cli;
namespace fs = std::filesystem;

namespace {

class Workspace {
 public:
  explicit Workspace(const std::string& name) : root_(fs::temp_directory_path() / ("dphase_cli_test_" + name)) {
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  ~Workspace() { fs::remove_all(root_); }

  std::string write_config(const std::string& text) const {
    const fs::path p = root_ / "config.ini";
    std::ofstream(p) << text;
    return p.string();
  }
  std::string out(const std::string& name) const { return (root_ / name).string(); }

 private:
  fs::path root_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> command, Options opts) {
  std::ostringstream out, err;
  const int code = run_command(command, opts, out, err);
  return {code, out.str(), err.str()};
}

const char* kZhikov = R"(# Zhikov step
[run]
seed = 1
[density]
name = zhikov
p = 2
q = 2.5
[weight]
kind = step
r = 0.5
sigma = 1
h = 0.2
[exponents]
n = 2
N = 2
[sampling]
budget = 2000
y_budget = 64
[grid]
cells = 64
[field]
kind = kinked
r = 0.5
delta = 0.5
[convergence]
center = 0.25, 0
inner_radius = 0.4
outer_radius = 0.7
)";

}  // namespace

TEST(Config, ParsesSectionsCommentsAndLists) {
  const Config cfg = Config::parse("; comment\n[a]\nx = 1.5\n# comment\ny = 1, 2,3\n[b]\nname = zhikov\n", "t.ini");
  EXPECT_EQ(cfg.get_double("a.x"), 1.5);
  EXPECT_EQ(cfg.get_list("a.y"), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(cfg.get_string("b.name"), "zhikov");
  EXPECT_EQ(cfg.line_of("a.y"), 5);
  EXPECT_EQ(cfg.get_int("b.missing", 4), 4);
  EXPECT_EQ(cfg.line_of("b.name"), 7);
  EXPECT_FALSE(cfg.has("a.z"));
}

TEST(Config, ErrorsCarryLineNumbers) {
  const Config cfg = Config::parse("[a]\n\nx = abc\n", "t.ini");
  try {
    cfg.get_double("a.x");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("t.ini:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(Config::parse("[a\nx = 1\n", "t.ini"), ConfigError);
  EXPECT_THROW(cfg.get_double("a.missing"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\nx = 1\n", "t.ini").require_known({"a.y"}), ConfigError);
}

TEST(Config, DigestIsSha256OfTheText) {
  // SHA-256("abc") from FIPS 180-2.
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Config::parse("[a]\nx = 1\n", "t").digest(), sha256_hex("[a]\nx = 1\n"));
}

TEST(RunCommand, F1PassesAndWritesReports) {
  Workspace ws("f1");
  Options o{ws.write_config(kZhikov), ws.out("out"), std::nullopt, false};
  const Result r = run({"check", "f1"}, o);
  EXPECT_EQ(r.code, kExitPass) << r.err;
  const std::string report = slurp(ws.out("out") + "/report.txt");
  EXPECT_EQ(report.rfind("# command: check f1\n# config: config.ini\n", 0), 0u) << report;
  EXPECT_NE(report.find("verdict: pass-on-samples"), std::string::npos);
  EXPECT_TRUE(fs::exists(ws.out("out") + "/report.csv"));
  EXPECT_FALSE(fs::exists(ws.out("out") + "/witness.txt"));
}

TEST(RunCommand, F2WithUnitConstantsFailsWithWitness) {
  Workspace ws("f2");
  Options o{ws.write_config(std::string(kZhikov) + "[structure]\nK1 = 1\nK2 = 1\n"), ws.out("out"), std::nullopt, false};
  const Result r = run({"check", "f2"}, o);
  EXPECT_EQ(r.code, kExitFail) << r.err;
  const std::string w = slurp(ws.out("out") + "/witness.txt");
  EXPECT_NE(w.find("relation: F2 upper"), std::string::npos) << w;
}

TEST(RunCommand, ConvergeRejectsLargeEpsAtItsLine) {
  Workspace ws("eps");
  Options o{ws.write_config(std::string(kZhikov) + "eps0 = 5\n"), ws.out("out"), std::nullopt, false};
  const Result r = run({"converge"}, o);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("config.ini:29"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("eps = 5"), std::string::npos) << r.err;
}

TEST(RunCommand, UsageErrors) {
  Workspace ws("usage");
  Options o{ws.write_config(kZhikov), ws.out("out"), std::nullopt, false};
  EXPECT_EQ(run({}, o).code, kExitUsage);
  EXPECT_EQ(run({"check"}, o).code, kExitUsage);
  EXPECT_EQ(run({"check", "f9"}, o).code, kExitUsage);
  EXPECT_EQ(run({"converge", "x"}, o).code, kExitUsage);
  EXPECT_EQ(run({"check", "f1"}, Options{"", ws.out("o2"), std::nullopt, false}).code, kExitUsage);
  EXPECT_EQ(run({"check", "f1"}, Options{ws.out("nonexistent.ini"), ws.out("o3"), std::nullopt, false}).code,
            kExitUsage);
  Options bad{ws.write_config(std::string(kZhikov) + "[extra]\nwhatever = 1\n"), ws.out("o4"), std::nullopt, false};
  const Result r = run({"check", "f1"}, bad);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("unknown key"), std::string::npos) << r.err;
}

TEST(RunCommand, NonEmptyOutputDirectoryNeedsForce) {
  Workspace ws("force");
  Options o{ws.write_config(kZhikov), ws.out("out"), std::nullopt, false};
  ASSERT_EQ(run({"check", "f1"}, o).code, kExitPass);
  EXPECT_EQ(run({"check", "f1"}, o).code, kExitUsage);
  o.force = true;
  EXPECT_EQ(run({"check", "f1"}, o).code, kExitPass);
}

TEST(RunCommand, SeedOverrideAndDeterminism) {
  Workspace ws("det");
  const std::string cfg = ws.write_config(kZhikov);
  ASSERT_EQ(run({"check", "f2"}, Options{cfg, ws.out("a"), std::nullopt, false}).code, kExitPass);
  ASSERT_EQ(run({"check", "f2"}, Options{cfg, ws.out("b"), std::nullopt, false}).code, kExitPass);
  ASSERT_EQ(run({"check", "f2"}, Options{cfg, ws.out("c"), 99, false}).code, kExitPass);
  const std::string a = slurp(ws.out("a") + "/report.txt");
  EXPECT_EQ(a, slurp(ws.out("b") + "/report.txt"));
  const std::string c = slurp(ws.out("c") + "/report.txt");
  EXPECT_NE(c.find("# seed: 99"), std::string::npos);
  EXPECT_NE(a, c);
}

TEST(RunCommand, ConvergeWritesTrace) {
  Workspace ws("conv");
  Options o{ws.write_config(kZhikov), ws.out("out"), std::nullopt, false};
  const Result r = run({"converge"}, o);
  EXPECT_EQ(r.code, kExitPass) << r.out << r.err;
  const std::string trace = slurp(ws.out("out") + "/trace.csv");
  EXPECT_NE(trace.find("eps,energy,rel_energy_error"), std::string::npos);
}

TEST(CommandTable, ListsEverySubcommand) {
  std::vector<std::string> names;
  for (const auto& c : command_table()) names.push_back(c.name);
  EXPECT_EQ(names, (std::vector<std::string>{"check", "mollify", "energy", "converge", "truncate", "witness",
                                             "lavrentiev"}));
}

TEST(Recipes, AllParse) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(DPHASE_RECIPES_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    ++count;
    EXPECT_NO_THROW(Config::load(entry.path().string())) << entry.path();
  }
  EXPECT_EQ(count, 7);
}
