#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "carpetlab/errors.hpp"
#include "carpetlab/scalar.hpp"
#include "carpetlab_cli/config.hpp"
#include "carpetlab_cli/render.hpp"
#include "carpetlab_cli/tasks.hpp"

namespace carpetlab::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("carpetlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(const std::string& args) {
    const std::string cmd = std::string(CARPETLAB_TOOL) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

const char* kBm = R"({
  "task": "certify",
  "system": {"kind": "bm", "p": 2, "q": 4, "digits": [[1, 1], [2, 2], [1, 3]]},
  "measure": {"kind": "lebesgue", "dim": 2},
  "params": {"K": 2}
})";

const char* kSplitCertify = R"({
  "task": "certify",
  "system": {"kind": "bm", "p": 2, "q": 2, "digits": [[1, 1], [2, 2]]},
  "measure": {"kind": "split", "dim": 2, "tau": 2, "depth": 4},
  "params": {"K": 2},
  "seed": 5
})";

TEST_F(Cli, ConfigValidation) {
  EXPECT_THROW(parse_config(R"({"task": "certify", "colour": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"task": "certify"})", "decay"), ConfigError);
  EXPECT_THROW(parse_config(R"({"task": "dance"})"), ConfigError);
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"task": "certify", "budget": 0})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"task": "graph", "measure": {"kind": "file", "path": "nope.json"}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"task": "certify", "system": {"kind": "bm", "p": 2, "q": 2,
               "digits": [[1,1],[1,2],[2,1],[2,2]]}})"),
               ConfigError);
  const ExperimentConfig c = parse_config(kBm);
  ASSERT_TRUE(c.system);
  EXPECT_EQ(c.system->digit_count(), 3u);
  EXPECT_EQ(c.system->digits()[2], (Digit{0, 2, 0}));
}

TEST_F(Cli, DecayWithoutLevelsIsConfigError) {
  ExperimentConfig c = parse_config(R"({"task": "decay",
      "system": {"kind": "interval", "p": 3, "digits": [1, 3]},
      "params": {"levels": []}})");
  EXPECT_THROW(run_task(c), ConfigError);
  c.params = Json::object();
  EXPECT_THROW(run_task(c), ConfigError);
}

TEST_F(Cli, UnknownParamIsConfigError) {
  const ExperimentConfig c = parse_config(R"({"task": "certify",
      "system": {"kind": "bm", "p": 2, "q": 2, "digits": [[1, 1], [2, 2]]},
      "measure": {"kind": "lebesgue"}, "params": {"k": 2}})");
  EXPECT_THROW(run_task(c), ConfigError);
}

TEST_F(Cli, CertifyReportIsExact) {
  const fs::path cfg = write("bm.json", kBm);
  ASSERT_EQ(run("certify --config " + cfg.string() + " --out " + (dir_ / "o").string()), 0)
      << slurp(dir_ / "stdout.txt");
  const Json r = Json::parse(slurp(dir_ / "o" / "report.json"));
  const Json& cert = r["report"]["results"]["certificate"];
  EXPECT_EQ(parse_scalar(cert["mass_final"]["exact"].get<std::string>()), pow(Scalar(3, 8), 13));
  EXPECT_EQ(cert["mass_final"]["decimal"], to_decimal_string(pow(Scalar(3, 8), 13)));
  EXPECT_EQ(cert["valid"], true);
  EXPECT_EQ(r["report"]["config"]["seed"], 0);
  EXPECT_TRUE(r["timing"].contains("wall_seconds"));
  const std::string csv = slurp(dir_ / "o" / "series.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,mass_E,mass_E_decimal,mass_G,c,c_decimal,c2");
}

TEST_F(Cli, DeterministicGivenSeed) {
  const fs::path cfg = write("s.json", kSplitCertify);
  ASSERT_EQ(run("certify --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("certify --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  ASSERT_EQ(run("certify --config " + cfg.string() + " --seed 6 --out " + (dir_ / "c").string()), 0);
  auto body = [&](const char* d) { return Json::parse(slurp(dir_ / d / "report.json"))["report"].dump(); };
  EXPECT_EQ(body("a"), body("b"));
  EXPECT_NE(body("a"), body("c"));
  EXPECT_EQ(slurp(dir_ / "a" / "series.csv"), slurp(dir_ / "b" / "series.csv"));
  EXPECT_EQ(Json::parse(slurp(dir_ / "c" / "report.json"))["report"]["config"]["seed"], 6);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("certify"), kExitConfig);
  EXPECT_EQ(run("juggle --config x"), kExitConfig);
  const fs::path bad = write("bad.json", R"({"task": "certify", "extra": true})");
  EXPECT_EQ(run("certify --config " + bad.string()), kExitConfig);
  const fs::path decay = write("d.json", R"({"task": "decay",
      "system": {"kind": "interval", "p": 3, "digits": [1, 3]}, "params": {"levels": []}})");
  EXPECT_EQ(run("decay --config " + decay.string() + " --out " + (dir_ / "d").string()), kExitConfig);
  const fs::path big = write("big.json", R"({"task": "adversary",
      "system": {"kind": "bm", "p": 2, "q": 4, "digits": [[1, 1], [2, 2], [1, 3]]},
      "params": {"level": 6}})");
  EXPECT_EQ(run("adversary --config " + big.string() + " --budget 1000 --out " +
                (dir_ / "b").string()),
            kExitBudget);
  EXPECT_EQ(exit_code_for(DisjointnessViolation("overlap")), kExitInternal);
  EXPECT_EQ(exit_code_for(EnumerationBudget("x", 2, 1)), kExitBudget);
  EXPECT_EQ(exit_code_for(DegenerateMass("x")), kExitConfig);
}

TEST_F(Cli, AdversaryExportAndVerify) {
  const fs::path cfg = write("a.json", R"({"task": "adversary",
      "system": {"kind": "interval", "p": 3, "digits": [1, 3]},
      "params": {"level": 1, "tau": 2, "export_lp": true}})");
  ASSERT_EQ(run("adversary --config " + cfg.string() + " --out " + (dir_ / "o").string()), 0);
  const Json r = Json::parse(slurp(dir_ / "o" / "report.json"));
  EXPECT_EQ(r["report"]["results"]["solution"]["value"]["exact"], "4/5");
  EXPECT_NE(slurp(dir_ / "o" / "program.lp").find("Subject To"), std::string::npos);

  write("sol.txt", "\\ from an external solver\nw0 0.4\nw1 0.2\nw2 0.4\n");
  const fs::path ver = write("v.json", R"({"task": "adversary",
      "system": {"kind": "interval", "p": 3, "digits": [1, 3]},
      "params": {"level": 1, "tau": 2, "solution": "sol.txt"}})");
  ASSERT_EQ(run("adversary --config " + ver.string() + " --out " + (dir_ / "v").string()), 0);
  const Json v = Json::parse(slurp(dir_ / "v" / "report.json"));
  EXPECT_EQ(v["report"]["results"]["verification"]["feasible"], true);
  EXPECT_EQ(v["report"]["results"]["verification"]["value"]["exact"], "4/5");
}

TEST_F(Cli, DecayAndGraph) {
  const fs::path d = write("d.json", R"({"task": "decay",
      "system": {"kind": "interval", "p": 3, "digits": [1, 3]},
      "params": {"tau": 2, "levels": [1, 2, 3]}})");
  ASSERT_EQ(run("decay --config " + d.string() + " --out " + (dir_ / "d").string()), 0);
  const Json r = Json::parse(slurp(dir_ / "d" / "report.json"));
  EXPECT_EQ(r["report"]["results"]["strictly_decreasing"], true);
  EXPECT_EQ(r["report"]["results"]["points"][1]["value"]["exact"], "40/61");

  const fs::path g = write("g.json", R"({"task": "graph",
      "measure": {"kind": "lebesgue", "dim": 2}, "params": {"levels": [2, 3, 4]}})");
  ASSERT_EQ(run("graph --config " + g.string() + " --out " + (dir_ / "g").string()), 0);
  const Json gr = Json::parse(slurp(dir_ / "g" / "report.json"));
  EXPECT_EQ(gr["report"]["results"]["levels"][0]["mass"]["exact"], "7/16");
  EXPECT_EQ(gr["report"]["results"]["non_increasing"], true);
  EXPECT_LT(gr["report"]["results"]["log_slope"].get<double>(), 0);
}

TEST_F(Cli, Diagnose) {
  const fs::path c = write("c.json", R"({"task": "diagnose",
      "measure": {"kind": "lebesgue", "dim": 2, "depth": 3}})");
  ASSERT_EQ(run("diagnose --config " + c.string() + " --out " + (dir_ / "o").string()), 0);
  const Json r = Json::parse(slurp(dir_ / "o" / "report.json"));
  EXPECT_EQ(r["report"]["results"]["isotropy"]["A"]["exact"], "1");
  EXPECT_EQ(r["report"]["results"]["doubling"]["C"]["exact"], "4");
}

TEST_F(Cli, RenderFigures) {
  const fs::path c = write("r.json", R"({"task": "render",
      "system": {"kind": "carpet", "widths": ["1/2", "1/2"], "heights": ["1/3", "1/3", "1/3"],
                 "digits": [[1, 1], [1, 2], [1, 3], [2, 1], [2, 3]]},
      "params": {"level": 2, "holes": true}})");
  ASSERT_EQ(run("render --config " + c.string() + " --out " + (dir_ / "o").string()), 0);
  const std::string svg = slurp(dir_ / "o" / "figure.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("stroke=\"#c0392b\""), std::string::npos);
  const Json r = Json::parse(slurp(dir_ / "o" / "report.json"));
  EXPECT_EQ(r["report"]["results"]["boxes"], 25);
  EXPECT_EQ(r["report"]["results"]["holes"], 5);
}

TEST_F(Cli, RenderLevelsDirectly) {
  const SystemSpec s = make_bm_carpet(2, 2, {{0, 0, 0}, {1, 1, 0}});
  const std::string one = render_levelset(level_set(s, 0), {});
  std::size_t filled = 0;
  for (std::size_t p = one.find("#303030"); p != std::string::npos; p = one.find("#303030", p + 1)) ++filled;
  EXPECT_EQ(filled, 1u);
  EXPECT_EQ(render_levelset(level_set(s, 3), {}), render_levelset(level_set(s, 3), {}));
  const SystemSpec sp = make_sponge(2, 2, 3, {{0, 0, 0}, {1, 1, 2}});
  const std::string three = render_levelset(level_set(sp, 1), {});
  std::size_t groups = 0;
  for (std::size_t p = three.find("<g>"); p != std::string::npos; p = three.find("<g>", p + 1)) ++groups;
  EXPECT_EQ(groups, 3u);
  EXPECT_THROW(render_levelset(level_set(s, 10), {}, 100), EnumerationBudget);
}

}  // namespace
}  // namespace carpetlab::cli
