#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "hetnet/io.hpp"
#include "hetnet/sweep.hpp"

using namespace hetnet;

namespace {

const std::string kCli = HETNET_CLI_PATH;
const std::string kDesk = std::string(HETNET_SOURCE_DIR) + "/configs/desk.json";

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  Run r;
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    out.push_back(l);
  }
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hetnet_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, EvaluateMatchesLibrary) {
  const auto r = run("evaluate --config " + kDesk + " --ra psd --k 40 --rule best-sinr --lambda 10");
  ASSERT_EQ(r.status, 0);
  double cli_t = -1.0;
  for (const auto& l : lines(r.out))
    if (l.rfind("t_system,,", 0) == 0) cli_t = std::stod(l.substr(10));

  ScenarioConfig sc = load_run_config(kDesk).scenario;
  sc.seed = realization_seed(sc.seed, 0);
  const Scenario s = make_scenario(sc);
  const Instance inst = make_instance(s, RaScheme::psd(40));
  const auto d = delays(best_sinr(inst.link), inst.model, 10.0, sc.rho_bar);
  EXPECT_EQ(cli_t, d.t_system);
}

TEST(Cli, SweepKEmitsOneRowPerK) {
  const auto r = run("optimize --config " + kDesk + " --metric lambda-max --ra psd --sweep-k");
  ASSERT_EQ(r.status, 0);
  const auto ls = lines(r.out);
  const std::size_t m = load_run_config(kDesk).scenario.total_subchannels_per_macro;
  EXPECT_EQ(ls.size(), 1 + (m - 1));
  EXPECT_EQ(ls.front(), "ra,k,rule,beta,lambda,metric_name,value,bound,certificate,iterations,seed");
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("exit");
  const auto bad = (dir / "bad.json").string();
  std::ofstream(bad) << R"({"scenario": {"bogus": 1}})";
  EXPECT_EQ(run("scenario dump --config " + bad).status, 2);
  EXPECT_EQ(run("phy dump --ra tdma --k 3").status, 2);
  EXPECT_EQ(run("associate --ra od").status, 2);
  EXPECT_EQ(run("associate --ra od --k 10 --rule nearest").status, 2);
  EXPECT_EQ(run("evaluate --config " + kDesk + " --ra ccd --rule best-sinr --lambda 1e6").status, 3);
  EXPECT_EQ(run("optimize --config " + kDesk + " --metric max-delay --ra ccd --lambda 1e6").status, 3);
  EXPECT_EQ(run("--no-such-flag").status, 2);
}

TEST(Cli, ScenarioDumpShape) {
  const auto r = run("scenario dump --config " + kDesk);
  ASSERT_EQ(r.status, 0);
  const auto sc = load_run_config(kDesk).scenario;
  const std::size_t locs = sc.macro_count * sc.locations_per_cell;
  const std::size_t bss = sc.macro_count * (1 + sc.small_cells_per_macro);
  EXPECT_EQ(lines(r.out).size(), 1 + locs * bss);
}

TEST(Cli, SimulateReportsSystemSojourn) {
  const auto r = run("simulate --config " + kDesk +
                     " --ra psd --k 40 --rule best-sinr --lambda 20 --horizon 200 --replications 4");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("system_sojourn"), std::string::npos);
}
