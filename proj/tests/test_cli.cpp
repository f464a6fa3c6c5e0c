#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smc/cli/commands.hpp"
#include "smc/cli/io.hpp"
#include "smc/error.hpp"
#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace smc;
using testing_support::data_path;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("smc_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "smc");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::vector<std::string> lg_run(const fs::path& out, const std::string& filter) {
  return {"run", "--model", data_path("lg.mod"), "--data", data_path("lg.csv"), "--latent", "x", "--filter", filter,
          "--particles", "500", "--save-all", "--seed", "7", "--out", out.string()};
}

void expect_same_files(const fs::path& a, const fs::path& b) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(cli::read_text(e.path().string()), cli::read_text(other.string())) << e.path().filename();
    ++n;
  }
  EXPECT_EQ(n, static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator())));
}

TEST(Io, DataCsvRejectsEmptyCells) {
  const auto dir = scratch("csv");
  write(dir / "ok.csv", "y,z\n1.5,2\n-3,4e-1\n");
  const auto d = cli::read_data_csv((dir / "ok.csv").string());
  EXPECT_EQ(d.at("y"), (std::vector{1.5, -3.0}));
  EXPECT_EQ(d.at("z"), (std::vector{2.0, 0.4}));
  write(dir / "gap.csv", "y,z\n1.5,\n-3,4\n");
  EXPECT_THROW(cli::read_data_csv((dir / "gap.csv").string()), ConfigError);
  write(dir / "na.csv", "y\nNA\n");
  EXPECT_THROW(cli::read_data_csv((dir / "na.csv").string()), ConfigError);
}

TEST(Io, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23}) EXPECT_EQ(std::stod(cli::format_number(v)), v);
  EXPECT_EQ(cli::format_number(std::nan("")), "NA");
}

TEST(Manifest, RoundTrips) {
  cli::RunOptions o;
  o.command = "pmmh";
  o.model = "m.mod";
  o.latent = "x";
  o.seed = 123456789012345ULL;
  o.targets = {"a", "b"};
  o.prop_cov = Eigen::Matrix2d{{1.0, 0.1}, {0.1, 2.0}};
  o.filter.threshold = 0.37;
  o.filter.parameters = {"p"};
  o.adaptive = true;
  o.threads = 8;
  const auto back = cli::options_from_manifest(cli::manifest_json(o));
  EXPECT_EQ(back, o);
  EXPECT_EQ(back.seed, o.seed);
  EXPECT_EQ(back.prop_cov, o.prop_cov);
  EXPECT_EQ(nlohmann::json::parse(cli::manifest_json(o)).count("threads"), 0u);
}

TEST(Cli, OutputHeaders) {
  const auto dir = scratch("headers");
  auto args = lg_run(dir / "pf", "bootstrap");
  args.push_back("--dump-samples");
  ASSERT_EQ(cli(args), 0);
  EXPECT_EQ(first_line(dir / "pf" / "filter_summary.csv"), "t,ess,mean,q025,q50,q975");
  EXPECT_EQ(first_line(dir / "pf" / "samples_ew.csv"), "t,particle,x");
  EXPECT_EQ(first_line(dir / "pf" / "samples_w.csv"), "t,particle,x,log_weight");

  ASSERT_EQ(cli(lg_run(dir / "enkf", "enkf")), 0);
  EXPECT_EQ(first_line(dir / "enkf" / "filter_summary.csv"), "t,ess,mean,sd,lower,upper");
  ASSERT_EQ(cli(lg_run(dir / "kf", "kalman")), 0);
  EXPECT_EQ(first_line(dir / "kf" / "filter_summary.csv"), "t,mean,sd,q025,q50,q975");

  const auto run = nlohmann::json::parse(cli::read_text((dir / "pf" / "run.json").string()));
  EXPECT_EQ(run.at("manifest").at("algorithm"), "bootstrap");
  EXPECT_TRUE(run.at("results").at("log_likelihood").is_number());
}

TEST(Cli, KalmanSummaryMatchesOracle) {
  const auto dir = scratch("kalman");
  ASSERT_EQ(cli(lg_run(dir, "kalman")), 0);
  const auto exact = testing_support::lg_oracle(testing_support::lg_observations());
  std::ifstream in(dir / "filter_summary.csv");
  std::string line;
  std::getline(in, line);
  for (std::size_t t = 0; t < 10; ++t) {
    ASSERT_TRUE(std::getline(in, line));
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    EXPECT_EQ(v[0], static_cast<double>(t + 1));
    EXPECT_NEAR(v[1], exact.mean[t], 1e-12);
    EXPECT_NEAR(v[2], std::sqrt(exact.var[t]), 1e-12);
  }
}

TEST(Cli, ThreadsDoNotChangeOutputs) {
  const auto dir = scratch("threads");
  for (const std::string f : {"bootstrap", "auxiliary", "enkf"}) {
    auto one = lg_run(dir / (f + "1"), f);
    one.insert(one.end(), {"--dump-samples", "--threads", "1"});
    auto four = lg_run(dir / (f + "4"), f);
    four.insert(four.end(), {"--dump-samples", "--threads", "4"});
    ASSERT_EQ(cli(one), 0);
    ASSERT_EQ(cli(four), 0);
    expect_same_files(dir / (f + "1"), dir / (f + "4"));
  }
}

TEST(Cli, ReplayReproducesRun) {
  const auto dir = scratch("replay");
  ASSERT_EQ(cli({"pmmh", "--model", data_path("lg_a.mod"), "--data", data_path("lg_a.csv"), "--constants",
                 data_path("lg_a_constants.json"), "--inits", data_path("lg_a_inits.json"), "--latent", "x",
                 "--target", "a", "--iterations", "30", "--inner-particles", "100", "--prop-scale", "0.1",
                 "--trajectories", "--seed", "3", "--out", (dir / "orig").string()}),
            0);
  EXPECT_EQ(first_line(dir / "orig" / "chain.csv"), "iteration,a,loglik,accepted");
  ASSERT_EQ(cli({"replay", (dir / "orig" / "run.json").string(), "--threads", "2", "--out", (dir / "again").string()}),
            0);
  expect_same_files(dir / "orig", dir / "again");
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("exit");
  auto unknown = lg_run(dir / "a", "bogus");
  EXPECT_EQ(cli(unknown), 2);
  EXPECT_EQ(cli({"run", "--model", (dir / "missing.mod").string(), "--latent", "x", "--out", dir.string()}), 2);

  write(dir / "bad.mod", "x[1] ~ dnorm(0,\n");
  EXPECT_EQ(cli({"run", "--model", (dir / "bad.mod").string(), "--latent", "x", "--out", (dir / "b").string()}), 2);

  auto gap = lg_run(dir / "c", "bootstrap");
  gap[4] = (dir / "gap.csv").string();
  write(dir / "gap.csv", "y,z\n1,\n2,3\n");
  EXPECT_EQ(cli(gap), 2);

  write(dir / "nonpd.csv", "1,2\n2,1\n");
  EXPECT_EQ(cli({"pmmh", "--model", data_path("lg_a.mod"), "--data", data_path("lg_a.csv"), "--constants",
                 data_path("lg_a_constants.json"), "--inits", data_path("lg_a_inits.json"), "--latent", "x",
                 "--target", "a", "--prop-cov", (dir / "nonpd.csv").string(), "--out", (dir / "d").string()}),
            2);

  // Nonlinear model through the Kalman filter.
  EXPECT_EQ(cli({"run", "--model", data_path("sv.mod"), "--data", data_path("sv.csv"), "--constants",
                 data_path("sv_constants.json"), "--inits", data_path("sv_inits.json"), "--latent", "x", "--filter",
                 "kalman", "--out", (dir / "e").string()}),
            2);

  // Every particle lands at zero weight.
  write(dir / "spike.mod", "x[1] ~ dnorm(0, var = 1)\ny[1] ~ dnorm(x[1], var = 1)\n");
  write(dir / "spike.csv", "y\n1e200\n");
  EXPECT_EQ(cli({"run", "--model", (dir / "spike.mod").string(), "--data", (dir / "spike.csv").string(), "--latent",
                 "x", "--particles", "50", "--out", (dir / "f").string()}),
            3);
}

TEST(Cli, SimulateWritesObservedVariables) {
  const auto dir = scratch("simulate");
  ASSERT_EQ(cli({"simulate", "--model", data_path("lg_a.mod"), "--constants", data_path("lg_a_constants.json"),
                 "--inits", data_path("lg_a_truth.json"), "--observe", "y", "--latent", "x", "--truth",
                 (dir / "x.csv").string(), "--seed", "50", "--out", (dir / "y.csv").string()}),
            0);
  const auto y = cli::read_data_csv((dir / "y.csv").string());
  ASSERT_EQ(y.at("y").size(), 50u);
  EXPECT_EQ(y, cli::read_data_csv(data_path("lg_a.csv")));
}

}  // namespace
