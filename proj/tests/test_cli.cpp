#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = FUNCEST_CLI;

int run(const std::string& args, std::string* out = nullptr) {
  const std::string capture = ::testing::TempDir() + "cli_out.txt";
  const int status = std::system((kCli + " " + args + " > " + capture + " 2>&1").c_str());
  if (out != nullptr) {
    std::ifstream in(capture);
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_file(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, EstimateGsm) {
  const auto y = write_file("y.txt", "1.5 0.5\n");
  const auto p = write_file("p.txt", "1 0\n");
  std::string out;
  ASSERT_EQ(run("estimate --model gsm --estimator first_order --data " + y + " --pilot " + p, &out), 0);
  EXPECT_EQ(out, "2\n");
  ASSERT_EQ(run("estimate --model gsm --estimator plugin --data " + y + " --pilot " + p, &out), 0);
  EXPECT_EQ(out, "1\n");
}

TEST(Cli, EstimateCausal) {
  const auto d = write_file("obs.csv", "x,a,y\n0.3,1,1\n");
  const auto p = write_file("pilots.csv", "0.5,0.5\n");
  std::string out;
  ASSERT_EQ(run("estimate --model causal --estimator first_order --data " + d + " --pilot " + p, &out), 0);
  EXPECT_EQ(out, "0.25\n");
}

TEST(Cli, InvalidConfigExitsOne) {
  const auto bad = write_file("bad.json", R"({"model":"gsm","estimators":["cross_fit"],"n_grid":[10],
    "radius":{"c":0,"gamma":0},"truth":{"theta":[1]}})");
  EXPECT_EQ(run("risk " + bad), 1);
  EXPECT_EQ(run("risk /nonexistent/config.json"), 1);
  EXPECT_EQ(run("no-such-command"), 1);
}

TEST(Cli, RiskIsReproducibleAcrossWorkers) {
  const auto cfg = write_file("ok.json", R"({"model":"gsm","estimators":["plugin","first_order"],"n_grid":[10,100],
    "radius":{"c":0.5,"gamma":0.5},"replications":300,"seed":4,"truth":{"theta":[1,0.5]}})");
  std::string a, b;
  ASSERT_EQ(run("risk " + cfg + " --workers 1", &a), 0);
  ASSERT_EQ(run("risk " + cfg + " --workers 4", &b), 0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("model,estimator,n,r,s,mse,mse_se,bias,bias_se,var,reps,seed\n", 0), 0u);
}

TEST(Cli, VerificationSubcommands) {
  std::string out;
  EXPECT_EQ(run("divergence", &out), 0);
  EXPECT_EQ(run("lb-verify --construction gsm_lb1 --construction gsm_lb2", &out), 0);
  EXPECT_EQ(out.rfind("construction,params,separation,claimed_separation,divergence_kind,divergence,budget,pass\n", 0),
            0u);
  EXPECT_EQ(run("cri-check --estimator plugin --theta 1 --alpha 0.3 --n 100 --reps 200"), 0);
}
