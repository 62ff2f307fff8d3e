#include <filesystem>
#include <string>
#include <vector>

#include "depthkit/cli.hpp"
#include "depthkit/depth.hpp"
#include "depthkit/dist.hpp"
#include "depthkit/io.hpp"
#include "depthkit/types.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace depthkit;
namespace fs = std::filesystem;

namespace {

std::string out_dir(const std::string& leaf) {
  static const auto base = [] {
    const auto dir = fs::temp_directory_path() / "depthkit_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
  }();
  return (base / leaf).string();
}

int run(std::vector<std::string> args) { return cli::run_command(args); }

}  // namespace

TEST_CASE("sample writes a reloadable csv with its manifest") {
  const auto dir = out_dir("sample");
  CHECK(run({"sample", "--dist", "normal2d", "--n", "50", "--seed", "7",
             "--out-dir", dir}) == 0);
  CHECK(fs::exists(dir + "/manifest.json"));
  Sample s = io::load_sample(dir + "/sample.csv");
  CHECK(s.n == 50);
  CHECK(s.d == 2);
  REQUIRE(s.dist.has_value());
  CHECK(s.dist->family == Family::normal2d);
  CHECK(s.seed == 7);

  const auto man =
      nlohmann::json::parse(io::read_text_file(dir + "/manifest.json"));
  CHECK(man.at("command") == "sample");
  CHECK_FALSE(man.contains("failed"));  // only failure manifests carry it
  CHECK(man.at("params").at("n") == "50");
}

TEST_CASE("depth scores the points it is given") {
  const auto dir = out_dir("depth");
  CHECK(run({"depth", "--dist", "normal2d", "--n", "60", "--seed", "3",
             "--point", "0,0", "--point", "5,5", "--out-dir", dir}) == 0);
  const auto t = io::read_csv(dir + "/depth.csv");
  CHECK(t.header == std::vector<std::string>{"x1", "x2", "depth"});
  REQUIRE(t.rows.size() == 2);
  const auto depths = t.numeric_column("depth");

  DistSpec spec{Family::normal2d, {}, 1.0};
  Sample s = dist::sample(spec, 60, 3);
  const double origin[2] = {0.0, 0.0};
  const double far_pt[2] = {5.0, 5.0};
  CHECK(depths[0] == depth::depth_2d_exact(s, origin));
  CHECK(depths[1] == depth::depth_2d_exact(s, far_pt));
  CHECK(depths[0] > depths[1]);
}

TEST_CASE("rdepth reports values and the fitted model") {
  const auto dir = out_dir("rdepth");
  CHECK(run({"rdepth", "--dist", "sphcauchy2d", "--n", "100", "--k", "10",
             "--seed", "5", "--point", "40,0", "--point", "0.1,0.1",
             "--out-dir", dir}) == 0);
  const auto t = io::read_csv(dir + "/rdepth.csv");
  CHECK(t.header == std::vector<std::string>{"x1", "x2", "rn", "clamped"});
  const auto rn = t.numeric_column("rn");
  REQUIRE(rn.size() == 2);
  CHECK(rn[0] > 0.0);
  CHECK(rn[0] < rn[1]);

  const auto model =
      nlohmann::json::parse(io::read_text_file(dir + "/model.json"));
  CHECK(model.at("method") == "ray");
  CHECK(model.at("estimator") == "hill");
  CHECK(model.at("gamma_hat").get<double>() > 0.0);
  CHECK(model.at("k") == 10);
}

TEST_CASE("evt traces the index over a k path") {
  const auto dir = out_dir("evt");
  CHECK(run({"evt", "--dist", "cauchy1d", "--n", "200", "--seed", "2", "--k",
             "20", "--out-dir", dir}) == 0);
  const auto t = io::read_csv(dir + "/kpath.csv");
  CHECK(t.header == std::vector<std::string>{"k", "gamma_hat"});
  CHECK(t.rows.size() >= 30);
  const auto summary =
      nlohmann::json::parse(io::read_text_file(dir + "/evt_summary.json"));
  CHECK(summary.at("k") == 20);
  CHECK(summary.at("gamma_hat").get<double>() > 0.0);
  CHECK(summary.at("a_hat").get<double>() > 0.0);
}

TEST_CASE("contour emits the table, the model, and the plot") {
  const auto dir = out_dir("contour");
  CHECK(run({"contour", "--n", "100", "--k", "10", "--angles", "16", "--seed",
             "9", "--out-dir", dir}) == 0);
  const auto t = io::read_csv(dir + "/contour.csv");
  CHECK(t.header == std::vector<std::string>{"theta", "radius", "x", "y"});
  CHECK(t.rows.size() == 16);
  for (double r : t.numeric_column("radius")) CHECK(r > 0.0);
  CHECK(fs::exists(dir + "/contour.svg"));
  const auto man =
      nlohmann::json::parse(io::read_text_file(dir + "/manifest.json"));
  for (const auto& name : man.at("outputs")) {
    CHECK(fs::exists(dir + "/" + name.get<std::string>()));
  }
}

TEST_CASE("the chart studies run end to end at a small scale") {
  const auto far_dir = out_dir("far");
  CHECK(run({"spc-far", "--dist", "normal2d", "--n", "80", "--m", "100", "--k",
             "10", "--alpha", "0.05", "--reps", "2", "--seed", "4",
             "--out-dir", far_dir}) == 0);
  CHECK(io::read_csv(far_dir + "/far.csv").rows.size() == 2);

  const auto arl_dir = out_dir("arl");
  CHECK(run({"spc-arl", "--dist", "normal2d", "--n", "80", "--k", "10",
             "--alpha", "0.05", "--reps", "2", "--runs", "2", "--seed", "4",
             "--out-dir", arl_dir}) == 0);
  const auto t = io::read_csv(arl_dir + "/arl.csv");
  CHECK(t.header == std::vector<std::string>{"rep", "change", "arl_oracle",
                                             "arl_rn", "capped_runs"});
  CHECK(t.rows.size() == 6);
}

TEST_CASE("ddclass scores a held-out test set") {
  const auto dir = out_dir("ddclass");
  CHECK(run({"ddclass", "--dist", "normal2d", "--m", "60", "--n", "60",
             "--test", "40", "--k", "8", "--seed", "3", "--out-dir", dir}) ==
        0);
  const auto t = io::read_csv(dir + "/report.csv");
  CHECK(t.rows.size() == 40);
  const auto summary =
      nlohmann::json::parse(io::read_text_file(dir + "/ddclass_summary.json"));
  const double err = summary.at("test_error").get<double>();
  CHECK(err >= 0.0);
  CHECK(err <= 1.0);
  CHECK(summary.at("training_error").get<double>() <= 0.5);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"depth", "--bogus"}) == 2);
  CHECK(run({"depth", "--point", "0,0", "--out-dir", out_dir("e1")}) == 2);
  CHECK(run({"sample", "--out-dir", out_dir("e2")}) == 2);
  CHECK(run({"rdepth", "--dist", "normal2d", "--n", "100", "--k", "50",
             "--point", "0,0", "--out-dir", out_dir("e3")}) == 2);
  CHECK(run({"depth", "--dist", "normal2d", "--sample", "whatever.csv",
             "--point", "0,0", "--out-dir", out_dir("e4")}) == 2);
  CHECK(run({"depth", "--dist", "normal2d", "--n", "40", "--point", "0,0,0",
             "--out-dir", out_dir("e5")}) == 2);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("degenerate data exits with code 3") {
  const auto dir = out_dir("degenerate");
  Sample flat;
  flat.d = 2;
  flat.n = 30;
  for (std::size_t i = 0; i < flat.n; ++i) {
    flat.data.push_back(1.0);
    flat.data.push_back(1.0);
  }
  fs::create_directories(dir);
  io::save_sample(flat, dir + "/flat.csv");
  CHECK(run({"rdepth", "--sample", dir + "/flat.csv", "--method", "ray",
             "--k", "10", "--point", "3,3", "--out-dir", dir}) == 3);
}

TEST_CASE("a figure rerun with one seed is byte identical") {
  const auto dir_a = out_dir("fig_a");
  const auto dir_b = out_dir("fig_b");
  const std::vector<std::string> common{
      "repro",  "fig2",     "--scale", "0.05",    "--seed", "11",
      "--set",  "n=100",    "--set",   "k=10"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out-dir", dir_a});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out-dir", dir_b});
  CHECK(run(args_a) == 0);
  CHECK(run(args_b) == 0);

  const auto man =
      nlohmann::json::parse(io::read_text_file(dir_a + "/manifest.json"));
  CHECK(man.at("outputs").size() > 0);
  for (const auto& entry : man.at("outputs")) {
    const auto name = entry.get<std::string>();
    CHECK(fs::exists(dir_a + "/" + name));
    if (name.find("manifest") != std::string::npos) continue;  // wall clock
    CHECK(io::read_text_file(dir_a + "/" + name) ==
          io::read_text_file(dir_b + "/" + name));
  }
}
