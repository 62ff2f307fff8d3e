#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "depthkit/dist.hpp"
#include "depthkit/errors.hpp"
#include "depthkit/io.hpp"
#include "depthkit/types.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace depthkit;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& leaf) {
  const auto dir = fs::temp_directory_path() / "depthkit_io_test";
  fs::create_directories(dir);
  return (dir / leaf).string();
}

}  // namespace

TEST_CASE("doubles survive a format and parse round trip") {
  const std::vector<double> values{
      0.1,
      1.0 / 3.0,
      1e-300,
      5e-324,  // smallest subnormal
      1.7976931348623157e308,
      -0.0,
      123456789.123456789,
      -2.5e-7,
  };
  for (double v : values) {
    const std::string s = io::fmt(v);
    // strtod, not stod: libstdc++ stod throws out_of_range on subnormals.
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
  CHECK(io::fmt(0.1) == "0.1");
  CHECK(io::fmt(1.0) == "1");
  CHECK(io::fmt(std::uint64_t{18446744073709551615ull}) ==
        "18446744073709551615");
  CHECK(io::fmt(std::uint64_t{0}) == "0");
}

TEST_CASE("tables enforce their header width") {
  io::Table t;
  t.header = {"a", "b"};
  t.add_row({"1", "2"});
  CHECK_THROWS_AS(t.add_row({"only"}), config_error);
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("missing"), config_error);
  t.add_row({"3.5", "-4"});
  const auto col = t.numeric_column("a");
  REQUIRE(col.size() == 2);
  CHECK(col[0] == 1.0);
  CHECK(col[1] == 3.5);
}

TEST_CASE("csv files round trip") {
  io::Table t;
  t.header = {"x", "y", "note"};
  t.add_row({io::fmt(0.1), io::fmt(-7.25), "first"});
  t.add_row({io::fmt(1e-300), io::fmt(3.0), "second"});
  const auto path = tmp_path("round.csv");
  io::write_csv(path, t);
  const auto back = io::read_csv(path);
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows == t.rows);
  CHECK(back.numeric_column("x")[1] == 1e-300);
}

TEST_CASE("samples round trip with their generating spec") {
  DistSpec spec{Family::cauchy1d, {0.5}, 2.0};
  Sample s = dist::sample(spec, 40, 99);
  const auto path = tmp_path("sample.csv");
  io::save_sample(s, path);
  CHECK(fs::exists(tmp_path("sample.json")));

  Sample back = io::load_sample(path);
  CHECK(back.n == 40);
  CHECK(back.d == 1);
  CHECK(back.data == s.data);
  REQUIRE(back.dist.has_value());
  CHECK(back.dist->family == Family::cauchy1d);
  CHECK(back.dist->shift == std::vector<double>{0.5});
  CHECK(back.dist->scale == 2.0);
  CHECK(back.seed == 99);
}

TEST_CASE("a plain csv loads as a bare sample") {
  io::Table t;
  t.header = {"x1", "x2"};
  t.add_row({"1", "2"});
  t.add_row({"3", "4"});
  const auto path = tmp_path("bare.csv");
  io::write_csv(path, t);
  Sample s = io::load_sample(path);
  CHECK(s.n == 2);
  CHECK(s.d == 2);
  CHECK(s.data == std::vector<double>{1, 2, 3, 4});
  CHECK_FALSE(s.dist.has_value());
}

TEST_CASE("manifests serialize to parseable json") {
  io::RunManifest m;
  m.command = "rdepth";
  m.params = {{"n", "500"}, {"k", "50"}};
  m.seed = 1234;
  m.replicates = 3;
  m.outputs = {"a.csv", "b.csv"};
  m.duration_seconds = 0.25;
  m.notes = {{"gamma_hat", "0.9"}};
  const auto path = tmp_path("manifest.json");
  io::write_manifest(m, path);

  const auto parsed = nlohmann::json::parse(io::read_text_file(path));
  CHECK(parsed.at("command") == "rdepth");
  CHECK(parsed.at("params").at("k") == "50");
  CHECK(parsed.at("seed") == 1234);
  CHECK(parsed.at("replicates") == 3);
  CHECK(parsed.at("outputs").size() == 2);
  CHECK(parsed.at("outputs")[0] == "a.csv");
  // The failed flag only appears on failure manifests.
  CHECK_FALSE(parsed.contains("failed"));
  CHECK(parsed.at("notes").at("gamma_hat") == "0.9");

  m.failed = true;
  m.failed_stage = "depth";
  io::write_manifest(m, path);
  const auto reparsed = nlohmann::json::parse(io::read_text_file(path));
  CHECK(reparsed.at("failed") == true);
  CHECK(reparsed.at("failed_stage") == "depth");
}

TEST_CASE("directories and text files") {
  const auto dir = tmp_path("nested/deeper");
  io::ensure_dir(dir);
  CHECK(fs::is_directory(dir));
  io::ensure_dir(dir);  // idempotent

  const auto file = tmp_path("nested/deeper/t.txt");
  io::write_text_file(file, "line one\nline two\n");
  CHECK(io::read_text_file(file) == "line one\nline two\n");
  CHECK_THROWS_AS(io::ensure_dir(file), config_error);
  CHECK_THROWS_AS(io::read_text_file(tmp_path("no_such_file")), config_error);
}
