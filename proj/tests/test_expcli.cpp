#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "horolab/expcli.hpp"
#include "support.hpp"

using namespace horolab;
using namespace horolab::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("horolab_test_" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string parse_error_message(std::string_view text) {
  try {
    parse_expression(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("expcli") {
  TEST_CASE("expression parser") {
    CHECK(parse_expression("1+2*3") == doctest::Approx(7.0));
    CHECK(parse_expression("(1+2)*3") == doctest::Approx(9.0));
    CHECK(parse_expression("sqrt(4)/2") == doctest::Approx(1.0));
    CHECK(parse_expression("pi/2") == doctest::Approx(std::acos(0.0)));
    CHECK(parse_expression("-(1 - 3)") == doctest::Approx(2.0));
    CHECK(parse_expression("sqrt2 - 1") == doctest::Approx(std::sqrt(2.0) - 1));
    CHECK(parse_expression("golden") == doctest::Approx((std::sqrt(5.0) - 1) / 2));
    CHECK(parse_expression("1.5e2") == doctest::Approx(150.0));
    CHECK(parse_error_message("1+").find("position 2") != std::string::npos);
    CHECK(parse_error_message("(1").find("position 2") != std::string::npos);
    CHECK(parse_error_message("foo").find("position 0") != std::string::npos);
    CHECK(parse_error_message("2 * x").find("position 4") != std::string::npos);
    CHECK(parse_error_message("1/0").find("position 2") != std::string::npos);
    CHECK(oracle::error_of([] { parse_expression("sqrt(-1)"); }) == ErrorCode::ParseError);
  }

  TEST_CASE("base point grammar") {
    CHECK(oracle::pm_distance(oracle::of(parse_base_point("identity")), {1, 0, 0, 1}) < 1e-15);
    CHECK(oracle::pm_distance(oracle::of(parse_base_point("hecke:100")), {0.1L, 0, 0, 10}) < 1e-14);
    const IwasawaPoint p = iwasawa_decompose(parse_base_point("iwasawa:x=0.41421356,y=1,theta=1.5707963"));
    CHECK(p.x == doctest::Approx(0.41421356));
    CHECK(p.y == doctest::Approx(1.0));
    CHECK(p.theta == doctest::Approx(1.5707963));
    const IwasawaPoint q = iwasawa_decompose(parse_base_point("iwasawa:theta=pi/2,x=sqrt2-1,y=1"));
    CHECK(q.x == doctest::Approx(std::sqrt(2.0) - 1));
    // alpha form: x = alpha + y cot theta.
    const IwasawaPoint a = iwasawa_decompose(parse_base_point("alpha:0.25,y:2,theta:pi/4"));
    CHECK(a.x == doctest::Approx(2.25));
    CHECK(a.y == doctest::Approx(2.0));
    const IwasawaPoint s = iwasawa_decompose(parse_base_point("sqrt2"));
    CHECK(s.x == doctest::Approx(std::sqrt(2.0) - 1));
    CHECK(s.theta == doctest::Approx(std::acos(0.0)));
    const IwasawaPoint g = iwasawa_decompose(parse_base_point("golden"));
    CHECK(g.x == doctest::Approx((std::sqrt(5.0) - 1) / 2));

    for (const char* bad : {"hecke:0", "hecke:x", "iwasawa:x=1,y=2", "iwasawa:x=1,y=0,theta=0", "alpha:1,y:1,theta:0",
                            "iwasawa:x=1,y=1,theta=1,x=2", "banana", "iwasawa:x=1,y=(2,theta=0"}) {
      CHECK_MESSAGE(oracle::error_of([&] { parse_base_point(bad); }) == ErrorCode::ParseError, bad);
    }
    try {
      parse_base_point("iwasawa:x=1,y=(2,theta=0");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("position 16") != std::string::npos);
    }
  }

  TEST_CASE("RFC 4180 CSV") {
    const Table t{{"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", "line\nbreak"}}};
    CHECK(to_csv(t) == "a,b\r\n1,\"x,y\"\r\n\"say \"\"hi\"\"\",\"line\nbreak\"\r\n");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(INFINITY) == "inf");
  }

  TEST_CASE("experiment names round-trip") {
    CHECK(all_experiments().size() == 11);
    for (Experiment e : all_experiments()) CHECK(parse_experiment(to_string(e)) == e);
    CHECK_FALSE(parse_experiment("nope").has_value());
  }

  TEST_CASE("orbit run writes identical points, a manifest and a stable report") {
    ExperimentConfig c;
    c.experiment = Experiment::Orbit;
    c.base = "identity";
    c.s = 1.0;
    c.N = 3;
    c.output_dir = scratch("orbit");
    std::string msg;
    REQUIRE(run(c, &msg) == 0);
    const auto report = nlohmann::json::parse(slurp(c.output_dir / "report.json"));
    CHECK(report["schema_version"] == kSchemaVersion);
    REQUIRE(report["points"].size() == 3);
    for (const auto& p : report["points"]) {
      CHECK(p["x"].get<double>() == doctest::Approx(0.0));
      CHECK(p["y"].get<double>() == doctest::Approx(1.0));
    }
    const auto manifest = nlohmann::json::parse(slurp(c.output_dir / "manifest.json"));
    CHECK(manifest["library_version"] == std::string(kLibraryVersion));
    CHECK(manifest["exponents"]["q_exponent"] == 2.0);
    CHECK(manifest["tolerances"].contains("period_ratio_low"));
    CHECK(manifest["config"]["N"] == 3);
    CHECK(manifest.contains("wall_time_seconds"));

    const std::string first = slurp(c.output_dir / "report.json");
    REQUIRE(run(c) == 0);
    CHECK(slurp(c.output_dir / "report.json") == first);

    c.format = OutputFormat::Csv;
    REQUIRE(run(c) == 0);
    CHECK(slurp(c.output_dir / "report.csv") == "n,x,y,theta\r\n0,0,1,0\r\n1,0,1,0\r\n2,0,1,0\r\n");
  }

  TEST_CASE("period run reports the formula ratio") {
    ExperimentConfig c;
    c.experiment = Experiment::Period;
    c.alpha = "sqrt2";
    c.T = 1000;
    c.entry_bound = 1000;
    c.output_dir = scratch("period");
    REQUIRE(run(c) == 0);
    const auto report = nlohmann::json::parse(slurp(c.output_dir / "report.json"));
    const double ratio = report["formula_over_oracle"];
    CHECK(ratio >= 1.0 / 64);
    CHECK(ratio <= 64.0);
    CHECK(report["y_T"].get<double>() * 1000 >= 1.0 / 16);
  }

  TEST_CASE("exit codes") {
    ExperimentConfig fail_window;
    fail_window.experiment = Experiment::HeckePrime;
    fail_window.N = 1009;
    fail_window.window_low = 0.999;
    fail_window.window_high = 1.001;
    fail_window.budget = 4096;
    fail_window.output_dir = scratch("fail");
    CHECK(run(fail_window) == 2);

    ExperimentConfig bad;
    bad.delta = 2.0;
    bad.output_dir = scratch("bad");
    std::string msg;
    CHECK(run(bad, &msg) == 1);
    CHECK(msg.find("delta") != std::string::npos);
    CHECK(oracle::error_of([&] { validate(bad); }) == ErrorCode::ConfigError);

    ExperimentConfig parse;
    parse.base = "hecke:abc";
    parse.output_dir = scratch("parse");
    CHECK(run(parse, &msg) == 1);
    CHECK(msg.find("base") != std::string::npos);

    ::setenv("HOROLAB_THREADS", "zero", 1);
    ExperimentConfig env;
    env.output_dir = scratch("env");
    CHECK(run(env, &msg) == 1);
    CHECK(msg.find("HOROLAB_THREADS") != std::string::npos);
    ::unsetenv("HOROLAB_THREADS");
  }
}
