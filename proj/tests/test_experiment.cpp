#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dcmicro/errors.hpp"
#include "dcmicro/experiment.hpp"

using namespace dcmicro;
using nlohmann::json;

TEST_CASE("CSV quoting and line ends") {
  Table t{"t", {"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", "line\nbreak"}}};
  CHECK(to_csv(t) == "a,b\r\n1,\"x,y\"\r\n\"say \"\"hi\"\"\",\"line\nbreak\"\r\n");
}

TEST_CASE("numbers round-trip in shortest form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("config parsing") {
  const json ok = {{"kind", "seq"}, {"name", "g2"}, {"sequence", {{"kind", "gevrey"}, {"s", 2.0}}},
                   {"assert", {{"validation_pass", true}, {"c", {{"<=", 2.2}}}}}};
  const auto cfg = parse_config(ok);
  CHECK(cfg.kind == "seq");
  REQUIRE(cfg.assertions.size() == 2);

  auto bad_kind = ok;
  bad_kind["kind"] = "nope";
  CHECK_THROWS_AS(parse_config(bad_kind), ConfigError);
  auto bad_key = ok;
  bad_key["unexpected"] = 1;
  CHECK_THROWS_AS(parse_config(bad_key), ConfigError);
  auto bad_metric = ok;
  bad_metric["assert"] = {{"not_a_metric", 1}};
  CHECK_THROWS_AS(parse_config(bad_metric), ConfigError);
  auto bad_op = ok;
  bad_op["assert"] = {{"c", {{"~", 1}}}};
  CHECK_THROWS_AS(parse_config(bad_op), ConfigError);
  const json bad_member = {{"kind", "fbi"}, {"name", "x"}, {"member", "no_such_member"}};
  CHECK_THROWS_AS(parse_config(bad_member), ConfigError);
}

TEST_CASE("comments are allowed in config files") {
  const auto p = std::filesystem::temp_directory_path() / "dcmicro_cfg_test.json";
  {
    std::ofstream o(p);
    o << "// sequence check\n{\"kind\": \"seq\", /* inline */ \"name\": \"c\"}\n";
  }
  CHECK(load_config(p).name == "c");
  std::filesystem::remove(p);
  CHECK_THROWS_AS(load_config("/nonexistent/dcmicro.json"), ConfigError);
}

TEST_CASE("runs report metrics, verdicts and artifacts") {
  const json doc = {{"kind", "seq"}, {"name", "g2run"}, {"sequence", {{"kind", "gevrey"}, {"s", 2.0}}},
                    {"assert", {{"laws_pass", true}, {"c", {{">", 5.0}}}}}};
  const auto cfg = parse_config(doc);
  const auto res = run_experiment(cfg);
  CHECK_FALSE(res.pass);
  CHECK(res.metrics["laws_pass"] == true);
  CHECK(res.metrics["c"].get<double>() == doctest::Approx(2.1));
  CHECK(res.assertions[0].pass != res.assertions[1].pass);

  const auto dir = std::filesystem::temp_directory_path() / "dcmicro_art_test";
  std::filesystem::remove_all(dir);
  write_artifacts(cfg, res, dir);
  CHECK(std::filesystem::exists(dir / "g2run.json"));
  CHECK(std::filesystem::exists(dir / "g2run_failures.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("numerical failures become failed runs") {
  const json doc = {{"kind", "extend"}, {"name", "h"}, {"function", "heaviside"}, {"assert", {{"decay_conforms", true}}}};
  const auto res = run_experiment(parse_config(doc));
  CHECK_FALSE(res.pass);
  CHECK(res.summary.contains("error"));
}
