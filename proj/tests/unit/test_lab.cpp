// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "eepn_lab/config.hpp"
#include "eepn_lab/job.hpp"

using namespace eepn;
using namespace eepn::lab;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("empty config is the default") {
  const JobConfig c = parse_config("{}");
  const LinkConfig d;
  CHECK(c.link.symbol_rate == d.symbol_rate);
  CHECK(c.link.length == d.length);
  CHECK(c.link.linewidth_rx == d.linewidth_rx);
  CHECK(c.link.num_symbols == d.num_symbols);
  CHECK(c.experiment.tr_grid == std::vector<int>{451, 1985, 3517, 5051});
  CHECK(c.experiment.seeds == 10);
}

TEST_CASE("engineering units are converted") {
  const JobConfig c = parse_config(R"({"symbol_rate_gbd": 50, "length_km": 0, "linewidth_tx_khz": 300,
                                        "beta2_ps2_per_km": -20, "baseline_snr_db": null,
                                        "phase_convention": "printed", "linewidths_khz": [150, 600]})");
  CHECK(c.link.symbol_rate == 50e9);
  CHECK(c.link.length == 0.0);
  CHECK(cd_memory_symbols(c.link) == 0);
  CHECK(c.link.linewidth_tx == 300e3);
  CHECK(c.link.beta2 == doctest::Approx(-20e-27));
  CHECK_FALSE(c.link.awgn_enabled());
  CHECK(c.experiment.convention == PhaseConvention::AsPrinted);
  CHECK(c.experiment.linewidths == std::vector<double>{150e3, 600e3});
  CHECK_FALSE(parse_config(R"({"baseline_snr_db": "inf"})").link.awgn_enabled());
}

TEST_CASE("config errors name the key") {
  CHECK(error_of(R"({"rolloff": 1.5})").find("rolloff") != std::string::npos);
  CHECK(error_of(R"({"rolof": 0.1})").find("unknown key 'rolof'") != std::string::npos);
  CHECK(error_of(R"({"tr_grid": [450]})").find("tr_grid") != std::string::npos);
  CHECK(error_of(R"({"num_symbols": "many"})").find("num_symbols") != std::string::npos);
  CHECK(error_of(R"({"phase_convention": "other"})").find("phase_convention") != std::string::npos);
  CHECK_FALSE(error_of("{").empty());
  CHECK_FALSE(error_of("[1, 2]").empty());
}

TEST_CASE("manifest echo round-trips") {
  const JobConfig c = parse_config(R"({"length_km": 2000, "seed": 5, "cpr_grid": [101, 201]})");
  const JobConfig d = parse_config(to_json(c).dump());
  CHECK(d.link.length == c.link.length);
  CHECK(d.link.seed == 5);
  CHECK(d.experiment.cpr_grid == c.experiment.cpr_grid);
  CHECK(to_json(d) == to_json(c));
}

TEST_CASE("overrides") {
  JobSpec job;
  job.seed = 42;
  job.tr_avglen = 101;
  job.cpr_avglen = 55;
  const JobConfig c = resolve_config(job);
  CHECK(c.link.seed == 42);
  CHECK(c.experiment.tr_grid == std::vector<int>{101});
  CHECK(c.experiment.cpr_grid == std::vector<int>{55});
  job.tr_avglen = 100;
  CHECK_THROWS(resolve_config(job));
}

TEST_CASE("simulate is reproducible") {
  JobConfig c = parse_config(R"({"num_symbols": 300, "length_km": 500, "write_phase": true})");
  const Artifacts a = simulate_artifacts(c);
  const Artifacts b = simulate_artifacts(c);
  CHECK(a == b);
  REQUIRE(a.count("symbols.csv") == 1);
  REQUIRE(a.count("phase.csv") == 1);
  CHECK(a.at("symbols.csv").rfind("index,tx_re,tx_im,rx_re,rx_im\n", 0) == 0);
  c.link.seed = 2;
  CHECK(simulate_artifacts(c) != a);
}

TEST_CASE("stats artifacts") {
  const JobConfig c = parse_config(R"({"stats_half_window": 20})");
  const Artifacts a = stats_artifacts(c);
  REQUIRE(a.count("acf.csv") == 1);
  REQUIRE(a.count("psd.csv") == 1);
  std::istringstream acf(a.at("acf.csv"));
  std::string line;
  std::getline(acf, line);
  CHECK(line == "lag,acf_rad2");
  std::size_t rows = 0;
  while (std::getline(acf, line)) ++rows;
  CHECK(rows == 81);  // lags -2N..2N
}

TEST_CASE("run writes outputs and a manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "eepn_lab_unit_run";
  std::filesystem::remove_all(dir);
  const auto cfg = dir / "cfg.json";
  std::filesystem::create_directories(dir);
  std::ofstream(cfg) << R"({"num_symbols": 200, "length_km": 300})";

  JobSpec job;
  job.subcommand = Subcommand::Simulate;
  job.config_path = cfg.string();
  job.output_dir = (dir / "out").string();
  job.threads = 1;
  std::ostringstream log;
  CHECK(run(job, log) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "symbols.csv"));
  std::ifstream in(dir / "out" / "manifest.json");
  const nlohmann::json m = nlohmann::json::parse(in);
  CHECK(m["subcommand"] == "simulate");
  CHECK(m["config"]["num_symbols"] == 200);
  CHECK(m["outputs"].size() == 1);

  std::ofstream(cfg) << R"({"rolloff": 2})";
  std::ostringstream log2;
  CHECK(run(job, log2) == 2);
  CHECK(log2.str().find("rolloff") != std::string::npos);
  std::filesystem::remove_all(dir);
}
