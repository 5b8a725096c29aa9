// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eepn/analysis.hpp"
#include "eepn_lab/config.hpp"

namespace eepn::lab {

enum class Subcommand { Simulate, Decompose, Stats, Sweep, Verify };

const char* subcommand_name(Subcommand s);

struct JobSpec {
  Subcommand subcommand = Subcommand::Verify;
  std::string config_path;  // empty: defaults
  std::string output_dir = ".";
  int threads = 0;          // 0: EEPN_LAB_THREADS, else hardware concurrency
  std::optional<std::uint64_t> seed;
  std::optional<int> tr_avglen;
  std::optional<int> cpr_avglen;
  std::optional<int> genie_upsample;
  bool full_scale = false;
};

/// Output file name -> contents. Kept in memory so determinism can be
/// checked without touching the disk.
using Artifacts = std::map<std::string, std::string>;

/// Applies the command-line overrides of `job` to a parsed configuration.
JobConfig resolve_config(const JobSpec& job);

Artifacts simulate_artifacts(const JobConfig& config);
Artifacts decompose_artifacts(const JobConfig& config, int threads);
Artifacts stats_artifacts(const JobConfig& config);
Artifacts sweep_artifacts(const JobConfig& config, int threads);

std::string penalty_csv(const std::vector<PenaltyReport>& reports);

/// Runs the job, writes its CSVs and manifest.json into output_dir and
/// returns the process exit status. Diagnostics go to `log`.
int run(const JobSpec& job, std::ostream& log);

}  // namespace eepn::lab
