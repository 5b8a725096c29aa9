// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eepn/decomposition.hpp"
#include "eepn/link.hpp"

namespace eepn::lab {

/// Parameters of the batch experiments that are not part of the link itself.
struct Experiment {
  // sweep
  std::vector<int> tr_grid{451, 1985, 3517, 5051};
  std::vector<int> cpr_grid{451, 717, 985, 1251};
  int seeds = 10;
  std::vector<double> linewidths;  // Hz, both lasers; empty keeps the link values

  // decompose
  int outputs_per_symbol = 1;
  PhaseConvention convention = PhaseConvention::Derived;

  // simulate
  bool write_phase = false;

  // stats
  int stats_half_window = 0;    // samples; 0 uses the link window
  std::size_t psd_fft_len = 0;  // 0 picks the next power of two >= 4N+1

  // correlation
  int genie_upsample = 200;
};

struct JobConfig {
  LinkConfig link;
  Experiment experiment;
};

/// Malformed document, unknown key or out-of-range value. The message names
/// the key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON object in engineering units (GBd, GHz, kHz, km, ps²/km).
/// Missing keys keep their defaults, so "{}" is the default configuration.
JobConfig parse_config(const std::string& text);

/// The resolved configuration in the same units and key names parse_config
/// accepts.
nlohmann::json to_json(const JobConfig& config);

}  // namespace eepn::lab
