// SPDX-License-Identifier: Apache-2.0
#include "eepn_lab/config.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace eepn::lab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config: key '" + key + "': " + what);
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

double finite_number(const json& v, const std::string& key) {
  const double x = number(v, key);
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

long long integer(const json& v, const std::string& key, long long lo, long long hi) {
  if (!v.is_number_integer()) fail(key, "expected an integer");
  long long x = 0;
  if (v.is_number_unsigned()) {
    const auto u = v.get<unsigned long long>();
    if (u > static_cast<unsigned long long>(std::numeric_limits<long long>::max())) fail(key, "out of range");
    x = static_cast<long long>(u);
  } else {
    x = v.get<long long>();
  }
  if (x < lo || x > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

double positive(const json& v, const std::string& key) {
  const double x = finite_number(v, key);
  if (!(x > 0.0)) fail(key, "must be > 0");
  return x;
}

double non_negative(const json& v, const std::string& key) {
  const double x = finite_number(v, key);
  if (!(x >= 0.0)) fail(key, "must be >= 0");
  return x;
}

std::vector<int> odd_list(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    const auto x = static_cast<int>(integer(e, key, 1, std::numeric_limits<int>::max()));
    if (x % 2 == 0) fail(key, "averaging lengths must be odd, got " + std::to_string(x));
    out.push_back(x);
  }
  return out;
}

using Setter = std::function<void(JobConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"symbol_rate_gbd", [](JobConfig& c, const json& v, const std::string& k) {
         c.link.symbol_rate = positive(v, k) * 1e9;
       }},
      {"f_sim_ghz", [](JobConfig& c, const json& v, const std::string& k) { c.link.f_sim = positive(v, k) * 1e9; }},
      {"rolloff", [](JobConfig& c, const json& v, const std::string& k) {
         const double a = finite_number(v, k);
         if (a < 0.0 || a > 1.0) fail(k, "must lie in [0, 1], got " + v.dump());
         c.link.rolloff = a;
       }},
      {"beta2_ps2_per_km", [](JobConfig& c, const json& v, const std::string& k) {
         c.link.beta2 = finite_number(v, k) * 1e-27;
       }},
      {"length_km", [](JobConfig& c, const json& v, const std::string& k) { c.link.length = non_negative(v, k) * 1e3; }},
      {"linewidth_tx_khz", [](JobConfig& c, const json& v, const std::string& k) {
         c.link.linewidth_tx = non_negative(v, k) * 1e3;
       }},
      {"linewidth_rx_khz", [](JobConfig& c, const json& v, const std::string& k) {
         c.link.linewidth_rx = non_negative(v, k) * 1e3;
       }},
      {"baseline_snr_db", [](JobConfig& c, const json& v, const std::string& k) {
         if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf")) {
           c.link.baseline_snr_db = std::numeric_limits<double>::infinity();
         } else {
           c.link.baseline_snr_db = finite_number(v, k);
         }
       }},
      {"num_symbols", [](JobConfig& c, const json& v, const std::string& k) {
         c.link.num_symbols = static_cast<std::size_t>(integer(v, k, 1, 1LL << 40));
       }},
      {"seed", [](JobConfig& c, const json& v, const std::string& k) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
           fail(k, "expected a non-negative integer");
         }
         c.link.seed = v.get<std::uint64_t>();
       }},
      {"rrc_span", [](JobConfig& c, const json& v, const std::string& k) {
         c.link.rrc_span = static_cast<int>(integer(v, k, 2, 4096));
       }},
      {"guard_symbols", [](JobConfig& c, const json& v, const std::string& k) {
         c.link.guard_symbols = static_cast<int>(integer(v, k, 0, 1 << 20));
       }},
      {"half_window_symbols", [](JobConfig& c, const json& v, const std::string& k) {
         c.link.half_window_symbols = static_cast<int>(integer(v, k, 0, 1 << 20));
       }},
      {"tr_grid", [](JobConfig& c, const json& v, const std::string& k) { c.experiment.tr_grid = odd_list(v, k); }},
      {"cpr_grid", [](JobConfig& c, const json& v, const std::string& k) { c.experiment.cpr_grid = odd_list(v, k); }},
      {"seeds", [](JobConfig& c, const json& v, const std::string& k) {
         c.experiment.seeds = static_cast<int>(integer(v, k, 1, 1 << 20));
       }},
      {"linewidths_khz", [](JobConfig& c, const json& v, const std::string& k) {
         if (!v.is_array()) fail(k, "expected an array of numbers");
         c.experiment.linewidths.clear();
         for (const auto& e : v) c.experiment.linewidths.push_back(non_negative(e, k) * 1e3);
       }},
      {"outputs_per_symbol", [](JobConfig& c, const json& v, const std::string& k) {
         c.experiment.outputs_per_symbol = static_cast<int>(integer(v, k, 1, 1 << 10));
       }},
      {"phase_convention", [](JobConfig& c, const json& v, const std::string& k) {
         if (!v.is_string()) fail(k, "expected \"derived\" or \"printed\"");
         const auto s = v.get<std::string>();
         if (s == "derived") {
           c.experiment.convention = PhaseConvention::Derived;
         } else if (s == "printed") {
           c.experiment.convention = PhaseConvention::AsPrinted;
         } else {
           fail(k, "expected \"derived\" or \"printed\", got \"" + s + "\"");
         }
       }},
      {"write_phase", [](JobConfig& c, const json& v, const std::string& k) {
         if (!v.is_boolean()) fail(k, "expected a boolean");
         c.experiment.write_phase = v.get<bool>();
       }},
      {"stats_half_window", [](JobConfig& c, const json& v, const std::string& k) {
         c.experiment.stats_half_window = static_cast<int>(integer(v, k, 0, 1 << 24));
       }},
      {"psd_fft_len", [](JobConfig& c, const json& v, const std::string& k) {
         c.experiment.psd_fft_len = static_cast<std::size_t>(integer(v, k, 0, 1LL << 30));
       }},
      {"genie_upsample", [](JobConfig& c, const json& v, const std::string& k) {
         c.experiment.genie_upsample = static_cast<int>(integer(v, k, 1, 100000));
       }},
  };
  return table;
}

}  // namespace

JobConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");

  JobConfig c;
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(c, value, key);
  }
  try {
    c.link.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const JobConfig& c) {
  json j;
  const LinkConfig& l = c.link;
  j["symbol_rate_gbd"] = l.symbol_rate / 1e9;
  j["f_sim_ghz"] = l.f_sim / 1e9;
  j["rolloff"] = l.rolloff;
  j["beta2_ps2_per_km"] = l.beta2 / 1e-27;
  j["length_km"] = l.length / 1e3;
  j["linewidth_tx_khz"] = l.linewidth_tx / 1e3;
  j["linewidth_rx_khz"] = l.linewidth_rx / 1e3;
  j["baseline_snr_db"] = l.awgn_enabled() ? json(l.baseline_snr_db) : json("inf");
  j["num_symbols"] = l.num_symbols;
  j["seed"] = l.seed;
  j["rrc_span"] = l.rrc_span;
  j["guard_symbols"] = l.guard_symbols;
  j["half_window_symbols"] = l.half_window_symbols;

  const Experiment& e = c.experiment;
  j["tr_grid"] = e.tr_grid;
  j["cpr_grid"] = e.cpr_grid;
  j["seeds"] = e.seeds;
  json lw = json::array();
  for (double v : e.linewidths) lw.push_back(v / 1e3);
  j["linewidths_khz"] = lw;
  j["outputs_per_symbol"] = e.outputs_per_symbol;
  j["phase_convention"] = e.convention == PhaseConvention::Derived ? "derived" : "printed";
  j["write_phase"] = e.write_phase;
  j["stats_half_window"] = e.stats_half_window;
  j["psd_fft_len"] = e.psd_fft_len;
  j["genie_upsample"] = e.genie_upsample;
  return j;
}

}  // namespace eepn::lab
