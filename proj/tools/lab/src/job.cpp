// SPDX-License-Identifier: Apache-2.0
#include "eepn_lab/job.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "eepn/parallel.hpp"
#include "eepn/phase_noise.hpp"
#include "eepn/version.hpp"
#include "eepn_lab/acceptance.hpp"

namespace eepn::lab {

namespace {

// Shortest text that round-trips a double; fixed so CSVs compare byte for byte.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const char* subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::Simulate: return "simulate";
    case Subcommand::Decompose: return "decompose";
    case Subcommand::Stats: return "stats";
    case Subcommand::Sweep: return "sweep";
    case Subcommand::Verify: return "verify";
  }
  return "?";
}

JobConfig resolve_config(const JobSpec& job) {
  JobConfig c = parse_config(job.config_path.empty() ? std::string("{}") : read_file(job.config_path));
  if (job.seed) c.link.seed = *job.seed;
  if (job.tr_avglen) {
    if (*job.tr_avglen < 1 || *job.tr_avglen % 2 == 0) throw ConfigError("--tr-avglen must be a positive odd integer");
    c.experiment.tr_grid = {*job.tr_avglen};
  }
  if (job.cpr_avglen) {
    if (*job.cpr_avglen < 1 || *job.cpr_avglen % 2 == 0) {
      throw ConfigError("--cpr-avglen must be a positive odd integer");
    }
    c.experiment.cpr_grid = {*job.cpr_avglen};
  }
  if (job.genie_upsample) {
    if (*job.genie_upsample < 1) throw ConfigError("--genie-upsample must be >= 1");
    c.experiment.genie_upsample = *job.genie_upsample;
  }
  return c;
}

Artifacts simulate_artifacts(const JobConfig& config) {
  const LinkRun run = simulate_link(config.link);
  Artifacts out;
  std::string s = "index,tx_re,tx_im,rx_re,rx_im\n";
  for (std::size_t k = 0; k < run.tx_symbols.size(); ++k) {
    const cplx t = run.tx_symbols.symbols[k];
    const cplx r = run.rx_symbols.symbols[k];
    s += std::to_string(k) + ',' + num(t.real()) + ',' + num(t.imag()) + ',' + num(r.real()) + ',' + num(r.imag()) +
         '\n';
  }
  out["symbols.csv"] = std::move(s);
  if (config.experiment.write_phase) {
    std::string p = "index,phi_tx,phi_rx\n";
    for (std::size_t i = 0; i < run.tx_phase.size(); ++i) {
      p += std::to_string(i) + ',' + num(run.tx_phase.phi[i]) + ',' + num(run.rx_phase.phi[i]) + '\n';
    }
    out["phase.csv"] = std::move(p);
  }
  return out;
}

Artifacts decompose_artifacts(const JobConfig& config, int threads) {
  const LinkInputs in = make_link_inputs(config.link);
  DecomposeOptions opt;
  opt.outputs_per_symbol = config.experiment.outputs_per_symbol;
  opt.convention = config.experiment.convention;
  opt.threads = threads;
  const EepnComponents d = decompose(config.link, in, cd_memory(config.link), opt);
  std::string s = "index,phi0,xterr_re,xterr_im,nrot_re,nrot_im,nrrn_re,nrrn_im,nxrn_re,nxrn_im\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    s += std::to_string(i) + ',' + num(d.phi0[i]);
    for (const CVec* v : {&d.x_terr, &d.n_rot, &d.n_rrn, &d.n_xrn}) {
      s += ',' + num((*v)[i].real()) + ',' + num((*v)[i].imag());
    }
    s += '\n';
  }
  return {{"decompose.csv", std::move(s)}};
}

Artifacts stats_artifacts(const JobConfig& config) {
  const int N = config.experiment.stats_half_window > 0 ? config.experiment.stats_half_window
                                                         : cd_memory(config.link).N;
  if (N < 1) throw ConfigError("stats: half window is 0; set stats_half_window or a nonzero length_km");
  std::size_t len = config.experiment.psd_fft_len;
  if (len == 0) {
    len = 1;
    while (len < 4 * static_cast<std::size_t>(N) + 1) len <<= 1;
  }
  const ResidualStats s = residual_psd(residual_acf(N, config.link.linewidth_rx, config.link.f_sim), len);
  std::string acf = "lag,acf_rad2\n";
  for (std::size_t i = 0; i < s.lags.size(); ++i) acf += std::to_string(s.lags[i]) + ',' + num(s.acf[i]) + '\n';
  std::string psd = "freq_hz,psd\n";
  for (std::size_t i = 0; i < s.freq.size(); ++i) psd += num(s.freq[i]) + ',' + num(s.psd[i]) + '\n';
  return {{"acf.csv", std::move(acf)}, {"psd.csv", std::move(psd)}};
}

std::string penalty_csv(const std::vector<PenaltyReport>& reports) {
  std::string s = "term,tr_avglen,cpr_avglen,linewidth_hz,penalty_db,stderr_db,num_seeds\n";
  for (const auto& r : reports) {
    s += std::string(term_name(r.term)) + ',' + std::to_string(r.tr_avglen) + ',' + std::to_string(r.cpr_avglen) +
         ',' + num(r.linewidth) + ',' + num(r.penalty_db) + ',' + num(r.stderr_db) + ',' +
         std::to_string(r.num_seeds) + '\n';
  }
  return s;
}

Artifacts sweep_artifacts(const JobConfig& config, int threads) {
  PenaltyOptions po;
  po.tr_grid = config.experiment.tr_grid;
  po.cpr_grid = config.experiment.cpr_grid;
  po.seeds = config.experiment.seeds;
  po.threads = threads;
  std::vector<PenaltyReport> all;
  if (config.experiment.linewidths.empty()) {
    all = penalty_attribution(config.link, po);
  } else {
    for (double lw : config.experiment.linewidths) {
      LinkConfig c = config.link;
      c.linewidth_tx = lw;
      c.linewidth_rx = lw;
      const auto part = penalty_attribution(c, po);
      all.insert(all.end(), part.begin(), part.end());
    }
  }
  return {{"sweep.csv", penalty_csv(all)}};
}

int run(const JobSpec& job, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const JobConfig config = resolve_config(job);
    const int threads = resolve_threads(job.threads);
    std::filesystem::create_directories(job.output_dir);

    Artifacts files;
    int status = 0;
    switch (job.subcommand) {
      case Subcommand::Simulate: files = simulate_artifacts(config); break;
      case Subcommand::Decompose: files = decompose_artifacts(config, threads); break;
      case Subcommand::Stats: files = stats_artifacts(config); break;
      case Subcommand::Sweep: files = sweep_artifacts(config, threads); break;
      case Subcommand::Verify: {
        AcceptanceOptions opt;
        opt.full = job.full_scale;
        opt.threads = threads;
        opt.genie_upsample = config.experiment.genie_upsample;
        opt.log = &log;
        const auto results = run_acceptance(opt);
        std::string s = "id,title,pass,seconds,detail\n";
        int failed = 0;
        for (const auto& r : results) {
          failed += r.pass ? 0 : 1;
          s += std::to_string(r.id) + ',' + csv_quote(r.title) + ',' + (r.pass ? "1" : "0") + ',' + num(r.seconds) +
               ',' + csv_quote(r.detail) + '\n';
        }
        log << (failed == 0 ? "all " + std::to_string(results.size()) + " criteria passed"
                            : std::to_string(failed) + " of " + std::to_string(results.size()) + " criteria failed")
            << '\n';
        files["verify.csv"] = std::move(s);
        status = failed == 0 ? 0 : 1;
        break;
      }
    }

    const std::filesystem::path dir(job.output_dir);
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [name, text] : files) {
      write_file(dir / name, text);
      outputs.push_back(name);
    }
    nlohmann::json manifest;
    manifest["tool"] = "eepn_lab";
    manifest["version"] = eepn::version();
    manifest["subcommand"] = subcommand_name(job.subcommand);
    manifest["seed"] = config.link.seed;
    manifest["threads"] = threads;
    manifest["full_scale"] = job.full_scale;
    manifest["config"] = to_json(config);
    manifest["outputs"] = outputs;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return status;
  } catch (const std::exception& e) {
    log << "eepn_lab: error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace eepn::lab
