// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eepn/version.hpp"
#include "eepn_lab/job.hpp"

int main(int argc, char** argv) {
  using eepn::lab::Subcommand;

  CLI::App app{"Batch simulations of equalization-enhanced phase noise in coherent links"};
  app.set_version_flag("--version", std::string(eepn::version()));
  app.require_subcommand(1);
  app.fallthrough();

  eepn::lab::JobSpec job;
  std::uint64_t seed = 0;
  int tr = 0;
  int cpr = 0;
  int genie = 0;
  app.add_option("--config", job.config_path, "JSON configuration (engineering units); defaults if omitted")
      ->check(CLI::ExistingFile);
  app.add_option("--out", job.output_dir, "Output directory for CSVs and manifest.json")->capture_default_str();
  app.add_option("--threads", job.threads, "Worker threads (default: EEPN_LAB_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed, overrides the config");
  auto* tr_opt = app.add_option("--tr-avglen", tr, "Timing-recovery averaging length (odd), single grid point");
  auto* cpr_opt = app.add_option("--cpr-avglen", cpr, "Phase-recovery averaging length (odd), single grid point");
  auto* genie_opt = app.add_option("--genie-upsample", genie, "Genie timing upsampling factor");
  app.add_flag("--full-scale", job.full_scale, "verify: run every criterion, not only the fast tier");

  struct Entry {
    const char* name;
    const char* help;
    Subcommand sub;
  };
  const Entry entries[] = {
      {"simulate", "Simulate the link; writes symbols.csv (and phase.csv)", Subcommand::Simulate},
      {"decompose", "Four-term decomposition; writes decompose.csv", Subcommand::Decompose},
      {"stats", "Closed-form residual ACF and PSD; writes acf.csv, psd.csv", Subcommand::Stats},
      {"sweep", "Per-term SNR penalty over the TR/CPR grid; writes sweep.csv", Subcommand::Sweep},
      {"verify", "Run the acceptance criteria and print pass/fail per criterion", Subcommand::Verify},
  };
  for (const auto& e : entries) {
    app.add_subcommand(e.name, e.help)->callback([&job, sub = e.sub] { job.subcommand = sub; });
  }

  CLI11_PARSE(app, argc, argv);

  if (*seed_opt) job.seed = seed;
  if (*tr_opt) job.tr_avglen = tr;
  if (*cpr_opt) job.cpr_avglen = cpr;
  if (*genie_opt) job.genie_upsample = genie;
  return eepn::lab::run(job, std::cerr);
}
