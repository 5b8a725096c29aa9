// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eepn/decomposition.hpp"
#include "eepn/link.hpp"

namespace eepn {

// --- slope / timing-error correlation ----------------------------------------

struct CorrelationStudy {
  std::vector<int> n_s_grid;                 // symbols
  std::vector<std::vector<double>> pearson;  // [grid point][run]
  std::vector<double> median;                // per grid point
};

struct CorrelationOptions {
  int runs = 20;
  std::size_t symbols_per_run = 5000;
  int genie_upsample = 200;
  int genie_window = 256;
  int genie_hop = 32;
  int threads = 1;
};

/// Per run: simulate an AWGN-free link, estimate the genie timing per window
/// and correlate it with the model delay D·b1 of the RX regression at each
/// window center for every half window in the grid.
CorrelationStudy slope_timing_correlation(const LinkConfig& config, const std::vector<int>& n_s_grid,
                                          const CorrelationOptions& options);

// --- model versus simulation -------------------------------------------------

struct Histogram2D {
  int bins = 201;
  double extent = 1.8;  // grid covers [-extent, extent]²
  std::vector<double> counts;  // row-major, imag index major

  Histogram2D() : counts(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0.0) {}
  void add(cplx v);
  double centre(int i) const { return -extent + (i + 0.5) * 2.0 * extent / bins; }
};

struct ModelVsSim {
  double nmse_model_sim_db = 0.0;
  double nmse_sim_tx_db = 0.0;
  double nmse_model_no_xrn_db = 0.0;  // model with n_xrn dropped, against the simulation
  std::array<double, 4> term_power{};  // mean |x_terr - tx|², |n_rot|², |n_rrn|², |n_xrn|²
  Histogram2D model;
  Histogram2D sim;
  std::vector<double> difference;  // model - sim, same layout as the histograms
};

/// Runs the noise-free link and the decomposition on the same realization.
/// Both outputs and the reference are compared after removing e^{jφ0}.
ModelVsSim model_vs_sim(const LinkConfig& config, int threads = 1,
                        PhaseConvention convention = PhaseConvention::Derived);

// --- penalty attribution -----------------------------------------------------

enum class Term { XTerr = 0, NRot = 1, NRrn = 2, NXrn = 3 };
const char* term_name(Term t);

struct PenaltyReport {
  Term term = Term::XTerr;
  int tr_avglen = 0;
  int cpr_avglen = 0;
  double linewidth = 0.0;  // Hz
  double penalty_db = 0.0;
  double stderr_db = 0.0;
  int num_seeds = 0;
};

struct PenaltyOptions {
  std::vector<int> tr_grid{451, 1985, 3517, 5051};
  std::vector<int> cpr_grid{451, 717, 985, 1251};
  int seeds = 10;
  int threads = 1;
};

/// Seed s of the study uses LinkConfig::seed = study_seed(config.seed, s).
std::uint64_t study_seed(std::uint64_t master, int index);

/// Per-term SNR penalty after Gardner TR and IDR CPR, subset-marginal
/// attribution. Reports are ordered by (term, tr, cpr).
std::vector<PenaltyReport> penalty_attribution(const LinkConfig& config, const PenaltyOptions& options);

/// penalty_attribution at each linewidth (both lasers) for one (tr, cpr) cell.
std::vector<PenaltyReport> linewidth_sweep(const LinkConfig& config, const std::vector<double>& linewidths,
                                           int tr_avglen, int cpr_avglen, int seeds, int threads);

/// Odd values spread evenly over [lo, hi].
std::vector<int> odd_grid(int lo, int hi, int points);

}  // namespace eepn
