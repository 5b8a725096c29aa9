// SPDX-License-Identifier: Apache-2.0
#include "eepn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eepn/dsp.hpp"
#include "eepn/parallel.hpp"
#include "eepn/random.hpp"

namespace eepn {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::uint64_t study_seed(std::uint64_t master, int index) {
  return substream_seed(master, 0x5eedULL + static_cast<std::uint64_t>(index));
}

std::vector<int> odd_grid(int lo, int hi, int points) {
  if (points < 1 || hi < lo) throw std::invalid_argument("odd_grid: invalid range");
  std::vector<int> g;
  for (int i = 0; i < points; ++i) {
    const double v = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    g.push_back(2 * static_cast<int>(std::lround((v - 1.0) / 2.0)) + 1);
  }
  return g;
}

// --- slope / timing correlation -----------------------------------------------

CorrelationStudy slope_timing_correlation(const LinkConfig& config, const std::vector<int>& grid,
                                          const CorrelationOptions& opt) {
  if (grid.empty()) throw std::invalid_argument("slope_timing_correlation: empty N_S grid");
  if (opt.runs < 1) throw std::invalid_argument("slope_timing_correlation: runs must be >= 1");
  const int max_ns = *std::max_element(grid.begin(), grid.end());

  CorrelationStudy study;
  study.n_s_grid = grid;
  study.pearson.assign(grid.size(), std::vector<double>(static_cast<std::size_t>(opt.runs)));

  parallel_for(static_cast<std::size_t>(opt.runs), opt.threads, [&](std::size_t r) {
    LinkConfig cfg = config;
    cfg.seed = study_seed(config.seed, static_cast<int>(r));
    cfg.num_symbols = opt.symbols_per_run;
    cfg.baseline_snr_db = std::numeric_limits<double>::infinity();
    cfg.half_window_symbols = std::max(max_ns, cd_memory_symbols(cfg));
    const LinkInputs in = make_link_inputs(cfg);
    const LinkRun run = simulate_link(cfg, in, false);
    const TimingEstimate genie =
        genie_timing(run.tx_symbols.symbols, run.rx_symbols.symbols, opt.genie_upsample, opt.genie_window, opt.genie_hop);

    const int sps = cfg.samples_per_symbol();
    const double D = dispersion_samples(cfg);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const RegressionTrace reg = sliding_regression(in.rx_phase, grid[g] * sps, sps);
      std::vector<double> model(genie.center.size());
      for (std::size_t w = 0; w < model.size(); ++w) {
        const auto t = static_cast<std::size_t>(std::lround((static_cast<double>(in.offset) + genie.center[w]) * sps));
        model[w] = D * reg.a1[t] / sps;  // symbols
      }
      study.pearson[g][r] = pearson(genie.error, model);
    }
  });

  for (const auto& row : study.pearson) study.median.push_back(median_of(row));
  return study;
}

// --- model versus simulation ----------------------------------------------------

void Histogram2D::add(cplx v) {
  const double scale = bins / (2.0 * extent);
  const auto ix = static_cast<long long>(std::floor((v.real() + extent) * scale));
  const auto iy = static_cast<long long>(std::floor((v.imag() + extent) * scale));
  if (ix < 0 || iy < 0 || ix >= bins || iy >= bins) return;
  counts[static_cast<std::size_t>(iy * bins + ix)] += 1.0;
}

ModelVsSim model_vs_sim(const LinkConfig& config, int threads, PhaseConvention convention) {
  LinkConfig cfg = config;
  cfg.baseline_snr_db = std::numeric_limits<double>::infinity();
  const LinkInputs in = make_link_inputs(cfg);
  const LinkRun run = simulate_link(cfg, in, false);
  DecomposeOptions opt;
  opt.convention = convention;
  opt.threads = threads;
  const EepnComponents comp = decompose(cfg, in, cd_memory(cfg), opt);

  const std::size_t n = comp.size();
  CVec model(n), model_nx(n), sim(n);
  ModelVsSim out;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx derot = std::polar(1.0, -comp.phi0[k]);
    model[k] = comp.x_terr[k] + comp.n_rot[k] + comp.n_rrn[k] + comp.n_xrn[k];
    model_nx[k] = comp.x_terr[k] + comp.n_rot[k] + comp.n_rrn[k];
    sim[k] = run.rx_symbols.symbols[k] * derot;
    out.model.add(model[k]);
    out.sim.add(sim[k]);
    out.term_power[0] += std::norm(comp.x_terr[k] - run.tx_symbols.symbols[k]);
    out.term_power[1] += std::norm(comp.n_rot[k]);
    out.term_power[2] += std::norm(comp.n_rrn[k]);
    out.term_power[3] += std::norm(comp.n_xrn[k]);
  }
  for (double& p : out.term_power) p /= static_cast<double>(n);
  out.nmse_model_sim_db = nmse_db(model, sim);
  out.nmse_model_no_xrn_db = nmse_db(model_nx, sim);
  out.nmse_sim_tx_db = nmse_db(sim, run.tx_symbols.symbols);
  out.difference.resize(out.model.counts.size());
  for (std::size_t i = 0; i < out.difference.size(); ++i) out.difference[i] = out.model.counts[i] - out.sim.counts[i];
  return out;
}

// --- penalty attribution --------------------------------------------------------

const char* term_name(Term t) {
  switch (t) {
    case Term::XTerr: return "x_terr";
    case Term::NRot: return "n_rot";
    case Term::NRrn: return "n_rrn";
    case Term::NXrn: return "n_xrn";
  }
  return "?";
}

namespace {

constexpr int kSignals = 9;  // baseline, then the eight term subsets by mask

// snr[signal][tr][cpr]
using SnrCube = std::vector<std::vector<std::vector<double>>>;

SnrCube one_seed(const LinkConfig& cfg, const PenaltyOptions& opt) {
  const LinkInputs in = make_link_inputs(cfg);
  DecomposeOptions dop;
  dop.outputs_per_symbol = 2;
  const EepnComponents comp = decompose(cfg, in, cd_memory(cfg), dop);

  const std::size_t n = in.symbols.size() * static_cast<std::size_t>(cfg.samples_per_symbol());
  const CVec noise = decimate_to_2sps(filtered_noise(cfg, n), cfg, in.offset, in.kept);
  CVec base = decimate_to_2sps(reference_waveform(cfg, in.symbols), cfg, in.offset, in.kept);
  for (std::size_t i = 0; i < base.size(); ++i) base[i] += noise[i];
  const std::span<const cplx> tx(in.symbols.symbols.data() + in.offset, in.kept);

  SnrCube snr(kSignals, std::vector<std::vector<double>>(opt.tr_grid.size(), std::vector<double>(opt.cpr_grid.size())));
  for (int s = 0; s < kSignals; ++s) {
    CVec y;
    if (s == 0) {
      y = base;
    } else {
      y = synthesize(comp, static_cast<unsigned>(s - 1));
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += noise[i];
    }
    for (std::size_t a = 0; a < opt.tr_grid.size(); ++a) {
      const auto tr = gardner_tr(y, 2, opt.tr_grid[a], cfg.rolloff);
      for (std::size_t b = 0; b < opt.cpr_grid.size(); ++b) {
        const auto cpr = idr_cpr(tr.retimed.symbols, tx, opt.cpr_grid[b]);
        const auto edge = static_cast<std::size_t>((std::max(opt.tr_grid[a], opt.cpr_grid[b]) + 1) / 2);
        if (2 * edge >= in.kept) throw std::invalid_argument("penalty_attribution: averaging longer than the frame");
        const std::size_t len = in.kept - 2 * edge;
        snr[static_cast<std::size_t>(s)][a][b] =
            snr_estimate(std::span<const cplx>(cpr.derotated.symbols).subspan(edge, len), tx.subspan(edge, len));
      }
    }
  }
  return snr;
}

double term_penalty(const SnrCube& snr, Term t, std::size_t a, std::size_t b) {
  auto at = [&](unsigned mask) { return snr[mask + 1][a][b]; };
  if (t == Term::XTerr) return snr[0][a][b] - at(0);
  const unsigned bit = t == Term::NRot ? kTermRot : (t == Term::NRrn ? kTermRrn : kTermXrn);
  double sum = 0.0;
  int cnt = 0;
  for (unsigned mask = 0; mask < 8; ++mask) {
    if (mask & bit) continue;
    sum += at(mask) - at(mask | bit);
    ++cnt;
  }
  return sum / cnt;
}

}  // namespace

std::vector<PenaltyReport> penalty_attribution(const LinkConfig& config, const PenaltyOptions& opt) {
  if (opt.seeds < 1) throw std::invalid_argument("penalty_attribution: seeds must be >= 1");
  if (opt.tr_grid.empty() || opt.cpr_grid.empty()) throw std::invalid_argument("penalty_attribution: empty grid");
  config.validate();

  const auto cubes = parallel_map<SnrCube>(static_cast<std::size_t>(opt.seeds), opt.threads, [&](std::size_t s) {
    LinkConfig cfg = config;
    cfg.seed = study_seed(config.seed, static_cast<int>(s));
    return one_seed(cfg, opt);
  });

  std::vector<PenaltyReport> out;
  for (Term t : {Term::XTerr, Term::NRot, Term::NRrn, Term::NXrn}) {
    for (std::size_t a = 0; a < opt.tr_grid.size(); ++a) {
      for (std::size_t b = 0; b < opt.cpr_grid.size(); ++b) {
        double sum = 0.0;
        double sum2 = 0.0;
        for (const auto& cube : cubes) {
          const double p = term_penalty(cube, t, a, b);
          sum += p;
          sum2 += p * p;
        }
        const double ns = opt.seeds;
        PenaltyReport r;
        r.term = t;
        r.tr_avglen = opt.tr_grid[a];
        r.cpr_avglen = opt.cpr_grid[b];
        r.linewidth = config.linewidth_rx;
        r.num_seeds = opt.seeds;
        r.penalty_db = sum / ns;
        const double var = opt.seeds > 1 ? std::max(0.0, (sum2 - sum * sum / ns) / (ns - 1.0)) : 0.0;
        r.stderr_db = std::sqrt(var / ns);
        out.push_back(r);
      }
    }
  }
  return out;
}

std::vector<PenaltyReport> linewidth_sweep(const LinkConfig& config, const std::vector<double>& linewidths,
                                           int tr_avglen, int cpr_avglen, int seeds, int threads) {
  std::vector<PenaltyReport> out;
  PenaltyOptions opt;
  opt.tr_grid = {tr_avglen};
  opt.cpr_grid = {cpr_avglen};
  opt.seeds = seeds;
  opt.threads = threads;
  for (double lw : linewidths) {
    LinkConfig cfg = config;
    cfg.linewidth_tx = lw;
    cfg.linewidth_rx = lw;
    for (auto& r : penalty_attribution(cfg, opt)) {
      r.linewidth = lw;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace eepn
