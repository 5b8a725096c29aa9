// SPDX-License-Identifier: Apache-2.0
#include "eepn_lab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "eepn/analysis.hpp"
#include "eepn/decomposition.hpp"
#include "eepn/link.hpp"
#include "eepn/phase_noise.hpp"
#include "eepn/random.hpp"
#include "eepn_lab/job.hpp"

namespace eepn::lab {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

double rel_l2(std::span<const double> a, std::span<const double> ref) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

// --- 1: part-wise ACF against enumeration ---------------------------------

void residual_acf_oracle(Outcome& o) {
  double worst = 0.0;
  for (int N = 1; N <= 4; ++N) {
    const double scale = residual_covariance_bruteforce(N, 0);
    for (long long l = -(2LL * N + 2); l <= 2LL * N + 2; ++l) {
      const double ref = residual_covariance_bruteforce(N, l);
      const double got = residual_acf_unit(N, l);
      // Exact zeros are compared against the lag-0 scale.
      const double err = std::abs(got - ref) / (std::abs(ref) > 1e-300 ? std::abs(ref) : scale);
      worst = std::max(worst, err);
    }
  }
  o.check(worst <= 1e-12, "max rel err vs enumeration " + fmt("%.2e", worst) + " (tol 1e-12)");

  const double s = wiener_increment_variance(150e3, 1e12);
  const double v10 = s * residual_acf_unit(1, 0);
  const double v22 = s * residual_acf_unit(2, 2);
  o.check(std::abs(v10 / s - 2.0 / 9.0) <= 1e-12 * (2.0 / 9.0), "N=1,l=0 -> " + fmt("%.15g", v10 / s) + " sigma2");
  o.check(std::abs(v22 / s + 4.0 / 25.0) <= 1e-12 * (4.0 / 25.0), "N=2,l=2 -> " + fmt("%.15g", v22 / s) + " sigma2");
  bool zeros = true;
  for (int N = 1; N <= 4; ++N) {
    for (long long l = 2LL * N + 1; l <= 2LL * N + 2; ++l) zeros = zeros && residual_acf_unit(N, l) == 0.0;
  }
  o.check(zeros, "|l| > 2N gives 0");
}

// --- 2: the combined closed form diverges at N=1, l=1 -----------------------

void printed_form_divergence(Outcome& o) {
  const double printed = residual_acf_printed_unit(1, 1);
  const double partwise = residual_acf_unit(1, 1);
  const double brute = residual_covariance_bruteforce(1, 1);
  o.check(std::abs(printed - 25.0 / 27.0) <= 1e-12, "closed form = " + fmt("%.15g", printed) + " (25/27)");
  o.check(std::abs(partwise + 1.0 / 9.0) <= 1e-12 && std::abs(brute + 1.0 / 9.0) <= 1e-12,
          "part-wise = " + fmt("%.15g", partwise) + ", enumeration = " + fmt("%.15g", brute) + " (-1/9)");
  o.check(std::abs(printed - partwise) > 1.0, "divergence " + fmt("%.4f", printed - partwise));
}

// --- 3: Monte-Carlo ACF and PSD -------------------------------------------

void montecarlo_acf_psd(Outcome& o) {
  const int N = 100;
  const double lw = 150e3;
  const double fs = 1e12;
  const std::size_t samples = 1000000;
  const long long max_lag = 2LL * N;

  const PhaseTrace tr = gen_wiener(samples + 2 * N, lw, fs, substream_seed(7, Stream::MonteCarlo));
  const RegressionTrace reg = sliding_regression(tr, N);
  const std::vector<double> res_full = residual_center(tr, reg);
  const std::span<const double> res(res_full.data() + N, samples);

  // Even in l, so lags 0..2N carry the whole |l| <= 2N comparison once
  // the negative side is mirrored in.
  const std::vector<double> emp = autocorrelation(res, max_lag);
  const ResidualStats ana = residual_acf(N, lw, fs);
  std::vector<double> emp_two, ana_two;
  for (std::size_t i = 0; i < ana.lags.size(); ++i) {
    const auto l = static_cast<std::size_t>(std::llabs(ana.lags[i]));
    emp_two.push_back(emp[l]);
    ana_two.push_back(ana.acf[i]);
  }
  const double acf_err = rel_l2(emp_two, ana_two);
  o.check(acf_err <= 0.05, "ACF rel L2 " + fmt("%.4f", acf_err) + " (tol 0.05)");

  const std::size_t seg = 2048;
  const std::vector<double> welch = welch_psd(res, fs, seg);
  const ResidualStats psd = residual_psd(ana, seg);
  // In band: |f| <= f_sim / N, where the residual carries its power.
  const auto band = static_cast<long long>(seg / static_cast<std::size_t>(N));
  std::vector<double> a, b;
  for (long long k = -band; k <= band; ++k) {
    const auto idx = static_cast<std::size_t>(k >= 0 ? k : static_cast<long long>(seg) + k);
    a.push_back(welch[idx]);
    b.push_back(psd.psd[idx]);
  }
  const double psd_err = rel_l2(a, b);
  o.check(psd_err <= 0.05, "PSD rel L2 in band " + fmt("%.4f", psd_err) + " (tol 0.05)");
  const double peak = *std::max_element(psd.psd.begin(), psd.psd.end());
  const double dc = psd.psd[0] / peak;
  o.check(dc <= 1e-4, "PSD(0)/peak " + fmt("%.2e", dc) + " (tol 1e-4)");
}

// --- 4: window sizing ------------------------------------------------------

void window_sizing(Outcome& o) {
  LinkConfig c;
  auto direct = [&](double km) {
    c.length = km * 1e3;
    return std::numbers::pi * std::abs(c.beta2) * c.length * c.symbol_rate * c.symbol_rate;
  };
  struct Case {
    double km;
    int expect;
    bool exact;
  };
  for (const Case& k : {Case{4000, 2723, true}, Case{2000, 1362, false}, Case{5000, 3404, false}}) {
    const double d = direct(k.km);
    const int n = cd_memory_symbols(c);
    const bool ok = k.exact ? n == k.expect : std::abs(n - k.expect) <= 1 && std::abs(n - d) <= 1.0;
    o.check(ok, fmt("%.0f km", k.km) + " -> N_CD " + std::to_string(n) + " (direct " + fmt("%.2f", d) + ")");
  }
}

// --- 5: baseline SNR and the dispersion-free channel ----------------------

void link_identity(Outcome& o) {
  LinkConfig c;
  c.linewidth_tx = 0.0;
  c.linewidth_rx = 0.0;
  c.num_symbols = 200000;
  c.seed = 11;
  const LinkRun run = simulate_link(c);
  const double snr = snr_estimate(run.rx_symbols, run.tx_symbols);
  o.check(std::abs(snr - 13.7) <= 0.1, "laser-free SNR " + fmt("%.3f", snr) + " dB (13.7 +- 0.1)");

  LinkConfig r;
  r.length = 0.0;
  r.baseline_snr_db = std::numeric_limits<double>::infinity();
  r.num_symbols = 20000;
  r.seed = 12;
  const LinkRun rot = simulate_link(r);
  const auto sps = static_cast<std::size_t>(r.samples_per_symbol());
  CVec expected(rot.tx_symbols.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const std::size_t t = (rot.offset + k) * sps;
    expected[k] = rot.tx_symbols.symbols[k] * std::polar(1.0, rot.tx_phase.phi[t] + rot.rx_phase.phi[t]);
  }
  const double e = nmse_db(rot.rx_symbols.symbols, expected);
  o.check(e <= -40.0, "length 0: rx vs rotated tx NMSE " + fmt("%.1f", e) + " dB (tol -40)");
}

// --- 6: slope / genie timing correlation -----------------------------------

void slope_correlation(Outcome& o, const AcceptanceOptions& opt) {
  LinkConfig c;
  c.length = 5000e3;
  c.baseline_snr_db = std::numeric_limits<double>::infinity();
  const int ncd = cd_memory_symbols(c);
  const int small = std::max(1, static_cast<int>(std::lround(0.05 * ncd)));
  CorrelationOptions co;
  co.runs = 20;
  co.symbols_per_run = 5000;
  co.genie_upsample = opt.genie_upsample;
  co.threads = opt.threads;
  const CorrelationStudy s = slope_timing_correlation(c, {ncd, small}, co);
  o.check(s.median[0] >= 0.95, "median r at N_S=" + std::to_string(ncd) + ": " + fmt("%.4f", s.median[0]) +
                                   " (>= 0.95)");
  o.check(s.median[0] - s.median[1] >= 0.2, "median r at N_S=" + std::to_string(small) + ": " +
                                                fmt("%.4f", s.median[1]) + ", drop " +
                                                fmt("%.4f", s.median[0] - s.median[1]) + " (>= 0.2)");
}

// --- 7: decomposition fidelity --------------------------------------------

void decomposition_fidelity(Outcome& o, const AcceptanceOptions& opt) {
  LinkConfig c;
  c.length = 5000e3;
  c.num_symbols = 50000;
  c.seed = 3;
  const ModelVsSim m = model_vs_sim(c, opt.threads);
  o.check(m.nmse_model_sim_db <= m.nmse_sim_tx_db - 10.0,
          "NMSE(model, sim) " + fmt("%.2f", m.nmse_model_sim_db) + " dB vs NMSE(sim, tx) " +
              fmt("%.2f", m.nmse_sim_tx_db) + " dB (margin >= 10)");

  LinkConfig z = c;
  z.linewidth_tx = 0.0;
  z.num_symbols = 2000;
  const LinkInputs in = make_link_inputs(z);
  const EepnComponents d = decompose(z, in, cd_memory(z), {1, PhaseConvention::Derived, opt.threads});
  bool zero = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    zero = zero && d.n_rot[i] == cplx{0.0, 0.0} && d.n_xrn[i] == cplx{0.0, 0.0};
  }
  o.check(zero, "TX linewidth 0: n_rot and n_xrn identically 0");
}

// --- 8: penalty attribution -------------------------------------------------

struct Cell {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
  }
};

void penalty_grid(Outcome& o, const AcceptanceOptions& opt) {
  LinkConfig c;
  c.num_symbols = 50000;
  c.seed = 8;
  PenaltyOptions po;
  po.tr_grid = odd_grid(451, 5051, 4);
  po.cpr_grid = odd_grid(451, 1251, 4);
  po.seeds = 10;
  po.threads = opt.threads;
  const std::vector<PenaltyReport> reps = penalty_attribution(c, po);

  Cell xterr, rrn, xrn, rot;
  double rot_tr_spread = 0.0;
  Cell rot_by_cpr;
  for (int cpr : po.cpr_grid) {
    Cell along_tr;
    double mean = 0.0;
    for (const auto& r : reps) {
      if (r.term != Term::NRot || r.cpr_avglen != cpr) continue;
      along_tr.add(r.penalty_db);
      mean += r.penalty_db / static_cast<double>(po.tr_grid.size());
    }
    rot_tr_spread = std::max(rot_tr_spread, along_tr.max - along_tr.min);
    rot_by_cpr.add(mean);
  }
  for (const auto& r : reps) {
    switch (r.term) {
      case Term::XTerr: xterr.add(r.penalty_db); break;
      case Term::NRrn: rrn.add(r.penalty_db); break;
      case Term::NXrn: xrn.add(r.penalty_db); break;
      case Term::NRot: rot.add(r.penalty_db); break;
    }
  }
  const auto range = [](const Cell& c) { return "[" + fmt("%.4f", c.min) + ", " + fmt("%.4f", c.max) + "]"; };
  o.check(xterr.min >= 0.15 && xterr.max <= 0.40, "x_terr " + range(xterr) + " dB (in [0.15, 0.40])");
  o.check(rrn.min >= 0.18 && rrn.max <= 0.28, "n_rrn " + range(rrn) + " dB (in [0.18, 0.28])");
  o.check(rrn.max - rrn.min < 0.05, "n_rrn spread " + fmt("%.4f", rrn.max - rrn.min) + " dB (< 0.05)");
  o.check(std::max(std::abs(xrn.min), std::abs(xrn.max)) < 0.01, "n_xrn " + range(xrn) + " dB (|.| < 0.01)");
  o.check(rot_tr_spread < 0.02, "n_rot spread across TR " + fmt("%.4f", rot_tr_spread) + " dB (< 0.02)");
  // Varying with CPR: the CPR effect must stand out of the TR spread.
  const double cpr_spread = rot_by_cpr.max - rot_by_cpr.min;
  o.check(cpr_spread > rot_tr_spread && cpr_spread > 0.0,
          "n_rot spread across CPR " + fmt("%.4f", cpr_spread) + " dB (> TR spread)");
}

// --- 9: linewidth trend ------------------------------------------------------

void linewidth_trend(Outcome& o, const AcceptanceOptions& opt) {
  LinkConfig c;
  c.num_symbols = 50000;
  c.seed = 9;
  const std::vector<double> lws{150e3, 300e3, 600e3, 1000e3};
  const std::vector<PenaltyReport> reps = linewidth_sweep(c, lws, 1501, 701, 5, opt.threads);
  auto at = [&](Term t, double lw) {
    for (const auto& r : reps) {
      if (r.term == t && r.linewidth == lw) return r.penalty_db;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (Term t : {Term::XTerr, Term::NRot, Term::NRrn}) {
    std::string series;
    bool monotone = true;
    for (std::size_t i = 0; i < lws.size(); ++i) {
      series += (i ? " " : "") + fmt("%.4f", at(t, lws[i]));
      if (i > 0) monotone = monotone && at(t, lws[i]) >= at(t, lws[i - 1]);
    }
    const double growth = (at(t, lws.back()) / at(t, lws.front())) / (lws.back() / lws.front());
    o.check(monotone, std::string(term_name(t)) + " {" + series + "} dB non-decreasing");
    o.check(growth < 1.0, std::string(term_name(t)) + " growth ratio " + fmt("%.3f", growth) + " (< 1)");
  }
  bool smallest = true;
  for (double lw : lws) {
    const double x = at(Term::NXrn, lw);
    for (Term t : {Term::XTerr, Term::NRot, Term::NRrn}) smallest = smallest && x < at(t, lw);
  }
  o.check(smallest, "n_xrn smallest at every linewidth");
}

// --- 10: sweep determinism across thread counts ----------------------------

void sweep_determinism(Outcome& o) {
  JobConfig c;
  c.link.num_symbols = 4000;
  c.link.seed = 10;
  c.experiment.tr_grid = {451, 1985};
  c.experiment.cpr_grid = {451};
  c.experiment.seeds = 3;
  const Artifacts one = sweep_artifacts(c, 1);
  const Artifacts eight = sweep_artifacts(c, 8);
  const std::string& csv = one.at("sweep.csv");
  o.check(!csv.empty() && one == eight,
          "sweep.csv threads 1 vs 8: " + std::string(one == eight ? "identical" : "different") + " (" +
              std::to_string(csv.size()) + " bytes)");
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&, const AcceptanceOptions&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "residual ACF equals covariance enumeration", [](Outcome& o, const AcceptanceOptions&) { residual_acf_oracle(o); }},
      {2, "combined closed form diverges at N=1 l=1", [](Outcome& o, const AcceptanceOptions&) { printed_form_divergence(o); }},
      {3, "Monte-Carlo ACF and PSD", [](Outcome& o, const AcceptanceOptions&) { montecarlo_acf_psd(o); }},
      {4, "CD memory window sizing", [](Outcome& o, const AcceptanceOptions&) { window_sizing(o); }},
      {5, "baseline SNR and dispersion-free link", [](Outcome& o, const AcceptanceOptions&) { link_identity(o); }},
      {6, "slope versus genie timing correlation", slope_correlation},
      {7, "decomposition fidelity", decomposition_fidelity},
      {8, "penalty attribution grid", penalty_grid},
      {9, "linewidth trend", linewidth_trend},
      {10, "sweep determinism across threads", [](Outcome& o, const AcceptanceOptions&) { sweep_determinism(o); }},
  };
  return list;
}

}  // namespace

double residual_covariance_bruteforce(int N, long long lag) {
  // phi_k = sum of increments w_i for lo < i <= k; the constant phi_lo drops
  // out of n_k = phi_k - mean(phi_{k-N..k+N}). Weights are kept scaled by
  // L = 2N+1 so they stay integers and the sum is exact.
  const long long l = std::llabs(lag);
  const long long L = 2LL * N + 1;
  const long long lo = -N - 1;
  const long long hi = l + N;
  auto weight = [&](long long k, long long i) {
    long long v = (i <= k) ? L : 0;
    for (long long j = k - N; j <= k + N; ++j) {
      if (i <= j) --v;
    }
    return v;
  };
  long long s = 0;
  for (long long i = lo + 1; i <= hi; ++i) s += weight(0, i) * weight(l, i);
  return static_cast<double>(s) / static_cast<double>(L * L);
}

std::vector<int> selected_criteria(const AcceptanceOptions& options) {
  std::vector<int> ids;
  for (const auto& c : criteria()) {
    const bool wanted = options.only.empty()
                            ? (options.full || c.id <= 4)
                            : std::find(options.only.begin(), options.only.end(), c.id) != options.only.end();
    if (wanted) ids.push_back(c.id);
  }
  return ids;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> out;
  const std::vector<int> ids = selected_criteria(options);
  for (const auto& c : criteria()) {
    if (std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Outcome o;
      c.run(o, options);
      r.pass = o.pass;
      r.detail = o.detail.str();
      if (r.detail.size() >= 2) r.detail.resize(r.detail.size() - 2);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (options.log != nullptr) *options.log << format_result(r) << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[32];
  std::snprintf(head, sizeof head, "%s %2d  ", r.pass ? "PASS" : "FAIL", r.id);
  return head + r.title + ": " + r.detail + " (" + fmt("%.1f", r.seconds) + " s)";
}

}  // namespace eepn::lab
