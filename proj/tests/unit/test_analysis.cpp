// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <limits>

#include "eepn/analysis.hpp"
#include "eepn/random.hpp"

using namespace eepn;

TEST_CASE("odd grid") {
  CHECK(odd_grid(451, 5051, 4) == std::vector<int>{451, 1985, 3517, 5051});
  CHECK(odd_grid(451, 1251, 4) == std::vector<int>{451, 717, 985, 1251});
  for (int v : odd_grid(2, 100, 7)) CHECK(v % 2 == 1);
  CHECK(odd_grid(5, 5, 1) == std::vector<int>{5});
}

TEST_CASE("study seeds") {
  CHECK(study_seed(1, 0) == substream_seed(1, 0x5eed));
  CHECK(study_seed(1, 3) == substream_seed(1, 0x5eed + 3));
  CHECK(study_seed(1, 0) != study_seed(2, 0));
  CHECK(std::string(term_name(Term::NXrn)) == "n_xrn");
}

namespace {

LinkConfig tiny() {
  LinkConfig c;
  c.length = 500e3;
  c.num_symbols = 3000;
  c.seed = 77;
  return c;
}

}  // namespace

TEST_CASE("penalty attribution is deterministic across thread counts") {
  PenaltyOptions o;
  o.tr_grid = {101, 301};
  o.cpr_grid = {101};
  o.seeds = 2;
  o.threads = 1;
  const auto a = penalty_attribution(tiny(), o);
  o.threads = 3;
  const auto b = penalty_attribution(tiny(), o);
  REQUIRE(a.size() == 8);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].term == b[i].term);
    CHECK(a[i].tr_avglen == b[i].tr_avglen);
    CHECK(a[i].penalty_db == b[i].penalty_db);
    CHECK(a[i].stderr_db == b[i].stderr_db);
    CHECK(a[i].num_seeds == 2);
  }
  CHECK(a[0].term == Term::XTerr);
  CHECK(a[7].term == Term::NXrn);
}

TEST_CASE("slope correlation is deterministic and fills the grid") {
  LinkConfig c = tiny();
  c.baseline_snr_db = std::numeric_limits<double>::infinity();
  CorrelationOptions o;
  o.runs = 2;
  o.symbols_per_run = 2000;
  o.genie_upsample = 50;
  const CorrelationStudy a = slope_timing_correlation(c, {340, 17}, o);
  o.threads = 2;
  const CorrelationStudy b = slope_timing_correlation(c, {340, 17}, o);
  REQUIRE(a.median.size() == 2);
  CHECK(a.pearson == b.pearson);
  for (const auto& row : a.pearson) {
    CHECK(row.size() == 2);
    for (double r : row) CHECK(std::abs(r) <= 1.0);
  }
}

TEST_CASE("model versus simulation on a short link") {
  LinkConfig c = tiny();
  c.num_symbols = 2000;
  const ModelVsSim m = model_vs_sim(c);
  CHECK(m.nmse_model_sim_db < m.nmse_sim_tx_db);
  double total = 0.0;
  for (double v : m.model.counts) total += v;
  CHECK(total == doctest::Approx(2000.0));
  CHECK(m.difference.size() == m.model.counts.size());
}
