#include <doctest.h>

#include <cmath>

#include "qtm/sweep.hpp"

using namespace qtm;

namespace {

const char* kAmpConfig = R"({
  "machine": "amplifier",
  "fixed": {"beta_c": 1.0, "beta_h": 0.1, "eps2": 5.0},
  "ranges": {
    "omega_d": {"lo": 0.1, "hi": 4.9},
    "gamma_c": {"lo": 1e-5, "hi": 1e-2, "scale": "log"},
    "gamma_h": {"lo": 1e-5, "hi": 1e-2, "scale": "log"},
    "g": {"lo": 1e-5, "hi": 1e-2, "scale": "log"}
  },
  "draws": 64,
  "seed": 20260810
})";

}  // namespace

TEST_CASE("sweep config parsing and validation") {
  SweepConfig c = sweep_config_from_json(kAmpConfig);
  CHECK(c.machine == "amplifier");
  CHECK(c.draws == 64);
  CHECK(c.ranges.at("gamma_c").log_scale);
  CHECK_FALSE(c.ranges.at("omega_d").log_scale);
  CHECK_THROWS_AS(
      sweep_config_from_json(R"({"machine":"amplifier","ranges":{"g":{"lo":-1,"hi":1,"scale":"log"}}})"),
      SweepError);
  CHECK_THROWS_AS(
      sweep_config_from_json(R"({"machine":"amplifier","ranges":{},"draws":0})"), SweepError);
}

TEST_CASE("sweep determinism: identical config and seed give identical CSV") {
  SweepConfig c = sweep_config_from_json(kAmpConfig);
  SweepResult a = run_sweep(c, 2);
  SweepResult b = run_sweep(c, 4);  // different thread count, same bytes
  CHECK(a.to_csv() == b.to_csv());
  SweepConfig c2 = c;
  c2.seed += 1;
  CHECK(run_sweep(c2, 2).to_csv() != a.to_csv());
}

TEST_CASE("sweep rows carry statuses and satisfy basic row laws") {
  SweepConfig c = sweep_config_from_json(kAmpConfig);
  SweepResult r = run_sweep(c, 0);
  REQUIRE(r.rows.size() == 64);
  long ok = 0;
  for (const auto& row : r.rows) {
    if (row.status != RowStatus::ok) continue;
    ++ok;
    CHECK(row.report.has_r);
    CHECK(row.report.r_ratio >= -1e-9);
    CHECK(row.report.currents.entropy_rate >= -1e-12);
    CHECK(row.report.q_tur_classical >= 2.0 - 1e-9);
  }
  CHECK(ok > 40);
}

TEST_CASE("grid scan: single cell equals an analyze run") {
  GridConfig g;
  g.machine = "amplifier";
  g.fixed = {{"beta_c", 1.0}, {"beta_h", 0.1}, {"eps2", 5.0}, {"omega_d", 2.5},
             {"gamma_c", 1e-3}, {"g", 1e-3}};
  g.x_param = "gamma_h";
  g.x_range = {3e-4, 3e-4, false};
  g.y_param = "g";
  g.y_range = {1e-3, 1e-3, false};
  g.nx = g.ny = 1;
  GridResult r = grid_scan(g, 1);
  REQUIRE(r.cells.size() == 1);
  MachineSpec spec = machine_from_params("amplifier", {{"beta_c", 1.0}, {"beta_h", 0.1},
                                                       {"eps2", 5.0}, {"omega_d", 2.5},
                                                       {"gamma_c", 1e-3}, {"gamma_h", 3e-4},
                                                       {"g", 1e-3}});
  CertificationReport rep = certify(spec);
  CHECK(r.cells[0].r_ratio == doctest::Approx(rep.r_ratio).epsilon(1e-14));
  CHECK(r.cells[0].q_tur == doctest::Approx(rep.q_tur).epsilon(1e-14));
}

TEST_CASE("grid rerun is bit-identical") {
  GridConfig g;
  g.machine = "amplifier";
  g.fixed = {{"beta_c", 1.0}, {"beta_h", 0.1}, {"eps2", 5.0}, {"omega_d", 2.5},
             {"gamma_c", 1e-3}};
  g.x_param = "gamma_h";
  g.x_range = {1e-5, 1e-2, true};
  g.y_param = "g";
  g.y_range = {1e-5, 1e-2, true};
  g.nx = g.ny = 6;
  CHECK(grid_scan(g, 2).to_csv() == grid_scan(g, 3).to_csv());
}

TEST_CASE("histogram emits raw bin counts plus the total") {
  SweepConfig c = sweep_config_from_json(kAmpConfig);
  SweepResult r = run_sweep(c, 0);
  Histogram h = histogram_csv(r.to_csv(), "R", 10);
  long sum = 0;
  for (long n : h.counts) sum += n;
  CHECK(sum == h.total);
  CHECK(h.total == r.count(RowStatus::ok));
  CHECK_THROWS_AS(histogram_csv(r.to_csv(), "no_such_column", 10), SweepError);
}
