#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qtm/thermo.hpp"

namespace qtm {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  bool log_scale = false;
};

struct SweepConfig {
  std::string machine;                        // amplifier | fridge | nic
  std::map<std::string, double> fixed;        // fixed parameters by name
  std::map<std::string, ParamRange> ranges;   // drawn parameters
  long draws = 10000;
  uint64_t seed = 1;
  std::string out;
};

struct SweepRow {
  long index = 0;
  RowStatus status = RowStatus::ok;
  std::map<std::string, double> params;
  CertificationReport report;
};

struct SweepResult {
  SweepConfig config;
  std::vector<std::string> param_names;  // column order
  std::vector<SweepRow> rows;

  std::string to_csv() const;
  long count(RowStatus s) const;
};

struct SweepError {
  std::string what;
};

SweepConfig sweep_config_from_json(const std::string& text);

/// Deterministic given (config, seed); draws are independent work items.
SweepResult run_sweep(const SweepConfig& config, int threads = 0);

struct GridConfig {
  std::string machine = "amplifier";
  std::map<std::string, double> fixed;
  std::string x_param, y_param;
  ParamRange x_range, y_range;
  int nx = 20, ny = 20;
  std::string out;
};

GridConfig grid_config_from_json(const std::string& text);

struct GridCell {
  double x = 0, y = 0;
  RowStatus status = RowStatus::ok;
  double r_ratio = 0, q_tur = 0;
};

struct GridResult {
  GridConfig config;
  std::vector<GridCell> cells;  // row-major, y outer
  std::string to_csv() const;
};

GridResult grid_scan(const GridConfig& config, int threads = 0);

/// Raw bin counts of one numeric CSV column (status==OK rows only).
struct Histogram {
  double lo = 0, hi = 0;
  std::vector<long> counts;
  long total = 0;
  std::string to_csv() const;
};

Histogram histogram_csv(const std::string& csv_text, const std::string& column, int bins);

/// Deterministic per-draw sub-seed (splitmix64 over seed and index).
uint64_t draw_seed(uint64_t seed, uint64_t index);

/// Construct a built-in machine from a flat parameter map (CLI and sweeps).
MachineSpec machine_from_params(const std::string& machine,
                                const std::map<std::string, double>& params);

}  // namespace qtm
