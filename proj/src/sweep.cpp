#include "qtm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qtm/machines.hpp"

namespace qtm {

namespace {

const char* kVersion = "qtm 1.0.0";

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double get(const std::map<std::string, double>& m, const std::string& k, double fallback) {
  auto it = m.find(k);
  return it == m.end() ? fallback : it->second;
}

double require(const std::map<std::string, double>& m, const std::string& k) {
  auto it = m.find(k);
  if (it == m.end()) throw SweepError{"missing parameter " + k};
  return it->second;
}

}  // namespace

uint64_t draw_seed(uint64_t seed, uint64_t index) {
  // splitmix64 over the pair
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MachineSpec machine_from_params(const std::string& machine,
                                const std::map<std::string, double>& p) {
  if (machine == "amplifier") {
    AmplifierParams a;
    a.beta_c = get(p, "beta_c", 1.0);
    a.beta_h = p.count("beta_h") ? p.at("beta_h")
                                 : require(p, "beta_h_ratio") * a.beta_c;
    a.eps2 = get(p, "eps2", 5.0);
    a.eps1 = p.count("omega_d") ? p.at("omega_d") : require(p, "eps1");
    a.gamma_c = require(p, "gamma_c");
    a.gamma_h = require(p, "gamma_h");
    a.g = require(p, "g");
    a.detuning = get(p, "detuning", 0.0);
    return build_amplifier(a);
  }
  if (machine == "fridge") {
    FridgeParams f;
    f.beta_c = get(p, "beta_c", 1.0);
    f.beta_m = p.count("beta_m") ? p.at("beta_m") : require(p, "beta_m_ratio") * f.beta_c;
    f.beta_h = p.count("beta_h") ? p.at("beta_h") : require(p, "beta_h_ratio") * f.beta_m;
    f.eps1 = require(p, "eps1");
    f.eps2 = get(p, "eps2", 5.0);
    f.gamma_c = require(p, "gamma_c");
    f.gamma_m = require(p, "gamma_m");
    f.gamma_h = require(p, "gamma_h");
    f.g = require(p, "g");
    return build_fridge(f);
  }
  if (machine == "nic") {
    NicParams np;
    np.beta_c = get(p, "beta_c", 1.0);
    np.beta_h = p.count("beta_h") ? p.at("beta_h") : require(p, "beta_h_ratio") * np.beta_c;
    np.eps1 = require(p, "eps1");
    np.eps2 = get(p, "eps2", 5.0);
    np.gamma_c_a = get(p, "gamma_c_a", 1e-3);
    np.gamma_c_b = get(p, "gamma_c_b", 1e-3);
    np.gamma_h_a = require(p, "gamma_h_a");
    np.gamma_h_b = require(p, "gamma_h_b");
    np.gamma_01 = get(p, "gamma_01", 1e-4);
    return build_nic(np);
  }
  throw SweepError{"unknown machine kind " + machine};
}

SweepConfig sweep_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SweepConfig c;
  c.machine = j.at("machine").get<std::string>();
  if (j.contains("fixed"))
    for (auto& [k, v] : j["fixed"].items()) c.fixed[k] = v.get<double>();
  for (auto& [k, v] : j.at("ranges").items()) {
    ParamRange r;
    r.lo = v.at("lo").get<double>();
    r.hi = v.at("hi").get<double>();
    r.log_scale = v.contains("scale") && v["scale"].get<std::string>() == "log";
    if (r.log_scale && !(r.lo > 0 && r.hi > 0))
      throw SweepError{"log-scaled range must be strictly positive: " + k};
    c.ranges[k] = r;
  }
  c.draws = j.contains("draws") ? j["draws"].get<long>() : 10000;
  if (c.draws < 1) throw SweepError{"draw count must be >= 1"};
  c.seed = j.contains("seed") ? j["seed"].get<uint64_t>() : 1;
  c.out = j.value("out", std::string{});
  return c;
}

GridConfig grid_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GridConfig c;
  c.machine = j.value("machine", std::string{"amplifier"});
  if (j.contains("fixed"))
    for (auto& [k, v] : j["fixed"].items()) c.fixed[k] = v.get<double>();
  auto parse_axis = [&](const char* key, std::string& name, ParamRange& r, int& n) {
    const auto& a = j.at(key);
    name = a.at("param").get<std::string>();
    r.lo = a.at("lo").get<double>();
    r.hi = a.at("hi").get<double>();
    r.log_scale = a.contains("scale") && a["scale"].get<std::string>() == "log";
    n = a.value("cells", 20);
  };
  parse_axis("x", c.x_param, c.x_range, c.nx);
  parse_axis("y", c.y_param, c.y_range, c.ny);
  c.out = j.value("out", std::string{});
  return c;
}

SweepResult run_sweep(const SweepConfig& config, int threads) {
  SweepResult res;
  res.config = config;
  for (const auto& [k, r] : config.ranges) res.param_names.push_back(k);
  res.rows.resize(config.draws);

  const int nthreads = threads > 0 ? threads
                                   : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= config.draws) return;
      SweepRow& row = res.rows[i];
      row.index = i;
      std::mt19937_64 rng(draw_seed(config.seed, static_cast<uint64_t>(i)));
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      std::map<std::string, double> params = config.fixed;
      for (const auto& name : res.param_names) {
        const ParamRange& r = config.ranges.at(name);
        const double u = uni(rng);
        params[name] = r.log_scale ? r.lo * std::pow(r.hi / r.lo, u)
                                   : r.lo + (r.hi - r.lo) * u;
        row.params[name] = params[name];
      }
      try {
        MachineSpec spec = machine_from_params(config.machine, params);
        row.report = certify(spec);
        row.status = row.report.status;
      } catch (const SweepError& e) {
        row.status = RowStatus::invalid;
        row.report.detail = e.what;
      } catch (const DomainError& e) {
        row.status = RowStatus::invalid;
        row.report.detail = e.what;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return res;
}

std::string SweepResult::to_csv() const {
  std::ostringstream os;
  os << "# " << kVersion << "; machine=" << config.machine << "; draws=" << config.draws
     << "; seed=" << config.seed
     << "; sampling: rates and g log-uniform, energies and temperature ratios linear-uniform"
     << "; rng=mt19937_64\n";
  os << "status,machine,seed_index";
  for (const auto& p : param_names) os << "," << p;
  os << ",mode,c1_q,c2_q,c1_cl,c2_cl,R,Q,S_dot,eta,eta_bound,feasible\n";
  for (const auto& row : rows) {
    os << to_string(row.status) << "," << config.machine << "," << row.index;
    for (const auto& p : param_names) os << "," << fmt(row.params.at(p));
    const auto& r = row.report;
    const bool solved = row.status == RowStatus::ok || row.status == RowStatus::equilibrium ||
                        row.status == RowStatus::infeasible;
    os << "," << (solved ? to_string(r.mode) : "");
    os << "," << (solved ? fmt(r.quantum_stats.c1) : "");
    os << "," << (solved ? fmt(r.quantum_stats.c2) : "");
    os << "," << (r.has_r ? fmt(r.classical_stats.c1) : "");
    os << "," << (r.has_r ? fmt(r.classical_stats.c2) : "");
    os << "," << (r.has_r ? fmt(r.r_ratio) : "");
    os << "," << (r.has_r ? fmt(r.q_tur) : "");
    os << "," << (solved ? fmt(r.currents.entropy_rate) : "");
    os << "," << (solved ? fmt(r.eta.value) : "");
    os << "," << (solved ? fmt(r.eta.bound) : "");
    os << "," << (r.feasible_equivalent ? "1" : "0");
    os << "\n";
  }
  return os.str();
}

long SweepResult::count(RowStatus s) const {
  long n = 0;
  for (const auto& r : rows)
    if (r.status == s) ++n;
  return n;
}

GridResult grid_scan(const GridConfig& config, int threads) {
  GridResult res;
  res.config = config;
  res.cells.resize(static_cast<size_t>(config.nx) * config.ny);
  const int nthreads = threads > 0 ? threads
                                   : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  auto axis_value = [](const ParamRange& r, int i, int n) {
    if (n == 1) return r.lo;
    const double u = static_cast<double>(i) / (n - 1);
    return r.log_scale ? r.lo * std::pow(r.hi / r.lo, u) : r.lo + (r.hi - r.lo) * u;
  };
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= config.nx * config.ny) return;
      const int iy = i / config.nx, ix = i % config.nx;
      GridCell& cell = res.cells[i];
      cell.x = axis_value(config.x_range, ix, config.nx);
      cell.y = axis_value(config.y_range, iy, config.ny);
      std::map<std::string, double> params = config.fixed;
      params[config.x_param] = cell.x;
      params[config.y_param] = cell.y;
      try {
        MachineSpec spec = machine_from_params(config.machine, params);
        CertificationReport rep = certify(spec);
        cell.status = rep.status;
        cell.r_ratio = rep.has_r ? rep.r_ratio : std::nan("");
        cell.q_tur = rep.has_r ? rep.q_tur : std::nan("");
      } catch (const SweepError&) {
        cell.status = RowStatus::invalid;
      } catch (const DomainError&) {
        cell.status = RowStatus::invalid;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return res;
}

std::string GridResult::to_csv() const {
  std::ostringstream os;
  os << "# " << kVersion << "; grid " << config.x_param << " x " << config.y_param << "\n";
  os << "status," << config.x_param << "," << config.y_param << ",R,Q\n";
  for (const auto& c : cells)
    os << to_string(c.status) << "," << fmt(c.x) << "," << fmt(c.y) << "," << fmt(c.r_ratio)
       << "," << fmt(c.q_tur) << "\n";
  return os.str();
}

Histogram histogram_csv(const std::string& csv_text, const std::string& column, int bins) {
  if (bins < 1) throw SweepError{"bins must be >= 1"};
  std::istringstream in(csv_text);
  std::string line;
  std::vector<std::string> header;
  int col = -1, status_col = -1;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (header.empty()) {
      header = cells;
      for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == column) col = static_cast<int>(i);
        if (header[i] == "status") status_col = static_cast<int>(i);
      }
      if (col < 0) throw SweepError{"column " + column + " not found"};
      continue;
    }
    if (status_col >= 0 && status_col < (int)cells.size() && cells[status_col] != "OK") continue;
    if (col >= (int)cells.size() || cells[col].empty()) continue;
    values.push_back(std::stod(cells[col]));
  }
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  h.lo = *std::min_element(values.begin(), values.end());
  h.hi = *std::max_element(values.begin(), values.end());
  const double width = h.hi > h.lo ? (h.hi - h.lo) : 1.0;
  for (double v : values) {
    int b = std::min(bins - 1, static_cast<int>((v - h.lo) / width * bins));
    ++h.counts[b];
    ++h.total;
  }
  return h;
}

std::string Histogram::to_csv() const {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  const int bins = static_cast<int>(counts.size());
  for (int i = 0; i < bins; ++i) {
    const double w = (hi - lo) / bins;
    os << fmt(lo + i * w) << "," << fmt(lo + (i + 1) * w) << "," << counts[i] << "\n";
  }
  os << "total,," << total << "\n";
  return os.str();
}

}  // namespace qtm
