#include "qtm/machine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qtm {

namespace {

// Degeneracy / equality tolerance, relative to the energy scale.
constexpr double kEnergyTolRel = 1e-12;
constexpr double kBalanceTolRel = 1e-12;
constexpr double kWeakFraction = 1e-1;

double energy_scale(const std::vector<LevelSpec>& levels) {
  double m = 0.0;
  for (const auto& l : levels) m = std::max(m, std::fabs(l.energy));
  return m > 0 ? m : 1.0;
}

}  // namespace

std::string to_string(CoherenceClass c) {
  switch (c) {
    case CoherenceClass::none: return "none";
    case CoherenceClass::hamiltonian_energetic: return "hamiltonian-energetic";
    case CoherenceClass::hamiltonian_degenerate: return "hamiltonian-degenerate";
    case CoherenceClass::noise_induced: return "noise-induced";
  }
  return "none";
}

CoherenceClass coherence_class_from_string(const std::string& s) {
  if (s == "none") return CoherenceClass::none;
  if (s == "hamiltonian-energetic") return CoherenceClass::hamiltonian_energetic;
  if (s == "hamiltonian-degenerate") return CoherenceClass::hamiltonian_degenerate;
  if (s == "noise-induced") return CoherenceClass::noise_induced;
  throw DomainError{"unknown coherence_class: " + s};
}

std::string to_string(MachineKind k) {
  switch (k) {
    case MachineKind::custom: return "custom";
    case MachineKind::amplifier: return "amplifier";
    case MachineKind::fridge: return "fridge";
    case MachineKind::nic: return "nic";
    case MachineKind::generic4: return "generic4";
  }
  return "custom";
}

double MachineSpec::energy(int level) const {
  for (const auto& l : levels)
    if (l.index == level) return l.energy;
  throw DomainError{"unknown level index " + std::to_string(level)};
}

const BathSpec& MachineSpec::bath(const std::string& id) const {
  for (const auto& b : baths)
    if (b.id == id) return b;
  throw DomainError{"unknown bath id " + id};
}

double MachineSpec::loss_rate(int level) const {
  double s = 0.0;
  for (const auto& j : jumps)
    for (const auto& br : j.branches)
      if (br.from == level) s += br.rate;
  for (const auto& vj : virtual_jumps) {
    if (vj.u == level || vj.v == level) s += vj.rate;
  }
  return s;
}

double MachineSpec::coherence_damping() const {
  if (!coupling) throw DomainError{"machine has no coherent coupling"};
  return 0.5 * (loss_rate(coupling->u) + loss_rate(coupling->v));
}

std::optional<std::pair<int, int>> MachineSpec::collective_pair() const {
  for (const auto& j : jumps) {
    // group same-direction branches by their shared endpoint
    std::map<int, std::vector<int>> by_target, by_source;
    for (const auto& br : j.branches) {
      if (br.rate <= 0) continue;  // a zero-rate branch is no branch
      by_target[br.to].push_back(br.from);
      by_source[br.from].push_back(br.to);
    }
    for (auto& [tgt, sources] : by_target) {
      if (sources.size() >= 2) {
        std::sort(sources.begin(), sources.end());
        return std::make_pair(sources[0], sources[1]);
      }
    }
    for (auto& [src, targets] : by_source) {
      if (targets.size() >= 2) {
        std::sort(targets.begin(), targets.end());
        return std::make_pair(targets[0], targets[1]);
      }
    }
  }
  return std::nullopt;
}

double ClassicalMachineSpec::energy(int level) const {
  for (const auto& l : levels)
    if (l.index == level) return l.energy;
  throw DomainError{"unknown level index " + std::to_string(level)};
}

double bose_occupation(double beta, double gap) {
  if (!(beta * gap > 0)) throw DomainError{"bose_occupation requires beta*gap > 0"};
  return 1.0 / std::expm1(beta * gap);
}

ThermalRates thermal_rates(double gamma0, double nbar) {
  if (gamma0 < 0 || nbar < 0) throw DomainError{"thermal_rates requires non-negative inputs"};
  return {gamma0 * (nbar + 1.0), gamma0 * nbar};
}

ValidationReport validate_machine(const MachineSpec& spec) {
  ValidationReport rep;
  auto err = [&](const std::string& m) { rep.errors.push_back(m); };
  auto warn = [&](const std::string& m) { rep.warnings.push_back(m); };

  if (spec.levels.empty()) {
    err("no levels");
    return rep;
  }
  const double esc = energy_scale(spec.levels);
  // energies sorted non-decreasing with index, ground state pinned
  for (size_t i = 0; i < spec.levels.size(); ++i) {
    if (spec.levels[i].index != static_cast<int>(i))
      err("level indices must be 0..N-1 in order");
  }
  if (std::fabs(spec.levels.front().energy) > kEnergyTolRel * esc)
    err("ground-state energy must be 0");
  for (size_t i = 1; i < spec.levels.size(); ++i) {
    if (spec.levels[i].energy < spec.levels[i - 1].energy - kEnergyTolRel * esc)
      err("energies must be non-decreasing with index");
  }

  std::set<std::string> bath_ids;
  for (const auto& b : spec.baths) {
    if (!bath_ids.insert(b.id).second) err("duplicate bath id " + b.id);
    if (!b.work && !(b.beta > 0)) err("bath " + b.id + ": beta must be positive (or work flag)");
  }

  double min_gap = 0.0;
  for (size_t i = 1; i < spec.levels.size(); ++i) {
    double d = spec.levels[i].energy - spec.levels[i - 1].energy;
    if (d > kEnergyTolRel * esc) min_gap = (min_gap == 0.0) ? d : std::min(min_gap, d);
  }

  // every physical transition belongs to exactly one bath
  std::map<std::pair<int, int>, std::string> owner;

  double max_eff_rate = 0.0;
  for (const auto& j : spec.jumps) {
    if (!bath_ids.count(j.bath)) {
      err("jump references unknown bath " + j.bath);
      continue;
    }
    const BathSpec& b = spec.bath(j.bath);
    if (!(j.gap > 0)) err("jump on bath " + j.bath + ": gap must be > 0");
    std::map<std::pair<int, int>, double> rate;
    for (const auto& br : j.branches) {
      if (br.rate < 0) err("negative rate on branch");
      max_eff_rate = std::max(max_eff_rate, br.rate);
      double de = spec.energy(br.from) - spec.energy(br.to);
      if (std::fabs(std::fabs(de) - j.gap) > kEnergyTolRel * esc + 1e-15)
        err("branch " + std::to_string(br.from) + "->" + std::to_string(br.to) +
            " does not match the jump gap");
      rate[{br.from, br.to}] = br.rate;
      auto key = std::minmax(br.from, br.to);
      auto [it, fresh] = owner.insert({{key.first, key.second}, j.bath});
      if (!fresh && it->second != j.bath)
        err("transition " + std::to_string(key.first) + "<->" + std::to_string(key.second) +
            " coupled to more than one bath");
    }
    // local detailed balance on each paired branch
    for (const auto& [k, down] : rate) {
      auto [hi, lo] = k;
      if (spec.energy(hi) < spec.energy(lo)) continue;  // handle each pair once, downward key
      auto up_it = rate.find({lo, hi});
      if (up_it == rate.end()) continue;
      double up = up_it->second;
      if (b.work) {
        if (std::fabs(down - up) > kBalanceTolRel * std::max(down, up))
          err("work-bath branch " + std::to_string(hi) + "<->" + std::to_string(lo) +
              " must have equal up/down rates");
      } else {
        double expect = down * std::exp(-b.beta * (spec.energy(hi) - spec.energy(lo)));
        double scale = std::max(std::fabs(expect), std::fabs(up));
        if (scale > 0 && std::fabs(up - expect) > kBalanceTolRel * scale)
          err("detailed balance violated on branch " + std::to_string(hi) + "<->" +
              std::to_string(lo) + " of bath " + j.bath);
      }
    }
  }

  auto pair = spec.collective_pair();
  if (spec.coupling) {
    if (spec.coupling->u == spec.coupling->v) err("coupling must join two distinct levels");
    if (spec.coherence_class != CoherenceClass::hamiltonian_energetic &&
        spec.coherence_class != CoherenceClass::hamiltonian_degenerate)
      err("coupling present but coherence_class is not hamiltonian-*");
    double du = std::fabs(spec.energy(spec.coupling->u) - spec.energy(spec.coupling->v));
    bool degenerate = du <= kEnergyTolRel * esc;
    if (degenerate && spec.coherence_class != CoherenceClass::hamiltonian_degenerate)
      err("degenerate coupled pair must be classed hamiltonian-degenerate");
    if (!degenerate && spec.coherence_class != CoherenceClass::hamiltonian_energetic)
      err("non-degenerate coupled pair must be classed hamiltonian-energetic");
    if (pair && (pair->first == spec.coupling->u || pair->first == spec.coupling->v ||
                 pair->second == spec.coupling->u || pair->second == spec.coupling->v))
      err("coherent pair is also collectively driven (unsupported topology)");
    max_eff_rate = std::max(max_eff_rate, spec.coupling->g);
  } else if (spec.coherence_class == CoherenceClass::noise_induced) {
    if (!pair) err("noise-induced class requires a collective jump on a degenerate pair");
    if (pair && std::fabs(spec.energy(pair->first) - spec.energy(pair->second)) >
                    kEnergyTolRel * esc)
      err("collective pair is not degenerate");
  } else if (spec.coherence_class == CoherenceClass::none) {
    if (pair) err("collective jump present: coherence_class must be noise-induced");
  } else {
    err("coherence_class " + to_string(spec.coherence_class) + " requires a coupling");
  }

  for (const auto& vj : spec.virtual_jumps)
    if (vj.rate < 0) err("negative virtual-jump rate");

  if (min_gap > 0 && max_eff_rate > kWeakFraction * min_gap)
    warn("weak-coupling advisory: largest effective rate exceeds 0.1 x smallest gap");
  return rep;
}

ValidationReport validate_classical(const ClassicalMachineSpec& spec) {
  ValidationReport rep;
  const double esc = energy_scale(spec.levels);
  std::map<std::pair<int, int>, double> rate;
  std::map<std::pair<int, int>, std::string> battr;
  for (const auto& t : spec.transitions) {
    if (t.rate < 0) rep.errors.push_back("negative classical rate");
    rate[{t.from, t.to}] += t.rate;
    if (!t.bath.empty()) battr[{t.from, t.to}] = t.bath;
  }
  for (const auto& [k, r] : rate) {
    auto rev = rate.find({k.second, k.first});
    if (rev == rate.end()) continue;
    auto at = battr.find(k);
    if (at == battr.end()) {
      // free-noise transitions must be symmetric
      if (std::fabs(r - rev->second) > kBalanceTolRel * std::max(r, rev->second))
        rep.errors.push_back("free-noise transition is not symmetric");
      continue;
    }
    double eh = spec.energy(k.first), el = spec.energy(k.second);
    if (eh < el) continue;
    for (const auto& b : spec.baths) {
      if (b.id != at->second) continue;
      if (b.work) break;
      double expect = r * std::exp(-b.beta * (eh - el));
      double scale = std::max(std::fabs(expect), rev->second);
      if (std::fabs(eh - el) > kEnergyTolRel * esc && scale > 0 &&
          std::fabs(rev->second - expect) > kBalanceTolRel * scale)
        rep.errors.push_back("classical transition violates local detailed balance");
      break;
    }
  }
  return rep;
}

namespace {

std::string dump_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

MachineSpec machine_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  MachineSpec s;
  for (const auto& l : j.at("levels"))
    s.levels.push_back({l.at("index").get<int>(), l.at("energy").get<double>()});
  for (const auto& b : j.at("baths")) {
    BathSpec bs;
    bs.id = b.at("id").get<std::string>();
    if (b.contains("work") && b["work"].get<bool>()) {
      bs.work = true;
      bs.beta = 0.0;
    } else {
      bs.beta = b.at("beta").get<double>();
    }
    s.baths.push_back(bs);
  }
  for (const auto& jp : j.at("jumps")) {
    JumpSpec js;
    js.bath = jp.at("bath").get<std::string>();
    js.gap = jp.at("gap").get<double>();
    for (const auto& br : jp.at("branches"))
      js.branches.push_back({br.at("from").get<int>(), br.at("to").get<int>(),
                             br.at("rate").get<double>()});
    s.jumps.push_back(js);
  }
  if (j.contains("coupling") && !j["coupling"].is_null()) {
    const auto& c = j["coupling"];
    s.coupling = CoherentCoupling{c.at("u").get<int>(), c.at("v").get<int>(),
                                  c.at("g").get<double>(), c.at("detuning").get<double>()};
  }
  if (j.contains("virtual_jumps")) {
    for (const auto& v : j["virtual_jumps"])
      s.virtual_jumps.push_back({v.at("u").get<int>(), v.at("v").get<int>(),
                                 v.at("rate").get<double>()});
  }
  s.coherence_class = coherence_class_from_string(j.at("coherence_class").get<std::string>());
  if (j.contains("kind")) {
    std::string k = j["kind"].get<std::string>();
    for (auto kk : {MachineKind::amplifier, MachineKind::fridge, MachineKind::nic,
                    MachineKind::generic4, MachineKind::custom})
      if (to_string(kk) == k) s.kind = kk;
  }
  return s;
}

std::string machine_to_json(const MachineSpec& s) {
  nlohmann::json j;
  j["levels"] = nlohmann::json::array();
  for (const auto& l : s.levels) j["levels"].push_back({{"index", l.index}, {"energy", l.energy}});
  j["baths"] = nlohmann::json::array();
  for (const auto& b : s.baths) {
    nlohmann::json bj{{"id", b.id}};
    if (b.work)
      bj["work"] = true;
    else
      bj["beta"] = b.beta;
    j["baths"].push_back(bj);
  }
  j["jumps"] = nlohmann::json::array();
  for (const auto& jp : s.jumps) {
    nlohmann::json jj{{"bath", jp.bath}, {"gap", jp.gap}};
    jj["branches"] = nlohmann::json::array();
    for (const auto& br : jp.branches)
      jj["branches"].push_back({{"from", br.from}, {"to", br.to}, {"rate", br.rate}});
    j["jumps"].push_back(jj);
  }
  if (s.coupling)
    j["coupling"] = {{"u", s.coupling->u},
                     {"v", s.coupling->v},
                     {"g", s.coupling->g},
                     {"detuning", s.coupling->detuning}};
  else
    j["coupling"] = nullptr;
  if (!s.virtual_jumps.empty()) {
    j["virtual_jumps"] = nlohmann::json::array();
    for (const auto& v : s.virtual_jumps)
      j["virtual_jumps"].push_back({{"u", v.u}, {"v", v.v}, {"rate", v.rate}});
  }
  j["coherence_class"] = to_string(s.coherence_class);
  j["kind"] = to_string(s.kind);
  return j.dump(2);
}

MachineSpec load_machine(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError{"cannot open " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return machine_from_json(ss.str());
}

void save_machine(const MachineSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError{"cannot write " + path};
  out << machine_to_json(spec) << "\n";
}

std::string classical_to_json(const ClassicalMachineSpec& s) {
  nlohmann::json j;
  j["levels"] = nlohmann::json::array();
  for (const auto& l : s.levels) j["levels"].push_back({{"index", l.index}, {"energy", l.energy}});
  j["baths"] = nlohmann::json::array();
  for (const auto& b : s.baths) {
    nlohmann::json bj{{"id", b.id}};
    if (b.work)
      bj["work"] = true;
    else
      bj["beta"] = b.beta;
    j["baths"].push_back(bj);
  }
  j["transitions"] = nlohmann::json::array();
  for (const auto& t : s.transitions)
    j["transitions"].push_back(
        {{"from", t.from}, {"to", t.to}, {"rate", t.rate}, {"bath", t.bath}});
  j["kind"] = to_string(s.kind);
  return j.dump(2);
}

}  // namespace qtm
