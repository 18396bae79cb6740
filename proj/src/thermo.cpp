#include "qtm/thermo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qtm/equivalents.hpp"
#include "qtm/generator.hpp"

namespace qtm {

namespace {

constexpr double kEquilibriumGuard = 1e-13;
constexpr double kConditioningGuard = 1e-8;
constexpr double kNicDarkGuard = 1e-5;

/// Net quanta absorbed from bath `id` (population route, no FCS).
double bath_absorption_flux(const MachineSpec& spec, const SteadyState& steady,
                            const std::string& id) {
  double flux = 0.0;
  for (const auto& j : spec.jumps) {
    if (j.bath != id) continue;
    for (const auto& br : j.branches) {
      const double de = spec.energy(br.to) - spec.energy(br.from);
      const double f = br.rate * steady.population(br.from);
      flux += de > 0 ? f : -f;
    }
  }
  return flux;
}

/// Total jump activity on bath `id` (scale for the near-equilibrium guard).
double bath_activity(const MachineSpec& spec, const SteadyState& steady, const std::string& id) {
  double act = 0.0;
  for (const auto& j : spec.jumps) {
    if (j.bath != id) continue;
    for (const auto& br : j.branches) act += br.rate * steady.population(br.from);
  }
  return act;
}

}  // namespace

CurrentsReport heat_currents(const MachineSpec& spec, const SteadyState& steady) {
  CurrentsReport rep;
  auto cp = spec.coherence_class == CoherenceClass::noise_induced ? spec.collective_pair()
                                                                  : std::nullopt;
  const double x = cp ? steady.coherence().real() : 0.0;

  double work_power = 0.0;
  long double gross = 0.0L;
  bool has_work_bath = false;
  for (const auto& b : spec.baths) {
    long double q = 0.0L;
    for (const auto& j : spec.jumps) {
      if (j.bath != b.id) continue;
      for (const auto& br : j.branches) {
        const double de = spec.energy(br.to) - spec.energy(br.from);
        const long double term =
            static_cast<long double>(de) * br.rate * steady.population(br.from);
        q += term;
        gross += term < 0 ? -term : term;
      }
      if (cp) {
        // collective correction 2 sum_j (eps_j - eps_v) sqrt(g_uj g_vj) Re(pi_uv)
        const auto [u, v] = *cp;
        std::map<int, std::array<double, 2>> per_other;
        for (const auto& br : j.branches) {
          if (br.from == u) per_other[br.to][0] = br.rate;
          if (br.from == v) per_other[br.to][1] = br.rate;
        }
        for (const auto& [other, r] : per_other) {
          const long double term = 2.0L * (spec.energy(other) - spec.energy(v)) *
                                   std::sqrt(r[0] * r[1]) * x;
          q += term;
          gross += term < 0 ? -term : term;
        }
      }
    }
    if (b.work) {
      has_work_bath = true;
      work_power -= static_cast<double>(q);  // dumped into the work reservoir: output
    } else {
      rep.heat[b.id] = static_cast<double>(q);
      rep.entropy_rate -= b.beta * static_cast<double>(q);
    }
  }

  long double sum_q_all = 0.0L;
  for (const auto& [id, q] : rep.heat) sum_q_all += static_cast<long double>(q);
  rep.gross_flow = static_cast<double>(gross);

  if (spec.coupling) {
    const auto& c = *spec.coupling;
    rep.drive_flux = 2.0 * c.g * steady.coherence().imag();
    const double de = spec.energy(c.u) - spec.energy(c.v);
    rep.power = (de + c.detuning) * rep.drive_flux;  // omega_d * <Ndot>
    rep.first_law_residual =
        static_cast<double>(sum_q_all - static_cast<long double>(de) * rep.drive_flux);
  } else if (has_work_bath) {
    rep.power = work_power;
    rep.first_law_residual = static_cast<double>(sum_q_all - work_power);
  } else {
    rep.power = 0.0;
    rep.first_law_residual = static_cast<double>(sum_q_all);
  }
  return rep;
}

double power_from_drive(const MachineSpec& spec, const SteadyState& steady) {
  if (!spec.coupling) throw ModeError{"power_from_drive requires a driven machine"};
  const auto& c = *spec.coupling;
  const double wd = spec.energy(c.u) - spec.energy(c.v) + c.detuning;
  return wd * 2.0 * c.g * steady.coherence().imag();
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::heat_engine: return "heat-engine";
    case Mode::refrigerator: return "refrigerator";
    case Mode::heat_pump: return "heat-pump";
    case Mode::equilibrium: return "equilibrium";
  }
  return "equilibrium";
}

std::string to_string(RowStatus s) {
  switch (s) {
    case RowStatus::ok: return "OK";
    case RowStatus::equilibrium: return "EQUILIBRIUM";
    case RowStatus::infeasible: return "INFEASIBLE";
    case RowStatus::conditioning: return "CONDITIONING";
    case RowStatus::near_degenerate: return "NEAR_DEGENERATE";
    case RowStatus::invalid: return "INVALID";
  }
  return "OK";
}

namespace {

double beta_of(const MachineSpec& spec, const std::string& id) { return spec.bath(id).beta; }

}  // namespace

Mode classify_mode(const MachineSpec& spec) {
  switch (spec.kind) {
    case MachineKind::amplifier: {
      const double e2 = spec.energy(2);
      const double wd = spec.energy(1) - spec.energy(0) +
                        (spec.coupling ? spec.coupling->detuning : 0.0);
      const double eta_c = 1.0 - beta_of(spec, "hot") / beta_of(spec, "cold");
      const double ratio = wd / e2;
      if (!(ratio > 0.0 && ratio <= 1.0)) throw ModeError{"omega_d/eps2 outside (0, 1]"};
      if (ratio == eta_c) return Mode::equilibrium;
      return ratio < eta_c ? Mode::heat_engine : Mode::refrigerator;
    }
    case MachineKind::fridge: {
      // gaps: eps1 (cold qubit), eps2 (middle), eps3 = eps2 - eps1 (hot)
      double e1 = 0, e2 = 0;
      for (const auto& j : spec.jumps) {
        if (j.bath == "cold") e1 = j.gap;
        if (j.bath == "mid") e2 = j.gap;
      }
      const double e3 = e2 - e1;
      const double bc = beta_of(spec, "cold"), bm = beta_of(spec, "mid"),
                   bh = beta_of(spec, "hot");
      const double eta_abs = (bm - bh) / (bc - bm);
      const double ratio = e1 / e3;
      if (!(ratio > 0.0)) throw ModeError{"eps1/eps3 must be positive"};
      if (ratio == eta_abs) return Mode::equilibrium;
      return ratio < eta_abs ? Mode::refrigerator : Mode::heat_pump;
    }
    case MachineKind::nic: {
      double e1 = 0, e2 = 0;
      for (const auto& j : spec.jumps) {
        if (j.bath == "work") e1 = j.gap;
        if (j.bath == "cold") e2 = j.gap;
      }
      const double eta_c = 1.0 - beta_of(spec, "hot") / beta_of(spec, "cold");
      const double ratio = e1 / e2;
      if (!(ratio > 0.0 && ratio <= 1.0)) throw ModeError{"eps1/eps2 outside (0, 1]"};
      if (ratio == eta_c) return Mode::equilibrium;
      return ratio < eta_c ? Mode::heat_engine : Mode::refrigerator;
    }
    default:
      throw ModeError{"mode classification needs a built-in machine kind"};
  }
}

double tur_ratio(double entropy_rate, double var_out, double mean_out) {
  if (mean_out == 0.0) throw ModeError{"TUR ratio undefined at zero output current"};
  return entropy_rate * var_out / (mean_out * mean_out);
}

double fluctuation_ratio(double var_cl, double var_q) {
  if (!(var_q > 0.0)) throw ModeError{"fluctuation ratio requires Var_q > 0"};
  return (var_cl - var_q) / var_q;
}

double variance_of_current(double c2, double gap) { return gap * gap * c2; }

Efficiency efficiency(const MachineSpec& spec, const CurrentsReport& currents, Mode mode) {
  Efficiency e;
  switch (spec.kind) {
    case MachineKind::amplifier: {
      const double bc = beta_of(spec, "cold"), bh = beta_of(spec, "hot");
      if (mode == Mode::heat_engine) {
        e.value = currents.power / currents.heat.at("hot");
        e.bound = 1.0 - bh / bc;
      } else {
        e.value = currents.heat.at("cold") / (-currents.power);
        e.bound = bh / (bc - bh);
      }
      break;
    }
    case MachineKind::fridge: {
      const double bc = beta_of(spec, "cold"), bm = beta_of(spec, "mid"),
                   bh = beta_of(spec, "hot");
      const double eta_abs = (bm - bh) / (bc - bm);
      if (mode == Mode::refrigerator) {
        e.value = currents.heat.at("cold") / currents.heat.at("hot");
        e.bound = eta_abs;
      } else {
        // heat pump: delivered to the hot bath per unit absorbed from the middle
        e.value = -currents.heat.at("hot") / currents.heat.at("mid");
        e.bound = 1.0 / (1.0 + eta_abs);
      }
      break;
    }
    case MachineKind::nic: {
      // Table-of-modes ratio; the machine's natural cycle consumes work, so the
      // current-based engine efficiency would be negative. Report the gap ratio
      // that the classification compares against its bound.
      double e1 = 0, e2 = 0;
      for (const auto& j : spec.jumps) {
        if (j.bath == "work") e1 = j.gap;
        if (j.bath == "cold") e2 = j.gap;
      }
      e.value = e1 / e2;
      e.bound = mode == Mode::heat_engine
                    ? 1.0 - beta_of(spec, "hot") / beta_of(spec, "cold")
                    : 1.0;
      break;
    }
    default:
      throw ModeError{"efficiency needs a built-in machine kind"};
  }
  return e;
}

namespace {

struct ClassicalCurrents {
  std::map<std::string, double> heat;
  double entropy_rate = 0.0;
  double power = 0.0;
};

ClassicalCurrents classical_currents(const ClassicalMachineSpec& spec,
                                     const SteadyState& steady) {
  ClassicalCurrents rep;
  for (const auto& b : spec.baths) rep.heat[b.id] = 0.0;
  double work_q = 0.0;
  for (const auto& t : spec.transitions) {
    const double de = spec.energy(t.to) - spec.energy(t.from);
    const double flux = t.rate * steady.population(t.from);
    if (t.bath.empty()) {
      // free-noise: energy (if any) is attributed to a stochastic work source
      work_q += de * flux;
      continue;
    }
    rep.heat[t.bath] += de * flux;
  }
  bool has_work = false;
  for (const auto& b : spec.baths) {
    if (b.work) {
      has_work = true;
      rep.power -= rep.heat[b.id];
      rep.heat.erase(b.id);
      continue;
    }
    rep.entropy_rate -= b.beta * rep.heat[b.id];
  }
  if (!has_work && work_q != 0.0) rep.power = -work_q;
  return rep;
}

}  // namespace

std::string CertificationReport::to_json() const {
  nlohmann::json j;
  j["status"] = qtm::to_string(status);
  j["mode"] = qtm::to_string(mode);
  j["eta"] = eta.value;
  j["eta_bound"] = eta.bound;
  j["Q"] = q_tur;
  j["Q_classical"] = q_tur_classical;
  j["R"] = has_r ? nlohmann::json(r_ratio) : nlohmann::json();
  j["feasible_equivalent"] = feasible_equivalent;
  j["heat_currents"] = currents.heat;
  j["power"] = currents.power;
  j["entropy_rate"] = currents.entropy_rate;
  j["first_law_residual"] = currents.first_law_residual;
  j["c1_q"] = quantum_stats.c1;
  j["c2_q"] = quantum_stats.c2;
  j["c1_cl"] = classical_stats.c1;
  j["c2_cl"] = classical_stats.c2;
  if (!detail.empty()) j["detail"] = detail;
  return j.dump(2);
}

CertificationReport certify(const MachineSpec& input) {
  CertificationReport rep;
  auto validation = validate_machine(input);
  if (!validation.ok()) {
    rep.status = RowStatus::invalid;
    std::ostringstream os;
    for (const auto& e : validation.errors) os << e << "; ";
    rep.detail = os.str();
    return rep;
  }

  try {
    // NIC machines are analyzed in the rotated basis where the classical
    // equivalent lives; the rotation is exact for all currents and cumulants.
    MachineSpec spec = input;
    if (input.coherence_class == CoherenceClass::noise_induced) spec = nic_basis_change(input);

    // Near-dark-state guard: compare the collective down-rates of the two
    // rotated pair members; the dark limit sends the beta one to zero and
    // makes R numerically indeterminate.
    if (input.coherence_class == CoherenceClass::noise_induced) {
      auto cp = spec.collective_pair();
      if (!cp) {
        rep.status = RowStatus::near_degenerate;
        rep.detail = "rotated NIC machine has a fully dark level (symmetric limit)";
        return rep;
      }
      double down_a = 0, down_b = 0;
      for (const auto& j : spec.jumps) {
        double d1 = 0, d2 = 0;
        for (const auto& br : j.branches) {
          if (br.from == cp->first) d1 += br.rate;
          if (br.from == cp->second) d2 += br.rate;
        }
        if (d1 > 0 && d2 > 0) { down_a = d1; down_b = d2; }
      }
      if (down_a > 0 || down_b > 0) {
        const double lo = std::min(down_a, down_b);
        if (lo < kNicDarkGuard * (down_a + down_b)) {
          rep.status = RowStatus::near_degenerate;
          rep.detail = "rotated NIC pair is near the dark-state limit";
          return rep;
        }
      }
    }

    EquivalenceReport eq = spec.coherence_class == CoherenceClass::noise_induced
                               ? nic_equivalent(spec)
                               : classical_equivalent(spec);
    rep.feasible_equivalent = eq.feasible;

    GeneratorMatrix gen = build_quantum_generator(spec);
    SteadyState steady = solve_steady(gen);
    rep.currents = heat_currents(spec, steady);

    Monitor mon;
    switch (spec.kind) {
      case MachineKind::amplifier:
      case MachineKind::fridge: mon.bath = "cold"; break;
      case MachineKind::nic: mon.bath = "work"; break;
      default: mon.bath = spec.baths.front().id; break;
    }
    GeneratorMatrix dressed = dress_with_counting(gen, spec, mon);
    rep.quantum_stats = cumulants(dressed);

    // FCS conditioning self-check: c1 must equal the population-route flux
    // through the monitored bath (emission positive).
    const double pop_flux = -bath_absorption_flux(spec, steady, mon.bath);
    const double act = bath_activity(spec, steady, mon.bath);
    if (std::fabs(rep.quantum_stats.c1 - pop_flux) >
        kConditioningGuard * std::max({std::fabs(pop_flux), std::fabs(rep.quantum_stats.c1),
                                       1e-6 * act})) {
      rep.status = RowStatus::conditioning;
      rep.detail = "FCS c1 disagrees with the steady-state branch flux";
      return rep;
    }

    double mean_out = 0.0, gap_out = 0.0;
    try {
      rep.mode = classify_mode(spec);
      rep.eta = efficiency(spec, rep.currents, rep.mode);
    } catch (const ModeError& e) {
      rep.detail = e.what;
    }
    switch (spec.kind) {
      case MachineKind::amplifier: {
        gap_out = spec.energy(1) - spec.energy(0) +
                  (spec.coupling ? spec.coupling->detuning : 0.0);
        mean_out = rep.currents.power;
        break;
      }
      case MachineKind::fridge: {
        for (const auto& j : spec.jumps)
          if (j.bath == "cold") gap_out = j.gap;
        mean_out = rep.currents.heat.count("cold") ? rep.currents.heat.at("cold") : 0.0;
        break;
      }
      case MachineKind::nic: {
        for (const auto& j : spec.jumps)
          if (j.bath == "work") gap_out = j.gap;
        mean_out = rep.currents.power;
        break;
      }
      default: {
        gap_out = 1.0;
        mean_out = pop_flux;
        break;
      }
    }

    if (std::fabs(rep.quantum_stats.c1) < kEquilibriumGuard * std::max(act, 1e-300)) {
      rep.status = RowStatus::equilibrium;
      rep.has_r = false;
      return rep;
    }

    if (!eq.feasible) {
      rep.status = RowStatus::infeasible;
      rep.has_r = false;
      return rep;
    }

    GeneratorMatrix cgen = build_classical_generator(eq.equivalent);
    SteadyState csteady = solve_steady(cgen);
    GeneratorMatrix cdressed = dress_with_counting(cgen, eq.equivalent, mon);
    rep.classical_stats = cumulants(cdressed);

    // classical side of the conditioning self-check
    const auto ccur = classical_currents(eq.equivalent, csteady);
    if (std::fabs(rep.classical_stats.c1 - rep.quantum_stats.c1) >
        kConditioningGuard *
            std::max({std::fabs(rep.quantum_stats.c1), 1e-6 * act})) {
      rep.status = RowStatus::conditioning;
      rep.detail = "classical-equivalent c1 deviates from the quantum machine";
      return rep;
    }

    const double var_q = variance_of_current(rep.quantum_stats.c2, gap_out);
    const double var_cl = variance_of_current(rep.classical_stats.c2, gap_out);
    rep.r_ratio = fluctuation_ratio(var_cl, var_q);
    rep.has_r = true;
    rep.q_tur = tur_ratio(rep.currents.entropy_rate, var_q, mean_out);
    rep.q_tur_classical = tur_ratio(ccur.entropy_rate, var_cl, mean_out);

    // worst per-bath current deviation against the equivalent (the
    // construction's defining guarantee), relative to the largest current
    double scale = 0.0;
    for (const auto& [id, q] : rep.currents.heat) scale = std::max(scale, std::fabs(q));
    scale = std::max(scale, std::fabs(rep.currents.power));
    for (const auto& [id, q] : rep.currents.heat) {
      auto it = ccur.heat.find(id);
      if (it == ccur.heat.end()) continue;
      if (scale > 0)
        rep.current_mismatch = std::max(rep.current_mismatch, std::fabs(q - it->second) / scale);
    }
    return rep;
  } catch (const SteadyStateError& e) {
    rep.status = RowStatus::conditioning;
    rep.detail = e.what;
  } catch (const ConditioningError& e) {
    rep.status = RowStatus::conditioning;
    rep.detail = e.what;
  } catch (const GeneratorError& e) {
    rep.status = RowStatus::invalid;
    rep.detail = e.what;
  } catch (const EquivalenceError& e) {
    rep.status = RowStatus::invalid;
    rep.detail = e.what;
  } catch (const DomainError& e) {
    rep.status = RowStatus::invalid;
    rep.detail = e.what;
  }
  return rep;
}

}  // namespace qtm
