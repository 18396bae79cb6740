#pragma once

#include <map>
#include <optional>
#include <string>

#include "qtm/fcs.hpp"
#include "qtm/machine.hpp"
#include "qtm/steady.hpp"

namespace qtm {

// Sign conventions: heat currents positive into the machine; output power
// positive when delivered to the drive / work sink.

struct CurrentsReport {
  std::map<std::string, double> heat;  // per thermal bath <Qdot_r>
  double power = 0.0;                  // <Wdot> (drive or work reservoir)
  double entropy_rate = 0.0;           // <Sdot_tot>, work baths excluded
  double drive_flux = 0.0;             // <Ndot> through the coherent link
  double first_law_residual = 0.0;     // sum_r Qdot_r - (eps_u - eps_v) Ndot
  double gross_flow = 0.0;             // sum of |energy| x flux over all branches
};

CurrentsReport heat_currents(const MachineSpec& spec, const SteadyState& steady);

/// <Wdot> = omega_d * <Ndot>; exact first-law closure at resonance.
double power_from_drive(const MachineSpec& spec, const SteadyState& steady);

enum class Mode { heat_engine, refrigerator, heat_pump, equilibrium };
std::string to_string(Mode m);

struct ModeError {
  std::string what;
};

/// Table-of-operation rules for the built-in machines.
Mode classify_mode(const MachineSpec& spec);

/// Q = <Sdot_tot> Var[J_out] / <J_out>^2 with the mode's output current.
double tur_ratio(double entropy_rate, double var_out, double mean_out);

/// R = (Var_cl - Var_q) / Var_q.
double fluctuation_ratio(double var_cl, double var_q);

/// Tight coupling: Var[Qdot_r] = (gap_r)^2 c2, Var[Wdot] = omega_d^2 c2.
double variance_of_current(double c2, double gap);

struct Efficiency {
  double value = 0.0;
  double bound = 0.0;  // eta_C, eta_fr, eta_abs (or pump bound) per mode
};

Efficiency efficiency(const MachineSpec& spec, const CurrentsReport& currents, Mode mode);

enum class RowStatus {
  ok,
  equilibrium,       // |J_out| below the near-equilibrium guard
  infeasible,        // no classical equivalent (NIC grey zone)
  conditioning,      // FCS self-check failed (c1 vs population flux)
  near_degenerate,   // NIC dark-state limit
  invalid,           // machine validation error
};
std::string to_string(RowStatus s);

struct CertificationReport {
  RowStatus status = RowStatus::ok;
  Mode mode = Mode::equilibrium;
  Efficiency eta;
  double q_tur = 0.0;             // quantum machine TUR ratio
  double q_tur_classical = 0.0;   // classical equivalent TUR ratio
  double r_ratio = 0.0;           // fluctuation ratio R
  bool has_r = false;             // false when near-equilibrium guard nulls R/Q
  bool feasible_equivalent = true;
  CurrentsReport currents;
  CurrentStats quantum_stats;
  CurrentStats classical_stats;
  double current_mismatch = 0.0;  // worst relative per-bath deviation vs equivalent
  std::string detail;

  std::string to_json() const;
};

/// Full pipeline: validate, build generators, solve, construct the classical
/// equivalent, extract cumulants for both, and assemble the report.
CertificationReport certify(const MachineSpec& spec);

}  // namespace qtm
