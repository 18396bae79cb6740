#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qtm/machine.hpp"

namespace qtm {

struct EquivalenceReport {
  ClassicalMachineSpec equivalent;
  bool feasible = true;
  std::vector<std::string> violated_constraints;
  double virtual_rate = 0.0;  // gamma_uv^cl
  std::map<std::pair<int, int>, double> corrected_rates;

  std::string to_json() const;
};

struct EquivalenceError {
  std::string what;
};

/// Replace the coherent coupling by the symmetric virtual jump of rate
/// 4 g^2 S / (4 Delta_d^2 + S^2), S = sum_i (gamma_ui + gamma_vi).
EquivalenceReport hamiltonian_equivalent(const MachineSpec& spec);

/// Rotate the degenerate collective pair (2a,2b) -> (alpha,beta) so that only
/// one collective transition survives; exact (same steady currents).
MachineSpec nic_basis_change(const MachineSpec& spec);

/// Classical equivalent of a rotated noise-induced machine: virtual jump
/// between the degenerate pair plus kinetic-only corrections to the collective
/// branch rates. Infeasible parameter draws are reported, not thrown.
EquivalenceReport nic_equivalent(const MachineSpec& rotated);

/// One-at-a-time replacement of several level-disjoint couplings; element k
/// of the result replaces couplings[0..k]. The final report is fully classical.
std::vector<EquivalenceReport> sequential_equivalent(
    const MachineSpec& base, const std::vector<CoherentCoupling>& couplings);

/// Dispatch on coherence class (hamiltonian or noise-induced after rotation).
EquivalenceReport classical_equivalent(const MachineSpec& spec);

}  // namespace qtm
