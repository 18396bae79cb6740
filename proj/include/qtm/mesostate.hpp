#pragma once

#include <string>
#include <vector>

#include "qtm/generator.hpp"
#include "qtm/machine.hpp"
#include "qtm/steady.hpp"

namespace qtm {

struct MesostatePartition {
  int u = 0;
  int v = 0;
  int m = 0;
  std::vector<int> S;  // the remaining N-3 levels
};

/// Effective rates of the four-state reduction. Exit rates out of S are
/// weighted by the full machine's steady populations, so the reduction is
/// exact in (and only in) the steady state.
struct MesostateReduction {
  MesostatePartition partition;
  // four-state rates in the (u, v, m, S) reduced machine
  double g_um = 0, g_mu = 0, g_vm = 0, g_mv = 0;
  double G_uS = 0, G_Su = 0, G_vS = 0, G_Sv = 0, G_mS = 0, G_Sm = 0;
  double g = 0;        // coupling strength of the (u,v) pair
  double detuning = 0;
  GeneratorMatrix quantum;    // monitored on v<->m
  GeneratorMatrix classical;  // virtual jump replaces the coupling
};

struct MesostateError {
  std::string what;
};

/// Coarse-grain an N-level hamiltonian-coherence machine onto (u, v, m, S).
/// `unicycle` zeroes the v<->S and u<->m rates per the single-cycle topology.
MesostateReduction reduce(const MachineSpec& spec, const SteadyState& full_steady,
                          const MesostatePartition& partition, bool unicycle = false);

}  // namespace qtm
