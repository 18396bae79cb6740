#pragma once

#include <cstdint>
#include <string>

#include "qtm/generator.hpp"
#include "qtm/machine.hpp"

namespace qtm {

/// Jump-count statistics accumulated along one trajectory. The count follows
/// the same orientation as CurrentStats.c1 (monitored-branch emission
/// positive under the default nu = +1 monitor).
struct TrajectoryStats {
  double duration = 0.0;
  long long net_count = 0;
  long long total_jumps = 0;
  int batches = 0;
  double c1 = 0.0;       // net_count / duration
  double c2 = 0.0;       // batch-means estimate of Var[Ndot]
  double c1_err = 0.0;   // standard errors
  double c2_err = 0.0;
  std::string rng = "mt19937_64";
};

struct MonteCarloError {
  std::string what;
};

/// Exact-jump (Gillespie) simulation of a classical rate network.
TrajectoryStats gillespie(const ClassicalMachineSpec& spec, const Monitor& monitor,
                          double duration, uint64_t seed, int batches = 32);

/// Monte-Carlo wave-function unraveling of the quantum machine, counting
/// fires of the monitored channel.
TrajectoryStats quantum_jump_unravel(const MachineSpec& spec, const Monitor& monitor,
                                     double duration, uint64_t seed, int batches = 32);

}  // namespace qtm
