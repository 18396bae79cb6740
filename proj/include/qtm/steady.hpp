#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qtm/generator.hpp"
#include "qtm/machine.hpp"

namespace qtm {

struct SteadyState {
  TrackedBasis basis;
  std::vector<double> values;  // populations and Re/Im coherence entries

  double population(int level) const;
  /// Coherence of the tracked pair as Re + i*Im (0 when a part is untracked).
  std::complex<double> coherence() const;
};

struct SteadyStateError {
  std::string what;
  int kernel_dimension = 1;
};

/// Kernel of the chi = 0 generator, normalized to unit population sum.
/// Degenerate steady manifolds (kernel dimension != 1) raise SteadyStateError.
SteadyState solve_steady(const GeneratorMatrix& gen);

/// Closed-form steady coherence of a hamiltonian-coupled pair:
/// pi_uv = -2 g (pi_vv - pi_uu) / (2 Delta_d + i sum_j (gamma_uj + gamma_vj)).
std::complex<double> steady_coherence_hamiltonian(const MachineSpec& spec,
                                                  const SteadyState& steady);

/// Closed-form steady Re-coherence of a noise-induced pair.
double steady_coherence_nic(const MachineSpec& spec, const SteadyState& steady);

}  // namespace qtm
