#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qtm/jet.hpp"
#include "qtm/machine.hpp"

namespace qtm {

// Tracked state vector: level populations plus the coherence components that
// survive in the steady state (Im rho_uv for hamiltonian coupling, Re rho_uv
// for noise-induced pairs, both when the drive is detuned).

struct Population {
  int level;
};
struct ReCoherence {
  int u, v;
};
struct ImCoherence {
  int u, v;
};
using BasisComponent = std::variant<Population, ReCoherence, ImCoherence>;

struct TrackedBasis {
  std::vector<BasisComponent> components;
  int size() const { return static_cast<int>(components.size()); }
  int population_count() const;
  int index_of_population(int level) const;  // -1 if absent
  std::string label(int i) const;
};

/// One monitored channel: either every branch of a bath (the App. D counting
/// field chi_r) or a single branch. nu = +1 counts the upward/absorption
/// direction with e^{+i chi} on its gain entries.
struct Monitor {
  std::string bath;                        // set: monitor the whole bath
  std::optional<JumpBranch> branch;        // set: monitor one branch (rate ignored)
  int nu = +1;
};

/// Equations-of-motion generator over the tracked basis. Every entry is
/// rate * e^{i nu chi}; we store (rate, nu) and expand to jets on demand.
struct GeneratorMatrix {
  int dim = 0;
  TrackedBasis basis;
  std::vector<jreal> w;       // row-major values at chi = 0 (real)
  std::vector<int8_t> nu;     // counting phase exponent per entry
  std::optional<Monitor> monitored;

  jreal& at(int r, int c) { return w[static_cast<size_t>(r) * dim + c]; }
  jreal at(int r, int c) const { return w[static_cast<size_t>(r) * dim + c]; }
  int8_t& nu_at(int r, int c) { return nu[static_cast<size_t>(r) * dim + c]; }
  int8_t nu_at(int r, int c) const { return nu[static_cast<size_t>(r) * dim + c]; }
  Jet2 jet_at(int r, int c) const { return phase_jet(at(r, c), nu_at(r, c)); }

  /// Largest |entry|, the natural rate scale of the generator.
  jreal scale() const;
  /// Debug dump: dimension header, then row-major `v0 v1 v2` (17 sig. digits).
  std::string dump() const;
};

struct GeneratorError {
  std::string what;
};

/// Assemble the quantum generator (populations + surviving coherences).
GeneratorMatrix build_quantum_generator(const MachineSpec& spec);

/// Populations-only generator of a classical rate network; column sums vanish.
GeneratorMatrix build_classical_generator(const ClassicalMachineSpec& spec);

/// Attach counting phases e^{+i nu chi} to the gain entries of the monitored
/// branch(es); the returned generator equals `gen` at chi = 0. The spec is
/// consulted to resolve bath monitors into branches and jump directions.
GeneratorMatrix dress_with_counting(const GeneratorMatrix& gen, const MachineSpec& spec,
                                    const Monitor& monitor);
GeneratorMatrix dress_with_counting(const GeneratorMatrix& gen,
                                    const ClassicalMachineSpec& spec, const Monitor& monitor);

/// Evaluate the dressed generator at real chi (complex matrix, row-major).
std::vector<std::complex<double>> evaluate_at_chi(const GeneratorMatrix& gen, double chi);

}  // namespace qtm
