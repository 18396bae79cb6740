#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qtm {

// Units: k_B = hbar = 1, ground-state energy pinned to 0.

struct LevelSpec {
  int index = 0;
  double energy = 0.0;
};

struct BathSpec {
  std::string id;
  double beta = 0.0;   // ignored when work == true
  bool work = false;   // infinite-temperature (beta -> 0) work reservoir
};

struct JumpBranch {
  int from = 0;
  int to = 0;
  double rate = 0.0;
};

/// One dissipation channel of a bath: all branches share the energy gap.
/// Two or more branches in the same direction make the jump collective
/// (a single Lindblad operator spanning degenerate transitions).
struct JumpSpec {
  std::string bath;
  double gap = 0.0;
  std::vector<JumpBranch> branches;  // both directions, paired by (from,to)/(to,from)
};

struct CoherentCoupling {
  int u = 0;  // upper / detuned level
  int v = 0;
  double g = 0.0;
  double detuning = 0.0;
  double drive_frequency() const;  // eps_u - eps_v + detuning, filled by owner
};

enum class CoherenceClass {
  none,
  hamiltonian_energetic,
  hamiltonian_degenerate,
  noise_induced,
};

std::string to_string(CoherenceClass c);
CoherenceClass coherence_class_from_string(const std::string& s);

enum class MachineKind { custom, amplifier, fridge, nic, generic4 };
std::string to_string(MachineKind k);

/// Free-noise transition: a symmetric stochastic jump carrying no bath
/// attribution (the classical stand-in for a coherent coupling).
struct VirtualJump {
  int u = 0;
  int v = 0;
  double rate = 0.0;
};

struct MachineSpec {
  std::vector<LevelSpec> levels;
  std::vector<BathSpec> baths;
  std::vector<JumpSpec> jumps;
  std::optional<CoherentCoupling> coupling;
  std::vector<VirtualJump> virtual_jumps;  // produced by sequential replacement
  CoherenceClass coherence_class = CoherenceClass::none;
  MachineKind kind = MachineKind::custom;

  double energy(int level) const;
  const BathSpec& bath(const std::string& id) const;
  int num_levels() const { return static_cast<int>(levels.size()); }
  /// Sum of incoherent loss rates out of `level` (bath branches + virtual jumps).
  double loss_rate(int level) const;
  /// For hamiltonian-* machines: Lambda = (1/2) sum_i (gamma_ui + gamma_vi).
  double coherence_damping() const;
  /// The degenerate pair addressed collectively by >=2-branch jumps, if any.
  std::optional<std::pair<int, int>> collective_pair() const;
};

/// Classical rate network over the same levels and baths.
struct ClassicalTransition {
  int from = 0;
  int to = 0;
  double rate = 0.0;
  std::string bath;  // empty: free-noise transition
};

struct ClassicalMachineSpec {
  std::vector<LevelSpec> levels;
  std::vector<BathSpec> baths;
  std::vector<ClassicalTransition> transitions;
  MachineKind kind = MachineKind::custom;

  double energy(int level) const;
  int num_levels() const { return static_cast<int>(levels.size()); }
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

ValidationReport validate_machine(const MachineSpec& spec);
ValidationReport validate_classical(const ClassicalMachineSpec& spec);

/// Mean thermal occupation (e^{beta gap} - 1)^{-1}. beta*gap must be positive;
/// work reservoirs never call this (their rate pairs are entered as equal).
double bose_occupation(double beta, double gap);

struct ThermalRates {
  double down = 0.0;  // gamma0 * (nbar + 1), emission into the bath
  double up = 0.0;    // gamma0 * nbar, absorption from the bath
};

ThermalRates thermal_rates(double gamma0, double nbar);

struct DomainError {
  std::string what;
};

// Machine-spec files: JSON with keys levels/baths/jumps/coupling/coherence_class.
MachineSpec machine_from_json(const std::string& text);
std::string machine_to_json(const MachineSpec& spec);
MachineSpec load_machine(const std::string& path);
void save_machine(const MachineSpec& spec, const std::string& path);

std::string classical_to_json(const ClassicalMachineSpec& spec);

}  // namespace qtm
