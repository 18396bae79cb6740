#pragma once

#include "qtm/generator.hpp"
#include "qtm/machine.hpp"

namespace qtm {

/// Driven three-level amplifier: drive on 0<->1, hot bath on 0<->2,
/// cold bath on 1<->2. omega_d = eps_1 at resonance (detuning shifts it).
struct AmplifierParams {
  double beta_c = 1.0;
  double beta_h = 0.1;
  double eps1 = 2.5;  // == omega_d at resonance
  double eps2 = 5.0;
  double gamma_c = 1e-3;
  double gamma_h = 1e-3;
  double g = 1e-3;
  double detuning = 0.0;
};
MachineSpec build_amplifier(const AmplifierParams& p);

/// Three-qubit autonomous refrigerator; qubit gaps eps1 (cold), eps2 (middle),
/// eps3 = eps2 - eps1 (hot); coupling g between |101> and |010>.
struct FridgeParams {
  double beta_c = 1.0;
  double beta_m = 0.5;
  double beta_h = 0.2;
  double eps1 = 2.0;
  double eps2 = 5.0;
  double gamma_c = 1e-3;
  double gamma_m = 1e-3;
  double gamma_h = 1e-3;
  double g = 1e-3;
};
MachineSpec build_fridge(const FridgeParams& p);

/// Noise-induced-coherence machine: degenerate pair (2a, 2b) at eps2 with
/// collective hot (1<->2a/2b) and cold (0<->2a/2b) jumps, plus a work
/// reservoir on 0<->1 with equal up/down rate gamma_01.
struct NicParams {
  double beta_c = 1.0;
  double beta_h = 0.5;
  double eps1 = 3.0;
  double eps2 = 5.0;
  double gamma_c_a = 1e-3;
  double gamma_c_b = 1e-3;
  double gamma_h_a = 1e-3;
  double gamma_h_b = 1e-3;
  double gamma_01 = 1e-4;
};
MachineSpec build_nic(const NicParams& p);

/// Four-state testbed of the coarse-grained analysis: rates given directly,
/// no energy assignments. Monitored branch is v<->m.
struct Generic4Params {
  double g_um = 0, g_mu = 0, g_vm = 0, g_mv = 0;
  double G_uS = 0, G_Su = 0, G_vS = 0, G_Sv = 0, G_mS = 0, G_Sm = 0;
  double g = 0;
  double detuning = 0;
  bool unicycle = false;  // zero the v<->S and u<->m rates
};

struct Generic4Machine {
  Generic4Params params;     // after unicycle zeroing
  GeneratorMatrix quantum;   // 6x6 with Re row when detuned, else 5x5
  GeneratorMatrix classical; // 4x4
  double lambda = 0.0;       // (1/2) sum of the pair's incoherent loss rates
  double virtual_rate = 0.0;
};
Generic4Machine build_generic4(const Generic4Params& p);

}  // namespace qtm
