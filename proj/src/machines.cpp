#include "qtm/machines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qtm {

MachineSpec build_amplifier(const AmplifierParams& p) {
  MachineSpec s;
  s.kind = MachineKind::amplifier;
  s.levels = {{0, 0.0}, {1, p.eps1}, {2, p.eps2}};
  s.baths = {{"hot", p.beta_h, false}, {"cold", p.beta_c, false}};
  const double nh = bose_occupation(p.beta_h, p.eps2);
  const double nc = bose_occupation(p.beta_c, p.eps2 - p.eps1);
  const auto rh = thermal_rates(p.gamma_h, nh);
  const auto rc = thermal_rates(p.gamma_c, nc);
  s.jumps = {
      {"hot", p.eps2, {{2, 0, rh.down}, {0, 2, rh.up}}},
      {"cold", p.eps2 - p.eps1, {{2, 1, rc.down}, {1, 2, rc.up}}},
  };
  s.coupling = CoherentCoupling{1, 0, p.g, p.detuning};
  s.coherence_class = CoherenceClass::hamiltonian_energetic;
  return s;
}

MachineSpec build_fridge(const FridgeParams& p) {
  const double eps3 = p.eps2 - p.eps1;
  MachineSpec s;
  s.kind = MachineKind::fridge;
  // three-qubit ladder |q1 q2 q3>, ordered to match the counting-matrix layout:
  // 000, 001, 100, 011, 110, 111, 101, 010
  // level energies: eps1*q1 + eps2*q2 + eps3*q3
  struct St {
    const char* bits;
    double e;
  };
  const double e1 = p.eps1, e2 = p.eps2, e3 = eps3;
  const St order[8] = {{"000", 0.0},          {"001", e3},      {"100", e1},
                       {"011", e2 + e3},      {"110", e1 + e2}, {"111", e1 + e2 + e3},
                       {"101", e1 + e3},      {"010", e2}};
  // MachineSpec wants energies non-decreasing with index; sort but remember bits
  std::vector<std::pair<double, std::string>> lv;
  for (const auto& st : order) lv.push_back({st.e, st.bits});
  std::stable_sort(lv.begin(), lv.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::map<std::string, int> index_of;
  for (int i = 0; i < 8; ++i) {
    s.levels.push_back({i, lv[i].first});
    index_of[lv[i].second] = i;
  }
  s.baths = {{"cold", p.beta_c, false}, {"mid", p.beta_m, false}, {"hot", p.beta_h, false}};
  const double nc = bose_occupation(p.beta_c, e1);
  const double nm = bose_occupation(p.beta_m, e2);
  const double nh = bose_occupation(p.beta_h, e3);
  const auto rc = thermal_rates(p.gamma_c, nc);
  const auto rm = thermal_rates(p.gamma_m, nm);
  const auto rh = thermal_rates(p.gamma_h, nh);
  const struct {
    int qubit;
    const char* bath;
    double gap, down, up;
  } local[3] = {{0, "cold", e1, rc.down, rc.up},
                {1, "mid", e2, rm.down, rm.up},
                {2, "hot", e3, rh.down, rh.up}};
  for (const auto& L : local) {
    JumpSpec j;
    j.bath = L.bath;
    j.gap = L.gap;
    for (const auto& st : order) {
      std::string from = st.bits;
      if (from[L.qubit] == '1') {
        std::string to = from;
        to[L.qubit] = '0';
        j.branches.push_back({index_of[from], index_of[to], L.down});
        j.branches.push_back({index_of[to], index_of[from], L.up});
      }
    }
    s.jumps.push_back(j);
  }
  s.coupling = CoherentCoupling{index_of["101"], index_of["010"], p.g, 0.0};
  s.coherence_class = CoherenceClass::hamiltonian_degenerate;
  return s;
}

MachineSpec build_nic(const NicParams& p) {
  MachineSpec s;
  s.kind = MachineKind::nic;
  // levels: 0, 1 (eps1), 2a (eps2), 2b (eps2)
  s.levels = {{0, 0.0}, {1, p.eps1}, {2, p.eps2}, {3, p.eps2}};
  s.baths = {{"cold", p.beta_c, false}, {"hot", p.beta_h, false}, {"work", 0.0, true}};
  const double nc = bose_occupation(p.beta_c, p.eps2);
  const double nh = bose_occupation(p.beta_h, p.eps2 - p.eps1);
  const auto rca = thermal_rates(p.gamma_c_a, nc);
  const auto rcb = thermal_rates(p.gamma_c_b, nc);
  const auto rha = thermal_rates(p.gamma_h_a, nh);
  const auto rhb = thermal_rates(p.gamma_h_b, nh);
  s.jumps = {
      {"work", p.eps1, {{1, 0, p.gamma_01}, {0, 1, p.gamma_01}}},
      {"hot",
       p.eps2 - p.eps1,
       {{2, 1, rha.down}, {1, 2, rha.up}, {3, 1, rhb.down}, {1, 3, rhb.up}}},
      {"cold",
       p.eps2,
       {{2, 0, rca.down}, {0, 2, rca.up}, {3, 0, rcb.down}, {0, 3, rcb.up}}},
  };
  s.coherence_class =
      s.collective_pair() ? CoherenceClass::noise_induced : CoherenceClass::none;
  return s;
}

namespace {

GeneratorMatrix four_state_quantum(const Generic4Params& p) {
  // basis (uu, vv, mm, ss[, Re], Im); monitored branch v<->m with nu=+1 on v->m
  TrackedBasis b;
  for (int i = 0; i < 4; ++i) b.components.push_back(Population{i});
  const bool has_re = p.detuning != 0.0;
  int ix = -1;
  if (has_re) {
    ix = b.size();
    b.components.push_back(ReCoherence{0, 1});
  }
  const int iy = b.size();
  b.components.push_back(ImCoherence{0, 1});
  GeneratorMatrix g;
  g.dim = b.size();
  g.basis = b;
  g.w.assign(static_cast<size_t>(g.dim) * g.dim, 0);
  g.nu.assign(static_cast<size_t>(g.dim) * g.dim, 0);
  auto add = [&g](int from, int to, double r) {
    g.at(to, from) += r;
    g.at(from, from) -= r;
  };
  enum { U = 0, V = 1, Mm = 2, S = 3 };
  add(U, Mm, p.g_um);
  add(Mm, U, p.g_mu);
  add(V, Mm, p.g_vm);
  add(Mm, V, p.g_mv);
  add(U, S, p.G_uS);
  add(S, U, p.G_Su);
  add(V, S, p.G_vS);
  add(S, V, p.G_Sv);
  add(Mm, S, p.G_mS);
  add(S, Mm, p.G_Sm);
  const double lam = 0.5 * (p.g_um + p.G_uS + p.g_vm + p.G_vS);
  g.at(U, iy) -= 2 * p.g;
  g.at(V, iy) += 2 * p.g;
  g.at(iy, U) += p.g;
  g.at(iy, V) -= p.g;
  g.at(iy, iy) -= lam;
  if (has_re) {
    g.at(ix, ix) -= lam;
    g.at(ix, iy) -= p.detuning;
    g.at(iy, ix) += p.detuning;
  }
  // counting on v<->m
  g.nu_at(Mm, V) = +1;
  g.nu_at(V, Mm) = -1;
  g.monitored = Monitor{"", JumpBranch{V, Mm, 0.0}, +1};
  return g;
}

GeneratorMatrix four_state_classical(const Generic4Params& p, double virtual_rate) {
  TrackedBasis b;
  for (int i = 0; i < 4; ++i) b.components.push_back(Population{i});
  GeneratorMatrix g;
  g.dim = 4;
  g.basis = b;
  g.w.assign(16, 0);
  g.nu.assign(16, 0);
  auto add = [&g](int from, int to, double r) {
    g.at(to, from) += r;
    g.at(from, from) -= r;
  };
  enum { U = 0, V = 1, Mm = 2, S = 3 };
  add(U, Mm, p.g_um);
  add(Mm, U, p.g_mu);
  add(V, Mm, p.g_vm);
  add(Mm, V, p.g_mv);
  add(U, S, p.G_uS);
  add(S, U, p.G_Su);
  add(V, S, p.G_vS);
  add(S, V, p.G_Sv);
  add(Mm, S, p.G_mS);
  add(S, Mm, p.G_Sm);
  add(U, V, virtual_rate);
  add(V, U, virtual_rate);
  g.nu_at(Mm, V) = +1;
  g.nu_at(V, Mm) = -1;
  g.monitored = Monitor{"", JumpBranch{V, Mm, 0.0}, +1};
  return g;
}

}  // namespace

Generic4Machine build_generic4(const Generic4Params& params) {
  Generic4Params p = params;
  if (p.unicycle) p.G_vS = p.G_Sv = p.g_um = p.g_mu = 0.0;
  Generic4Machine m;
  m.params = p;
  m.lambda = 0.5 * (p.g_um + p.G_uS + p.g_vm + p.G_vS);
  m.virtual_rate =
      4 * p.g * p.g * (2 * m.lambda) / (4 * p.detuning * p.detuning + 4 * m.lambda * m.lambda);
  m.quantum = four_state_quantum(p);
  m.classical = four_state_classical(p, m.virtual_rate);
  return m;
}

}  // namespace qtm
