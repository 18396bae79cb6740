#include "qtm/mesostate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qtm/machines.hpp"

namespace qtm {

MesostateReduction reduce(const MachineSpec& spec, const SteadyState& full_steady,
                          const MesostatePartition& partition, bool unicycle) {
  if (!spec.coupling) throw MesostateError{"mesostate reduction needs a coherent coupling"};
  const int u = partition.u, v = partition.v, m = partition.m;
  if (u != spec.coupling->u || v != spec.coupling->v)
    throw MesostateError{"(u, v) must be the coherent pair"};

  std::set<int> covered{u, v, m};
  for (int s : partition.S)
    if (!covered.insert(s).second) throw MesostateError{"partition repeats a level"};
  for (const auto& l : spec.levels)
    if (!covered.count(l.index))
      throw MesostateError{"partition misses level " + std::to_string(l.index)};

  auto rate = [&spec](int from, int to) {
    double r = 0.0;
    for (const auto& j : spec.jumps)
      for (const auto& br : j.branches)
        if (br.from == from && br.to == to) r += br.rate;
    return r;
  };

  if (rate(v, m) == 0.0 && rate(m, v) == 0.0)
    throw MesostateError{"monitored level m is not connected to v by a bath transition"};

  double piS = 0.0;
  for (int s : partition.S) piS += full_steady.population(s);

  MesostateReduction red;
  red.partition = partition;
  red.g = spec.coupling->g;
  red.detuning = spec.coupling->detuning;
  red.g_um = rate(u, m);
  red.g_mu = rate(m, u);
  red.g_vm = rate(v, m);
  red.g_mv = rate(m, v);
  auto into_S = [&](int i) {
    double r = 0.0;
    for (int s : partition.S) r += rate(i, s);
    return r;
  };
  auto out_of_S = [&](int i) {
    if (piS <= 0.0) return 0.0;
    double r = 0.0;
    for (int s : partition.S) r += rate(s, i) * full_steady.population(s);
    return r / piS;
  };
  red.G_uS = into_S(u);
  red.G_Su = out_of_S(u);
  red.G_vS = into_S(v);
  red.G_Sv = out_of_S(v);
  red.G_mS = into_S(m);
  red.G_Sm = out_of_S(m);

  Generic4Params p;
  p.g_um = red.g_um;
  p.g_mu = red.g_mu;
  p.g_vm = red.g_vm;
  p.g_mv = red.g_mv;
  p.G_uS = red.G_uS;
  p.G_Su = red.G_Su;
  p.G_vS = red.G_vS;
  p.G_Sv = red.G_Sv;
  p.G_mS = red.G_mS;
  p.G_Sm = red.G_Sm;
  p.g = red.g;
  p.detuning = red.detuning;
  p.unicycle = unicycle;
  Generic4Machine m4 = build_generic4(p);
  if (unicycle) {
    red.g_um = red.g_mu = red.G_vS = red.G_Sv = 0.0;
  }
  red.quantum = std::move(m4.quantum);
  red.classical = std::move(m4.classical);
  return red;
}

}  // namespace qtm
