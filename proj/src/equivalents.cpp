#include "qtm/equivalents.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace qtm {

namespace {

ClassicalMachineSpec classical_shell(const MachineSpec& spec) {
  ClassicalMachineSpec c;
  c.levels = spec.levels;
  c.baths = spec.baths;
  c.kind = spec.kind;
  for (const auto& j : spec.jumps)
    for (const auto& br : j.branches) c.transitions.push_back({br.from, br.to, br.rate, j.bath});
  for (const auto& vj : spec.virtual_jumps) {
    c.transitions.push_back({vj.u, vj.v, vj.rate, ""});
    c.transitions.push_back({vj.v, vj.u, vj.rate, ""});
  }
  return c;
}

}  // namespace

std::string EquivalenceReport::to_json() const {
  nlohmann::json j;
  j["feasible"] = feasible;
  j["virtual_rate"] = virtual_rate;
  j["violated_constraints"] = violated_constraints;
  j["corrected_rates"] = nlohmann::json::object();
  for (const auto& [k, v] : corrected_rates)
    j["corrected_rates"][std::to_string(k.first) + "->" + std::to_string(k.second)] = v;
  j["equivalent"] = nlohmann::json::parse(classical_to_json(equivalent));
  return j.dump(2);
}

EquivalenceReport hamiltonian_equivalent(const MachineSpec& spec) {
  if (spec.coherence_class != CoherenceClass::hamiltonian_energetic &&
      spec.coherence_class != CoherenceClass::hamiltonian_degenerate)
    throw EquivalenceError{"hamiltonian_equivalent requires a hamiltonian-* machine"};
  const auto& cpl = *spec.coupling;
  const double S = 2.0 * spec.coherence_damping();  // sum_i (gamma_ui + gamma_vi)
  const double dd = cpl.detuning;
  const double rate =
      (cpl.g == 0.0) ? 0.0 : 4.0 * cpl.g * cpl.g * S / (4.0 * dd * dd + S * S);

  EquivalenceReport rep;
  rep.virtual_rate = rate;
  rep.feasible = true;
  rep.equivalent = classical_shell(spec);
  if (rate > 0) {
    rep.equivalent.transitions.push_back({cpl.u, cpl.v, rate, ""});
    rep.equivalent.transitions.push_back({cpl.v, cpl.u, rate, ""});
  }
  return rep;
}

MachineSpec nic_basis_change(const MachineSpec& spec) {
  auto cp = spec.collective_pair();
  if (!cp) throw EquivalenceError{"nic_basis_change requires a collective pair"};
  const auto [a, b] = *cp;
  const double esc = std::max(std::fabs(spec.levels.back().energy), 1.0);
  if (std::fabs(spec.energy(a) - spec.energy(b)) > 1e-12 * esc)
    throw EquivalenceError{"collective pair is not degenerate"};

  // Locate the two collective jumps: the cold-side one fixes the rotation.
  // Rates: gamma_c^a := rate(a -> n_c) / (nbar_c + 1) etc. We work directly
  // with branch rates; the rotation mixes the spontaneous-emission weights.
  struct Coll {
    const JumpSpec* jump;
    int other;
    double down_a, down_b, up_a, up_b;
  };
  std::vector<Coll> colls;
  for (const auto& j : spec.jumps) {
    Coll c{&j, -1, 0, 0, 0, 0};
    for (const auto& br : j.branches) {
      if (br.from == a) { c.down_a = br.rate; c.other = br.to; }
      else if (br.from == b) c.down_b = br.rate;
      else if (br.to == a) { c.up_a = br.rate; c.other = br.from; }
      else if (br.to == b) c.up_b = br.rate;
    }
    if (c.other >= 0 && (c.down_a > 0 || c.down_b > 0) && (c.down_a * c.down_b > 0 ||
                                                           c.up_a * c.up_b > 0))
      colls.push_back(c);
    else if (c.other >= 0)
      colls.push_back(c);  // one-sided jump still attached to the pair
  }
  if (colls.size() != 2)
    throw EquivalenceError{"expected exactly two jumps attached to the degenerate pair"};

  // The rotation is anchored on the lower-gap... by convention, on the bath
  // whose branches reach the machine ground state side: pick the jump with the
  // larger gap as the anchor (the cold transitions 0 <-> 2a/2b of the model).
  const Coll& anchor = colls[0].jump->gap >= colls[1].jump->gap ? colls[0] : colls[1];
  const Coll& rest = colls[0].jump->gap >= colls[1].jump->gap ? colls[1] : colls[0];

  // spontaneous weights of the anchor bath: w_a ~ gamma_c^a, w_b ~ gamma_c^b
  const double wa = anchor.down_a, wb = anchor.down_b;
  if (!(wa + wb > 0)) throw EquivalenceError{"anchor collective jump carries no rate"};
  const double wsum = wa + wb;

  // alpha keeps the full anchor coupling; beta decouples from the anchor level
  // anchor:  down_alpha = wa + wb (and up scaled by the same thermal ratio)
  // rest:    down_alpha = (sqrt(wa ra) + sqrt(wb rb))^2 / wsum
  //          down_beta  = (sqrt(wa rb) - sqrt(wb ra))^2 / wsum,  ra/rb its a/b rates
  const double ra = rest.down_a, rb = rest.down_b;
  const double d_alpha_rest = (std::sqrt(wa * ra) + std::sqrt(wb * rb)) *
                              (std::sqrt(wa * ra) + std::sqrt(wb * rb)) / wsum;
  const double d_beta_rest = (std::sqrt(wa * rb) - std::sqrt(wb * ra)) *
                             (std::sqrt(wa * rb) - std::sqrt(wb * ra)) / wsum;
  // thermal up/down ratios are bath properties, identical for a and b branches
  const double anchor_ratio = anchor.down_a > 0 ? anchor.up_a / anchor.down_a
                                                : anchor.up_b / anchor.down_b;
  const double rest_ratio = rest.down_a > 0 ? rest.up_a / rest.down_a
                                            : (rest.down_b > 0 ? rest.up_b / rest.down_b : 0.0);

  MachineSpec out = spec;
  out.jumps.clear();
  const int alpha = a, beta = b;  // reuse the level slots for the rotated pair
  for (const auto& j : spec.jumps) {
    bool attached = false;
    for (const auto& br : j.branches)
      if (br.from == a || br.from == b || br.to == a || br.to == b) attached = true;
    if (!attached) {
      out.jumps.push_back(j);
      continue;
    }
    JumpSpec nj;
    nj.bath = j.bath;
    nj.gap = j.gap;
    if (&j == anchor.jump) {
      nj.branches = {{alpha, anchor.other, wsum},
                     {anchor.other, alpha, wsum * anchor_ratio}};
    } else {
      if (d_alpha_rest > 0) {
        nj.branches.push_back({alpha, rest.other, d_alpha_rest});
        nj.branches.push_back({rest.other, alpha, d_alpha_rest * rest_ratio});
      }
      if (d_beta_rest > 0) {
        nj.branches.push_back({beta, rest.other, d_beta_rest});
        nj.branches.push_back({rest.other, beta, d_beta_rest * rest_ratio});
      }
    }
    if (!nj.branches.empty()) out.jumps.push_back(nj);
  }
  // the symmetric limit fully decouples beta: no collective pair remains
  if (d_beta_rest <= 0.0) out.coherence_class = CoherenceClass::none;
  return out;
}

EquivalenceReport nic_equivalent(const MachineSpec& rotated) {
  auto cp = rotated.collective_pair();
  EquivalenceReport rep;
  if (!cp) {
    // fully decoupled beta level (symmetric limit): nothing to replace
    rep.equivalent = classical_shell(rotated);
    rep.feasible = true;
    rep.virtual_rate = 0.0;
    return rep;
  }
  const auto [u, v] = *cp;

  // gamma_uv^cl = (sum_j sqrt(g_uj g_vj))^2 / sum_j (g_uj + g_vj)
  // corrected:   g_un^cl = g_un - 2 sqrt(g_un g_vn) K / D (and mirrored), with
  // K = sum_j sqrt(g_uj g_vj), D = sum_j (g_uj + g_vj); detailed balance is
  // untouched (the correction is purely kinetic).
  double K = 0, D = 0;
  for (const auto& j : rotated.jumps) {
    std::map<int, std::array<double, 4>> per_other;
    for (const auto& br : j.branches) {
      if (br.from == u) per_other[br.to][0] = br.rate;
      else if (br.from == v) per_other[br.to][1] = br.rate;
      else if (br.to == u) per_other[br.from][2] = br.rate;
      else if (br.to == v) per_other[br.from][3] = br.rate;
    }
    for (const auto& [other, r] : per_other) {
      K += std::sqrt(r[0] * r[1]);
      D += r[0] + r[1];
    }
  }
  const double gate = D > 0 ? K / D : 0.0;  // gamma_uv^*
  rep.virtual_rate = K * gate;              // K^2 / D

  rep.equivalent.levels = rotated.levels;
  rep.equivalent.baths = rotated.baths;
  rep.equivalent.kind = rotated.kind;
  rep.feasible = true;
  for (const auto& j : rotated.jumps) {
    for (const auto& br : j.branches) {
      double rate = br.rate;
      const bool from_pair = (br.from == u || br.from == v);
      const bool to_pair = (br.to == u || br.to == v);
      if (from_pair && !to_pair) {
        const double mate = [&] {
          for (const auto& b2 : j.branches)
            if (b2.to == br.to && b2.from == (br.from == u ? v : u)) return b2.rate;
          return 0.0;
        }();
        const double corr = 2.0 * std::sqrt(br.rate * mate) * gate;
        rate = br.rate - corr;
        if (corr > 0) rep.corrected_rates[{br.from, br.to}] = rate;
      } else if (to_pair && !from_pair) {
        const double mate = [&] {
          for (const auto& b2 : j.branches)
            if (b2.from == br.from && b2.to == (br.to == u ? v : u)) return b2.rate;
          return 0.0;
        }();
        const double corr = 2.0 * std::sqrt(br.rate * mate) * gate;
        rate = br.rate - corr;
        if (corr > 0) rep.corrected_rates[{br.from, br.to}] = rate;
      }
      if (rate < 0) {
        rep.feasible = false;
        std::ostringstream os;
        os << "corrected rate " << br.from << "->" << br.to << " = " << rate << " < 0";
        rep.violated_constraints.push_back(os.str());
      }
      rep.equivalent.transitions.push_back({br.from, br.to, rate, j.bath});
    }
  }
  for (const auto& vj : rotated.virtual_jumps) {
    rep.equivalent.transitions.push_back({vj.u, vj.v, vj.rate, ""});
    rep.equivalent.transitions.push_back({vj.v, vj.u, vj.rate, ""});
  }
  if (rep.virtual_rate > 0) {
    rep.equivalent.transitions.push_back({u, v, rep.virtual_rate, ""});
    rep.equivalent.transitions.push_back({v, u, rep.virtual_rate, ""});
  }
  return rep;
}

std::vector<EquivalenceReport> sequential_equivalent(
    const MachineSpec& base, const std::vector<CoherentCoupling>& couplings) {
  // couplings must be pairwise level-disjoint
  for (size_t i = 0; i < couplings.size(); ++i)
    for (size_t j = i + 1; j < couplings.size(); ++j) {
      const auto& a = couplings[i];
      const auto& b = couplings[j];
      if (a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v)
        throw EquivalenceError{"overlapping couplings are unsupported"};
    }
  std::vector<EquivalenceReport> chain;
  MachineSpec cur = base;
  for (size_t k = 0; k < couplings.size(); ++k) {
    cur.coupling = couplings[k];
    const double du = std::fabs(cur.energy(couplings[k].u) - cur.energy(couplings[k].v));
    cur.coherence_class = du <= 1e-12 * std::max(std::fabs(cur.levels.back().energy), 1.0)
                              ? CoherenceClass::hamiltonian_degenerate
                              : CoherenceClass::hamiltonian_energetic;
    EquivalenceReport rep = hamiltonian_equivalent(cur);
    chain.push_back(rep);
    // intermediate machine: coupling k replaced by its virtual jump
    cur.coupling.reset();
    cur.coherence_class = CoherenceClass::none;
    if (rep.virtual_rate > 0)
      cur.virtual_jumps.push_back({couplings[k].u, couplings[k].v, rep.virtual_rate});
  }
  return chain;
}

EquivalenceReport classical_equivalent(const MachineSpec& spec) {
  switch (spec.coherence_class) {
    case CoherenceClass::hamiltonian_energetic:
    case CoherenceClass::hamiltonian_degenerate:
      return hamiltonian_equivalent(spec);
    case CoherenceClass::noise_induced:
      return nic_equivalent(nic_basis_change(spec));
    case CoherenceClass::none: {
      EquivalenceReport rep;
      rep.equivalent = classical_shell(spec);
      rep.feasible = true;
      return rep;
    }
  }
  throw EquivalenceError{"unreachable"};
}

}  // namespace qtm
