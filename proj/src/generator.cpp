#include "qtm/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace qtm {

int TrackedBasis::population_count() const {
  int n = 0;
  for (const auto& c : components)
    if (std::holds_alternative<Population>(c)) ++n;
  return n;
}

int TrackedBasis::index_of_population(int level) const {
  for (int i = 0; i < size(); ++i)
    if (auto* p = std::get_if<Population>(&components[i]); p && p->level == level) return i;
  return -1;
}

std::string TrackedBasis::label(int i) const {
  const auto& c = components[i];
  if (auto* p = std::get_if<Population>(&c)) return "p" + std::to_string(p->level);
  if (auto* r = std::get_if<ReCoherence>(&c))
    return "Re" + std::to_string(r->u) + "," + std::to_string(r->v);
  auto* im = std::get_if<ImCoherence>(&c);
  return "Im" + std::to_string(im->u) + "," + std::to_string(im->v);
}

jreal GeneratorMatrix::scale() const {
  jreal m = 0;
  for (jreal x : w) m = std::max(m, x < 0 ? -x : x);
  return m > 0 ? m : jreal(1);
}

std::string GeneratorMatrix::dump() const {
  std::ostringstream os;
  os << dim << "\n";
  char buf[120];
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      Jet2 j = jet_at(r, c);
      std::snprintf(buf, sizeof buf, "%.17Lg %.17Lg %.17Lg", (long double)j.v0.real(),
                    (long double)j.v1.real(), (long double)j.v2.real());
      os << buf << (c + 1 == dim ? "" : "  ");
    }
    os << "\n";
  }
  return os.str();
}

namespace {

GeneratorMatrix make_generator(TrackedBasis basis) {
  GeneratorMatrix g;
  g.dim = basis.size();
  g.basis = std::move(basis);
  g.w.assign(static_cast<size_t>(g.dim) * g.dim, 0);
  g.nu.assign(static_cast<size_t>(g.dim) * g.dim, 0);
  return g;
}

void add_rate(GeneratorMatrix& g, int from_slot, int to_slot, double rate) {
  g.at(to_slot, from_slot) += rate;
  g.at(from_slot, from_slot) -= rate;
}

}  // namespace

GeneratorMatrix build_quantum_generator(const MachineSpec& spec) {
  const int n = spec.num_levels();
  TrackedBasis basis;
  for (int i = 0; i < n; ++i) basis.components.push_back(Population{i});

  std::pair<int, int> pair{-1, -1};
  int ix = -1, iy = -1;

  if (spec.coupling) {
    pair = {spec.coupling->u, spec.coupling->v};
    if (spec.coupling->detuning != 0.0) {
      ix = basis.size();
      basis.components.push_back(ReCoherence{pair.first, pair.second});
    }
    iy = basis.size();
    basis.components.push_back(ImCoherence{pair.first, pair.second});
  } else if (spec.coherence_class == CoherenceClass::noise_induced) {
    auto cp = spec.collective_pair();
    if (!cp) throw GeneratorError{"noise-induced machine without a collective pair"};
    pair = *cp;
    ix = basis.size();
    basis.components.push_back(ReCoherence{pair.first, pair.second});
  }

  GeneratorMatrix g = make_generator(std::move(basis));

  for (const auto& j : spec.jumps)
    for (const auto& br : j.branches) add_rate(g, br.from, br.to, br.rate);
  for (const auto& vj : spec.virtual_jumps) {
    add_rate(g, vj.u, vj.v, vj.rate);
    add_rate(g, vj.v, vj.u, vj.rate);
  }

  if (spec.coupling) {
    const int iu = g.basis.index_of_population(pair.first);
    const int iv = g.basis.index_of_population(pair.second);
    const double gc = spec.coupling->g;
    const double dd = spec.coupling->detuning;
    const double lam = spec.coherence_damping();
    // d rho_uu = ... - 2 g Im(rho_uv),  d rho_vv = ... + 2 g Im(rho_uv)
    g.at(iu, iy) -= 2 * gc;
    g.at(iv, iy) += 2 * gc;
    // d Im(rho_uv) = Delta_d Re(rho_uv) - Lambda Im(rho_uv) - g (rho_vv - rho_uu)
    g.at(iy, iu) += gc;
    g.at(iy, iv) -= gc;
    g.at(iy, iy) -= lam;
    if (ix >= 0) {
      g.at(ix, ix) -= lam;
      g.at(ix, iy) -= dd;
      g.at(iy, ix) += dd;
    }
  } else if (spec.coherence_class == CoherenceClass::noise_induced) {
    const auto [u, v] = pair;
    const int iu = g.basis.index_of_population(u);
    const int iv = g.basis.index_of_population(v);
    // Per neighbor level n of the pair:
    //   d rho_nn += 2 sqrt(g_un g_vn) x
    //   d rho_uu -= sqrt(g_un g_vn) x   (likewise vv)
    //   d x += sqrt(g_nu g_nv) rho_nn - (1/2) sqrt(g_un g_vn) (rho_uu + rho_vv)
    // and the coherence damps at (1/2) sum_n (g_un + g_vn).
    double damping = 0.0;
    for (const auto& j : spec.jumps) {
      std::map<int, std::array<double, 4>> per_other;  // n -> {u->n, v->n, n->u, n->v}
      for (const auto& br : j.branches) {
        if (br.from == u) per_other[br.to][0] = br.rate;
        else if (br.from == v) per_other[br.to][1] = br.rate;
        else if (br.to == u) per_other[br.from][2] = br.rate;
        else if (br.to == v) per_other[br.from][3] = br.rate;
      }
      for (const auto& [other, r] : per_other) {
        const int in_ = g.basis.index_of_population(other);
        const double s_down = std::sqrt(r[0] * r[1]);
        const double s_up = std::sqrt(r[2] * r[3]);
        if (s_down > 0) {
          g.at(in_, ix) += 2 * s_down;
          g.at(iu, ix) -= s_down;
          g.at(iv, ix) -= s_down;
          g.at(ix, iu) -= 0.5 * s_down;
          g.at(ix, iv) -= 0.5 * s_down;
        }
        if (s_up > 0) g.at(ix, in_) += s_up;
        damping += r[0] + r[1];
      }
    }
    for (const auto& vj : spec.virtual_jumps)
      if (vj.u == u || vj.v == u || vj.u == v || vj.v == v) damping += vj.rate;
    g.at(ix, ix) -= 0.5 * damping;
  }
  return g;
}

GeneratorMatrix build_classical_generator(const ClassicalMachineSpec& spec) {
  TrackedBasis basis;
  for (int i = 0; i < spec.num_levels(); ++i) basis.components.push_back(Population{i});
  GeneratorMatrix g = make_generator(std::move(basis));
  for (const auto& t : spec.transitions) {
    if (t.rate < 0) throw GeneratorError{"negative classical rate"};
    add_rate(g, t.from, t.to, t.rate);
  }
  return g;
}

namespace {

void dress_branch(GeneratorMatrix& g, int from, int to, int nu_dir) {
  const int fs = g.basis.index_of_population(from);
  const int ts = g.basis.index_of_population(to);
  if (fs < 0 || ts < 0) throw GeneratorError{"monitored branch outside tracked populations"};
  if (g.at(ts, fs) == 0 && g.nu_at(ts, fs) == 0)
    throw GeneratorError{"monitored branch " + std::to_string(from) + "->" + std::to_string(to) +
                         " not found in generator"};
  g.nu_at(ts, fs) = static_cast<int8_t>(g.nu_at(ts, fs) + nu_dir);
}

}  // namespace

GeneratorMatrix dress_with_counting(const GeneratorMatrix& gen, const MachineSpec& spec,
                                    const Monitor& monitor) {
  GeneratorMatrix g = gen;
  g.monitored = monitor;
  if (monitor.branch) {
    dress_branch(g, monitor.branch->from, monitor.branch->to, monitor.nu);
    dress_branch(g, monitor.branch->to, monitor.branch->from, -monitor.nu);
    return g;
  }
  auto cp = spec.collective_pair();
  bool found = false;
  for (const auto& j : spec.jumps) {
    if (j.bath != monitor.bath) continue;
    for (const auto& br : j.branches) {
      if (cp && (br.from == cp->first || br.from == cp->second || br.to == cp->first ||
                 br.to == cp->second))
        throw GeneratorError{
            "monitoring a collective bath on the coherent pair is unsupported"};
      const bool upward = spec.energy(br.to) > spec.energy(br.from);
      dress_branch(g, br.from, br.to, upward ? monitor.nu : -monitor.nu);
      found = true;
    }
  }
  if (!found) throw GeneratorError{"monitored bath " + monitor.bath + " has no branches"};
  return g;
}

GeneratorMatrix dress_with_counting(const GeneratorMatrix& gen, const ClassicalMachineSpec& spec,
                                    const Monitor& monitor) {
  GeneratorMatrix g = gen;
  g.monitored = monitor;
  if (monitor.branch) {
    dress_branch(g, monitor.branch->from, monitor.branch->to, monitor.nu);
    dress_branch(g, monitor.branch->to, monitor.branch->from, -monitor.nu);
    return g;
  }
  bool found = false;
  for (const auto& t : spec.transitions) {
    if (t.bath != monitor.bath) continue;
    // an entry holds a single counting phase; a parallel unmonitored branch
    // on the same level pair would be silently dressed along
    double parallel = 0.0;
    for (const auto& o : spec.transitions)
      if (o.from == t.from && o.to == t.to && o.bath != monitor.bath) parallel += o.rate;
    if (parallel > 0)
      throw GeneratorError{"monitored transition shares a level pair with an unmonitored one"};
    const bool upward = spec.energy(t.to) > spec.energy(t.from);
    dress_branch(g, t.from, t.to, upward ? monitor.nu : -monitor.nu);
    found = true;
  }
  if (!found) throw GeneratorError{"monitored bath " + monitor.bath + " has no transitions"};
  return g;
}

std::vector<std::complex<double>> evaluate_at_chi(const GeneratorMatrix& gen, double chi) {
  std::vector<std::complex<double>> m(static_cast<size_t>(gen.dim) * gen.dim);
  for (int r = 0; r < gen.dim; ++r)
    for (int c = 0; c < gen.dim; ++c) {
      const double w = static_cast<double>(gen.at(r, c));
      const int nu = gen.nu_at(r, c);
      m[static_cast<size_t>(r) * gen.dim + c] =
          nu == 0 ? std::complex<double>(w)
                  : w * std::exp(std::complex<double>(0.0, nu * chi));
    }
  return m;
}

}  // namespace qtm
