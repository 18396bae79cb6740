#include <doctest.h>

#include <cmath>
#include <random>

#include "qtm/fcs.hpp"
#include "qtm/machines.hpp"
#include "qtm/mesostate.hpp"
#include "qtm/steady.hpp"

using namespace qtm;

namespace {

// 6-level testbed: coherent pair (0,1), monitor m = 2, mesostate S = {3,4,5}.
// When `uniform_S` is set, every S level carries identical exit rates, which
// makes the aggregation lumpable (the reduced chain is exactly Markov).
MachineSpec six_level(bool uniform_S, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  MachineSpec s;
  s.kind = MachineKind::custom;
  s.levels = {{0, 0.0}, {1, 0.0}, {2, 1.0}, {3, 2.0}, {4, 2.0}, {5, 2.0}};
  s.baths = {{"bm", 1.0, false}, {"bs", 0.6, false}, {"bu", 0.3, false}};
  auto add_pair = [&s](const char* bath, int lo, int hi, double g0, double beta) {
    const double de = s.levels[hi].energy - s.levels[lo].energy;
    const double nb = bose_occupation(beta, de);
    for (auto& j : s.jumps)
      if (j.bath == bath && j.gap == de) {
        j.branches.push_back({hi, lo, g0 * (nb + 1)});
        j.branches.push_back({lo, hi, g0 * nb});
        return;
      }
    s.jumps.push_back({bath, de, {{hi, lo, g0 * (nb + 1)}, {lo, hi, g0 * nb}}});
  };
  // u = 0 and v = 1 are degenerate; m = 2 couples to v; S couples to u and m
  add_pair("bm", 1, 2, 1e-3 * u(rng), 1.0);
  const double gSu = 1e-3 * (uniform_S ? 1.1 : u(rng));
  const double gSm = 1e-3 * (uniform_S ? 0.7 : u(rng));
  for (int sl : {3, 4, 5}) {
    add_pair("bu", 0, sl, uniform_S ? gSu : 1e-3 * u(rng), 0.3);
    add_pair("bs", 2, sl, uniform_S ? gSm : 1e-3 * u(rng), 0.6);
  }
  s.coupling = CoherentCoupling{0, 1, 1.3e-3, 0.0};
  s.coherence_class = CoherenceClass::hamiltonian_degenerate;
  return s;
}

CurrentStats monitored_vm(const MachineSpec& s, const GeneratorMatrix& g) {
  Monitor mon{"", JumpBranch{1, 2, 0.0}, +1};
  return cumulants(dress_with_counting(g, s, mon));
}

}  // namespace

TEST_CASE("aggregation invariants and c1 consistency on the six-level machine") {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 10; ++it) {
    MachineSpec s = six_level(false, rng);
    REQUIRE(validate_machine(s).ok());
    GeneratorMatrix g = build_quantum_generator(s);
    SteadyState pi = solve_steady(g);
    MesostatePartition part{0, 1, 2, {3, 4, 5}};
    MesostateReduction red = reduce(s, pi, part);
    // population aggregation
    SteadyState pr = solve_steady(red.quantum);
    CHECK(std::fabs(pr.values[0] - pi.population(0)) < 1e-10);
    CHECK(std::fabs(pr.values[1] - pi.population(1)) < 1e-10);
    CHECK(std::fabs(pr.values[2] - pi.population(2)) < 1e-10);
    const double piS = pi.population(3) + pi.population(4) + pi.population(5);
    CHECK(std::fabs(pr.values[3] - piS) < 1e-10);
    // c1 on the monitored v<->m branch is exact
    CurrentStats full = monitored_vm(s, g);
    CurrentStats redu = cumulants(red.quantum);
    CHECK(std::fabs(full.c1 - redu.c1) <= 1e-8 * std::fabs(full.c1));
  }
}

TEST_CASE("variance consistency holds exactly for a lumpable mesostate") {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 5; ++it) {
    MachineSpec s = six_level(true, rng);
    GeneratorMatrix g = build_quantum_generator(s);
    SteadyState pi = solve_steady(g);
    MesostateReduction red = reduce(s, pi, MesostatePartition{0, 1, 2, {3, 4, 5}});
    CurrentStats full = monitored_vm(s, g);
    CurrentStats redu = cumulants(red.quantum);
    CHECK(std::fabs(full.c2 - redu.c2) <= 1e-6 * full.c2);
  }
}

TEST_CASE("singleton mesostate: reduction is the machine itself") {
  std::mt19937_64 rng(14);
  MachineSpec s = six_level(false, rng);
  // drop levels 4, 5 by zeroing their rates: emulate N = 4 with S = {3}
  for (auto& j : s.jumps) {
    auto& b = j.branches;
    b.erase(std::remove_if(b.begin(), b.end(),
                           [](const JumpBranch& x) { return x.from > 3 || x.to > 3; }),
            b.end());
  }
  s.jumps.erase(std::remove_if(s.jumps.begin(), s.jumps.end(),
                               [](const JumpSpec& j) { return j.branches.empty(); }),
                s.jumps.end());
  s.levels.resize(4);
  GeneratorMatrix g = build_quantum_generator(s);
  SteadyState pi = solve_steady(g);
  MesostateReduction red = reduce(s, pi, MesostatePartition{0, 1, 2, {3}});
  // effective rates equal plain rates (no weighting for a single member)
  double gu3 = 0, g3u = 0;
  for (const auto& j : s.jumps)
    for (const auto& br : j.branches) {
      if (br.from == 0 && br.to == 3) gu3 = br.rate;
      if (br.from == 3 && br.to == 0) g3u = br.rate;
    }
  CHECK(red.G_uS == doctest::Approx(gu3).epsilon(1e-14));
  CHECK(red.G_Su == doctest::Approx(g3u).epsilon(1e-14));
  CurrentStats full = monitored_vm(s, g);
  CurrentStats redu = cumulants(red.quantum);
  CHECK(std::fabs(full.c1 - redu.c1) <= 1e-10 * std::fabs(full.c1));
  CHECK(std::fabs(full.c2 - redu.c2) <= 1e-10 * full.c2);
}

TEST_CASE("unicycle flag zeroes the designated rates") {
  std::mt19937_64 rng(21);
  MachineSpec s = six_level(false, rng);
  GeneratorMatrix g = build_quantum_generator(s);
  SteadyState pi = solve_steady(g);
  MesostateReduction red = reduce(s, pi, MesostatePartition{0, 1, 2, {3, 4, 5}}, true);
  CHECK(red.g_um == 0.0);
  CHECK(red.g_mu == 0.0);
  CHECK(red.G_vS == 0.0);
  CHECK(red.G_Sv == 0.0);
  // the reduced quantum generator has no u<->m or v<->S entries
  CHECK(static_cast<double>(red.quantum.at(2, 0)) == 0.0);
  CHECK(static_cast<double>(red.quantum.at(3, 1)) == 0.0);
}

TEST_CASE("partition errors") {
  std::mt19937_64 rng(30);
  MachineSpec s = six_level(false, rng);
  GeneratorMatrix g = build_quantum_generator(s);
  SteadyState pi = solve_steady(g);
  // m not connected to v
  CHECK_THROWS_AS(reduce(s, pi, MesostatePartition{0, 1, 3, {2, 4, 5}}), MesostateError);
  // partition misses a level
  CHECK_THROWS_AS(reduce(s, pi, MesostatePartition{0, 1, 2, {3, 4}}), MesostateError);
}
