#include <doctest.h>

#include <cmath>
#include <random>

#include "qtm/equivalents.hpp"
#include "qtm/fcs.hpp"
#include "qtm/machines.hpp"
#include "qtm/steady.hpp"
#include "qtm/thermo.hpp"

using namespace qtm;

TEST_CASE("amplifier virtual rate: 4g^2/(gamma_h nh + gamma_c nc)") {
  AmplifierParams p;
  p.g = 1e-3;
  MachineSpec s = build_amplifier(p);
  const double nc = bose_occupation(p.beta_c, p.eps2 - p.eps1);
  const double nh = bose_occupation(p.beta_h, p.eps2);
  EquivalenceReport eq = hamiltonian_equivalent(s);
  CHECK(eq.feasible);
  CHECK(eq.virtual_rate ==
        doctest::Approx(4e-6 / (p.gamma_h * nh + p.gamma_c * nc)).epsilon(1e-12));
  // the arithmetic instance: with g = 1e-3 and the damping sum equal to 2e-3,
  // the virtual rate is 2e-3
  CHECK(4e-6 / 2e-3 == doctest::Approx(2e-3));
}

TEST_CASE("fridge virtual rate: 4g^2 / sum_r (2 nbar_r + 1) gamma_r") {
  FridgeParams p;
  MachineSpec s = build_fridge(p);
  const double nc = bose_occupation(p.beta_c, p.eps1);
  const double nm = bose_occupation(p.beta_m, p.eps2);
  const double nh = bose_occupation(p.beta_h, p.eps2 - p.eps1);
  EquivalenceReport eq = hamiltonian_equivalent(s);
  const double denom =
      p.gamma_c * (2 * nc + 1) + p.gamma_m * (2 * nm + 1) + p.gamma_h * (2 * nh + 1);
  CHECK(eq.virtual_rate == doctest::Approx(4 * p.g * p.g / denom).epsilon(1e-12));
}

TEST_CASE("g = 0: equivalent is the original with the coupling stripped") {
  AmplifierParams p;
  p.g = 0.0;
  EquivalenceReport eq = hamiltonian_equivalent(build_amplifier(p));
  CHECK(eq.virtual_rate == 0.0);
  for (const auto& t : eq.equivalent.transitions) CHECK_FALSE(t.bath.empty());
}

TEST_CASE("free-noise transitions are exactly symmetric") {
  AmplifierParams p;
  EquivalenceReport eq = hamiltonian_equivalent(build_amplifier(p));
  double uv = -1, vu = -1;
  for (const auto& t : eq.equivalent.transitions) {
    if (!t.bath.empty()) continue;
    if (t.from == 1 && t.to == 0) uv = t.rate;
    if (t.from == 0 && t.to == 1) vu = t.rate;
  }
  CHECK(uv == vu);
  CHECK(uv == eq.virtual_rate);
}

TEST_CASE("resource equality: baths and energies are bitwise identical") {
  FridgeParams p;
  MachineSpec s = build_fridge(p);
  EquivalenceReport eq = hamiltonian_equivalent(s);
  REQUIRE(eq.equivalent.levels.size() == s.levels.size());
  for (size_t i = 0; i < s.levels.size(); ++i)
    CHECK(eq.equivalent.levels[i].energy == s.levels[i].energy);
  REQUIRE(eq.equivalent.baths.size() == s.baths.size());
  for (size_t i = 0; i < s.baths.size(); ++i) {
    CHECK(eq.equivalent.baths[i].beta == s.baths[i].beta);
    CHECK(eq.equivalent.baths[i].id == s.baths[i].id);
  }
}

TEST_CASE("NIC basis change: rotated rates") {
  SUBCASE("symmetric rates leave a dark beta level") {
    NicParams p;
    p.gamma_c_a = p.gamma_c_b = 1e-3;
    p.gamma_h_a = p.gamma_h_b = 2.5e-3;
    MachineSpec rot = nic_basis_change(build_nic(p));
    // gamma_h^beta = 0: level 3 has no branches left
    for (const auto& j : rot.jumps)
      for (const auto& br : j.branches) {
        CHECK(br.from != 3);
        CHECK(br.to != 3);
      }
    CHECK(rot.coherence_class == CoherenceClass::none);
  }
  SUBCASE("one-sided weights: identity-like rotation") {
    NicParams p;
    p.gamma_c_b = 0.0;
    p.gamma_h_a = 3e-3;
    p.gamma_h_b = 0.7e-3;
    MachineSpec rot = nic_basis_change(build_nic(p));
    const double nh = bose_occupation(p.beta_h, p.eps2 - p.eps1);
    const double nc = bose_occupation(p.beta_c, p.eps2);
    double got_alpha_down_h = 0, got_beta_down_h = 0, got_alpha_down_c = 0;
    for (const auto& j : rot.jumps)
      for (const auto& br : j.branches) {
        if (j.bath == "hot" && br.from == 2 && br.to == 1) got_alpha_down_h = br.rate;
        if (j.bath == "hot" && br.from == 3 && br.to == 1) got_beta_down_h = br.rate;
        if (j.bath == "cold" && br.from == 2 && br.to == 0) got_alpha_down_c = br.rate;
      }
    CHECK(got_alpha_down_h == doctest::Approx(p.gamma_h_a * (nh + 1)).epsilon(1e-12));
    CHECK(got_beta_down_h == doctest::Approx(p.gamma_h_b * (nh + 1)).epsilon(1e-12));
    CHECK(got_alpha_down_c == doctest::Approx(p.gamma_c_a * (nc + 1)).epsilon(1e-12));
  }
  SUBCASE("random draw: rotation preserves currents and cumulants") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 25; ++it) {
      NicParams p;
      p.beta_h = 0.1 + 0.8 * u(rng);
      p.eps1 = 0.3 + 4.0 * u(rng);
      p.gamma_c_a = std::pow(10.0, -4 + 1.5 * u(rng));
      p.gamma_c_b = std::pow(10.0, -4 + 1.5 * u(rng));
      p.gamma_h_a = std::pow(10.0, -4 + 2 * u(rng));
      p.gamma_h_b = std::pow(10.0, -4 + 2 * u(rng));
      p.gamma_01 = 1e-3;
      MachineSpec orig = build_nic(p);
      MachineSpec rot = nic_basis_change(orig);
      CHECK(validate_machine(rot).ok());
      SteadyState po = solve_steady(build_quantum_generator(orig));
      SteadyState pr = solve_steady(build_quantum_generator(rot));
      CurrentsReport co = heat_currents(orig, po);
      CurrentsReport cr = heat_currents(rot, pr);
      for (const auto& [id, q] : co.heat)
        CHECK(std::fabs(q - cr.heat.at(id)) <= 1e-10 * std::max(1e-30, std::fabs(q)));
      GeneratorMatrix go = build_quantum_generator(orig);
      GeneratorMatrix gr = build_quantum_generator(rot);
      CurrentStats so = cumulants(dress_with_counting(go, orig, Monitor{"work", {}, +1}));
      CurrentStats sr = cumulants(dress_with_counting(gr, rot, Monitor{"work", {}, +1}));
      CHECK(std::fabs(so.c1 - sr.c1) <= 1e-9 * std::fabs(so.c1));
      CHECK(std::fabs(so.c2 - sr.c2) <= 1e-8 * so.c2);
    }
  }
}

TEST_CASE("NIC equivalent rates and feasibility") {
  SUBCASE("corrected rates keep the Boltzmann bias exactly") {
    NicParams p;
    p.beta_h = 0.7;
    p.eps1 = 2.0;
    p.gamma_h_a = 6e-4;
    p.gamma_h_b = 4.5e-4;
    MachineSpec rot = nic_basis_change(build_nic(p));
    EquivalenceReport eq = nic_equivalent(rot);
    REQUIRE(eq.feasible);
    const double nh = bose_occupation(p.beta_h, p.eps2 - p.eps1);
    // corrected hot branches: gamma_{k1}/gamma_{1k} = (nh+1)/nh exactly
    for (int k : {2, 3}) {
      double down = -1, up = -1;
      for (const auto& t : eq.equivalent.transitions) {
        if (t.bath != "hot") continue;
        if (t.from == k && t.to == 1) down = t.rate;
        if (t.from == 1 && t.to == k) up = t.rate;
      }
      REQUIRE(down > 0);
      CHECK(down / up == doctest::Approx((nh + 1) / nh).epsilon(1e-12));
    }
  }
  SUBCASE("virtual rate matches the closed form") {
    NicParams p;
    p.beta_h = 0.6;
    p.eps1 = 2.4;
    p.gamma_c_a = 1.5e-3;
    p.gamma_c_b = 0.5e-3;
    p.gamma_h_a = 3e-3;
    p.gamma_h_b = 0.8e-3;
    MachineSpec rot = nic_basis_change(build_nic(p));
    EquivalenceReport eq = nic_equivalent(rot);
    const double nc = bose_occupation(p.beta_c, p.eps2);
    const double nh = bose_occupation(p.beta_h, p.eps2 - p.eps1);
    const double gca = p.gamma_c_a + p.gamma_c_b;
    const double gha = std::pow(std::sqrt(p.gamma_c_a * p.gamma_h_a) +
                                std::sqrt(p.gamma_c_b * p.gamma_h_b), 2) / gca;
    const double ghb = std::pow(std::sqrt(p.gamma_c_a * p.gamma_h_b) -
                                std::sqrt(p.gamma_c_b * p.gamma_h_a), 2) / gca;
    const double expected = (nh + 1) * (nh + 1) * gha * ghb /
                            ((nc + 1) * gca + (nh + 1) * (gha + ghb));
    CHECK(eq.virtual_rate == doctest::Approx(expected).epsilon(1e-11));
  }
  SUBCASE("the dark-branch limit is trivially feasible with zero virtual rate") {
    NicParams p;  // symmetric: gamma_h^beta = 0 after rotation
    p.gamma_c_a = p.gamma_c_b = 1e-3;
    p.gamma_h_a = p.gamma_h_b = 2e-3;
    MachineSpec rot = nic_basis_change(build_nic(p));
    EquivalenceReport eq = nic_equivalent(rot);
    CHECK(eq.feasible);
    CHECK(eq.virtual_rate == 0.0);
    CHECK(eq.corrected_rates.empty());
  }
}

TEST_CASE("NIC feasibility mask equals the three-case inequality cell-for-cell") {
  // 40 x 40 here; the acceptance suite runs the full 100 x 100
  NicParams base;
  base.beta_h = 0.5;
  base.eps1 = 2.0;
  const double nc = bose_occupation(base.beta_c, base.eps2);
  const double nh = bose_occupation(base.beta_h, base.eps2 - base.eps1);
  const int n = 40;
  int feasible_count = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      NicParams p = base;
      p.gamma_h_a = 1e-5 * std::pow(10.0, 3.0 * i / (n - 1));
      p.gamma_h_b = 1e-5 * std::pow(10.0, 3.0 * k / (n - 1));
      const double gca = p.gamma_c_a + p.gamma_c_b;
      const double gha = std::pow(std::sqrt(p.gamma_c_a * p.gamma_h_a) +
                                  std::sqrt(p.gamma_c_b * p.gamma_h_b), 2) / gca;
      const double ghb = std::pow(std::sqrt(p.gamma_c_a * p.gamma_h_b) -
                                  std::sqrt(p.gamma_c_b * p.gamma_h_a), 2) / gca;
      bool expect;
      if (ghb == 0.0)
        expect = gha > 0;
      else if (gha > ghb)
        expect = (gha - ghb) / gca <= (nc + 1) / (nh + 1);
      else
        expect = (ghb - gha) / gca <= (nc + 1) / (nh + 1);
      MachineSpec rot = nic_basis_change(build_nic(p));
      EquivalenceReport eq = nic_equivalent(rot);
      CHECK(eq.feasible == expect);
      feasible_count += eq.feasible;
    }
  CHECK(feasible_count > 0);
  CHECK(feasible_count < n * n);
}

TEST_CASE("current equality for feasible NIC equivalents") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0;
  for (int it = 0; it < 200 && done < 30; ++it) {
    NicParams p;
    p.beta_h = 0.1 + 0.8 * u(rng);
    p.eps1 = 0.3 + 4.0 * u(rng);
    p.gamma_h_a = std::pow(10.0, -5 + 3 * u(rng));
    p.gamma_h_b = std::pow(10.0, -5 + 3 * u(rng));
    p.gamma_01 = 1e-4;
    MachineSpec rot = nic_basis_change(build_nic(p));
    EquivalenceReport eq = nic_equivalent(rot);
    if (!eq.feasible) continue;
    SteadyState pq = solve_steady(build_quantum_generator(rot));
    SteadyState pc = solve_steady(build_classical_generator(eq.equivalent));
    for (const auto& l : rot.levels)
      CHECK(std::fabs(pq.population(l.index) - pc.population(l.index)) <= 1e-10);
    ++done;
  }
  CHECK(done == 30);
}

TEST_CASE("sequential replacement on a sixit-level toy with two couplings") {
  // ladder of 6 levels; bath transitions 1-2, 3-4, 5-0(wrap not used);
  // couplings (0,1) and (2,3), pairwise disjoint
  MachineSpec s;
  s.kind = MachineKind::custom;
  s.levels = {{0, 0.0}, {1, 0.8}, {2, 1.6}, {3, 2.4}, {4, 3.4}, {5, 4.2}};
  s.baths = {{"b1", 1.0, false}, {"b2", 0.5, false}, {"b3", 0.25, false}};
  auto pairrates = [&](double beta, int lo, int hi, double g0) {
    const double de = s.levels[hi].energy - s.levels[lo].energy;
    const double nb = bose_occupation(beta, de);
    return JumpSpec{"", de, {{hi, lo, g0 * (nb + 1)}, {lo, hi, g0 * nb}}};
  };
  JumpSpec j1 = pairrates(1.0, 1, 2, 1.3e-3);
  j1.bath = "b1";
  JumpSpec j2 = pairrates(0.5, 3, 4, 0.9e-3);
  j2.bath = "b2";
  JumpSpec j3 = pairrates(0.25, 4, 5, 1.1e-3);
  j3.bath = "b3";
  JumpSpec j4 = pairrates(0.25, 0, 5, 0.7e-3);
  j4.bath = "b3";
  s.jumps = {j1, j2, j3, j4};
  s.coherence_class = CoherenceClass::none;
  std::vector<CoherentCoupling> couplings = {{1, 0, 1.2e-3, 0.0}, {3, 2, 0.8e-3, 0.0}};

  auto chain = sequential_equivalent(s, couplings);
  REQUIRE(chain.size() == 2);
  // the final machine is fully classical and reproduces the original currents
  MachineSpec original = s;
  original.coupling = couplings[0];
  original.coherence_class = CoherenceClass::hamiltonian_energetic;
  // original machine: both couplings need a two-coherence basis, which the
  // data model does not carry; compare flux through the b1 branch instead,
  // between the one-replaced intermediate and the final classical machine.
  MachineSpec intermediate = s;
  intermediate.coupling = couplings[1];
  intermediate.coherence_class = CoherenceClass::hamiltonian_energetic;
  intermediate.virtual_jumps.push_back({couplings[0].u, couplings[0].v, chain[0].virtual_rate});
  SteadyState pi_mid = solve_steady(build_quantum_generator(intermediate));
  SteadyState pi_fin = solve_steady(build_classical_generator(chain[1].equivalent));
  double flux_mid = 0, flux_fin = 0;
  for (const auto& br : j1.branches) {
    const double sign = s.energy(br.from) > s.energy(br.to) ? 1.0 : -1.0;
    flux_mid += sign * br.rate * pi_mid.population(br.from);
  }
  for (const auto& t : chain[1].equivalent.transitions) {
    if (t.bath != "b1") continue;
    const double sign = s.energy(t.from) > s.energy(t.to) ? 1.0 : -1.0;
    flux_fin += sign * t.rate * pi_fin.population(t.from);
  }
  CHECK(std::fabs(flux_mid - flux_fin) <= 1e-9 * std::max(std::fabs(flux_mid), 1e-30));

  // chain of length one reduces to hamiltonian_equivalent
  auto chain1 = sequential_equivalent(s, {couplings[0]});
  REQUIRE(chain1.size() == 1);
  MachineSpec m1 = s;
  m1.coupling = couplings[0];
  m1.coherence_class = CoherenceClass::hamiltonian_energetic;
  CHECK(chain1[0].virtual_rate == hamiltonian_equivalent(m1).virtual_rate);

  // zero couplings: empty chain
  CHECK(sequential_equivalent(s, {}).empty());

  // overlapping couplings are rejected
  CHECK_THROWS_AS(sequential_equivalent(s, {{1, 0, 1e-3, 0}, {2, 1, 1e-3, 0}}),
                  EquivalenceError);
}
