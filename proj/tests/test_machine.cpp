#include <doctest.h>

#include <cmath>
#include <random>

#include "qtm/machine.hpp"
#include "qtm/machines.hpp"

using namespace qtm;

TEST_CASE("three-level amplifier with balance-constructed rates validates") {
  AmplifierParams p;
  MachineSpec s = build_amplifier(p);
  auto rep = validate_machine(s);
  CHECK(rep.ok());
}

TEST_CASE("perturbing one rate of a balanced pair is flagged") {
  AmplifierParams p;
  MachineSpec s = build_amplifier(p);
  for (auto& j : s.jumps)
    for (auto& br : j.branches)
      if (br.from == 1 && br.to == 2) br.rate *= 1.5;
  auto rep = validate_machine(s);
  CHECK_FALSE(rep.ok());
  bool found = false;
  for (const auto& e : rep.errors)
    if (e.find("detailed balance") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("branch declared under the wrong gap is flagged") {
  AmplifierParams p;
  MachineSpec s = build_amplifier(p);
  // move the hot 0->2 branch under the cold jump (gap eps2 - eps1)
  JumpBranch stray{0, 2, 1e-4};
  for (auto& j : s.jumps)
    if (j.bath == "cold") j.branches.push_back(stray);
  auto rep = validate_machine(s);
  bool found = false;
  for (const auto& e : rep.errors)
    if (e.find("gap") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("each transition belongs to exactly one bath") {
  AmplifierParams p;
  MachineSpec s = build_amplifier(p);
  s.jumps.push_back({"cold", p.eps2, {{2, 0, 1e-5}, {0, 2, 1e-5 * std::exp(-p.beta_c * p.eps2)}}});
  auto rep = validate_machine(s);
  bool found = false;
  for (const auto& e : rep.errors)
    if (e.find("more than one bath") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("bose occupation") {
  CHECK(bose_occupation(1.0, std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bose_occupation(1.0, 50.0) < 2e-22);
  // (e^5 - 1)^{-1}, frozen from a 50-digit evaluation
  CHECK(bose_occupation(1.0, 5.0) == doctest::Approx(0.006783654906304231).epsilon(1e-15));
  CHECK_THROWS_AS(bose_occupation(-1.0, 2.0), DomainError);
  CHECK_THROWS_AS(bose_occupation(1.0, 0.0), DomainError);
}

TEST_CASE("thermal rates") {
  auto r = thermal_rates(1e-3, 1.0);
  CHECK(r.down == doctest::Approx(2e-3).epsilon(1e-15));
  CHECK(r.up == doctest::Approx(1e-3).epsilon(1e-15));
  auto z = thermal_rates(0.7, 0.0);
  CHECK(z.down == 0.7);
  CHECK(z.up == 0.0);
  CHECK_THROWS_AS(thermal_rates(-1.0, 0.5), DomainError);
}

TEST_CASE("work reservoirs take equal up/down rates directly") {
  NicParams p;
  MachineSpec s = build_nic(p);
  CHECK(validate_machine(s).ok());
  for (const auto& j : s.jumps) {
    if (j.bath != "work") continue;
    REQUIRE(j.branches.size() == 2);
    CHECK(j.branches[0].rate == j.branches[1].rate);
  }
  // unequal work rates are invalid
  for (auto& j : s.jumps)
    if (j.bath == "work") j.branches[0].rate *= 1.01;
  CHECK_FALSE(validate_machine(s).ok());
}

TEST_CASE("detailed balance property over random machines") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    AmplifierParams p;
    p.beta_h = 0.05 + 0.9 * u(rng);
    p.eps1 = 0.2 + 4.5 * u(rng);
    p.gamma_c = std::pow(10.0, -5 + 3 * u(rng));
    p.gamma_h = std::pow(10.0, -5 + 3 * u(rng));
    p.g = std::pow(10.0, -5 + 3 * u(rng));
    MachineSpec s = build_amplifier(p);
    CHECK(validate_machine(s).ok());
    for (const auto& j : s.jumps) {
      const BathSpec& b = s.bath(j.bath);
      for (const auto& br : j.branches) {
        double de = s.energy(br.from) - s.energy(br.to);
        if (de <= 0) continue;  // handle the downward one of each pair
        for (const auto& rev : j.branches) {
          if (rev.from != br.to || rev.to != br.from) continue;
          double ratio = rev.rate / br.rate;
          CHECK(std::fabs(ratio - std::exp(-b.beta * de)) <= 1e-12 * ratio);
        }
      }
    }
  }
}

TEST_CASE("validate_machine is idempotent and side-effect free") {
  MachineSpec s = build_fridge(FridgeParams{});
  const std::string before = machine_to_json(s);
  auto r1 = validate_machine(s);
  auto r2 = validate_machine(s);
  CHECK(machine_to_json(s) == before);
  CHECK(r1.errors == r2.errors);
  CHECK(r1.warnings == r2.warnings);
}

TEST_CASE("serialization round-trip is bit-identical") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    NicParams p;
    p.beta_h = 0.05 + 0.9 * u(rng);
    p.eps1 = 0.2 + 4.0 * u(rng);
    p.gamma_h_a = std::pow(10.0, -5 + 3 * u(rng));
    p.gamma_h_b = std::pow(10.0, -5 + 3 * u(rng));
    MachineSpec s = build_nic(p);
    MachineSpec t = machine_from_json(machine_to_json(s));
    REQUIRE(t.levels.size() == s.levels.size());
    for (size_t i = 0; i < s.levels.size(); ++i) CHECK(t.levels[i].energy == s.levels[i].energy);
    REQUIRE(t.jumps.size() == s.jumps.size());
    for (size_t i = 0; i < s.jumps.size(); ++i) {
      CHECK(t.jumps[i].gap == s.jumps[i].gap);
      REQUIRE(t.jumps[i].branches.size() == s.jumps[i].branches.size());
      for (size_t k = 0; k < s.jumps[i].branches.size(); ++k)
        CHECK(t.jumps[i].branches[k].rate == s.jumps[i].branches[k].rate);
    }
    CHECK(t.coherence_class == s.coherence_class);
  }
}

TEST_CASE("weak-coupling advisory fires on overdriven machines") {
  AmplifierParams p;
  p.g = 0.4;  // comparable to the smallest gap
  MachineSpec s = build_amplifier(p);
  auto rep = validate_machine(s);
  CHECK(rep.ok());
  CHECK_FALSE(rep.warnings.empty());
}
