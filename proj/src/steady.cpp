#include "qtm/steady.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>

namespace qtm {

namespace {

constexpr double kTraceTol = 1e-12;
constexpr double kNegativePopTol = 1e-12;
// Relative rank threshold for kernel-dimension detection.
constexpr double kKernelTol = 1e-10;

}  // namespace

double SteadyState::population(int level) const {
  int i = basis.index_of_population(level);
  if (i < 0) throw SteadyStateError{"level not tracked", 1};
  return values[i];
}

std::complex<double> SteadyState::coherence() const {
  double re = 0, im = 0;
  for (int i = 0; i < basis.size(); ++i) {
    if (std::holds_alternative<ReCoherence>(basis.components[i])) re = values[i];
    if (std::holds_alternative<ImCoherence>(basis.components[i])) im = values[i];
  }
  return {re, im};
}

SteadyState solve_steady(const GeneratorMatrix& gen) {
  const int n = gen.dim;
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  // extended precision: sweep generators span many rate decades and the
  // current-equality guarantees downstream are checked at 1e-10
  MatL A(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) A(r, c) = gen.at(r, c);

  // kernel dimension from a full-pivot LU rank estimate
  Eigen::FullPivLU<MatL> rank_lu(A);
  rank_lu.setThreshold(static_cast<long double>(kKernelTol));
  const int kernel_dim = n - static_cast<int>(rank_lu.rank());
  if (kernel_dim != 1)
    throw SteadyStateError{"steady manifold is degenerate (kernel dimension " +
                               std::to_string(kernel_dim) + "); excise dark levels first",
                           kernel_dim};

  // replace the last population row (redundant by trace preservation) with the
  // population-normalization row
  int last_pop = -1;
  for (int i = 0; i < n; ++i)
    if (std::holds_alternative<Population>(gen.basis.components[i])) last_pop = i;
  MatL B = A;
  VecL rhs = VecL::Zero(n);
  for (int c = 0; c < n; ++c)
    B(last_pop, c) = std::holds_alternative<Population>(gen.basis.components[c]) ? 1.0L : 0.0L;
  rhs(last_pop) = 1.0L;

  Eigen::FullPivLU<MatL> lu(B);
  VecL x = lu.solve(rhs);

  // one step of iterative refinement tightens the kernel direction
  VecL r2 = -(B * x - rhs);
  x += lu.solve(r2);

  // residual against the full generator
  const double wnorm = static_cast<double>(A.cwiseAbs().rowwise().sum().maxCoeff());
  const double resid = static_cast<double>((A * x).cwiseAbs().maxCoeff());
  if (!(resid <= 1e-11 * std::max(wnorm, 1e-300)))
    throw SteadyStateError{"steady-state residual " + std::to_string(resid) +
                               " exceeds tolerance",
                           1};

  SteadyState s;
  s.basis = gen.basis;
  s.values.resize(n);
  for (int i = 0; i < n; ++i) s.values[i] = static_cast<double>(x(i));
  double trace = 0;
  for (int i = 0; i < n; ++i) {
    if (!std::holds_alternative<Population>(gen.basis.components[i])) continue;
    double& p = s.values[i];
    if (p < 0) {
      if (p < -kNegativePopTol)
        throw SteadyStateError{"population " + std::to_string(p) +
                                   " below the rounding floor (conditioning)",
                               1};
      p = 0.0;
    }
    if (p > 1.0 && p < 1.0 + kNegativePopTol) p = 1.0;
    trace += p;
  }
  if (std::fabs(trace - 1.0) > kTraceTol)
    throw SteadyStateError{"steady-state trace deviates by " + std::to_string(trace - 1.0), 1};
  return s;
}

std::complex<double> steady_coherence_hamiltonian(const MachineSpec& spec,
                                                  const SteadyState& steady) {
  if (!spec.coupling) throw SteadyStateError{"machine has no coherent coupling", 1};
  // pi_uv = -i g (pi_vv - pi_uu) / (Lambda - i Delta_d); purely imaginary at
  // resonance. (The published closed form carries the opposite global sign,
  // which contradicts the equations of motion it is derived from.)
  const auto& c = *spec.coupling;
  const std::complex<double> den(spec.coherence_damping(), -c.detuning);
  const double dp = steady.population(c.v) - steady.population(c.u);
  return std::complex<double>(0.0, -1.0) * c.g * dp / den;
}

double steady_coherence_nic(const MachineSpec& spec, const SteadyState& steady) {
  auto cp = spec.collective_pair();
  if (!cp) throw SteadyStateError{"machine has no collective pair", 1};
  const auto [u, v] = *cp;
  double num = 0, den = 0;
  for (const auto& j : spec.jumps) {
    std::map<int, std::array<double, 4>> per_other;
    for (const auto& br : j.branches) {
      if (br.from == u) per_other[br.to][0] = br.rate;
      else if (br.from == v) per_other[br.to][1] = br.rate;
      else if (br.to == u) per_other[br.from][2] = br.rate;
      else if (br.to == v) per_other[br.from][3] = br.rate;
    }
    for (const auto& [other, r] : per_other) {
      num += 2.0 * std::sqrt(r[2] * r[3]) * steady.population(other) -
             std::sqrt(r[0] * r[1]) * (steady.population(u) + steady.population(v));
      den += r[0] + r[1];
    }
  }
  if (den == 0) return 0.0;
  return num / den;
}

}  // namespace qtm
