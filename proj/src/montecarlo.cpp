#include "qtm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace qtm {

namespace {

struct BatchAccumulator {
  int batches;
  double batch_duration;
  std::vector<double> counts;  // per-batch net counts
  explicit BatchAccumulator(int b, double total) : batches(b), batch_duration(total / b) {
    counts.assign(b, 0.0);
  }
  void add(double t, double inc) {
    int k = std::min(batches - 1, static_cast<int>(t / batch_duration));
    counts[k] += inc;
  }
  void finalize(TrajectoryStats& s) const {
    s.batches = batches;
    double mean = 0;
    for (double c : counts) mean += c;
    const double total = mean;
    mean /= batches;
    double var = 0;
    for (double c : counts) var += (c - mean) * (c - mean);
    var /= (batches - 1);
    s.c1 = total / (batch_duration * batches);
    s.c2 = var / batch_duration;  // Var[N_b]/T_b estimates Var[Ndot]
    s.c1_err = std::sqrt(var / batches) / batch_duration;
    s.c2_err = s.c2 * std::sqrt(2.0 / (batches - 1));
  }
};

}  // namespace

TrajectoryStats gillespie(const ClassicalMachineSpec& spec, const Monitor& monitor,
                          double duration, uint64_t seed, int batches) {
  if (!(duration > 0)) throw MonteCarloError{"duration must be positive"};
  if (batches < 20) throw MonteCarloError{"batch count must be >= 20"};
  struct Move {
    int from, to;
    double rate;
    int count;  // increment when fired
  };
  std::vector<Move> moves;
  for (const auto& t : spec.transitions) {
    if (t.rate <= 0) continue;
    int count = 0;
    if (monitor.branch) {
      if (t.from == monitor.branch->from && t.to == monitor.branch->to) count = -monitor.nu;
      if (t.from == monitor.branch->to && t.to == monitor.branch->from) count = +monitor.nu;
    } else if (t.bath == monitor.bath) {
      const bool upward = spec.energy(t.to) > spec.energy(t.from);
      count = upward ? -monitor.nu : +monitor.nu;  // emission counted +nu-wise
    }
    moves.push_back({t.from, t.to, t.rate, count});
  }
  if (moves.empty()) throw MonteCarloError{"classical machine has no transitions"};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const int n = spec.num_levels();
  std::vector<std::vector<int>> by_state(n);
  for (size_t i = 0; i < moves.size(); ++i) by_state[moves[i].from].push_back(int(i));

  int state = 0;
  TrajectoryStats stats;
  stats.duration = duration;
  BatchAccumulator acc(batches, duration);
  const double burn = duration / 16.0;
  double t = -burn;
  while (true) {
    double total = 0;
    for (int mi : by_state[state]) total += moves[mi].rate;
    if (total <= 0) throw MonteCarloError{"absorbing state " + std::to_string(state)};
    t += -std::log(1.0 - uni(rng)) / total;
    if (t >= duration) break;
    double r = uni(rng) * total;
    int chosen = by_state[state].back();
    for (int mi : by_state[state]) {
      r -= moves[mi].rate;
      if (r <= 0) {
        chosen = mi;
        break;
      }
    }
    state = moves[chosen].to;
    if (t >= 0 && moves[chosen].count != 0) {
      stats.net_count += moves[chosen].count;
      acc.add(t, moves[chosen].count);
    }
    if (t >= 0) ++stats.total_jumps;
  }
  acc.finalize(stats);
  return stats;
}

TrajectoryStats quantum_jump_unravel(const MachineSpec& spec, const Monitor& monitor,
                                     double duration, uint64_t seed, int batches) {
  if (!(duration > 0)) throw MonteCarloError{"duration must be positive"};
  if (batches < 20) throw MonteCarloError{"batch count must be >= 20"};
  using cd = std::complex<double>;
  const int n = spec.num_levels();

  struct Channel {
    std::vector<cd> op;  // n x n
    int count;
  };
  std::vector<Channel> channels;
  auto op_at = [n](std::vector<cd>& m, int r, int c) -> cd& {
    return m[static_cast<size_t>(r) * n + c];
  };
  for (const auto& j : spec.jumps) {
    // one collective operator per direction
    for (int dir = 0; dir < 2; ++dir) {
      std::vector<cd> m(static_cast<size_t>(n) * n, cd(0));
      int nbranch = 0;
      int count = 0, matched = 0;
      for (const auto& br : j.branches) {
        const bool downward = spec.energy(br.to) < spec.energy(br.from);
        if ((dir == 0) != downward) continue;
        if (br.rate <= 0) continue;
        op_at(m, br.to, br.from) += std::sqrt(br.rate);
        ++nbranch;
        if (monitor.branch) {
          if (br.from == monitor.branch->from && br.to == monitor.branch->to) {
            count = -monitor.nu;
            ++matched;
          } else if (br.from == monitor.branch->to && br.to == monitor.branch->from) {
            count = +monitor.nu;
            ++matched;
          }
        } else if (j.bath == monitor.bath) {
          count = downward ? +monitor.nu : -monitor.nu;  // all branches share these
        }
      }
      if (monitor.branch && matched > 0 && nbranch > 1)
        throw MonteCarloError{"single-branch monitor on a collective channel is ill-defined"};
      if (nbranch > 0) channels.push_back({std::move(m), count});
    }
  }
  for (const auto& vj : spec.virtual_jumps) {
    for (int dir = 0; dir < 2; ++dir) {
      std::vector<cd> m(static_cast<size_t>(n) * n, cd(0));
      op_at(m, dir ? vj.u : vj.v, dir ? vj.v : vj.u) = std::sqrt(vj.rate);
      channels.push_back({std::move(m), 0});
    }
  }
  if (channels.empty()) throw MonteCarloError{"machine has no jump channels"};

  // H_eff = V_I - (i/2) sum L^dag L
  std::vector<cd> heff(static_cast<size_t>(n) * n, cd(0));
  if (spec.coupling) {
    const auto& c = *spec.coupling;
    op_at(heff, c.u, c.v) += c.g;
    op_at(heff, c.v, c.u) += c.g;
    op_at(heff, c.u, c.u) += -c.detuning;
  }
  double max_rate = 0.0;
  for (const auto& ch : channels) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cd s(0);
        for (int k = 0; k < n; ++k)
          s += std::conj(ch.op[static_cast<size_t>(k) * n + a]) *
               ch.op[static_cast<size_t>(k) * n + b];
        heff[static_cast<size_t>(a) * n + b] += cd(0, -0.5) * s;
        if (a == b) max_rate = std::max(max_rate, s.real());
      }
  }
  if (spec.coupling) max_rate = std::max(max_rate, std::fabs(spec.coupling->g));
  if (max_rate <= 0) throw MonteCarloError{"vanishing jump rates"};

  const double dt0 = 1e-2 / max_rate;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  std::vector<cd> psi(n, cd(0)), tmp(n);
  psi[0] = 1.0;

  auto apply_step = [&](std::vector<cd>& v, double dt) {
    // v <- (1 - i dt H_eff) v
    for (int a = 0; a < n; ++a) {
      cd s(0);
      for (int b = 0; b < n; ++b) s += heff[static_cast<size_t>(a) * n + b] * v[b];
      tmp[a] = v[a] - cd(0, dt) * s;
    }
    v = tmp;
  };
  auto norm2 = [&](const std::vector<cd>& v) {
    double s = 0;
    for (const cd& x : v) s += std::norm(x);
    return s;
  };

  TrajectoryStats stats;
  stats.duration = duration;
  BatchAccumulator acc(batches, duration);
  const double burn = duration / 16.0;
  double t = -burn;
  double target = uni(rng);
  while (t < duration) {
    std::vector<cd> prev = psi;
    double dt = dt0;
    apply_step(psi, dt);
    double n2 = norm2(psi);
    if (n2 > target) {
      t += dt;
      continue;
    }
    // bisect the jump time inside [0, dt]
    double lo = 0, hi = dt;
    for (int it = 0; it < 40 && (hi - lo) > 1e-6 * dt0; ++it) {
      const double mid = 0.5 * (lo + hi);
      std::vector<cd> probe = prev;
      apply_step(probe, mid);
      if (norm2(probe) > target)
        lo = mid;
      else
        hi = mid;
    }
    const double tj = 0.5 * (lo + hi);
    psi = prev;
    apply_step(psi, tj);
    t += tj;
    // choose the channel
    std::vector<double> w(channels.size(), 0.0);
    double wsum = 0;
    std::vector<std::vector<cd>> jumped(channels.size());
    for (size_t k = 0; k < channels.size(); ++k) {
      std::vector<cd> v(n, cd(0));
      for (int a = 0; a < n; ++a) {
        cd s(0);
        for (int b = 0; b < n; ++b) s += channels[k].op[static_cast<size_t>(a) * n + b] * psi[b];
        v[a] = s;
      }
      w[k] = norm2(v);
      wsum += w[k];
      jumped[k] = std::move(v);
    }
    if (!(wsum > 0)) throw MonteCarloError{"norm underflow before jump resolution"};
    double r = uni(rng) * wsum;
    size_t chosen = channels.size() - 1;
    for (size_t k = 0; k < channels.size(); ++k) {
      r -= w[k];
      if (r <= 0) {
        chosen = k;
        break;
      }
    }
    const double nj = std::sqrt(w[chosen]);
    for (int a = 0; a < n; ++a) psi[a] = jumped[chosen][a] / nj;
    if (t >= 0) {
      ++stats.total_jumps;
      if (channels[chosen].count != 0) {
        stats.net_count += channels[chosen].count;
        acc.add(t, channels[chosen].count);
      }
    }
    target = uni(rng);
  }
  acc.finalize(stats);
  return stats;
}

}  // namespace qtm
