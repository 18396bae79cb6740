#include "qtm/fcs.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "qtm/steady.hpp"

namespace qtm {

namespace {

constexpr int kMaxDim = 12;
// |a_1| below this fraction of the natural scale^(M-1) marks a near-degenerate
// kernel; cumulant extraction would divide by noise.
constexpr double kA1Floor = 1e-14;

}  // namespace

PolyCoeffs char_poly_jets(const GeneratorMatrix& gen) {
  const int n = gen.dim;
  if (n > kMaxDim) throw ConditioningError{"generator dimension exceeds " + std::to_string(kMaxDim)};

  // Faddeev-LeVerrier for p(l) = det(l I - W) = sum c_k l^k over jets;
  // Pol(l) = -det(W - l I) = (-1)^(M+1) p(l).
  std::vector<Jet2> W(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) W[static_cast<size_t>(r) * n + c] = gen.jet_at(r, c);

  std::vector<Jet2> N(static_cast<size_t>(n) * n), M(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) N[static_cast<size_t>(i) * n + j] = Jet2(i == j ? 1.0 : 0.0);

  std::vector<Jet2> c(static_cast<size_t>(n) + 1);
  c[n] = Jet2(1.0);
  for (int k = 1; k <= n; ++k) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet2 s;
        for (int l = 0; l < n; ++l)
          s += W[static_cast<size_t>(i) * n + l] * N[static_cast<size_t>(l) * n + j];
        M[static_cast<size_t>(i) * n + j] = s;
      }
    Jet2 tr;
    for (int i = 0; i < n; ++i) tr += M[static_cast<size_t>(i) * n + i];
    const jreal inv = jreal(-1) / jreal(k);
    c[n - k] = Jet2(tr.v0 * inv, tr.v1 * inv, tr.v2 * inv);
    N = M;
    for (int i = 0; i < n; ++i) N[static_cast<size_t>(i) * n + i] += c[n - k];
  }

  const jreal sign = (n % 2 == 0) ? jreal(-1) : jreal(1);  // (-1)^(M+1)
  PolyCoeffs p;
  p.a.resize(c.size());
  for (size_t i = 0; i < c.size(); ++i)
    p.a[i] = Jet2(sign * c[i].v0, sign * c[i].v1, sign * c[i].v2);
  return p;
}

CurrentStats cumulants_from_coeffs(const PolyCoeffs& p) {
  const int M = p.order();
  if (M < 2) throw ConditioningError{"polynomial order too small"};
  const Jet2& a0 = p.a[0];
  const Jet2& a1 = p.a[1];
  const Jet2& a2 = p.a[2];

  // a_1 = product of the nonzero eigenvalues; its natural scale is
  // |a_2| * |trace| (trace = a_{M-1} up to the monic sign). Collapse of a
  // second eigenvalue onto zero shows up as |a_1| far below that scale.
  const jreal a1mag = std::abs(a1.v0);
  const jreal a1scale = std::abs(a2.v0) * std::abs(p.a[M - 1].v0);
  if (!(a1mag > 0) || (a1scale > 0 && a1mag < jreal(kA1Floor) * a1scale))
    throw ConditioningError{"|a_1| vanishes relative to its scale (near-degenerate kernel)"};

  const jcomplex c1 = -a0.v1 / a1.v0;
  const jcomplex c2 = -(a0.v2 + jreal(2) * a1.v1 * c1 + jreal(2) * a2.v0 * c1 * c1) / a1.v0;

  CurrentStats s;
  s.c1 = static_cast<double>(c1.real());
  s.c2 = static_cast<double>(c2.real());
  s.residual_imag = static_cast<double>(std::max(std::abs(c1.imag()), std::abs(c2.imag())));
  return s;
}

CurrentStats cumulants(const GeneratorMatrix& gen) {
  return cumulants_from_coeffs(char_poly_jets(gen));
}

CurrentStats eigenvalue_fd(const GeneratorMatrix& gen, double h) {
  if (!(h >= 1e-6 && h <= 1e-3)) throw ConditioningError{"fd step h outside [1e-6, 1e-3]"};
  const int n = gen.dim;
  using cld = std::complex<long double>;
  using MatL = Eigen::Matrix<cld, Eigen::Dynamic, Eigen::Dynamic>;

  // Normalize by the rate scale; eigensolver roundoff then sits ~1e-19 on
  // O(1) entries, keeping the second chi-derivative usable at h = 1e-4.
  const long double s0 = gen.scale();

  auto dominant = [&](long double chi) {
    MatL a(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const long double w = gen.at(r, c) / s0;
        const int nu = gen.nu_at(r, c);
        a(r, c) = nu == 0 ? cld(w)
                          : w * std::exp(cld(0.0L, nu * chi));
      }
    Eigen::ComplexEigenSolver<MatL> es(a, false);
    const auto& ev = es.eigenvalues();
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (ev(i).real() > ev(best).real()) best = i;
    // eigenvalue-tracking ambiguity guard (relative to the unit rate scale)
    for (int i = 0; i < n; ++i) {
      if (i == best) continue;
      if (std::abs(ev(i) - ev(best)) < 1e-10L)
        throw ConditioningError{"two eigenvalues within tracking tolerance of the dominant one"};
    }
    return ev(best);
  };

  const long double hl = h;
  const cld lm2 = dominant(-2 * hl), lm1 = dominant(-hl), l0 = dominant(0.0L),
            lp1 = dominant(hl), lp2 = dominant(2 * hl);
  const cld d1 = (lm2 - 8.0L * lm1 + 8.0L * lp1 - lp2) / (12.0L * hl);
  const cld d2 = (-lm2 + 16.0L * lm1 - 30.0L * l0 + 16.0L * lp1 - lp2) / (12.0L * hl * hl);

  // i * lambda' and -lambda'': same orientation as the coefficient route
  const cld c1 = cld(0, 1) * d1 * s0;
  const cld c2 = -d2 * s0;
  CurrentStats s;
  s.c1 = static_cast<double>(c1.real());
  s.c2 = static_cast<double>(c2.real());
  s.residual_imag =
      static_cast<double>(std::max(std::abs(c1.imag()), std::abs(c2.imag())));
  return s;
}

}  // namespace qtm
