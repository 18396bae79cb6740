#pragma once

#include <complex>

namespace qtm {

// Scalar for counting-field bookkeeping is 80-bit extended precision: the
// characteristic-polynomial recursion on 9x9 generators with rate ratios
// spanning ~7 decades loses the fluctuation-ratio sign in plain double.
using jreal = long double;
using jcomplex = std::complex<jreal>;

/// Second-order jet in the counting field chi: value, i*d/dchi and -d^2/dchi^2
/// at chi = 0, propagated through +,-,*,/ by truncated Taylor rules.
struct Jet2 {
  jcomplex v0{};
  jcomplex v1{};
  jcomplex v2{};

  constexpr Jet2() = default;
  constexpr Jet2(jcomplex a) : v0(a) {}
  constexpr Jet2(jcomplex a, jcomplex b, jcomplex c) : v0(a), v1(b), v2(c) {}

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v0 + b.v0, a.v1 + b.v1, a.v2 + b.v2};
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v0 - b.v0, a.v1 - b.v1, a.v2 - b.v2};
  }
  friend Jet2 operator-(const Jet2& a) { return {-a.v0, -a.v1, -a.v2}; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    // v1,v2 behave as first/second derivatives in t = -i*chi
    return {a.v0 * b.v0,
            a.v1 * b.v0 + a.v0 * b.v1,
            a.v2 * b.v0 + jreal(2) * a.v1 * b.v1 + a.v0 * b.v2};
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b);

  Jet2& operator+=(const Jet2& o) { return *this = *this + o; }
  Jet2& operator-=(const Jet2& o) { return *this = *this - o; }
  Jet2& operator*=(const Jet2& o) { return *this = *this * o; }

  friend bool operator==(const Jet2& a, const Jet2& b) {
    return a.v0 == b.v0 && a.v1 == b.v1 && a.v2 == b.v2;
  }
};

/// Division by a jet with vanishing value has no truncated-Taylor inverse.
struct JetDivisionError {};

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  if (b.v0 == jcomplex(0)) throw JetDivisionError{};
  const jcomplex q0 = a.v0 / b.v0;
  const jcomplex q1 = (a.v1 - q0 * b.v1) / b.v0;
  const jcomplex q2 = (a.v2 - jreal(2) * q1 * b.v1 - q0 * b.v2) / b.v0;
  return {q0, q1, q2};
}

/// Jets of rate * e^{i nu chi}: the only chi dependence a dressed generator
/// entry carries. nu in {-1, 0, +1}.
inline Jet2 phase_jet(jreal rate, int nu) {
  return {rate, -jreal(nu) * rate, jreal(nu) * jreal(nu) * rate};
}

}  // namespace qtm
