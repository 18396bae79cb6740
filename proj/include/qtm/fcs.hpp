#pragma once

#include <string>
#include <vector>

#include "qtm/generator.hpp"
#include "qtm/jet.hpp"

namespace qtm {

/// Coefficients of Pol(lambda) = -det(W_G(chi) - lambda I) = sum a_n lambda^n,
/// carried as second-order jets in chi.
struct PolyCoeffs {
  std::vector<Jet2> a;  // index 0..M
  int order() const { return static_cast<int>(a.size()) - 1; }
};

/// Mean and variance of the monitored quanta flux. With the default
/// dressing (nu = +1 on absorption gains), c1 counts net quanta *emitted*
/// into the monitored reservoir as positive; flip the monitor's nu for the
/// opposite orientation. c2 is orientation-free.
struct CurrentStats {
  double c1 = 0.0;
  double c2 = 0.0;
  double residual_imag = 0.0;  // largest |imaginary part| discarded
};

struct ConditioningError {
  std::string what;
};

/// Faddeev-LeVerrier recursion over jet arithmetic. dim <= 12.
PolyCoeffs char_poly_jets(const GeneratorMatrix& gen);

/// c1 = -a0'/a1, c2 = -(a0'' + 2 a1' c1 + 2 a2 c1^2)/a1.
CurrentStats cumulants_from_coeffs(const PolyCoeffs& p);

CurrentStats cumulants(const GeneratorMatrix& gen);

/// Independent oracle: dominant eigenvalue of W_G(chi) at chi in
/// {0, +-h, +-2h}, 4th-order central differences for i*lambda' and -lambda''.
CurrentStats eigenvalue_fd(const GeneratorMatrix& gen, double h = 1e-4);

}  // namespace qtm
