#pragma once

#include <Eigen/Core>

#include <vector>

#include "heatflow/field_io.hpp"
#include "heatflow/laplace_beltrami.hpp"
#include "heatflow/polynomial.hpp"

namespace heatflow {

/// Branch used above x2. `decaying` is x2^beta x^-beta, the band-pass form
/// that meets the cubic with matching slope; `growing` is x2^-beta x^beta.
enum class SplineTail { decaying, growing };

/// Cubic-spline band-pass kernel g(x t): a power law x1^-alpha x^alpha below
/// x1, the cubic -5 + 11x - 6x^2 + x^3 on [x1, x2], and a power-law tail.
/// The cubic is fixed, so only the default breakpoints give a continuous g.
struct WaveletKernel {
  double alpha = 2.0;
  double beta = 2.0;
  double x1 = 1.0;
  double x2 = 2.0;
  double t = 0.01;
  SplineTail tail = SplineTail::decaying;

  void validate() const;
};

template <class T>
T spline_kernel(const WaveletKernel& k, T x) {
  using std::pow;
  if (x < T(k.x1)) return pow(x / T(k.x1), T(k.alpha));
  if (x <= T(k.x2)) return T(-5) + x * (T(11) + x * (T(-6) + x));
  if (k.tail == SplineTail::decaying) return pow(T(k.x2) / x, T(k.beta));
  return pow(x / T(k.x2), T(k.beta));
}

/// Largest jump of g at x1 and x2. Zero (to roundoff) for the defaults.
double kernel_discontinuity(const WaveletKernel& k);

/// Chebyshev coefficients of lambda -> g(lambda t) on [0, b]. Starts at
/// 4(m+1) quadrature nodes and doubles until the coefficients move by less
/// than 1e-10 max(1, |c|_inf), up to `max_nodes` (0 selects 128(m+1)).
ExpansionCoefficients wavelet_coefficients(const WaveletKernel& k, double b, int m, int max_nodes = 0);

/// Polynomial approximation of Psi diag(g(lambda t)) Psi^T A f. b <= 0 means
/// use the operator's spectral bound.
ScalarField wavelet_transform(const LBOperator& op, const ScalarField& f, const WaveletKernel& k, int m,
                              double b = 0.0);

/// One transform per scale in `scales` (positive, strictly increasing),
/// labelled by t. The spectral bound is computed once.
FieldStack wavelet_stack(const LBOperator& op, const ScalarField& f, const WaveletKernel& base,
                         const std::vector<double>& scales, int m, double b = 0.0);

/// t = 0.002, 0.003, ..., 0.011.
std::vector<double> default_wavelet_scales();

}  // namespace heatflow
