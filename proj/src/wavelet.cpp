#include "heatflow/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "heatflow/diagnostics.hpp"
#include "heatflow/error.hpp"

namespace heatflow {
namespace {

Eigen::VectorXd chebyshev_quadrature(const WaveletKernel& k, double b, int m, int nodes) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m + 1);
  for (int q = 0; q < nodes; ++q) {
    const double theta = std::numbers::pi * (q + 0.5) / nodes;
    const double x = std::cos(theta);
    const double g = spline_kernel(k, 0.5 * b * (x + 1.0) * k.t);
    // cos(n theta) by the Chebyshev recurrence in x.
    double t_prev = 1.0, t_cur = x;
    c[0] += g;
    if (m >= 1) c[1] += g * x;
    for (int n = 2; n <= m; ++n) {
      const double t_next = 2.0 * x * t_cur - t_prev;
      t_prev = t_cur;
      t_cur = t_next;
      c[n] += g * t_cur;
    }
  }
  c *= 2.0 / nodes;
  c[0] *= 0.5;
  return c;
}

}  // namespace

void WaveletKernel::validate() const {
  if (!(alpha > 0.0 && beta > 0.0)) throw DomainError("wavelet alpha and beta must be > 0");
  if (!(x1 > 0.0 && x2 > x1)) throw DomainError("wavelet breakpoints must satisfy 0 < x1 < x2");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("wavelet scale t must be > 0");
}

double kernel_discontinuity(const WaveletKernel& k) {
  auto cubic = [](double x) { return -5.0 + x * (11.0 + x * (-6.0 + x)); };
  // Both power-law branches equal 1 at their breakpoint.
  return std::max(std::abs(cubic(k.x1) - 1.0), std::abs(cubic(k.x2) - 1.0));
}

ExpansionCoefficients wavelet_coefficients(const WaveletKernel& k, double b, int m, int max_nodes) {
  k.validate();
  if (!(b > 0.0)) throw DomainError("domain scale b must be > 0");
  if (m < 0) throw DomainError("expansion degree must be >= 0");
  const double gap = kernel_discontinuity(k);
  if (gap > 1e-12) {
    std::ostringstream msg;
    msg << "wavelet kernel is discontinuous (jump " << gap << ") for x1 = " << k.x1 << ", x2 = " << k.x2;
    warn(msg.str());
  }
  if (max_nodes <= 0) max_nodes = 128 * (m + 1);

  int nodes = 4 * (m + 1);
  Eigen::VectorXd c = chebyshev_quadrature(k, b, m, nodes);
  for (;;) {
    if (2 * nodes > max_nodes) {
      std::ostringstream msg;
      msg << "wavelet coefficients stopped at " << nodes << " quadrature nodes before reaching 1e-10 drift";
      warn(msg.str());
      break;
    }
    nodes *= 2;
    Eigen::VectorXd refined = chebyshev_quadrature(k, b, m, nodes);
    const double drift = (refined - c).cwiseAbs().maxCoeff();
    c = std::move(refined);
    if (drift < 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff())) break;
  }
  return ExpansionCoefficients::from_values(PolynomialFamily::chebyshev(b), std::move(c));
}

ScalarField wavelet_transform(const LBOperator& op, const ScalarField& f, const WaveletKernel& k, int m, double b) {
  if (f.size() != op.size()) throw DimensionError("field length does not match the operator");
  if (!(b > 0.0)) b = op.lambda_max_hint.value_or(0.0);
  if (!(b > 0.0)) b = estimate_lambda_max(op);
  return apply_expansion(op, wavelet_coefficients(k, b, m), f);
}

FieldStack wavelet_stack(const LBOperator& op, const ScalarField& f, const WaveletKernel& base,
                         const std::vector<double>& scales, int m, double b) {
  if (scales.empty()) throw DomainError("wavelet_stack needs at least one scale");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw DomainError("wavelet scales must be positive");
    if (i > 0 && !(scales[i] > scales[i - 1])) throw DomainError("wavelet scales must be strictly increasing");
  }
  if (f.size() != op.size()) throw DimensionError("field length does not match the operator");
  if (!(b > 0.0)) b = op.lambda_max_hint.value_or(0.0);
  if (!(b > 0.0)) b = estimate_lambda_max(op);

  FieldStack stack;
  stack.axis = StackAxis::scales;
  stack.values.resize(f.size(), static_cast<Index>(scales.size()));
  for (std::size_t i = 0; i < scales.size(); ++i) {
    WaveletKernel k = base;
    k.t = scales[i];
    stack.values.col(static_cast<Index>(i)) = wavelet_transform(op, f, k, m, b);
    stack.labels.push_back(format_double(scales[i]));
  }
  return stack;
}

std::vector<double> default_wavelet_scales() {
  std::vector<double> scales;
  for (int i = 2; i <= 11; ++i) scales.push_back(i / 1000.0);
  return scales;
}

}  // namespace heatflow
