#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "heatflow/error.hpp"
#include "heatflow/laplace_beltrami.hpp"

namespace heatflow {

enum class FamilyKind { chebyshev, jacobi, hermite, laguerre };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(std::string_view name);

/// Orthogonal polynomial family used to expand a spectral weight.
///
/// Chebyshev and Jacobi live on [-1, 1] and are applied to the shifted
/// operator (2/b) Delta - I, so `b` must bound the spectrum. b = 0 means
/// "not yet resolved"; resolve_domain() fills it from the operator.
/// Hermite (physicists') and Laguerre act on Delta directly and ignore b.
struct PolynomialFamily {
  FamilyKind kind = FamilyKind::chebyshev;
  double alpha = 0.0;
  double beta = 0.0;
  double b = 0.0;

  static PolynomialFamily chebyshev(double b = 0.0) { return {FamilyKind::chebyshev, 0.0, 0.0, b}; }
  static PolynomialFamily jacobi(double alpha, double beta, double b = 0.0) {
    return {FamilyKind::jacobi, alpha, beta, b};
  }
  static PolynomialFamily hermite() { return {FamilyKind::hermite, 0.0, 0.0, 0.0}; }
  static PolynomialFamily laguerre() { return {FamilyKind::laguerre, 0.0, 0.0, 0.0}; }

  bool shifted() const noexcept { return kind == FamilyKind::chebyshev || kind == FamilyKind::jacobi; }
  bool resolved() const noexcept { return !shifted() || b > 0.0; }

  /// Throws DomainError for alpha, beta <= -1 (Jacobi) or negative b.
  void validate() const;
};

/// P_{n+1}(x) = (multiplier x + offset) P_n(x) + lag P_{n-1}(x), P_{-1} = 0, P_0 = 1.
struct RecurrenceParams {
  double multiplier;
  double offset;
  double lag;
};

RecurrenceParams recurrence_params(const PolynomialFamily& family, int n);

/// Squared norm of P_n under the family weight on its native domain
/// (Chebyshev: pi for n = 0, pi/2 otherwise).
double orthogonality_constant(const PolynomialFamily& family, int n);

/// Coefficients c_0..c_m of a weight expanded in P_n.
///
/// The values are kept both plainly and as log|c_n| with a sign, because the
/// Hermite and Laguerre coefficients underflow while the polynomials they
/// multiply overflow.
struct ExpansionCoefficients {
  PolynomialFamily family;
  std::optional<double> sigma;  // set for heat-kernel weights
  Eigen::VectorXd coeffs;
  Eigen::VectorXd log_abs;
  Eigen::VectorXi sign;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }

  /// Builds coeffs/log_abs/sign from plain values.
  static ExpansionCoefficients from_values(PolynomialFamily family, Eigen::VectorXd values,
                                           std::optional<double> sigma = std::nullopt);
};

/// (2 - delta_n0) (-1)^n e^{-b sigma/2} I_n(b sigma/2).
ExpansionCoefficients chebyshev_coefficients(double sigma, double b, int m);

/// Gamma(a+b+n+1)/Gamma(a+b+2n+1) (-b sigma)^n 1F1(beta+n+1; alpha+beta+2n+2; -b sigma)
/// for the standard (unnormalized) Jacobi polynomials P_n^(alpha, beta).
ExpansionCoefficients jacobi_coefficients(double sigma, double b, double alpha, double beta, int m);

/// (1/n!) (-sigma/2)^n e^{sigma^2/4}.
ExpansionCoefficients hermite_coefficients(double sigma, int m);

/// sigma^n / (sigma+1)^{n+1}.
ExpansionCoefficients laguerre_coefficients(double sigma, int m);

/// Heat-kernel coefficients of e^{-lambda sigma} for any family. Shifted
/// families need a resolved b.
ExpansionCoefficients heat_coefficients(const PolynomialFamily& family, double sigma, int m);

struct QuadratureOptions {
  int nodes = 0;  // 0 selects 2(m+1); smaller requests are raised to that
};

/// Coefficients of an arbitrary bounded weight on [0, b] by Gauss-Chebyshev
/// (Chebyshev family) or Gauss-Jacobi (Jacobi family) quadrature. Hermite and
/// Laguerre throw DomainError.
ExpansionCoefficients numeric_coefficients(const std::function<double(double)>& weight,
                                           const PolynomialFamily& family, int m,
                                           QuadratureOptions options = {});

/// Sum_n c_n P_n at spectral value lambda (mapped to 2 lambda/b - 1 for
/// shifted families).
double evaluate_expansion(const ExpansionCoefficients& coeffs, double lambda);

struct LambdaMaxOptions {
  int max_iterations = 300;
  double tolerance = 1e-3;
  double safety = 1.01;
  unsigned seed = 20240917u;
};

/// Upper bound on the largest eigenvalue of C psi = lambda A psi.
///
/// Lanczos with full reorthogonalization on A^{-1/2} C A^{-1/2} from a fixed
/// pseudo-random start, stopped once the Ritz residual is below
/// tolerance * theta. Returns safety * (theta + residual bound). Throws
/// DomainError for an operator with no positive spectrum and NumericError if
/// the iteration cap is reached.
double estimate_lambda_max(const LBOperator& op, LambdaMaxOptions options = {});

/// Number of steps between finiteness checks inside the recurrence.
inline constexpr int kRecurrenceGuardInterval = 64;

/// Sum_n c_n P_n(L) f through the three-term recurrence, where `laplacian(in,
/// out)` writes L in into out. Exactly m calls of `laplacian` for degree m.
///
/// The running pair (P_{n-1} f, P_n f) is rescaled by 1e-100 whenever it
/// exceeds 1e100 and the scale is folded into the log-form coefficients, so
/// fast-growing families do not overflow before their coefficients decay.
template <class Laplacian, class Derived>
typename Derived::PlainObject apply_recurrence(Laplacian&& laplacian, const ExpansionCoefficients& coeffs,
                                               const Eigen::MatrixBase<Derived>& f) {
  using Plain = typename Derived::PlainObject;
  const PolynomialFamily& family = coeffs.family;
  if (!family.resolved()) throw DomainError("apply_recurrence: domain scale b is not set");
  const int m = coeffs.degree();
  if (m < 0) throw DomainError("apply_recurrence: empty coefficient vector");

  constexpr double kBig = 1e100;
  constexpr double kShrink = 1e-100;
  const double log_shrink = std::log(kShrink);
  double log_scale = 0.0;  // true P_n f = cur * exp(log_scale)

  Plain prev = Plain::Zero(f.rows(), f.cols());
  Plain cur = f;
  Plain lap(f.rows(), f.cols());
  Plain out = Plain::Zero(f.rows(), f.cols());

  auto accumulate = [&](int n) {
    if (coeffs.sign[n] == 0) return;
    const double weight = coeffs.sign[n] * std::exp(coeffs.log_abs[n] + log_scale);
    if (weight != 0.0) out.noalias() += weight * cur;
  };
  auto check = [&](const Plain& v, int n) {
    if (!v.allFinite())
      throw NumericError("non-finite values in polynomial recurrence at degree " + std::to_string(n) + " (" +
                         to_string(family.kind) + ")");
  };

  accumulate(0);
  for (int n = 0; n < m; ++n) {
    const RecurrenceParams r = recurrence_params(family, n);
    laplacian(cur, lap);
    if (family.shifted()) {
      // x = (2/b) L - I
      prev = (2.0 * r.multiplier / family.b) * lap + (r.offset - r.multiplier) * cur + r.lag * prev;
    } else {
      prev = r.multiplier * lap + r.offset * cur + r.lag * prev;
    }
    std::swap(prev, cur);
    if ((n + 1) % kRecurrenceGuardInterval == 0) check(cur, n + 1);
    if (cur.cwiseAbs().maxCoeff() > kBig) {
      cur *= kShrink;
      prev *= kShrink;
      log_scale -= log_shrink;
    }
    accumulate(n + 1);
  }
  check(out, m);
  return out;
}

/// Sum_n c_n P_n(Delta) f for Delta = A^{-1} C.
template <class Derived>
typename Derived::PlainObject apply_expansion(const LBOperator& op, const ExpansionCoefficients& coeffs,
                                              const Eigen::MatrixBase<Derived>& f) {
  if (f.rows() != op.size())
    throw DimensionError("field has " + std::to_string(f.rows()) + " rows, operator has " +
                         std::to_string(op.size()) + " vertices");
  return apply_recurrence(
      [&op](const auto& in, auto& out) { apply_lb_into(op, in, out); }, coeffs, f);
}

/// {"family", "alpha", "beta", "sigma", "b", "degree", "coeffs"} with
/// round-trip decimal doubles; sigma is null for non-heat weights.
std::string coefficients_to_json(const ExpansionCoefficients& coeffs);
ExpansionCoefficients coefficients_from_json(std::string_view text);

}  // namespace heatflow
