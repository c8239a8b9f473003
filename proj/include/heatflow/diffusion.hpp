#pragma once

#include <Eigen/Core>

#include <vector>

#include "heatflow/error.hpp"
#include "heatflow/field_io.hpp"
#include "heatflow/laplace_beltrami.hpp"
#include "heatflow/polynomial.hpp"

namespace heatflow {

inline constexpr int kDefaultDegree = 1000;

/// Returns `family` with b filled in from the operator (hint, else
/// estimate_lambda_max) when it is a shifted family with b unset. Warns when a
/// Hermite expansion is asked to cover lambda_max * sigma > 30.
PolynomialFamily resolve_domain(const LBOperator& op, PolynomialFamily family, double sigma = 0.0);

/// Truncated polynomial heat kernel smoothing sum_n c_n P_n(Delta) f.
/// sigma = 0 returns a copy of f.
template <class Derived>
typename Derived::PlainObject heat_smooth(const LBOperator& op, const Eigen::MatrixBase<Derived>& f, double sigma,
                                          PolynomialFamily family = PolynomialFamily::chebyshev(),
                                          int m = kDefaultDegree) {
  if (f.rows() != op.size())
    throw DimensionError("field has " + std::to_string(f.rows()) + " rows, operator has " +
                         std::to_string(op.size()) + " vertices");
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  if (sigma == 0.0) return f;
  family = resolve_domain(op, family, sigma);
  return apply_expansion(op, heat_coefficients(family, sigma, m), f);
}

/// k successive heat_smooth passes with sigma_step; entry i is the field after
/// i + 1 passes (diffusion time (i + 1) * sigma_step).
std::vector<ScalarField> iterative_smooth(const LBOperator& op, const ScalarField& f, double sigma_step, int k,
                                          PolynomialFamily family = PolynomialFamily::chebyshev(),
                                          int m = kDefaultDegree);

/// Packs iterative_smooth output as a stack labelled by diffusion time.
FieldStack iterative_stack(const LBOperator& op, const ScalarField& f, double sigma_step, int k,
                           PolynomialFamily family = PolynomialFamily::chebyshev(), int m = kDefaultDegree);

/// Explicit forward Euler g <- g - delta Delta g with delta = sigma / n_iter.
/// Throws StabilityError before iterating when delta * lambda_max >= 2.
/// `lambda_max` <= 0 means estimate it from the operator.
ScalarField fem_euler_smooth(const LBOperator& op, const ScalarField& f, double sigma, int n_iter,
                             double lambda_max = 0.0);

/// k smallest generalized eigenpairs of C psi = lambda A psi, A-orthonormal.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Index size() const noexcept { return eigenvalues.size(); }
};

inline constexpr Index kDenseEigenLimit = 5000;

/// Dense generalized eigensolve; N above kDenseEigenLimit throws DomainError.
EigenSystem eigen_reference(const LBOperator& op, Index k);
EigenSystem eigen_reference(const LBOperator& op);

/// Psi diag(h(lambda)) Psi^T A f for a spectral filter h.
template <class Filter, class Derived>
typename Derived::PlainObject eigen_filter(const EigenSystem& es, const LBOperator& op, Filter&& h,
                                           const Eigen::MatrixBase<Derived>& f) {
  if (f.rows() != op.size() || es.eigenvectors.rows() != op.size())
    throw DimensionError("eigen_filter: field, operator and eigensystem sizes disagree");
  Eigen::VectorXd weights(es.size());
  for (Index j = 0; j < es.size(); ++j) weights[j] = h(es.eigenvalues[j]);
  const Eigen::MatrixXd projected = es.eigenvectors.transpose() * (op.areas.asDiagonal() * f);
  return es.eigenvectors * (weights.asDiagonal() * projected);
}

template <class Derived>
typename Derived::PlainObject eigen_smooth(const EigenSystem& es, const LBOperator& op,
                                           const Eigen::MatrixBase<Derived>& f, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  return eigen_filter(es, op, [sigma](double lambda) { return std::exp(-lambda * sigma); }, f);
}

/// Weighted cosine series on the uniform grid p_i = i/(n-1):
/// sum_{j<=k_max} e^{-j^2 pi^2 sigma} f_j psi_j with psi_0 = 1,
/// psi_j = sqrt(2) cos(j pi p) and f_j by the trapezoid rule.
Eigen::VectorXd cosine_diffusion_1d(const Eigen::VectorXd& samples, double sigma, int k_max);

/// Mean squared difference.
double mse(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// sum A_i f_i / sum A_i.
double area_weighted_mean(const LBOperator& op, const Eigen::VectorXd& f);

}  // namespace heatflow
