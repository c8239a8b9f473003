#include "heatflow/diffusion.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "heatflow/diagnostics.hpp"

namespace heatflow {

PolynomialFamily resolve_domain(const LBOperator& op, PolynomialFamily family, double sigma) {
  family.validate();
  if (family.shifted() && family.b == 0.0) family.b = op.lambda_max_hint.value_or(0.0);
  if (family.shifted() && family.b == 0.0) family.b = estimate_lambda_max(op);
  if (family.kind == FamilyKind::hermite && sigma > 0.0) {
    const double bound = op.lambda_max_hint.value_or(0.0) > 0.0 ? *op.lambda_max_hint : estimate_lambda_max(op);
    if (bound * sigma > 30.0) {
      std::ostringstream msg;
      msg << "Hermite expansion over lambda_max * sigma = " << bound * sigma
          << " > 30; coefficients grow before they decay and the result may be inaccurate";
      warn(msg.str());
    }
  }
  return family;
}

std::vector<ScalarField> iterative_smooth(const LBOperator& op, const ScalarField& f, double sigma_step, int k,
                                          PolynomialFamily family, int m) {
  if (!(sigma_step > 0.0)) throw DomainError("sigma_step must be > 0");
  if (k < 1) throw DomainError("iteration count must be >= 1");
  family = resolve_domain(op, family, sigma_step);
  const ExpansionCoefficients coeffs = heat_coefficients(family, sigma_step, m);
  std::vector<ScalarField> out;
  out.reserve(k);
  ScalarField current = f;
  for (int i = 0; i < k; ++i) {
    current = apply_expansion(op, coeffs, current);
    out.push_back(current);
  }
  return out;
}

FieldStack iterative_stack(const LBOperator& op, const ScalarField& f, double sigma_step, int k,
                           PolynomialFamily family, int m) {
  const auto fields = iterative_smooth(op, f, sigma_step, k, family, m);
  FieldStack stack;
  stack.axis = StackAxis::scales;
  stack.values.resize(f.size(), k);
  for (int i = 0; i < k; ++i) {
    stack.values.col(i) = fields[i];
    stack.labels.push_back(format_double((i + 1) * sigma_step));
  }
  return stack;
}

ScalarField fem_euler_smooth(const LBOperator& op, const ScalarField& f, double sigma, int n_iter,
                             double lambda_max) {
  if (f.size() != op.size()) throw DimensionError("field length does not match the operator");
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  if (n_iter < 1) throw DomainError("iteration count must be >= 1");
  if (sigma == 0.0) return f;
  if (!(lambda_max > 0.0)) lambda_max = op.lambda_max_hint.value_or(0.0);
  if (!(lambda_max > 0.0)) lambda_max = estimate_lambda_max(op);
  const double step = sigma / n_iter;
  if (step * lambda_max >= 2.0) throw StabilityError(step, lambda_max);

  ScalarField g = f;
  ScalarField lap(f.size());
  for (int it = 0; it < n_iter; ++it) {
    apply_lb_into(op, g, lap);
    g.noalias() -= step * lap;
  }
  if (!g.allFinite()) throw NumericError("forward Euler produced non-finite values");
  return g;
}

EigenSystem eigen_reference(const LBOperator& op, Index k) {
  const Index n = op.size();
  if (n > kDenseEigenLimit)
    throw DomainError("dense eigensolve limited to " + std::to_string(kDenseEigenLimit) + " vertices, got " +
                      std::to_string(n));
  if (k < 1 || k > n) throw DomainError("eigenpair count must be in [1, N]");

  const Eigen::MatrixXd c = Eigen::MatrixXd(op.stiffness);
  const Eigen::MatrixXd a = op.areas.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, a, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw NumericError("dense generalized eigensolve failed");

  EigenSystem es;
  es.eigenvalues = solver.eigenvalues().head(k);
  es.eigenvectors = solver.eigenvectors().leftCols(k);
  // Re-normalize against A so Psi^T A Psi = I holds to roundoff.
  for (Index j = 0; j < k; ++j) {
    const double norm = std::sqrt(es.eigenvectors.col(j).cwiseAbs2().dot(op.areas));
    es.eigenvectors.col(j) /= norm;
  }
  return es;
}

EigenSystem eigen_reference(const LBOperator& op) { return eigen_reference(op, op.size()); }

Eigen::VectorXd cosine_diffusion_1d(const Eigen::VectorXd& samples, double sigma, int k_max) {
  const Index n = samples.size();
  if (n < 2) throw DomainError("cosine_diffusion_1d needs at least 2 samples");
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  if (k_max < 0) throw DomainError("k_max must be >= 0");
  const double h = 1.0 / static_cast<double>(n - 1);

  Eigen::VectorXd trap = Eigen::VectorXd::Constant(n, h);
  trap[0] = trap[n - 1] = 0.5 * h;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd psi(n);
  for (int j = 0; j <= k_max; ++j) {
    for (Index i = 0; i < n; ++i)
      psi[i] = j == 0 ? 1.0 : std::numbers::sqrt2 * std::cos(j * std::numbers::pi * static_cast<double>(i) * h);
    const double fj = psi.cwiseProduct(trap).dot(samples);
    out += std::exp(-static_cast<double>(j) * j * std::numbers::pi * std::numbers::pi * sigma) * fj * psi;
  }
  return out;
}

double mse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw DimensionError("mse: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()) + " differ");
  if (a.size() == 0) return 0.0;
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double area_weighted_mean(const LBOperator& op, const Eigen::VectorXd& f) {
  if (f.size() != op.size()) throw DimensionError("field length does not match the operator");
  return op.areas.dot(f) / op.areas.sum();
}

}  // namespace heatflow
