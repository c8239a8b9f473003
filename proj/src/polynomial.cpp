#include "heatflow/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "json.hpp"

#include "heatflow/special_functions.hpp"

namespace heatflow {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_degree(int m) {
  if (m < 0) throw DomainError("expansion degree must be >= 0, got " + std::to_string(m));
}

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw DomainError("sigma must be finite and >= 0, got " + std::to_string(sigma));
}

void check_b(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("domain scale b must be finite and > 0");
}

ExpansionCoefficients identity_filter(PolynomialFamily family, int m) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(m + 1);
  values[0] = 1.0;
  return ExpansionCoefficients::from_values(family, std::move(values), 0.0);
}

ExpansionCoefficients from_logs(PolynomialFamily family, double sigma, Eigen::VectorXd log_abs,
                                Eigen::VectorXi sign) {
  ExpansionCoefficients c;
  c.family = family;
  c.sigma = sigma;
  c.coeffs.resize(log_abs.size());
  for (Index n = 0; n < log_abs.size(); ++n) {
    if (sign[n] == 0) log_abs[n] = kNegInf;
    c.coeffs[n] = sign[n] == 0 ? 0.0 : sign[n] * std::exp(log_abs[n]);
  }
  c.log_abs = std::move(log_abs);
  c.sign = std::move(sign);
  return c;
}

// Map from spectral value on [0, b] to the native variable.
double native_variable(const PolynomialFamily& family, double lambda) {
  return family.shifted() ? 2.0 * lambda / family.b - 1.0 : lambda;
}

// Gauss-Jacobi nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_jacobi(double alpha, double beta, int count, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  const double ab = alpha + beta;
  Eigen::VectorXd diag(count);
  Eigen::VectorXd sub(std::max(count - 1, 0));
  for (int n = 0; n < count; ++n) {
    if (n == 0) {
      diag[n] = (beta - alpha) / (ab + 2.0);
    } else {
      const double s = 2.0 * n + ab;
      diag[n] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
  }
  for (int n = 1; n < count; ++n) {
    const double s = 2.0 * n + ab;
    double v;
    if (n == 1)
      v = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      v = 4.0 * n * (n + alpha) * (n + beta) * (n + ab) / (s * s * (s + 1.0) * (s - 1.0));
    sub[n - 1] = std::sqrt(v);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("Gauss-Jacobi eigenproblem failed");
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + log_gamma(alpha + 1.0) + log_gamma(beta + 1.0) -
                              log_gamma(ab + 2.0));
  nodes = solver.eigenvalues();
  weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::chebyshev: return "chebyshev";
    case FamilyKind::jacobi: return "jacobi";
    case FamilyKind::hermite: return "hermite";
    case FamilyKind::laguerre: return "laguerre";
  }
  return "unknown";
}

FamilyKind family_kind_from_string(std::string_view name) {
  if (name == "chebyshev") return FamilyKind::chebyshev;
  if (name == "jacobi") return FamilyKind::jacobi;
  if (name == "hermite") return FamilyKind::hermite;
  if (name == "laguerre") return FamilyKind::laguerre;
  throw DomainError("unknown polynomial family '" + std::string(name) + "'");
}

void PolynomialFamily::validate() const {
  if (kind == FamilyKind::jacobi && !(alpha > -1.0 && beta > -1.0))
    throw DomainError("Jacobi parameters must satisfy alpha, beta > -1");
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("domain scale b must be finite and >= 0");
}

RecurrenceParams recurrence_params(const PolynomialFamily& family, int n) {
  if (n < 0) throw DomainError("recurrence index must be >= 0");
  const double dn = n;
  switch (family.kind) {
    case FamilyKind::chebyshev:
      return {n == 0 ? 1.0 : 2.0, 0.0, -1.0};
    case FamilyKind::hermite:
      return {2.0, 0.0, -2.0 * dn};
    case FamilyKind::laguerre:
      return {-1.0 / (dn + 1.0), (2.0 * dn + 1.0) / (dn + 1.0), -dn / (dn + 1.0)};
    case FamilyKind::jacobi: {
      const double a = family.alpha, b = family.beta, ab = a + b;
      // The general formula is 0/0 at n = 0 when alpha + beta is 0 or -1.
      if (n == 0) return {(ab + 2.0) / 2.0, (a - b) / 2.0, 0.0};
      const double s = 2.0 * dn + ab;
      const double denom = 2.0 * (dn + 1.0) * (dn + ab + 1.0) * s;
      return {(s + 1.0) * (s + 2.0) * s / denom, (s + 1.0) * (a * a - b * b) / denom,
              -2.0 * (dn + a) * (dn + b) * (s + 2.0) / denom};
    }
  }
  throw DomainError("unknown polynomial family");
}

double orthogonality_constant(const PolynomialFamily& family, int n) {
  if (n < 0) throw DomainError("orthogonality index must be >= 0");
  switch (family.kind) {
    case FamilyKind::chebyshev:
      return n == 0 ? std::numbers::pi : std::numbers::pi / 2.0;
    case FamilyKind::jacobi: {
      const double a = family.alpha, b = family.beta, ab = a + b;
      if (n == 0)
        return std::exp((ab + 1.0) * std::log(2.0) + log_gamma(a + 1.0) + log_gamma(b + 1.0) - log_gamma(ab + 2.0));
      return std::exp((ab + 1.0) * std::log(2.0) + log_gamma(n + a + 1.0) + log_gamma(n + b + 1.0) -
                      std::log(2.0 * n + ab + 1.0) - log_gamma(n + ab + 1.0) - log_gamma(n + 1.0));
    }
    case FamilyKind::hermite:
      return std::exp(0.5 * std::log(std::numbers::pi) + n * std::log(2.0) + log_gamma(n + 1.0));
    case FamilyKind::laguerre:
      return 1.0;
  }
  throw DomainError("unknown polynomial family");
}

ExpansionCoefficients ExpansionCoefficients::from_values(PolynomialFamily family, Eigen::VectorXd values,
                                                         std::optional<double> sigma) {
  ExpansionCoefficients c;
  c.family = family;
  c.sigma = sigma;
  c.log_abs.resize(values.size());
  c.sign.resize(values.size());
  for (Index n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n])) throw NumericError("non-finite expansion coefficient at n = " + std::to_string(n));
    c.sign[n] = values[n] > 0.0 ? 1 : (values[n] < 0.0 ? -1 : 0);
    c.log_abs[n] = c.sign[n] == 0 ? kNegInf : std::log(std::abs(values[n]));
  }
  c.coeffs = std::move(values);
  return c;
}

ExpansionCoefficients chebyshev_coefficients(double sigma, double b, int m) {
  check_sigma(sigma);
  check_b(b);
  check_degree(m);
  const auto family = PolynomialFamily::chebyshev(b);
  if (sigma == 0.0) return identity_filter(family, m);
  const Eigen::VectorXd bessel = scaled_bessel_i(m, 0.5 * b * sigma);
  Eigen::VectorXd values(m + 1);
  for (int n = 0; n <= m; ++n) values[n] = (n == 0 ? 1.0 : 2.0) * (n % 2 ? -1.0 : 1.0) * bessel[n];
  return ExpansionCoefficients::from_values(family, std::move(values), sigma);
}

ExpansionCoefficients jacobi_coefficients(double sigma, double b, double alpha, double beta, int m) {
  check_sigma(sigma);
  check_b(b);
  check_degree(m);
  const auto family = PolynomialFamily::jacobi(alpha, beta, b);
  family.validate();
  if (sigma == 0.0) return identity_filter(family, m);

  const double ab = alpha + beta;
  const double z = b * sigma;
  Eigen::VectorXd log_abs(m + 1);
  Eigen::VectorXi sign(m + 1);
  for (int n = 0; n <= m; ++n) {
    const double upper = ab + 2.0 * n + 2.0;
    if (upper <= 0.0 && upper == std::floor(upper))
      throw DomainError("Jacobi coefficient hits a Gamma pole at n = " + std::to_string(n));
    const double log_ratio = n == 0 ? 0.0 : log_gamma(ab + n + 1.0) - log_gamma(ab + 2.0 * n + 1.0);
    const SignedLog hyper = log_kummer_1f1(beta + n + 1.0, upper, -z);
    log_abs[n] = log_ratio + n * std::log(z) + hyper.log_abs;
    sign[n] = hyper.sign * (n % 2 ? -1 : 1);
  }
  return from_logs(family, sigma, std::move(log_abs), std::move(sign));
}

ExpansionCoefficients hermite_coefficients(double sigma, int m) {
  check_sigma(sigma);
  check_degree(m);
  const auto family = PolynomialFamily::hermite();
  if (sigma == 0.0) return identity_filter(family, m);
  Eigen::VectorXd log_abs(m + 1);
  Eigen::VectorXi sign(m + 1);
  for (int n = 0; n <= m; ++n) {
    log_abs[n] = n * std::log(0.5 * sigma) - log_gamma(n + 1.0) + 0.25 * sigma * sigma;
    sign[n] = n % 2 ? -1 : 1;
  }
  return from_logs(family, sigma, std::move(log_abs), std::move(sign));
}

ExpansionCoefficients laguerre_coefficients(double sigma, int m) {
  check_sigma(sigma);
  check_degree(m);
  const auto family = PolynomialFamily::laguerre();
  if (sigma == 0.0) return identity_filter(family, m);
  Eigen::VectorXd log_abs(m + 1);
  Eigen::VectorXi sign = Eigen::VectorXi::Ones(m + 1);
  for (int n = 0; n <= m; ++n) log_abs[n] = n * std::log(sigma) - (n + 1.0) * std::log1p(sigma);
  return from_logs(family, sigma, std::move(log_abs), std::move(sign));
}

ExpansionCoefficients heat_coefficients(const PolynomialFamily& family, double sigma, int m) {
  family.validate();
  switch (family.kind) {
    case FamilyKind::chebyshev: return chebyshev_coefficients(sigma, family.b, m);
    case FamilyKind::jacobi: return jacobi_coefficients(sigma, family.b, family.alpha, family.beta, m);
    case FamilyKind::hermite: return hermite_coefficients(sigma, m);
    case FamilyKind::laguerre: return laguerre_coefficients(sigma, m);
  }
  throw DomainError("unknown polynomial family");
}

ExpansionCoefficients numeric_coefficients(const std::function<double(double)>& weight,
                                           const PolynomialFamily& family, int m, QuadratureOptions options) {
  check_degree(m);
  family.validate();
  if (!family.shifted())
    throw DomainError("numeric coefficients need a finite domain; " + to_string(family.kind) + " is unsupported");
  check_b(family.b);
  const int count = std::max(options.nodes, 2 * (m + 1));

  Eigen::VectorXd values = Eigen::VectorXd::Zero(m + 1);
  if (family.kind == FamilyKind::chebyshev) {
    // Discrete orthogonality of cos(n theta) at the Chebyshev-Gauss nodes.
    std::vector<double> theta(count), g(count);
    for (int k = 0; k < count; ++k) {
      theta[k] = std::numbers::pi * (k + 0.5) / count;
      g[k] = weight(0.5 * family.b * (std::cos(theta[k]) + 1.0));
      if (!std::isfinite(g[k])) throw NumericError("weight is not finite at a quadrature node");
    }
    for (int n = 0; n <= m; ++n) {
      double sum = 0.0;
      for (int k = 0; k < count; ++k) sum += g[k] * std::cos(n * theta[k]);
      values[n] = (n == 0 ? 1.0 : 2.0) * sum / count;
    }
  } else {
    Eigen::VectorXd nodes, weights;
    gauss_jacobi(family.alpha, family.beta, count, nodes, weights);
    std::vector<double> p_prev(count, 0.0), p_cur(count, 1.0), gw(count);
    for (int k = 0; k < count; ++k) {
      gw[k] = weights[k] * weight(0.5 * family.b * (nodes[k] + 1.0));
      if (!std::isfinite(gw[k])) throw NumericError("weight is not finite at a quadrature node");
    }
    for (int n = 0; n <= m; ++n) {
      double sum = 0.0;
      for (int k = 0; k < count; ++k) sum += gw[k] * p_cur[k];
      values[n] = sum / orthogonality_constant(family, n);
      const RecurrenceParams r = recurrence_params(family, n);
      for (int k = 0; k < count; ++k) {
        const double next = (r.multiplier * nodes[k] + r.offset) * p_cur[k] + r.lag * p_prev[k];
        p_prev[k] = p_cur[k];
        p_cur[k] = next;
      }
    }
  }
  return ExpansionCoefficients::from_values(family, std::move(values));
}

double evaluate_expansion(const ExpansionCoefficients& coeffs, double lambda) {
  const PolynomialFamily& family = coeffs.family;
  if (!family.resolved()) throw DomainError("evaluate_expansion: domain scale b is not set");
  const double x = native_variable(family, lambda);
  double prev = 0.0, cur = 1.0, log_scale = 0.0, sum = 0.0;
  for (int n = 0; n <= coeffs.degree(); ++n) {
    if (coeffs.sign[n] != 0) sum += coeffs.sign[n] * std::exp(coeffs.log_abs[n] + log_scale) * cur;
    const RecurrenceParams r = recurrence_params(family, n);
    const double next = (r.multiplier * x + r.offset) * cur + r.lag * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e100) {
      cur *= 1e-100;
      prev *= 1e-100;
      log_scale += 100.0 * std::log(10.0);
    }
  }
  return sum;
}

double estimate_lambda_max(const LBOperator& op, LambdaMaxOptions options) {
  const Index n = op.size();
  if (n == 0) throw DomainError("estimate_lambda_max: empty operator");
  if ((op.areas.array() <= 0.0).any()) throw DomainError("estimate_lambda_max: areas must be positive");
  const Eigen::VectorXd inv_sqrt_area = op.areas.cwiseSqrt().cwiseInverse();
  const int max_steps = static_cast<int>(std::min<Index>(n, options.max_iterations));

  std::mt19937 rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  v.normalize();

  Eigen::MatrixXd basis(n, max_steps);
  std::vector<double> alpha, beta;
  double theta = 0.0, residual = std::numeric_limits<double>::infinity();
  double last_theta = 0.0;
  int stagnant = 0;
  bool done = false;

  for (int j = 0; j < max_steps && !done; ++j) {
    basis.col(j) = v;
    Eigen::VectorXd w = inv_sqrt_area.cwiseProduct(op.stiffness * inv_sqrt_area.cwiseProduct(v));
    alpha.push_back(v.dot(w));
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd proj = basis.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis.leftCols(j + 1) * proj;
    }
    const double b_next = w.norm();
    const int k = j + 1;

    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    theta = tri.eigenvalues()[k - 1];
    residual = b_next * std::abs(tri.eigenvectors()(k - 1, k - 1));

    const double scale = std::max(std::abs(theta), std::numeric_limits<double>::min());
    if (b_next <= 1e-12 * std::max(scale, diag.cwiseAbs().maxCoeff())) {
      residual = 0.0;  // invariant subspace: Ritz values are exact
      done = true;
    } else if (theta > 0.0 && residual <= options.tolerance * theta) {
      done = true;
    } else {
      stagnant = (j > 0 && std::abs(theta - last_theta) <= 1e-6 * std::abs(theta)) ? stagnant + 1 : 0;
      if (j >= 20 && stagnant >= 5) done = true;
    }
    last_theta = theta;
    beta.push_back(b_next);
    if (!done) v = w / b_next;
  }

  if (!(theta > 0.0))
    throw DomainError("operator has no positive spectrum (zero stiffness matrix?)");
  if (!done)
    throw NumericError("spectral bound did not converge in " + std::to_string(max_steps) +
                       " Lanczos steps (theta = " + std::to_string(theta) + ", residual = " +
                       std::to_string(residual) + ")");
  return options.safety * (theta + std::min(residual, 0.1 * theta));
}

std::string coefficients_to_json(const ExpansionCoefficients& coeffs) {
  nlohmann::ordered_json j;
  j["family"] = to_string(coeffs.family.kind);
  j["alpha"] = coeffs.family.alpha;
  j["beta"] = coeffs.family.beta;
  j["sigma"] = coeffs.sigma ? nlohmann::ordered_json(*coeffs.sigma) : nlohmann::ordered_json(nullptr);
  j["b"] = coeffs.family.b;
  j["degree"] = coeffs.degree();
  j["coeffs"] = std::vector<double>(coeffs.coeffs.data(), coeffs.coeffs.data() + coeffs.coeffs.size());
  return j.dump(2);
}

ExpansionCoefficients coefficients_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PolynomialFamily family;
    family.kind = family_kind_from_string(j.at("family").get<std::string>());
    family.alpha = j.value("alpha", 0.0);
    family.beta = j.value("beta", 0.0);
    family.b = j.value("b", 0.0);
    family.validate();
    const auto values = j.at("coeffs").get<std::vector<double>>();
    if (j.contains("degree") && j.at("degree").get<int>() + 1 != static_cast<int>(values.size()))
      throw ParseError("coefficients", 1, "degree does not match the coefficient count");
    std::optional<double> sigma;
    if (j.contains("sigma") && !j.at("sigma").is_null()) sigma = j.at("sigma").get<double>();
    return ExpansionCoefficients::from_values(family, Eigen::Map<const Eigen::VectorXd>(values.data(), values.size()),
                                              sigma);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("coefficients", 1, e.what());
  }
}

}  // namespace heatflow
