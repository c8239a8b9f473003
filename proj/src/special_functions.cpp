#include "heatflow/special_functions.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "heatflow/error.hpp"

namespace heatflow {
namespace {

constexpr double kRescaleAbove = 1e250;
constexpr double kRescaleFactor = 1e-250;

bool is_nonpositive_integer(double v) { return v <= 0.0 && std::floor(v) == v; }

// Series for 1F1(a; b; z) with z >= 0, carried with a running log scale so the
// partial sums never overflow. Terminates once three consecutive terms
// contribute less than 1e-16 relative to the sum.
SignedLog hypergeometric_series(double a, double b, double z) {
  constexpr long kMaxTerms = 2'000'000;
  constexpr double kTiny = 1e-16;
  const double log_rescale = -std::log(kRescaleFactor);

  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  int small_run = 0;
  long k = 0;
  for (; k < kMaxTerms; ++k) {
    term *= (a + k) / (b + k) * z / static_cast<double>(k + 1);
    sum += term;
    if (term == 0.0) break;  // a is a nonpositive integer: finite polynomial
    if (std::abs(term) < kTiny * std::abs(sum)) {
      if (++small_run == 3) break;
    } else {
      small_run = 0;
    }
    if (std::abs(sum) > kRescaleAbove || std::abs(term) > kRescaleAbove) {
      sum *= kRescaleFactor;
      term *= kRescaleFactor;
      log_scale += log_rescale;
    }
  }
  if (k == kMaxTerms || !std::isfinite(sum)) {
    std::ostringstream msg;
    msg << "1F1 series did not converge: a=" << a << " b=" << b << " z=" << z
        << " terms=" << k << " last term=" << term << " partial sum=" << sum;
    throw NumericError(msg.str());
  }
  if (sum == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
  return {std::log(std::abs(sum)) + log_scale, sum > 0 ? 1 : -1};
}

}  // namespace

double SignedLog::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

Eigen::VectorXd scaled_bessel_i(int n_max, double x) {
  if (n_max < 0) throw DomainError("scaled_bessel_i: n_max must be >= 0");
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("scaled_bessel_i: x must be finite and >= 0");

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_max + 1);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x < 1e-100) {
    // Leading series term; x^2 corrections are below double resolution.
    double term = 1.0;
    out[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) {
      term *= 0.5 * x / n;
      out[n] = term;
    }
    return out;
  }

  const int start =
      n_max + 30 + static_cast<int>(std::ceil(std::sqrt(120.0 * (x + 1.0))));
  double next = 0.0;     // v_{n+1}
  double current = 1.0;  // v_n, starting at n = start
  double norm = 0.0;     // v_0 + 2 sum_{n>=1} v_n over the visited range
  for (int n = start; n >= 0; --n) {
    if (n <= n_max) out[n] = current;
    norm += (n == 0 ? 1.0 : 2.0) * current;
    if (n == 0) break;
    const double previous = 2.0 * n / x * current + next;
    next = current;
    current = previous;
    // Growth per step is at most 2n/x < 1e103 for x >= 1e-100, so a 1e150
    // ceiling leaves headroom below overflow.
    if (current > 1e150) {
      current *= 1e-150;
      next *= 1e-150;
      norm *= 1e-150;
      out *= 1e-150;
    }
  }
  return out / norm;
}

SignedLog log_kummer_1f1(double a, double b, double z) {
  if (is_nonpositive_integer(b))
    throw DomainError("kummer_1f1: b must not be a nonpositive integer");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z))
    throw DomainError("kummer_1f1: arguments must be finite");
  if (z == 0.0) return {0.0, 1};
  if (z < 0.0) {
    SignedLog s = hypergeometric_series(b - a, b, -z);
    s.log_abs += z;
    return s;
  }
  return hypergeometric_series(a, b, z);
}

double kummer_1f1(double a, double b, double z) {
  const SignedLog s = log_kummer_1f1(a, b, z);
  if (s.log_abs > std::log(std::numeric_limits<double>::max())) {
    std::ostringstream msg;
    msg << "kummer_1f1 overflows double: a=" << a << " b=" << b << " z=" << z
        << " log|value|=" << s.log_abs;
    throw NumericError(msg.str());
  }
  return s.value();
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: x must be finite and > 0");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("regularized_incomplete_beta: a and b must be finite and > 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("regularized_incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

}  // namespace heatflow
