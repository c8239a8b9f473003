#pragma once

#include <Eigen/Core>

namespace heatflow {

/// A real number stored as sign * exp(log_abs). Used wherever a closed form
/// over- or underflows double range long before the quantity it feeds does.
struct SignedLog {
  double log_abs = 0.0;  // -inf for an exact zero
  int sign = 1;          // -1, 0 or +1

  double value() const;
};

/// Exponentially scaled modified Bessel functions of the first kind,
/// e^{-x} I_n(x) for n = 0..n_max.
///
/// Computed by Miller backward recurrence normalised with
/// e^{-x} (I_0 + 2 sum_{n>=1} I_n) = 1, so no unscaled I_n is ever formed and
/// the result stays finite for any x >= 0. Entries are nonnegative and
/// nonincreasing in n.
Eigen::VectorXd scaled_bessel_i(int n_max, double x);

/// Confluent hypergeometric function 1F1(a; b; z).
///
/// Negative arguments go through the Kummer transformation
/// 1F1(a; b; z) = e^z 1F1(b - a; b; -z), so the summed series has positive
/// argument. Throws NumericError when the value is outside double range;
/// use log_kummer_1f1 in that case.
double kummer_1f1(double a, double b, double z);

/// Same as kummer_1f1, returned in signed-log form.
SignedLog log_kummer_1f1(double a, double b, double z);

/// ln Gamma(x) for x > 0. Reentrant.
double log_gamma(double x);

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace heatflow
