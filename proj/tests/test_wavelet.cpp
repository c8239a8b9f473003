#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace heatflow;

TEST_SUITE("wavelets") {
  TEST_CASE("spline kernel values") {
    const WaveletKernel k;
    CHECK(spline_kernel(k, 0.0) == 0.0);
    CHECK(spline_kernel(k, 1.0) == 1.0);
    CHECK(spline_kernel(k, 2.0) == 1.0);
    CHECK(std::abs(spline_kernel(k, 0.5) - 0.25) < 1e-15);
    const double peak = (12.0 - std::sqrt(12.0)) / 6.0;  // root of 11 - 12x + 3x^2
    CHECK(std::abs(peak - 1.4226497308103743) < 1e-12);
    CHECK(std::abs(spline_kernel(k, peak) - 1.3849001794597505) < 1e-12);
    CHECK(std::abs(spline_kernel(k, 4.0) - 0.25) < 1e-15);
    WaveletKernel growing = k;
    growing.tail = SplineTail::growing;
    CHECK(std::abs(spline_kernel(growing, 4.0) - 4.0) < 1e-15);
    CHECK(kernel_discontinuity(k) < 1e-14);
  }

  TEST_CASE("decaying tail meets the cubic with matching slope") {
    const WaveletKernel k;
    const double h = 1e-6;
    const double left = (spline_kernel(k, 2.0) - spline_kernel(k, 2.0 - h)) / h;
    const double right = (spline_kernel(k, 2.0 + h) - spline_kernel(k, 2.0)) / h;
    CHECK(std::abs(left - right) < 1e-4);
    const double l1 = (spline_kernel(k, 1.0) - spline_kernel(k, 1.0 - h)) / h;
    const double r1 = (spline_kernel(k, 1.0 + h) - spline_kernel(k, 1.0)) / h;
    CHECK(std::abs(l1 - r1) < 1e-4);
  }

  TEST_CASE("kernel coefficients reconstruct g") {
    // The kernel is only C^1, so Chebyshev errors decay like m^-2 once both
    // breakpoints fall inside [0, b]; t = 0.011 needs a higher degree.
    const double b = 100.0;
    for (double t : default_wavelet_scales()) {
      WaveletKernel k;
      k.t = t;
      const int m = t <= 0.01 ? 200 : 1000;
      const auto c = wavelet_coefficients(k, b, m);
      double worst = 0.0;
      for (int i = 0; i <= 200; ++i) {
        const double lambda = b * i / 200.0;
        worst = std::max(worst, std::abs(evaluate_expansion(c, lambda) - spline_kernel(k, lambda * t)));
      }
      INFO("t = " << t << ", m = " << m);
      CHECK(worst <= 1e-6);
    }
  }

  TEST_CASE("numeric coefficients of g at t = 0.01") {
    WaveletKernel k;
    k.t = 0.01;
    const auto c = numeric_coefficients([&](double l) { return spline_kernel(k, l * k.t); },
                                        PolynomialFamily::chebyshev(100.0), 200, {1600});
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double lambda = i / 2.0;
      worst = std::max(worst, std::abs(evaluate_expansion(c, lambda) - spline_kernel(k, lambda * k.t)));
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("wavelet transform kills constants and matches the dense oracle") {
    const LBOperator op = assemble_lb_operator(fixtures::torus(20, 10, 1.0, 0.4));
    REQUIRE(op.size() == 200);
    const EigenSystem es = eigen_reference(op);
    WaveletKernel k;
    k.t = 0.01;
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(200, 3.0);
    CHECK(wavelet_transform(op, c, k, 300).cwiseAbs().maxCoeff() <= 1e-6 * 3.0);

    const Eigen::VectorXd f = fixtures::random_field(200, 4);
    const Eigen::VectorXd oracle = eigen_filter(es, op, [&](double l) { return spline_kernel(k, l * k.t); }, f);
    CHECK((wavelet_transform(op, f, k, 300) - oracle).cwiseAbs().maxCoeff() <= 1e-5);
  }

  TEST_CASE("wavelet stack") {
    const LBOperator op = assemble_lb_operator(fixtures::torus(20, 10, 1.0, 0.4));
    const Eigen::VectorXd f = fixtures::random_field(200, 9);
    const auto scales = default_wavelet_scales();
    REQUIRE(scales.size() == 10);
    const FieldStack stack = wavelet_stack(op, f, WaveletKernel{}, scales, 200);
    CHECK(stack.num_columns() == 10);
    CHECK(stack.labels[0] == "0.002");
    CHECK(stack.labels[9] == "0.010999999999999999");

    WaveletKernel single;
    single.t = 0.004;
    const FieldStack one = wavelet_stack(op, f, WaveletKernel{}, {0.004}, 200);
    CHECK(one.values.col(0) == wavelet_transform(op, f, single, 200));
    CHECK(one.values.col(0) == stack.values.col(2));

    const FieldStack zero = wavelet_stack(op, Eigen::VectorXd::Zero(200), WaveletKernel{}, scales, 200);
    CHECK(zero.values.isZero(0.0));

    const double total_area = op.areas.sum();
    for (Index j = 0; j < stack.num_columns(); ++j)
      CHECK(std::abs(op.areas.dot(stack.values.col(j))) <= 1e-6 * f.cwiseAbs().maxCoeff() * total_area);

    const Eigen::VectorXd g = fixtures::random_field(200, 10);
    const FieldStack sg = wavelet_stack(op, g, WaveletKernel{}, scales, 200);
    const FieldStack sum = wavelet_stack(op, (2.0 * f + g).eval(), WaveletKernel{}, scales, 200);
    const Eigen::MatrixXd expect = 2.0 * stack.values + sg.values;
    CHECK((sum.values - expect).norm() <= 1e-12 * expect.norm());

    CHECK_THROWS_AS(wavelet_stack(op, f, WaveletKernel{}, {}, 100), DomainError);
    CHECK_THROWS_AS(wavelet_stack(op, f, WaveletKernel{}, {0.003, 0.002}, 100), DomainError);
    CHECK_THROWS_AS(wavelet_stack(op, f, WaveletKernel{}, {-0.01}, 100), DomainError);
  }
}
