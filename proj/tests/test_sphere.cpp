#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"

using namespace heatflow;

namespace {

// Real harmonic from the complex one in libstdc++ (which carries the
// Condon-Shortley phase).
double real_harmonic_oracle(int l, int m, const Eigen::RowVector3d& p) {
  const double theta = std::acos(std::clamp(p.z(), -1.0, 1.0));
  const double phi = std::atan2(p.y(), p.x());
  const int am = std::abs(m);
  const double y = std::sph_legendre(l, am, theta) * (am % 2 ? -1.0 : 1.0);
  if (m == 0) return y;
  return std::numbers::sqrt2 * y * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

Index nearest_vertex(const TriangleMesh& mesh, const Eigen::Vector3d& p) {
  Index best = 0;
  (mesh.vertices() * p.normalized()).maxCoeff(&best);
  return best;
}

}  // namespace

TEST_SUITE("sphere_validation") {
  TEST_CASE("icosphere sizes and projection") {
    const auto s0 = icosphere(0);
    CHECK(s0.num_vertices() == 12);
    CHECK(s0.num_faces() == 20);
    for (int s = 1; s <= 4; ++s) {
      const auto m = icosphere(s);
      CHECK(m.num_vertices() == 10 * (1 << (2 * s)) + 2);
      CHECK(m.num_faces() == 20 * (1 << (2 * s)));
      CHECK((m.vertices().rowwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-14);
    }
    CHECK(icosphere(4).num_vertices() == 2562);
    CHECK_THROWS_AS(icosphere(9), DomainError);
    CHECK_THROWS_AS(icosphere(-1), DomainError);
  }

  TEST_CASE("icosphere faces point outward") {
    const auto m = icosphere(2);
    for (Index f = 0; f < m.num_faces(); ++f) {
      const Eigen::Vector3d a = m.vertex(m.faces()(f, 0)).transpose();
      const Eigen::Vector3d b = m.vertex(m.faces()(f, 1)).transpose();
      const Eigen::Vector3d c = m.vertex(m.faces()(f, 2)).transpose();
      CHECK((b - a).cross(c - a).dot(a + b + c) > 0.0);
    }
  }

  TEST_CASE("harmonic normalization constants") {
    Vertices north(1, 3);
    north << 0, 0, 1;
    CHECK(std::abs(real_sph_harm(0, 0, north)[0] - 0.28209479177387814) < 1e-15);
    CHECK(std::abs(real_sph_harm(1, 0, north)[0] - std::sqrt(3.0 / (4.0 * std::numbers::pi))) < 1e-15);
    CHECK_THROWS_AS(real_sph_harm(2, 3, north), DomainError);
    CHECK_THROWS_AS(real_sph_harm(-1, 0, north), DomainError);
    Vertices off(1, 3);
    off << 0, 0, 1.1;
    CHECK_THROWS_AS(real_sph_harm(1, 0, off), DomainError);
  }

  TEST_CASE("harmonics match the libstdc++ oracle") {
    const auto mesh = fixtures::lumpy_sphere(1, 0.0, 1);
    const Eigen::MatrixXd basis = sph_harm_basis(mesh.vertices(), 12);
    for (Index i = 0; i < mesh.num_vertices(); ++i)
      for (int l = 0; l <= 12; ++l)
        for (int m = -l; m <= l; ++m)
          CHECK(std::abs(basis(i, SphericalHarmonicCoeffs::index(l, m)) - real_harmonic_oracle(l, m, mesh.vertex(i))) <
                1e-12);
  }

  TEST_CASE("discrete orthonormality on subdiv 4") {
    const auto mesh = icosphere(4);
    const Eigen::VectorXd areas = vertex_areas(mesh);
    const Eigen::MatrixXd basis = sph_harm_basis(mesh.vertices(), 10);
    const Eigen::MatrixXd gram = basis.transpose() * areas.asDiagonal() * basis;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 5e-3);
  }

  TEST_CASE("fit recovers pure modes and constants") {
    const auto mesh = icosphere(4);
    const ScalarField y32 = real_sph_harm(3, 2, mesh.vertices());
    const auto fit = spharm_fit(mesh, y32, 5);
    for (int l = 0; l <= 5; ++l)
      for (int m = -l; m <= l; ++m) CHECK(std::abs(fit(l, m) - (l == 3 && m == 2 ? 1.0 : 0.0)) <= 1e-6);
    CHECK(fit.residual < 1e-10);

    const auto c = spharm_fit(mesh, ScalarField::Constant(mesh.num_vertices(), 2.0), 4);
    CHECK(std::abs(c(0, 0) - 2.0 * std::sqrt(4.0 * std::numbers::pi)) < 1e-10);
    CHECK(c.values.tail(c.values.size() - 1).cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(spharm_fit(icosphere(0), ScalarField::Zero(12), 3), DomainError);
    CHECK_THROWS_AS(spharm_fit(mesh, ScalarField::Zero(5), 3), DimensionError);
  }

  TEST_CASE("fit residual decreases with degree") {
    const auto mesh = icosphere(4);
    const ScalarField f = two_cap_signal(mesh);
    double last = 1e300;
    for (int L : {5, 10, 15, 20, 25}) {
      const double r = spharm_fit(mesh, f, L).residual;
      CHECK(r <= last);
      last = r;
    }
  }

  TEST_CASE("closed-form diffusion") {
    SphericalHarmonicCoeffs c;
    c.max_degree = 10;
    c.values = fixtures::random_field(121, 3);
    CHECK(spharm_diffuse(c, 0.0).values == c.values);
    const auto d = spharm_diffuse(c, 0.01);
    CHECK(d(0, 0) == c(0, 0));
    CHECK(std::abs(d(10, -4) / c(10, -4) - 0.33287108369807955) < 1e-14);
    CHECK_THROWS_AS(spharm_diffuse(c, -1.0), DomainError);
  }

  TEST_CASE("two-cap signal") {
    const auto mesh = icosphere(3);
    const Eigen::Vector3d plus = mesh.vertex(5).transpose();
    const Eigen::Vector3d minus = mesh.vertex(3).transpose();
    const ScalarField f = two_cap_signal(mesh, plus, minus, 0.3);
    CHECK(f[5] == 1.0);
    CHECK(f[3] == -1.0);
    const Index far = nearest_vertex(mesh, -(plus + minus));
    CHECK(f[far] == 0.0);

    const ScalarField g = two_cap_signal(mesh);
    const Eigen::VectorXd areas = vertex_areas(mesh);
    CHECK(std::abs(areas.dot(g)) <= 1e-12 * areas.dot(g.cwiseAbs()));
    CHECK(g[nearest_vertex(mesh, kDefaultCapPlus)] == 1.0);
    CHECK(g[nearest_vertex(mesh, kDefaultCapMinus)] == -1.0);

    CHECK_THROWS_AS(two_cap_signal(mesh, plus, plus, 0.3), DomainError);
    CHECK_THROWS_AS(two_cap_signal(mesh, kDefaultCapPlus, kDefaultCapMinus, 0.8), DomainError);
  }

  TEST_CASE("ground truth") {
    const auto mesh = icosphere(4);
    const ScalarField f = two_cap_signal(mesh);
    const ScalarField projection = ground_truth_field(mesh, f, 20, 0.0);
    CHECK((projection - spharm_evaluate(spharm_fit(mesh, f, 20), mesh.vertices())).cwiseAbs().maxCoeff() < 1e-12);

    const ScalarField truth = ground_truth_field(mesh, f, 25, 0.01);
    Index arg_max = 0, arg_min = 0;
    truth.maxCoeff(&arg_max);
    truth.minCoeff(&arg_min);
    CHECK(mesh.vertex(arg_max).transpose().dot(kDefaultCapPlus) > std::cos(0.1));
    CHECK(mesh.vertex(arg_min).transpose().dot(kDefaultCapMinus) > std::cos(0.1));
  }

  TEST_CASE("discrete eigenvalues approximate l(l+1) with multiplicity 2l+1") {
    const auto lambda = fixtures::dense_spectrum(assemble_lb_operator(icosphere(3)));
    int index = 1;
    for (int l = 1; l <= 3; ++l) {
      for (int k = 0; k < 2 * l + 1; ++k, ++index) CHECK(std::abs(lambda[index] - l * (l + 1.0)) <= 0.05 * l * (l + 1.0));
    }
    CHECK(lambda[index] > 1.05 * 12.0);
  }
}
