#include "fixtures.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace fixtures {

std::filesystem::path data_dir() { return HEATFLOW_TEST_DATA_DIR; }

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("heatflow_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TriangleMesh equilateral_triangle() {
  Vertices v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0.5, std::sqrt(3.0) / 2.0, 0;
  Faces f(1, 3);
  f << 0, 1, 2;
  return TriangleMesh(v, f);
}

TriangleMesh right_isosceles() {
  Vertices v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  Faces f(1, 3);
  f << 0, 1, 2;
  return TriangleMesh(v, f);
}

TriangleMesh torus(int nu, int nv, double R, double r) {
  Vertices v(nu * nv, 3);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double u = 2.0 * std::numbers::pi * i / nu;
      const double w = 2.0 * std::numbers::pi * j / nv;
      v.row(i * nv + j) << (R + r * std::cos(w)) * std::cos(u), (R + r * std::cos(w)) * std::sin(u), r * std::sin(w);
    }
  }
  Faces f(2 * nu * nv, 3);
  int k = 0;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const int a = i * nv + j, b = ((i + 1) % nu) * nv + j, c = ((i + 1) % nu) * nv + (j + 1) % nv,
                d = i * nv + (j + 1) % nv;
      f.row(k++) << a, b, c;
      f.row(k++) << a, c, d;
    }
  }
  return TriangleMesh(v, f);
}

namespace {

TriangleMesh make_grid(int n, double h, bool alternate) {
  Vertices v(n * n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v.row(i * n + j) << j * h, i * h, 0.0;
  Faces f(2 * (n - 1) * (n - 1), 3);
  int k = 0;
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      const int a = i * n + j, b = a + 1, c = a + n + 1, d = a + n;
      if (!alternate || (i + j) % 2 == 0) {
        f.row(k++) << a, b, c;
        f.row(k++) << a, c, d;
      } else {
        f.row(k++) << a, b, d;
        f.row(k++) << b, c, d;
      }
    }
  }
  return TriangleMesh(v, f);
}

}  // namespace

TriangleMesh grid(int n, double h) { return make_grid(n, h, true); }
TriangleMesh regular_grid(int n, double h) { return make_grid(n, h, false); }

TriangleMesh lumpy_sphere(int subdiv, double amplitude, unsigned seed) {
  const TriangleMesh base = heatflow::icosphere(subdiv);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vertices v = base.vertices();
  for (Eigen::Index i = 0; i < v.rows(); ++i) v.row(i) *= 1.0 + amplitude * u(rng);
  return TriangleMesh(v, base.faces());
}

TriangleMesh scaled(const TriangleMesh& mesh, double factor) {
  return TriangleMesh(mesh.vertices() * factor, mesh.faces());
}

Eigen::MatrixXd dense_laplacian(const LBOperator& op) {
  return op.areas.cwiseInverse().asDiagonal() * Eigen::MatrixXd(op.stiffness);
}

Eigen::MatrixXd angle_cotan_oracle(const TriangleMesh& mesh) {
  const Eigen::Index n = mesh.num_vertices();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    for (int corner = 0; corner < 3; ++corner) {
      const int k = mesh.faces()(f, corner);
      const int i = mesh.faces()(f, (corner + 1) % 3);
      const int j = mesh.faces()(f, (corner + 2) % 3);
      const Eigen::Vector3d e1 = (mesh.vertex(i) - mesh.vertex(k)).transpose();
      const Eigen::Vector3d e2 = (mesh.vertex(j) - mesh.vertex(k)).transpose();
      const double angle = std::acos(e1.dot(e2) / (e1.norm() * e2.norm()));
      const double w = 0.5 / std::tan(angle);
      c(i, j) -= w;
      c(j, i) -= w;
      c(i, i) += w;
      c(j, j) += w;
    }
  }
  return c;
}

Eigen::VectorXd random_field(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) f[i] = normal(rng);
  return f;
}

Eigen::VectorXd dense_spectrum(const LBOperator& op) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(op.stiffness),
                                                                   Eigen::MatrixXd(op.areas.asDiagonal()),
                                                                   Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

heatflow::Mask cap_mask(const TriangleMesh& mesh, const Eigen::Vector3d& center, double radius) {
  const Eigen::Vector3d c = center.normalized();
  heatflow::Mask inside(mesh.num_vertices());
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
    inside[i] = std::acos(std::clamp(mesh.vertex(i).normalized().dot(c.transpose()), -1.0, 1.0)) < radius;
  return inside;
}

GroupPair synthetic_groups(const LBOperator& op, const TriangleMesh& mesh, int n_a, int n_b, double delta,
                           const Eigen::Vector3d& center, double radius, double sigma_smooth, std::mt19937& rng) {
  const Eigen::Index n = mesh.num_vertices();
  std::normal_distribution<double> normal;
  const heatflow::Mask inside = cap_mask(mesh, center, radius);
  auto draw = [&](int subjects, double shift) {
    Eigen::MatrixXd values(n, subjects);
    for (int s = 0; s < subjects; ++s)
      for (Eigen::Index i = 0; i < n; ++i) values(i, s) = normal(rng) + (inside[i] ? shift : 0.0);
    if (sigma_smooth > 0.0)
      values = heatflow::heat_smooth(op, values, sigma_smooth, heatflow::PolynomialFamily::chebyshev(), 40);
    heatflow::FieldStack stack;
    stack.axis = heatflow::StackAxis::subjects;
    stack.values = std::move(values);
    for (int s = 0; s < subjects; ++s) stack.labels.push_back("s" + std::to_string(s));
    return stack;
  };
  GroupPair pair;
  pair.a = draw(n_a, delta);
  pair.b = draw(n_b, 0.0);
  return pair;
}

}  // namespace fixtures
