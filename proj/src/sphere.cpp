#include "heatflow/sphere.hpp"

#include <Eigen/QR>

#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "heatflow/error.hpp"
#include "heatflow/laplace_beltrami.hpp"

namespace heatflow {
namespace {

void check_unit_points(const Eigen::Ref<const Vertices>& points) {
  for (Index i = 0; i < points.rows(); ++i)
    if (std::abs(points.row(i).norm() - 1.0) > 1e-12)
      throw DomainError("point " + std::to_string(i) + " is not on the unit sphere");
}

// Normalized associated Legendre values pbar_lm(cos theta) for one point,
// written into the basis row together with the azimuthal factors.
void fill_basis_row(const Eigen::RowVector3d& p, int L, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  const double z = std::clamp(p.z(), -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = std::atan2(p.y(), p.x());

  std::vector<double> pbar((L + 1) * (L + 1), 0.0);
  auto at = [&](int l, int m) -> double& { return pbar[l * (L + 1) + m]; };
  at(0, 0) = std::sqrt(1.0 / (4.0 * std::numbers::pi));
  for (int m = 1; m <= L; ++m) at(m, m) = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * at(m - 1, m - 1);
  for (int m = 0; m < L; ++m) at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * z * at(m, m);
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1.0));
      at(l, m) = a * (z * at(l - 1, m) - b * at(l - 2, m));
    }
  }
  for (int l = 0; l <= L; ++l) {
    row[SphericalHarmonicCoeffs::index(l, 0)] = at(l, 0);
    for (int m = 1; m <= l; ++m) {
      row[SphericalHarmonicCoeffs::index(l, m)] = std::numbers::sqrt2 * at(l, m) * std::cos(m * phi);
      row[SphericalHarmonicCoeffs::index(l, -m)] = std::numbers::sqrt2 * at(l, m) * std::sin(m * phi);
    }
  }
}

}  // namespace

TriangleMesh icosphere(int subdiv) {
  if (subdiv < 0 || subdiv > kMaxIcosphereSubdiv)
    throw DomainError("icosphere subdivision must be in [0, " + std::to_string(kMaxIcosphereSubdiv) + "], got " +
                      std::to_string(subdiv));
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                                        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                                        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdiv; ++level) {
    std::unordered_map<std::uint64_t, int> midpoint;
    auto split = [&](int a, int b) {
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint32_t>(std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = split(f[0], f[1]), bc = split(f[1], f[2]), ca = split(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  Vertices v(static_cast<Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) v.row(static_cast<Index>(i)) = verts[i].transpose();
  Faces f(static_cast<Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i)
    f.row(static_cast<Index>(i)) << faces[i][0], faces[i][1], faces[i][2];
  return TriangleMesh(std::move(v), std::move(f));
}

Eigen::MatrixXd sph_harm_basis(const Eigen::Ref<const Vertices>& points, int L) {
  if (L < 0) throw DomainError("harmonic degree must be >= 0");
  check_unit_points(points);
  Eigen::MatrixXd basis(points.rows(), static_cast<Index>(L + 1) * (L + 1));
  for (Index i = 0; i < points.rows(); ++i) fill_basis_row(points.row(i), L, basis.row(i));
  return basis;
}

Eigen::VectorXd real_sph_harm(int l, int m, const Eigen::Ref<const Vertices>& points) {
  if (l < 0 || m < -l || m > l)
    throw DomainError("invalid spherical harmonic (l, m) = (" + std::to_string(l) + ", " + std::to_string(m) + ")");
  return sph_harm_basis(points, l).col(SphericalHarmonicCoeffs::index(l, m));
}

SphericalHarmonicCoeffs spharm_fit(const TriangleMesh& mesh, const ScalarField& f, int L) {
  if (L < 0) throw DomainError("harmonic degree must be >= 0");
  const Index n = mesh.num_vertices();
  const Index k = static_cast<Index>(L + 1) * (L + 1);
  if (f.size() != n) throw DimensionError("field length does not match the mesh");
  if (k > n)
    throw DomainError("(L+1)^2 = " + std::to_string(k) + " exceeds the vertex count " + std::to_string(n));

  const Eigen::VectorXd areas = vertex_areas(mesh);
  const Eigen::VectorXd w = areas.cwiseSqrt();
  const Eigen::MatrixXd basis = sph_harm_basis(mesh.vertices(), L);
  const Eigen::MatrixXd weighted = w.asDiagonal() * basis;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
  if (qr.rank() < k)
    throw NumericError("spherical harmonic fit is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                       std::to_string(k) + ")");

  SphericalHarmonicCoeffs out;
  out.max_degree = L;
  out.values = qr.solve(w.cwiseProduct(f));
  const Eigen::VectorXd r = f - basis * out.values;
  out.residual = std::sqrt(r.cwiseAbs2().dot(areas) / areas.sum());
  return out;
}

Eigen::VectorXd spharm_evaluate(const SphericalHarmonicCoeffs& coeffs, const Eigen::Ref<const Vertices>& points) {
  if (coeffs.values.size() != static_cast<Index>(coeffs.max_degree + 1) * (coeffs.max_degree + 1))
    throw DimensionError("coefficient vector length does not match the degree");
  return sph_harm_basis(points, coeffs.max_degree) * coeffs.values;
}

SphericalHarmonicCoeffs spharm_diffuse(SphericalHarmonicCoeffs coeffs, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  for (int l = 0; l <= coeffs.max_degree; ++l) {
    const double decay = std::exp(-static_cast<double>(l) * (l + 1) * sigma);
    for (int m = -l; m <= l; ++m) coeffs(l, m) *= decay;
  }
  return coeffs;
}

ScalarField two_cap_signal(const TriangleMesh& mesh, const Eigen::Vector3d& center_plus,
                           const Eigen::Vector3d& center_minus, double radius) {
  if (!(radius > 0.0)) throw DomainError("cap radius must be > 0");
  if (center_plus.norm() == 0.0 || center_minus.norm() == 0.0) throw DomainError("cap centers must be nonzero");
  const Eigen::Vector3d cp = center_plus.normalized();
  const Eigen::Vector3d cm = center_minus.normalized();
  const double separation = std::acos(std::clamp(cp.dot(cm), -1.0, 1.0));
  if (!(separation > 2.0 * radius))
    throw DomainError("caps overlap: separation " + std::to_string(separation) + " <= 2 * radius");

  ScalarField f = ScalarField::Zero(mesh.num_vertices());
  for (Index i = 0; i < mesh.num_vertices(); ++i) {
    const Eigen::Vector3d p = mesh.vertex(i).transpose().normalized();
    if (std::acos(std::clamp(p.dot(cp), -1.0, 1.0)) < radius)
      f[i] = 1.0;
    else if (std::acos(std::clamp(p.dot(cm), -1.0, 1.0)) < radius)
      f[i] = -1.0;
  }
  return f;
}

ScalarField ground_truth_field(const TriangleMesh& mesh, const ScalarField& signal, int L, double sigma) {
  return spharm_evaluate(spharm_diffuse(spharm_fit(mesh, signal, L), sigma), mesh.vertices());
}

}  // namespace heatflow
