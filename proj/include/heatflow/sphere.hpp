#pragma once

#include <Eigen/Core>

#include "heatflow/field_io.hpp"
#include "heatflow/mesh.hpp"

namespace heatflow {

inline constexpr int kMaxIcosphereSubdiv = 8;

/// Icosahedron subdivided `subdiv` times with vertices projected to the unit
/// sphere: 10 * 4^subdiv + 2 vertices, outward-oriented faces.
TriangleMesh icosphere(int subdiv);

/// Real, fully normalized spherical harmonic Y_lm (integral of Y_lm^2 over
/// the sphere is 1), no Condon-Shortley phase: m > 0 uses cos(m phi), m < 0
/// uses sin(|m| phi). Points are rows of unit vectors.
Eigen::VectorXd real_sph_harm(int l, int m, const Eigen::Ref<const Vertices>& points);

/// Column l^2 + l + m holds Y_lm at every point, for 0 <= l <= L.
Eigen::MatrixXd sph_harm_basis(const Eigen::Ref<const Vertices>& points, int L);

struct SphericalHarmonicCoeffs {
  int max_degree = 0;
  Eigen::VectorXd values;   // (L + 1)^2 entries
  double residual = 0.0;    // area-weighted RMS fit residual, when fitted

  static Index index(int l, int m) { return static_cast<Index>(l) * l + l + m; }
  double operator()(int l, int m) const { return values[index(l, m)]; }
  double& operator()(int l, int m) { return values[index(l, m)]; }
};

/// Area-weighted least-squares fit of f by harmonics up to degree L. Throws
/// DomainError when (L+1)^2 > N and NumericError on rank deficiency.
SphericalHarmonicCoeffs spharm_fit(const TriangleMesh& mesh, const ScalarField& f, int L);

Eigen::VectorXd spharm_evaluate(const SphericalHarmonicCoeffs& coeffs, const Eigen::Ref<const Vertices>& points);

/// f_lm <- e^{-l(l+1) sigma} f_lm.
SphericalHarmonicCoeffs spharm_diffuse(SphericalHarmonicCoeffs coeffs, double sigma);

inline const Eigen::Vector3d kDefaultCapPlus{0.0, 0.0, 1.0};
inline const Eigen::Vector3d kDefaultCapMinus{1.0, 0.0, 0.0};
inline constexpr double kDefaultCapRadius = 0.3;

/// +1 within geodesic `radius` of center_plus, -1 within radius of
/// center_minus, 0 elsewhere. Throws DomainError when the caps overlap.
ScalarField two_cap_signal(const TriangleMesh& mesh, const Eigen::Vector3d& center_plus = kDefaultCapPlus,
                           const Eigen::Vector3d& center_minus = kDefaultCapMinus,
                           double radius = kDefaultCapRadius);

/// Closed-form diffusion of the band-limited fit, evaluated at the vertices.
ScalarField ground_truth_field(const TriangleMesh& mesh, const ScalarField& signal, int L, double sigma);

}  // namespace heatflow
