#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <random>
#include <string>

#include "heatflow/heatflow.hpp"

namespace fixtures {

using heatflow::Faces;
using heatflow::LBOperator;
using heatflow::TriangleMesh;
using heatflow::Vertices;

std::filesystem::path data_dir();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

TriangleMesh equilateral_triangle();
/// Legs of length 1 along x and y; the right angle sits at vertex 0.
TriangleMesh right_isosceles();
/// Torus with nu x nv vertices, major radius R, minor radius r.
TriangleMesh torus(int nu, int nv, double R, double r);
/// n x n planar grid with spacing h, split along alternating diagonals.
TriangleMesh grid(int n, double h);
/// n x n planar grid with every quad split along the same diagonal.
TriangleMesh regular_grid(int n, double h);
/// Icosphere with every vertex radius scaled by 1 + amplitude * U(-1, 1).
TriangleMesh lumpy_sphere(int subdiv, double amplitude, unsigned seed);
TriangleMesh scaled(const TriangleMesh& mesh, double factor);

/// Dense A^{-1} C.
Eigen::MatrixXd dense_laplacian(const LBOperator& op);

/// Per-face cotan assembly using angles from acos, accumulated triangle by
/// triangle into a dense matrix.
Eigen::MatrixXd angle_cotan_oracle(const TriangleMesh& mesh);

Eigen::VectorXd random_field(Eigen::Index n, unsigned seed);

/// Generalized eigenvalues of C psi = lambda A psi, ascending.
Eigen::VectorXd dense_spectrum(const LBOperator& op);

/// Two groups of per-subject fields: iid N(0, 1) noise per vertex, plus
/// `delta` inside the geodesic cap around `center` for group A, each subject
/// heat-smoothed with sigma_smooth (skipped when 0). Columns are subjects.
struct GroupPair {
  heatflow::FieldStack a;
  heatflow::FieldStack b;
};
GroupPair synthetic_groups(const LBOperator& op, const TriangleMesh& mesh, int n_a, int n_b, double delta,
                           const Eigen::Vector3d& center, double radius, double sigma_smooth, std::mt19937& rng);

/// Mask of vertices within geodesic `radius` of `center`.
heatflow::Mask cap_mask(const TriangleMesh& mesh, const Eigen::Vector3d& center, double radius);

}  // namespace fixtures
