#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <filesystem>
#include <optional>

#include "heatflow/error.hpp"
#include "heatflow/mesh.hpp"

namespace heatflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class AreaScheme {
  mixed_voronoi,  // Voronoi cells for nonobtuse triangles, 1/2 and 1/4 splits otherwise
  barycentric,    // one third of every incident triangle
};

/// Discrete Laplace-Beltrami operator Delta = A^{-1} C.
///
/// `stiffness` is the symmetric cotan matrix C (positive semidefinite, zero
/// row sums) and `areas` the positive per-vertex areas A. Immutable once
/// assembled; safe to share between threads.
struct LBOperator {
  SparseMatrix stiffness;
  Eigen::VectorXd areas;
  std::optional<double> lambda_max_hint;

  Index size() const noexcept { return areas.size(); }
};

/// Cotan stiffness matrix. Off-diagonals are -(cot a + cot b)/2 over the
/// angles opposite each interior edge and -cot(a)/2 on boundary edges; the
/// diagonal is minus the off-diagonal row sum. Throws StructuralError on an
/// edge shared by more than two faces.
SparseMatrix cotan_matrix(const TriangleMesh& mesh);

/// Per-vertex areas. Throws StructuralError listing degenerate faces.
Eigen::VectorXd vertex_areas(const TriangleMesh& mesh, AreaScheme scheme = AreaScheme::mixed_voronoi);

LBOperator assemble_lb_operator(const TriangleMesh& mesh,
                                AreaScheme scheme = AreaScheme::mixed_voronoi);

/// out = A^{-1} C f, column by column. `out` is resized as needed.
template <class Derived, class OutDerived>
void apply_lb_into(const LBOperator& op, const Eigen::MatrixBase<Derived>& f,
                   Eigen::MatrixBase<OutDerived>& out) {
  if (f.rows() != op.size())
    throw DimensionError("field has " + std::to_string(f.rows()) + " rows, operator has " +
                         std::to_string(op.size()) + " vertices");
  out.derived().noalias() = op.stiffness * f;
  out.derived().array().colwise() /= op.areas.array();
}

template <class Derived>
Eigen::Matrix<double, Eigen::Dynamic, Derived::ColsAtCompileTime> apply_lb(
    const LBOperator& op, const Eigen::MatrixBase<Derived>& f) {
  Eigen::Matrix<double, Eigen::Dynamic, Derived::ColsAtCompileTime> out(f.rows(), f.cols());
  apply_lb_into(op, f, out);
  return out;
}

/// Writes C as Matrix Market "coordinate real symmetric" (lower triangle,
/// 1-based) and A as one value per line, both with 17 significant digits.
void export_operator(const LBOperator& op, const std::filesystem::path& path_c,
                     const std::filesystem::path& path_a);

/// Reads a real Matrix Market coordinate file (general or symmetric).
SparseMatrix read_matrix_market(const std::filesystem::path& path);

}  // namespace heatflow
