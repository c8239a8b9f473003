#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace heatflow {

using Index = Eigen::Index;
using Vertices = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Triangle mesh of a 2-manifold, possibly with boundary.
///
/// Construction validates the topology: every face index lies in [0, N), no
/// face repeats a vertex, and every vertex is referenced by at least one face.
/// Violations throw StructuralError. Degenerate (near zero area) faces are
/// allowed here and reported by degenerate_faces(); operators that need
/// positive areas reject them.
class TriangleMesh {
public:
  TriangleMesh(Vertices vertices, Faces faces);

  const Vertices& vertices() const noexcept { return vertices_; }
  const Faces& faces() const noexcept { return faces_; }
  Index num_vertices() const noexcept { return vertices_.rows(); }
  Index num_faces() const noexcept { return faces_.rows(); }

  Eigen::RowVector3d vertex(Index i) const { return vertices_.row(i); }
  double face_area(Index f) const;
  double total_area() const;
  double max_edge_length() const;

  /// Faces with area below rel_tol * (longest edge of that face)^2.
  std::vector<Index> degenerate_faces(double rel_tol = 1e-14) const;

private:
  Vertices vertices_;
  Faces faces_;
};

enum class MeshFormat { off, ply_ascii };

/// Infers the format from the file extension (.off, .ply).
MeshFormat mesh_format_from_path(const std::filesystem::path& path);

/// Reads an OFF or ASCII PLY triangle mesh. Vertex and face order follow the
/// file. Syntax problems and out-of-range face indices raise ParseError with
/// the offending line. When `degenerate` is given it receives the indices of
/// degenerate faces.
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                       std::vector<Index>* degenerate = nullptr);
TriangleMesh load_mesh(const std::filesystem::path& path);

/// Writes OFF with 17 significant digits per coordinate.
void save_off(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace heatflow
