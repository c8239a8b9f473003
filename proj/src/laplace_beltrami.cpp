#include "heatflow/laplace_beltrami.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "heatflow/field_io.hpp"

namespace heatflow {
namespace {

constexpr double kCotClamp = 1e8;
constexpr double kObtuseCosine = -1e-12;
constexpr double kDegenerateRatio = 1e-14;

struct FaceGeometry {
  std::array<double, 3> cot{};          // cotangent of the angle at corner c
  std::array<double, 3> cos{};          // cosine of the angle at corner c
  std::array<double, 3> edge_sq{};      // squared length of the edge opposite corner c
  double area = 0.0;
};

// Heron's formula in the cancellation-free ordering (a >= b >= c).
double heron_area(double a, double b, double c) {
  std::array<double, 3> s{a, b, c};
  std::sort(s.begin(), s.end(), std::greater<>());
  const double x = s[0], y = s[1], z = s[2];
  const double prod = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
  return 0.25 * std::sqrt(std::max(prod, 0.0));
}

FaceGeometry face_geometry(const TriangleMesh& mesh, Index f) {
  FaceGeometry g;
  std::array<Eigen::Vector3d, 3> p;
  for (int c = 0; c < 3; ++c) p[c] = mesh.vertices().row(mesh.faces()(f, c)).transpose();
  for (int c = 0; c < 3; ++c) {
    const Eigen::Vector3d u = p[(c + 1) % 3] - p[c];
    const Eigen::Vector3d w = p[(c + 2) % 3] - p[c];
    const double cross = u.cross(w).norm();
    const double dot = u.dot(w);
    double cot = cross > 0.0 ? dot / cross : (dot >= 0.0 ? kCotClamp : -kCotClamp);
    g.cot[c] = std::clamp(cot, -kCotClamp, kCotClamp);
    const double denom = u.norm() * w.norm();
    g.cos[c] = denom > 0.0 ? dot / denom : 1.0;
    g.edge_sq[c] = (p[(c + 2) % 3] - p[(c + 1) % 3]).squaredNorm();
  }
  g.area = heron_area(std::sqrt(g.edge_sq[0]), std::sqrt(g.edge_sq[1]), std::sqrt(g.edge_sq[2]));
  return g;
}

std::uint64_t edge_key(int i, int j) {
  const auto lo = static_cast<std::uint64_t>(std::min(i, j));
  const auto hi = static_cast<std::uint64_t>(std::max(i, j));
  return (lo << 32) | hi;
}

}  // namespace

SparseMatrix cotan_matrix(const TriangleMesh& mesh) {
  const Index n = mesh.num_vertices();

  // One record per (edge, incident face); sorting groups both faces of an edge
  // so each symmetric pair is assembled from a single accumulated weight.
  struct HalfEdge {
    std::uint64_t key;
    double half_cot;
  };
  std::vector<HalfEdge> half_edges;
  half_edges.reserve(static_cast<std::size_t>(3 * mesh.num_faces()));
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const FaceGeometry g = face_geometry(mesh, f);
    for (int c = 0; c < 3; ++c) {
      const int i = mesh.faces()(f, (c + 1) % 3);
      const int j = mesh.faces()(f, (c + 2) % 3);
      half_edges.push_back({edge_key(i, j), 0.5 * g.cot[c]});
    }
  }
  std::stable_sort(half_edges.begin(), half_edges.end(),
                   [](const HalfEdge& a, const HalfEdge& b) { return a.key < b.key; });

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(half_edges.size() * 2 + static_cast<std::size_t>(n));
  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < half_edges.size();) {
    std::size_t end = k;
    double weight = 0.0;
    while (end < half_edges.size() && half_edges[end].key == half_edges[k].key)
      weight += half_edges[end++].half_cot;
    const int i = static_cast<int>(half_edges[k].key >> 32);
    const int j = static_cast<int>(half_edges[k].key & 0xffffffffu);
    if (end - k > 2)
      throw StructuralError("non-manifold edge (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") is shared by " + std::to_string(end - k) + " faces");
    triplets.emplace_back(i, j, -weight);
    triplets.emplace_back(j, i, -weight);
    diagonal[i] += weight;
    diagonal[j] += weight;
    k = end;
  }
  for (Index i = 0; i < n; ++i) triplets.emplace_back(i, i, diagonal[i]);

  SparseMatrix c(n, n);
  c.setFromTriplets(triplets.begin(), triplets.end());
  c.makeCompressed();
  return c;
}

Eigen::VectorXd vertex_areas(const TriangleMesh& mesh, AreaScheme scheme) {
  const auto degenerate = mesh.degenerate_faces(kDegenerateRatio);
  if (!degenerate.empty()) {
    std::ostringstream msg;
    msg << degenerate.size() << " degenerate face(s) (area < 1e-14 * max edge^2):";
    for (std::size_t k = 0; k < std::min<std::size_t>(degenerate.size(), 20); ++k)
      msg << ' ' << degenerate[k];
    if (degenerate.size() > 20) msg << " ...";
    throw StructuralError(msg.str());
  }

  Eigen::VectorXd areas = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const FaceGeometry g = face_geometry(mesh, f);
    if (scheme == AreaScheme::barycentric) {
      for (int c = 0; c < 3; ++c) areas[mesh.faces()(f, c)] += g.area / 3.0;
      continue;
    }
    const bool obtuse = g.cos[0] < kObtuseCosine || g.cos[1] < kObtuseCosine || g.cos[2] < kObtuseCosine;
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.faces()(f, c);
      if (!obtuse) {
        // Corner c with neighbours j = c+1, k = c+2:
        // (|p_c p_j|^2 cot(angle k) + |p_c p_k|^2 cot(angle j)) / 8.
        const int j = (c + 1) % 3, k = (c + 2) % 3;
        areas[v] += (g.edge_sq[k] * g.cot[k] + g.edge_sq[j] * g.cot[j]) / 8.0;
      } else if (g.cos[c] < kObtuseCosine) {
        areas[v] += g.area / 2.0;
      } else {
        areas[v] += g.area / 4.0;
      }
    }
  }
  return areas;
}

LBOperator assemble_lb_operator(const TriangleMesh& mesh, AreaScheme scheme) {
  LBOperator op;
  op.areas = vertex_areas(mesh, scheme);
  op.stiffness = cotan_matrix(mesh);
  return op;
}

void export_operator(const LBOperator& op, const std::filesystem::path& path_c,
                     const std::filesystem::path& path_a) {
  if (path_c.empty() || path_a.empty()) throw IoError("export_operator: empty output path");
  std::ofstream out(path_c);
  if (!out) throw IoError("cannot write '" + path_c.string() + "'");

  std::vector<Eigen::Triplet<double>> lower;
  for (Index col = 0; col < op.stiffness.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(op.stiffness, col); it; ++it)
      if (it.row() >= it.col()) lower.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());

  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << op.stiffness.rows() << ' ' << op.stiffness.cols() << ' ' << lower.size() << '\n';
  for (const auto& t : lower) out << t.row() + 1 << ' ' << t.col() + 1 << ' ' << format_double(t.value()) << '\n';
  if (!out) throw IoError("failed writing '" + path_c.string() + "'");
  write_field_csv(path_a, op.areas);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw ParseError(path.string(), 1, "missing %%MatrixMarket banner");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || field != "real")
    throw ParseError(path.string(), 1, "only 'matrix coordinate real' is supported");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw ParseError(path.string(), 1, "unsupported symmetry '" + symmetry + "'");

  long rows = -1, cols = -1, entries = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> entries)) throw ParseError(path.string(), line_no, "malformed size line");
    break;
  }
  if (rows < 0) throw ParseError(path.string(), line_no, "missing size line");

  std::vector<Eigen::Triplet<double>> triplets;
  for (long k = 0; k < entries; ++k) {
    if (!std::getline(in, line)) throw ParseError(path.string(), line_no, "fewer entries than declared");
    ++line_no;
    std::istringstream ss(line);
    long i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > cols)
      throw ParseError(path.string(), line_no, "malformed entry '" + line + "'");
    triplets.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    if (symmetric && i != j) triplets.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace heatflow
