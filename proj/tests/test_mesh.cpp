#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <numbers>

#include "fixtures.hpp"

using namespace heatflow;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

double max_abs_offdiag_asymmetry(const SparseMatrix& c) {
  const Eigen::MatrixXd d(c);
  return (d - d.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("mesh_core") {
  TEST_CASE("load OFF fixtures") {
    const auto tri = load_mesh(fixtures::data_dir() / "triangle.off");
    CHECK(tri.num_vertices() == 3);
    CHECK(tri.num_faces() == 1);
    const auto ico = load_mesh(fixtures::data_dir() / "icosahedron.off");
    CHECK(ico.num_vertices() == 12);
    CHECK(ico.num_faces() == 20);
    CHECK(ico.faces()(0, 1) == 11);
  }

  TEST_CASE("PLY face index out of range") {
    try {
      load_mesh(fixtures::data_dir() / "bad_index.ply");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("99") != std::string::npos);
      CHECK(e.line() == 28);
    }
  }

  TEST_CASE("PLY ascii with extra properties") {
    const auto dir = fixtures::scratch_dir("ply");
    write_text(dir / "quad.ply",
               "ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\n"
               "property uchar red\nelement face 2\nproperty list uchar int vertex_indices\nend_header\n"
               "0 0 0 1\n1 0 0 2\n1 1 0 3\n0 1 0 4\n3 0 1 2\n3 0 2 3\n");
    const auto m = load_mesh(dir / "quad.ply");
    CHECK(m.num_vertices() == 4);
    CHECK(m.num_faces() == 2);
    CHECK(m.vertex(2).x() == 1.0);
    write_text(dir / "bin.ply", "ply\nformat binary_little_endian 1.0\nend_header\n");
    CHECK_THROWS_AS(load_mesh(dir / "bin.ply"), ParseError);
  }

  TEST_CASE("OFF syntax errors carry the line") {
    const auto dir = fixtures::scratch_dir("off");
    write_text(dir / "bad.off", "OFF\n3 1 0\n0 0 0\n1 0 x\n0 1 0\n3 0 1 2\n");
    try {
      load_mesh(dir / "bad.off");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
    write_text(dir / "quad.off", "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
    CHECK_THROWS_AS(load_mesh(dir / "quad.off"), ParseError);
    CHECK_THROWS_AS(load_mesh(dir / "missing.off"), IoError);
  }

  TEST_CASE("topology validation") {
    Vertices v(4, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 5, 5, 5;
    Faces f(1, 3);
    f << 0, 1, 2;
    CHECK_THROWS_AS(TriangleMesh(v, f), StructuralError);  // vertex 3 isolated
    Faces repeat(1, 3);
    repeat << 0, 1, 1;
    CHECK_THROWS_AS(TriangleMesh(v.topRows(3), repeat), StructuralError);
    Faces range(1, 3);
    range << 0, 1, 7;
    CHECK_THROWS_AS(TriangleMesh(v.topRows(3), range), StructuralError);
  }

  TEST_CASE("OFF round trip is exact") {
    const auto dir = fixtures::scratch_dir("roundtrip");
    const auto m = fixtures::lumpy_sphere(1, 0.1, 3);
    save_off(m, dir / "m.off");
    const auto back = load_mesh(dir / "m.off");
    CHECK(back.vertices() == m.vertices());
    CHECK(back.faces() == m.faces());
  }

  TEST_CASE("cotan weights of the unit equilateral triangle") {
    const SparseMatrix c = cotan_matrix(fixtures::equilateral_triangle());
    const double want = -1.0 / (2.0 * std::sqrt(3.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) CHECK(std::abs(c.coeff(i, j) - want) < 1e-15);
  }

  TEST_CASE("cotan matrix is symmetric with zero row sums") {
    for (const auto& mesh : {icosphere(2), fixtures::torus(12, 7, 1.0, 0.3),
                             fixtures::grid(7, 0.5), fixtures::lumpy_sphere(2, 0.1, 9)}) {
      const SparseMatrix c = cotan_matrix(mesh);
      CHECK(max_abs_offdiag_asymmetry(c) == 0.0);
      const Eigen::MatrixXd d(c);
      const double cmax = d.cwiseAbs().maxCoeff();
      CHECK(d.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12 * cmax);
    }
  }

  TEST_CASE("cotan matrix matches per-face angle assembly") {
    for (const auto& mesh : {icosphere(2), fixtures::lumpy_sphere(2, 0.15, 4), fixtures::grid(6, 0.7)}) {
      const Eigen::MatrixXd c(cotan_matrix(mesh));
      const Eigen::MatrixXd oracle = fixtures::angle_cotan_oracle(mesh);
      CHECK((c - oracle).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("non-manifold edge is named") {
    Vertices v(5, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1;
    Faces f(3, 3);
    f << 0, 1, 2, 1, 0, 3, 0, 1, 4;
    try {
      cotan_matrix(TriangleMesh(v, f));
      FAIL("expected a structural error");
    } catch (const StructuralError& e) {
      CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }
  }

  TEST_CASE("mixed Voronoi areas by hand") {
    const auto eq = vertex_areas(fixtures::equilateral_triangle());
    for (int i = 0; i < 3; ++i) CHECK(std::abs(eq[i] - std::sqrt(3.0) / 12.0) < 1e-15);
    const auto right = vertex_areas(fixtures::right_isosceles());
    CHECK(std::abs(right[0] - 0.25) < 1e-15);
    CHECK(std::abs(right[1] - 0.125) < 1e-15);
    CHECK(std::abs(right[2] - 0.125) < 1e-15);
  }

  TEST_CASE("obtuse triangle uses the half and quarter split") {
    Vertices v(3, 3);
    v << 0, 0, 0, 4, 0, 0, 2, 0.5, 0;
    Faces f(1, 3);
    f << 0, 1, 2;
    const TriangleMesh m(v, f);
    const auto a = vertex_areas(m);
    const double area = 0.5 * 4 * 0.5;
    CHECK(std::abs(a[2] - area / 2.0) < 1e-15);
    CHECK(std::abs(a[0] - area / 4.0) < 1e-15);
    CHECK(std::abs(a[1] - area / 4.0) < 1e-15);
  }

  TEST_CASE("areas partition the surface") {
    for (const auto& mesh : {icosphere(3), fixtures::lumpy_sphere(2, 0.3, 11), fixtures::torus(20, 10, 1.0, 0.4),
                             fixtures::grid(9, 0.25)}) {
      for (auto scheme : {AreaScheme::mixed_voronoi, AreaScheme::barycentric}) {
        const auto a = vertex_areas(mesh, scheme);
        CHECK((a.array() > 0.0).all());
        CHECK(std::abs(a.sum() - mesh.total_area()) <= 1e-10 * mesh.total_area());
      }
    }
  }

  TEST_CASE("degenerate face is rejected") {
    Vertices v(4, 3);
    v << 0, 0, 0, 1, 0, 0, 2, 0, 0, 0, 1, 0;
    Faces f(2, 3);
    f << 0, 1, 2, 0, 1, 3;
    const TriangleMesh m(v, f);
    CHECK(m.degenerate_faces() == std::vector<Index>{0});
    try {
      vertex_areas(m);
      FAIL("expected a structural error");
    } catch (const StructuralError& e) {
      CHECK(std::string(e.what()).find("degenerate") != std::string::npos);
    }
  }

  TEST_CASE("constant fields are in the null space") {
    for (const auto& mesh : {icosphere(2), fixtures::torus(20, 10, 1.0, 0.4), fixtures::grid(8, 0.2)}) {
      const LBOperator op = assemble_lb_operator(mesh);
      const Eigen::VectorXd f = Eigen::VectorXd::Constant(op.size(), 3.5);
      const Eigen::MatrixXd dense = fixtures::dense_laplacian(op);
      const double row_norm = dense.cwiseAbs().rowwise().sum().maxCoeff();
      CHECK(apply_lb(op, f).cwiseAbs().maxCoeff() <= 1e-12 * 3.5 * row_norm);
    }
  }

  TEST_CASE("linear functions are harmonic on a flat grid") {
    const auto mesh = fixtures::grid(11, 0.1);
    const LBOperator op = assemble_lb_operator(mesh);
    const Eigen::VectorXd x = mesh.vertices().col(0);
    const Eigen::VectorXd y = mesh.vertices().col(1);
    const Eigen::VectorXd lx = apply_lb(op, x);
    const Eigen::VectorXd ly = apply_lb(op, (2.0 * x - 3.0 * y).eval());
    for (int i = 1; i < 10; ++i)
      for (int j = 1; j < 10; ++j) {
        CHECK(std::abs(lx[i * 11 + j]) < 1e-8);
        CHECK(std::abs(ly[i * 11 + j]) < 1e-8);
      }
  }

  TEST_CASE("apply_lb matches the dense operator") {
    const LBOperator op = assemble_lb_operator(fixtures::torus(10, 10, 1.0, 0.35));
    REQUIRE(op.size() == 100);
    const Eigen::VectorXd f = fixtures::random_field(100, 5);
    const Eigen::VectorXd want = fixtures::dense_laplacian(op) * f;
    CHECK((apply_lb(op, f) - want).cwiseAbs().maxCoeff() <= 1e-12 * want.cwiseAbs().maxCoeff());
    CHECK(apply_lb(op, Eigen::VectorXd::Zero(100)).isZero(0.0));
    Eigen::MatrixXd two(100, 2);
    two << f, 2.0 * f;
    const Eigen::MatrixXd out = apply_lb(op, two);
    CHECK((out.col(1) - 2.0 * out.col(0)).cwiseAbs().maxCoeff() <= 1e-12 * want.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(apply_lb(op, Eigen::VectorXd::Zero(99)), DimensionError);
  }

  TEST_CASE("apply_lb is bit-reproducible") {
    const LBOperator op = assemble_lb_operator(icosphere(3));
    const Eigen::VectorXd f = fixtures::random_field(op.size(), 2);
    CHECK(apply_lb(op, f) == apply_lb(op, f));
  }

  TEST_CASE("generalized spectrum is nonnegative") {
    for (const auto& mesh : {icosphere(2), fixtures::lumpy_sphere(2, 0.2, 7), fixtures::torus(16, 8, 1.0, 0.4),
                             fixtures::grid(10, 0.3)}) {
      const auto lambda = fixtures::dense_spectrum(assemble_lb_operator(mesh));
      CHECK(lambda.minCoeff() >= -1e-10);
    }
  }

  TEST_CASE("icosphere spectrum approaches l(l+1)") {
    const Eigen::VectorXd want = (Eigen::VectorXd(9) << 2, 2, 2, 6, 6, 6, 6, 6, 12).finished();
    Eigen::VectorXd previous_error = Eigen::VectorXd::Constant(9, 1e300);
    for (int s : {2, 3, 4}) {
      const auto lambda = fixtures::dense_spectrum(assemble_lb_operator(icosphere(s)));
      const Eigen::VectorXd got = lambda.segment(1, 9);
      const Eigen::VectorXd error = ((got - want).array() / want.array()).abs();
      INFO("subdiv " << s << ": " << got.transpose());
      CHECK((error.array() <= previous_error.array() + 1e-12).all());
      previous_error = error;
      if (s == 3) CHECK(error.head(3).maxCoeff() < 0.02);
      if (s == 4) CHECK(error.maxCoeff() < 0.05);
    }
  }

  TEST_CASE("operator export") {
    const auto dir = fixtures::scratch_dir("export");
    const LBOperator tri = assemble_lb_operator(fixtures::equilateral_triangle());
    export_operator(tri, dir / "c.mtx", dir / "a.csv");
    std::ifstream in(dir / "c.mtx");
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");

    const LBOperator op = assemble_lb_operator(fixtures::lumpy_sphere(2, 0.2, 1));
    export_operator(op, dir / "c2.mtx", dir / "a2.csv");
    const SparseMatrix back = read_matrix_market(dir / "c2.mtx");
    CHECK(Eigen::MatrixXd(back) == Eigen::MatrixXd(op.stiffness));
    CHECK(read_field_csv(dir / "a2.csv") == op.areas);

    CHECK_THROWS_AS(export_operator(op, "", dir / "a3.csv"), IoError);
    CHECK_THROWS_AS(export_operator(op, dir / "c3.mtx", ""), IoError);
  }
}
