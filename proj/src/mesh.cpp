#include "heatflow/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "heatflow/error.hpp"
#include "heatflow/field_io.hpp"

namespace heatflow {
namespace {

// A whitespace-separated token with the line it came from.
struct Token {
  std::string text;
  std::size_t line;
};

class TokenStream {
public:
  TokenStream(std::vector<Token> tokens, std::string source)
      : tokens_(std::move(tokens)), source_(std::move(source)) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& next(std::string_view expecting) {
    if (done()) {
      const std::size_t line = tokens_.empty() ? 1 : tokens_.back().line;
      throw ParseError(source_, line, "unexpected end of file, expecting " + std::string(expecting));
    }
    return tokens_[pos_++];
  }

  double next_double(std::string_view what) {
    const Token& t = next(what);
    double v = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
      throw ParseError(source_, t.line, "expected " + std::string(what) + ", got '" + t.text + "'");
    return v;
  }

  long next_integer(std::string_view what) {
    const Token& t = next(what);
    long v = 0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw ParseError(source_, t.line, "expected " + std::string(what) + ", got '" + t.text + "'");
    return v;
  }

  std::size_t current_line() const {
    if (tokens_.empty()) return 1;
    return pos_ < tokens_.size() ? tokens_[pos_].line : tokens_.back().line;
  }

  const std::string& source() const { return source_; }

private:
  std::vector<Token> tokens_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<Token> tokenize(const std::vector<std::string>& lines, std::size_t first_line) {
  std::vector<Token> tokens;
  for (std::size_t i = first_line; i < lines.size(); ++i) {
    std::string_view view = lines[i];
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    std::istringstream ss{std::string(view)};
    std::string word;
    while (ss >> word) tokens.push_back({word, i + 1});
  }
  return tokens;
}

int checked_face_index(TokenStream& ts, Index num_vertices) {
  const std::size_t line = ts.current_line();
  const long idx = ts.next_integer("vertex index");
  if (idx < 0 || idx >= num_vertices)
    throw ParseError(ts.source(), line,
                     "face index " + std::to_string(idx) + " out of range [0, " +
                         std::to_string(num_vertices) + ")");
  return static_cast<int>(idx);
}

TriangleMesh parse_off(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  TokenStream ts(tokenize(lines, 0), path.string());
  const Token& magic = ts.next("OFF header");
  std::size_t header_line = magic.line;
  std::string head = magic.text;
  if (head != "OFF") {
    if (head.size() > 3 && head.compare(head.size() - 3, 3, "OFF") == 0)
      throw ParseError(path.string(), header_line, "unsupported OFF variant '" + head + "'");
    throw ParseError(path.string(), header_line, "missing OFF header");
  }
  const long nv = ts.next_integer("vertex count");
  const long nf = ts.next_integer("face count");
  ts.next_integer("edge count");
  if (nv < 0 || nf < 0) throw ParseError(path.string(), header_line, "negative element count");

  Vertices v(nv, 3);
  for (long i = 0; i < nv; ++i)
    for (int c = 0; c < 3; ++c) v(i, c) = ts.next_double("vertex coordinate");

  Faces f(nf, 3);
  for (long i = 0; i < nf; ++i) {
    const std::size_t line = ts.current_line();
    const long arity = ts.next_integer("face vertex count");
    if (arity != 3)
      throw ParseError(path.string(), line,
                       "only triangles are supported, face has " + std::to_string(arity) + " vertices");
    for (int c = 0; c < 3; ++c) f(i, c) = checked_face_index(ts, nv);
    // Optional per-face colour values run to the end of the line.
    while (!ts.done() && ts.current_line() == line) ts.next("face attribute");
  }
  return TriangleMesh(std::move(v), std::move(f));
}

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<std::string> properties;  // "list" entries hold the list name
  std::vector<bool> is_list;
};

TriangleMesh parse_ply(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const std::string src = path.string();
  if (lines.empty() || lines[0] != "ply") throw ParseError(src, 1, "missing 'ply' magic");

  std::vector<PlyElement> elements;
  std::size_t body_start = 0;
  bool ascii = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream ss(lines[i]);
    std::string key;
    ss >> key;
    if (key.empty() || key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii") throw ParseError(src, i + 1, "only ASCII PLY is supported, got '" + fmt + "'");
      ascii = true;
    } else if (key == "element") {
      PlyElement e;
      if (!(ss >> e.name >> e.count) || e.count < 0)
        throw ParseError(src, i + 1, "malformed element declaration");
      elements.push_back(std::move(e));
    } else if (key == "property") {
      if (elements.empty()) throw ParseError(src, i + 1, "property before any element");
      std::string type;
      ss >> type;
      std::string name;
      if (type == "list") {
        std::string count_type, item_type;
        ss >> count_type >> item_type >> name;
        elements.back().is_list.push_back(true);
      } else {
        ss >> name;
        elements.back().is_list.push_back(false);
      }
      if (name.empty()) throw ParseError(src, i + 1, "malformed property declaration");
      elements.back().properties.push_back(name);
    } else if (key == "end_header") {
      body_start = i + 1;
      break;
    } else {
      throw ParseError(src, i + 1, "unknown header keyword '" + key + "'");
    }
  }
  if (body_start == 0) throw ParseError(src, lines.size(), "missing end_header");
  if (!ascii) throw ParseError(src, 2, "missing format line");

  Vertices v;
  Faces f;
  bool have_vertices = false, have_faces = false;
  TokenStream ts(tokenize(lines, body_start), src);
  for (const PlyElement& e : elements) {
    if (e.name == "vertex") {
      auto find = [&](const char* n) {
        auto it = std::find(e.properties.begin(), e.properties.end(), n);
        if (it == e.properties.end())
          throw ParseError(src, body_start, std::string("vertex element lacks property ") + n);
        return static_cast<std::size_t>(it - e.properties.begin());
      };
      const std::size_t ix = find("x"), iy = find("y"), iz = find("z");
      v.resize(e.count, 3);
      for (long r = 0; r < e.count; ++r) {
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
          if (e.is_list[p]) {
            const long n = ts.next_integer("list length");
            for (long k = 0; k < n; ++k) ts.next("list item");
            continue;
          }
          const double value = ts.next_double("vertex property");
          if (p == ix) v(r, 0) = value;
          if (p == iy) v(r, 1) = value;
          if (p == iz) v(r, 2) = value;
        }
      }
      have_vertices = true;
    } else if (e.name == "face") {
      if (!have_vertices) throw ParseError(src, body_start, "face element precedes vertex element");
      f.resize(e.count, 3);
      for (long r = 0; r < e.count; ++r) {
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
          const bool indices = e.is_list[p] && (e.properties[p] == "vertex_indices" ||
                                                e.properties[p] == "vertex_index");
          if (!e.is_list[p]) {
            ts.next("face property");
            continue;
          }
          const std::size_t line = ts.current_line();
          const long n = ts.next_integer("list length");
          if (!indices) {
            for (long k = 0; k < n; ++k) ts.next("list item");
            continue;
          }
          if (n != 3)
            throw ParseError(src, line,
                             "only triangles are supported, face has " + std::to_string(n) + " vertices");
          for (int c = 0; c < 3; ++c) f(r, c) = checked_face_index(ts, v.rows());
        }
      }
      have_faces = true;
    } else {
      for (long r = 0; r < e.count; ++r)
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
          if (e.is_list[p]) {
            const long n = ts.next_integer("list length");
            for (long k = 0; k < n; ++k) ts.next("list item");
          } else {
            ts.next("property");
          }
        }
    }
  }
  if (!have_vertices || !have_faces) throw ParseError(src, body_start, "PLY needs vertex and face elements");
  return TriangleMesh(std::move(v), std::move(f));
}

}  // namespace

TriangleMesh::TriangleMesh(Vertices vertices, Faces faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  if (!vertices_.allFinite()) throw StructuralError("mesh has non-finite vertex coordinates");
  const Index n = vertices_.rows();
  std::vector<bool> referenced(static_cast<std::size_t>(n), false);
  for (Index f = 0; f < faces_.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int idx = faces_(f, c);
      if (idx < 0 || idx >= n)
        throw StructuralError("face " + std::to_string(f) + " index " + std::to_string(idx) +
                              " out of range [0, " + std::to_string(n) + ")");
      referenced[static_cast<std::size_t>(idx)] = true;
    }
    if (faces_(f, 0) == faces_(f, 1) || faces_(f, 1) == faces_(f, 2) || faces_(f, 0) == faces_(f, 2))
      throw StructuralError("face " + std::to_string(f) + " repeats a vertex");
  }
  for (Index i = 0; i < n; ++i)
    if (!referenced[static_cast<std::size_t>(i)])
      throw StructuralError("vertex " + std::to_string(i) + " is not referenced by any face");
}

double TriangleMesh::face_area(Index f) const {
  const Eigen::RowVector3d p0 = vertices_.row(faces_(f, 0));
  const Eigen::RowVector3d p1 = vertices_.row(faces_(f, 1));
  const Eigen::RowVector3d p2 = vertices_.row(faces_(f, 2));
  return 0.5 * (p1 - p0).cross(p2 - p0).norm();
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (Index f = 0; f < num_faces(); ++f) sum += face_area(f);
  return sum;
}

double TriangleMesh::max_edge_length() const {
  double longest = 0.0;
  for (Index f = 0; f < num_faces(); ++f)
    for (int c = 0; c < 3; ++c)
      longest = std::max(longest,
                         (vertices_.row(faces_(f, c)) - vertices_.row(faces_(f, (c + 1) % 3))).norm());
  return longest;
}

std::vector<Index> TriangleMesh::degenerate_faces(double rel_tol) const {
  std::vector<Index> out;
  for (Index f = 0; f < num_faces(); ++f) {
    double longest = 0.0;
    for (int c = 0; c < 3; ++c)
      longest = std::max(longest, (vertices_.row(faces_(f, c)) - vertices_.row(faces_(f, (c + 1) % 3)))
                                      .squaredNorm());
    if (face_area(f) < rel_tol * longest || longest == 0.0) out.push_back(f);
  }
  return out;
}

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return MeshFormat::off;
  if (ext == ".ply") return MeshFormat::ply_ascii;
  throw IoError("cannot infer mesh format from '" + path.string() + "' (expected .off or .ply)");
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                       std::vector<Index>* degenerate) {
  TriangleMesh mesh = format == MeshFormat::off ? parse_off(path) : parse_ply(path);
  if (degenerate) *degenerate = mesh.degenerate_faces();
  return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  return load_mesh(path, mesh_format_from_path(path));
}

void save_off(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file '" + path.string() + "'");
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
  for (Index i = 0; i < mesh.num_vertices(); ++i)
    out << format_double(mesh.vertices()(i, 0)) << ' ' << format_double(mesh.vertices()(i, 1)) << ' '
        << format_double(mesh.vertices()(i, 2)) << '\n';
  for (Index f = 0; f < mesh.num_faces(); ++f)
    out << "3 " << mesh.faces()(f, 0) << ' ' << mesh.faces()(f, 1) << ' ' << mesh.faces()(f, 2) << '\n';
  if (!out) throw IoError("failed writing mesh file '" + path.string() + "'");
}

}  // namespace heatflow
