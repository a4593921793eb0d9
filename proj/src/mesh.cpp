#include "bsheat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace bsheat {

namespace {

double signed_area(const Eigen::Matrix<double, Eigen::Dynamic, 2>& nodes, int a, int b, int c) {
  const double ax = nodes(a, 0), ay = nodes(a, 1);
  return 0.5 * ((nodes(b, 0) - ax) * (nodes(c, 1) - ay) - (nodes(c, 0) - ax) * (nodes(b, 1) - ay));
}

// Undirected edge key with deterministic ordering.
std::pair<int, int> edge_key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

} // namespace

double Mesh::triangle_area(int t) const {
  return signed_area(nodes, triangles(t, 0), triangles(t, 1), triangles(t, 2));
}

double Mesh::total_area() const {
  double area = 0.0;
  for (int t = 0; t < num_triangles(); ++t) area += triangle_area(t);
  return area;
}

double Mesh::longest_edge() const {
  double h = 0.0;
  for (int t = 0; t < num_triangles(); ++t) {
    for (int e = 0; e < 3; ++e) {
      const int a = triangles(t, e), b = triangles(t, (e + 1) % 3);
      h = std::max(h, (nodes.row(a) - nodes.row(b)).norm());
    }
  }
  return h;
}

void Mesh::validate() const {
  const int V = num_nodes();
  const int F = num_triangles();
  const int m = num_boundary_nodes();
  if (V == 0) throw MeshValidationError("mesh has no nodes");
  if (F == 0) throw MeshValidationError("mesh has no triangles");

  for (int t = 0; t < F; ++t) {
    for (int e = 0; e < 3; ++e) {
      const int idx = triangles(t, e);
      if (idx < 0 || idx >= V)
        throw MeshValidationError("triangle " + std::to_string(t) + " references node index " +
                                  std::to_string(idx) + " outside [0, " + std::to_string(V) + ")");
    }
    if (triangle_area(t) <= 0.0)
      throw MeshValidationError("triangle " + std::to_string(t) +
                                " has non-positive signed area (inverted or degenerate)");
  }

  // Edge incidence: interior edges belong to exactly two triangles, boundary
  // edges to exactly one; anything else is non-manifold.
  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < F; ++t)
    for (int e = 0; e < 3; ++e)
      ++edge_count[edge_key(triangles(t, e), triangles(t, (e + 1) % 3))];

  std::set<std::pair<int, int>> boundary_edges;
  std::set<int> boundary_nodes;
  for (const auto& [key, count] : edge_count) {
    if (count == 1) {
      boundary_edges.insert(key);
      boundary_nodes.insert(key.first);
      boundary_nodes.insert(key.second);
    } else if (count != 2) {
      throw MeshValidationError("edge (" + std::to_string(key.first) + ", " +
                                std::to_string(key.second) + ") is shared by " +
                                std::to_string(count) + " triangles (non-manifold)");
    }
  }

  if (m != static_cast<int>(boundary_nodes.size()))
    throw MeshValidationError("open loop: boundary_loop lists " + std::to_string(m) +
                              " nodes but the triangulation has " +
                              std::to_string(boundary_nodes.size()) + " boundary nodes");
  std::set<int> loop_set(boundary_loop.begin(), boundary_loop.end());
  if (static_cast<int>(loop_set.size()) != m)
    throw MeshValidationError("boundary_loop contains a repeated node index");
  for (int idx : boundary_loop) {
    if (idx < 0 || idx >= V)
      throw MeshValidationError("boundary_loop references node index " + std::to_string(idx) +
                                " outside [0, " + std::to_string(V) + ")");
    if (!boundary_nodes.count(idx))
      throw MeshValidationError("boundary_loop node " + std::to_string(idx) +
                                " does not lie on any boundary edge");
  }
  for (int j = 0; j < m; ++j) {
    const int a = boundary_loop[j], b = boundary_loop[(j + 1) % m];
    if (!boundary_edges.count(edge_key(a, b)))
      throw MeshValidationError("open loop: consecutive boundary_loop nodes " + std::to_string(a) +
                                " and " + std::to_string(b) + " do not share a boundary edge");
  }
}

int TraceMap::boundary_index_of(int node) const {
  if (!is_boundary(node))
    throw std::out_of_range("node " + std::to_string(node) + " is not a boundary node");
  return position_in_loop[node];
}

double TraceMap::total_arc_length() const {
  double s = 0.0;
  for (double w : arc_weights) s += w;
  return s;
}

Mesh build_disk_mesh(int rings) {
  if (rings < 1) throw std::invalid_argument("build_disk_mesh: rings must be >= 1");
  const int R = rings;
  const int V = 1 + 3 * R * (R + 1);
  const int F = 6 * R * R;

  Mesh mesh;
  mesh.nodes.resize(V, 2);
  mesh.triangles.resize(F, 3);
  mesh.nodes.row(0) << 0.0, 0.0;

  // ring_start[j] = index of the first node of ring j (ring 0 is the center).
  std::vector<int> ring_start(R + 2);
  ring_start[0] = 0;
  ring_start[1] = 1;
  int next = 1;
  for (int j = 1; j <= R; ++j) {
    const double r = static_cast<double>(j) / R;
    for (int i = 0; i < 6 * j; ++i) {
      const double th = 2.0 * std::numbers::pi * i / (6.0 * j);
      mesh.nodes.row(next++) << r * std::cos(th), r * std::sin(th);
    }
    ring_start[j + 1] = next;
  }

  // Fill each annulus sector by sector.  Between ring j (inner) and ring j+1
  // (outer), sector s contributes j+1 outward triangles and j inward ones;
  // the modular index keeps the strips consistent across the sector seam.
  int f = 0;
  for (int j = 0; j < R; ++j) {
    for (int s = 0; s < 6; ++s) {
      auto inner = [&](int t) {
        if (j == 0) return 0;
        return ring_start[j] + (s * j + t) % (6 * j);
      };
      auto outer = [&](int t) { return ring_start[j + 1] + (s * (j + 1) + t) % (6 * (j + 1)); };
      for (int t = 0; t <= j; ++t) {
        mesh.triangles.row(f++) << outer(t), outer(t + 1), inner(t);
      }
      for (int t = 0; t < j; ++t) {
        mesh.triangles.row(f++) << inner(t), outer(t + 1), inner(t + 1);
      }
    }
  }

  mesh.boundary_loop.resize(6 * R);
  for (int i = 0; i < 6 * R; ++i) mesh.boundary_loop[i] = ring_start[R] + i;
  return mesh;
}

namespace {

// Token stream over the mesh text format: whitespace separated, `#` starts a
// comment running to end of line, and every token remembers its 1-based line.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  int line() const { return line_; }

  std::string next(const char* what) {
    std::string tok;
    char c;
    while (in_.get(c)) {
      if (c == '\n' || c == '#') {
        if (!tok.empty()) {
          in_.unget();  // reprocess the terminator on the next call
          return tok;
        }
        if (c == '#') {
          std::string junk;
          std::getline(in_, junk);
        }
        ++line_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok += c;
    }
    if (!tok.empty()) return tok;
    throw MeshParseError(line_, std::string("unexpected end of file while reading ") + what);
  }

  int next_int(const char* what) {
    const std::string tok = next(what);
    try {
      size_t pos = 0;
      const long v = std::stol(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return static_cast<int>(v);
    } catch (const std::exception&) {
      throw MeshParseError(line_, std::string("expected an integer for ") + what + ", got '" + tok + "'");
    }
  }

  double next_double(const char* what) {
    const std::string tok = next(what);
    try {
      size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw MeshParseError(line_, std::string("expected a number for ") + what + ", got '" + tok + "'");
    }
  }

 private:
  std::istream& in_;
  int line_ = 1;
};

} // namespace

Mesh load_mesh_text(std::istream& in) {
  TokenReader reader(in);

  const int V = reader.next_int("node count V");
  const int F = reader.next_int("triangle count F");
  const int m = reader.next_int("boundary node count m");
  const int header_line = reader.line();
  if (V <= 0) throw MeshParseError(header_line, "node count V must be positive");
  if (F <= 0) throw MeshParseError(header_line, "triangle count F must be positive");
  if (m <= 0) throw MeshParseError(header_line, "boundary node count m must be positive");

  Mesh mesh;
  mesh.nodes.resize(V, 2);
  mesh.triangles.resize(F, 3);
  mesh.boundary_loop.resize(m);

  for (int i = 0; i < V; ++i) {
    mesh.nodes(i, 0) = reader.next_double("node x coordinate");
    mesh.nodes(i, 1) = reader.next_double("node y coordinate");
  }

  std::vector<int> tri_line(F);
  for (int t = 0; t < F; ++t) {
    for (int e = 0; e < 3; ++e) {
      const int idx = reader.next_int("triangle node index");
      if (idx < 0 || idx >= V)
        throw MeshValidationError("line " + std::to_string(reader.line()) + ": triangle " +
                                  std::to_string(t) + " references node index " + std::to_string(idx) +
                                  " outside [0, " + std::to_string(V) + ")");
      mesh.triangles(t, e) = idx;
    }
    tri_line[t] = reader.line();
    if (mesh.triangle_area(t) <= 0.0)
      throw MeshValidationError("line " + std::to_string(tri_line[t]) + ": triangle " +
                                std::to_string(t) +
                                " has non-positive signed area (expected counterclockwise orientation)");
  }

  for (int j = 0; j < m; ++j) {
    const int idx = reader.next_int("boundary loop index");
    if (idx < 0 || idx >= V)
      throw MeshValidationError("line " + std::to_string(reader.line()) + ": boundary_loop references node index " +
                                std::to_string(idx) + " outside [0, " + std::to_string(V) + ")");
    mesh.boundary_loop[j] = idx;
  }

  mesh.validate();
  return mesh;
}

Mesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return load_mesh_text(in);
}

void save_mesh_text(const Mesh& mesh, std::ostream& out) {
  char buf[64];
  out << mesh.num_nodes() << ' ' << mesh.num_triangles() << ' ' << mesh.num_boundary_nodes() << '\n';
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g", mesh.nodes(i, 0), mesh.nodes(i, 1));
    out << buf << '\n';
  }
  for (int t = 0; t < mesh.num_triangles(); ++t)
    out << mesh.triangles(t, 0) << ' ' << mesh.triangles(t, 1) << ' ' << mesh.triangles(t, 2) << '\n';
  for (int idx : mesh.boundary_loop) out << idx << '\n';
}

TraceMap trace_map(const Mesh& mesh) {
  mesh.validate();
  TraceMap tm;
  const int m = mesh.num_boundary_nodes();
  tm.position_in_loop.assign(mesh.num_nodes(), -1);
  tm.arc_weights.resize(m);
  for (int j = 0; j < m; ++j) tm.position_in_loop[mesh.boundary_loop[j]] = j;
  for (int j = 0; j < m; ++j) {
    const int a = mesh.boundary_loop[j], b = mesh.boundary_loop[(j + 1) % m];
    tm.arc_weights[j] = (mesh.nodes.row(a) - mesh.nodes.row(b)).norm();
  }
  return tm;
}

} // namespace bsheat
