#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsheat {

// Errors raised while reading or validating meshes.  Parse errors always name
// the 1-based line of the offending token; validation errors name the line
// when the defect can be tied to one.
struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MeshParseError : MeshError {
  MeshParseError(int line, const std::string& what)
      : MeshError("mesh parse error at line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

struct MeshValidationError : MeshError {
  using MeshError::MeshError;
};

// Conforming triangulation of a planar domain Omega with an explicitly
// ordered closed boundary loop describing Gamma = boundary of Omega.
// Triangles are counterclockwise (positive signed area); the boundary loop
// lists, in cyclic order, exactly the nodes lying on edges owned by a single
// triangle.  Immutable by convention once built/loaded.
struct Mesh {
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;  // V x 2 coordinates
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles; // F x 3 node indices, CCW
  std::vector<int> boundary_loop;                  // length m, cyclic order

  int num_nodes() const { return static_cast<int>(nodes.rows()); }
  int num_triangles() const { return static_cast<int>(triangles.rows()); }
  int num_boundary_nodes() const { return static_cast<int>(boundary_loop.size()); }

  // Signed area of triangle t (positive for CCW orientation).
  double triangle_area(int t) const;
  double total_area() const;
  // Longest edge over all triangles; the mesh parameter h.
  double longest_edge() const;

  // Checks every structural invariant (index ranges, orientation, loop
  // closure, loop = boundary-node set); throws MeshValidationError on the
  // first violation.
  void validate() const;
};

// Identification of boundary nodes with their position along the loop,
// plus the chord lengths used as arc weights for all surface integrals.
struct TraceMap {
  std::vector<int> position_in_loop;  // size V; -1 marks interior nodes
  std::vector<double> arc_weights;    // length m; chord loop[j] -> loop[j+1 mod m]

  bool is_boundary(int node) const {
    return node >= 0 && node < static_cast<int>(position_in_loop.size()) &&
           position_in_loop[node] >= 0;
  }
  // Position of a node in the boundary loop; throws std::out_of_range with a
  // "not a boundary node" message for interior or invalid indices.
  int boundary_index_of(int node) const;
  double total_arc_length() const;
};

// Structured triangulation of the unit disk: center node plus rings
// j = 1..rings at radius j/rings carrying 6j equally spaced nodes, so
// V = 1 + 3 rings (rings+1), F = 6 rings^2, m = 6 rings, h ~ 1/rings.
// The boundary loop is the outermost ring in angular order.
Mesh build_disk_mesh(int rings);

// Mesh text format (whitespace separated, `#` starts a comment line):
//   line 1:        V F m
//   V lines:       x y
//   F lines:       i j k          (0-based node indices, counterclockwise)
//   m lines:       boundary loop node index, cyclic order
// Loading validates eagerly and reports 1-based line numbers.
Mesh load_mesh_text(std::istream& in);
Mesh load_mesh_file(const std::string& path);
void save_mesh_text(const Mesh& mesh, std::ostream& out);

TraceMap trace_map(const Mesh& mesh);

} // namespace bsheat
