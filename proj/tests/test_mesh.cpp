#include "doctest.h"

#include "bsheat/mesh.hpp"

#include <cmath>
#include <sstream>

using namespace bsheat;

namespace {

bool message_contains(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

} // namespace

TEST_SUITE("mesh") {

TEST_CASE("disk mesh counts and area for one ring") {
  const Mesh mesh = build_disk_mesh(1);
  CHECK(mesh.num_nodes() == 7);
  CHECK(mesh.num_triangles() == 6);
  CHECK(mesh.num_boundary_nodes() == 6);
  // hexagon inscribed in the unit circle
  CHECK(mesh.total_area() == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("disk mesh counts and boundary radius for two rings") {
  const Mesh mesh = build_disk_mesh(2);
  CHECK(mesh.num_nodes() == 19);
  CHECK(mesh.num_boundary_nodes() == 12);
  for (int idx : mesh.boundary_loop) {
    const double r = std::hypot(mesh.nodes(idx, 0), mesh.nodes(idx, 1));
    CHECK(std::abs(r - 1.0) <= 1e-12);
  }
}

TEST_CASE("disk mesh size formulas hold for several ring counts") {
  for (int R : {1, 2, 3, 5, 8}) {
    const Mesh mesh = build_disk_mesh(R);
    CHECK(mesh.num_nodes() == 1 + 3 * R * (R + 1));
    CHECK(mesh.num_triangles() == 6 * R * R);
    CHECK(mesh.num_boundary_nodes() == 6 * R);
    CHECK_NOTHROW(mesh.validate());
    CHECK(mesh.longest_edge() == doctest::Approx(1.0 / R).epsilon(0.35));
  }
}

TEST_CASE("zero rings is rejected") {
  CHECK_THROWS_AS(build_disk_mesh(0), std::invalid_argument);
}

TEST_CASE("area and perimeter converge at second order") {
  const double pi = 3.14159265358979323846;
  double prev_area_err = 0.0, prev_len_err = 0.0;
  int level = 0;
  for (int R : {4, 8, 16}) {
    const Mesh mesh = build_disk_mesh(R);
    const TraceMap trace = trace_map(mesh);
    const double area_err = std::abs(mesh.total_area() - pi);
    const double len_err = std::abs(trace.total_arc_length() - 2.0 * pi);
    if (level > 0) {
      CHECK(std::log2(prev_area_err / area_err) >= 1.9);
      CHECK(std::log2(prev_len_err / len_err) >= 1.9);
    }
    prev_area_err = area_err;
    prev_len_err = len_err;
    ++level;
  }
}

TEST_CASE("trace map gives regular-polygon chord lengths") {
  for (int R : {1, 4}) {
    const Mesh mesh = build_disk_mesh(R);
    const TraceMap trace = trace_map(mesh);
    const double chord = 2.0 * std::sin(3.14159265358979323846 / (6.0 * R));
    REQUIRE(static_cast<int>(trace.arc_weights.size()) == 6 * R);
    for (double w : trace.arc_weights) CHECK(w == doctest::Approx(chord).epsilon(1e-13));
  }
  // hexagon perimeter is exactly 6 unit chords
  const Mesh hexagon = build_disk_mesh(1);
  CHECK(trace_map(hexagon).total_arc_length() == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("trace map round-trips boundary indices and rejects interior nodes") {
  const Mesh mesh = build_disk_mesh(3);
  const TraceMap trace = trace_map(mesh);
  for (int j = 0; j < mesh.num_boundary_nodes(); ++j)
    CHECK(trace.boundary_index_of(mesh.boundary_loop[j]) == j);
  CHECK(!trace.is_boundary(0));  // the center node
  try {
    trace.boundary_index_of(0);
    FAIL("expected out_of_range");
  } catch (const std::out_of_range& e) {
    CHECK(message_contains(e, "not a boundary node"));
  }
}

TEST_CASE("text serialization round-trips exactly") {
  const Mesh mesh = build_disk_mesh(2);
  std::ostringstream out;
  save_mesh_text(mesh, out);
  std::istringstream in(out.str());
  const Mesh copy = load_mesh_text(in);
  REQUIRE(copy.num_nodes() == mesh.num_nodes());
  REQUIRE(copy.num_triangles() == mesh.num_triangles());
  CHECK(copy.nodes == mesh.nodes);  // 17 significant digits reproduce doubles
  CHECK(copy.triangles == mesh.triangles);
  CHECK(copy.boundary_loop == mesh.boundary_loop);
}

TEST_CASE("comments and blank lines are accepted") {
  std::istringstream in(
      "# a one-triangle mesh with all edges on the boundary\n"
      "3 1 3\n"
      "0 0\n1 0  # inline remark\n0 1\n"
      "\n"
      "0 1 2\n"
      "0 1 2\n");
  const Mesh mesh = load_mesh_text(in);
  CHECK(mesh.num_nodes() == 3);
  CHECK(mesh.total_area() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("out-of-range triangle index names the index") {
  std::istringstream in("3 1 3\n0 0\n1 0\n0 1\n0 1 7\n0 1 2\n");
  try {
    load_mesh_text(in);
    FAIL("expected validation error");
  } catch (const MeshError& e) {
    CHECK(message_contains(e, "7"));
    CHECK(message_contains(e, "line 5"));
  }
}

TEST_CASE("boundary loop omitting a node is an open loop") {
  // square split into two triangles: all four nodes are boundary nodes
  std::istringstream in("4 2 3\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 1 2\n");
  try {
    load_mesh_text(in);
    FAIL("expected validation error");
  } catch (const MeshValidationError& e) {
    CHECK(message_contains(e, "open loop"));
  }
}

TEST_CASE("inverted triangle is rejected with its line number") {
  std::istringstream in("3 1 3\n0 0\n1 0\n0 1\n0 2 1\n0 1 2\n");
  try {
    load_mesh_text(in);
    FAIL("expected validation error");
  } catch (const MeshError& e) {
    CHECK(message_contains(e, "non-positive signed area"));
    CHECK(message_contains(e, "line 5"));
  }
}

TEST_CASE("malformed header and tokens name their line") {
  std::istringstream bad_count("0 1 1\n");
  CHECK_THROWS_AS(load_mesh_text(bad_count), MeshParseError);

  std::istringstream bad_token("3 1 3\n0 0\nxx 0\n0 1\n0 1 2\n0 1 2\n");
  try {
    load_mesh_text(bad_token);
    FAIL("expected parse error");
  } catch (const MeshParseError& e) {
    CHECK(message_contains(e, "line 3"));
    CHECK(message_contains(e, "'xx'"));
  }

  std::istringstream truncated("3 1 3\n0 0\n1 0\n");
  CHECK_THROWS_AS(load_mesh_text(truncated), MeshParseError);
}

TEST_CASE("non-boundary node in the loop is rejected") {
  const Mesh disk = build_disk_mesh(2);
  Mesh broken = disk;
  broken.boundary_loop[0] = 0;  // the center node
  CHECK_THROWS_AS(broken.validate(), MeshValidationError);
}

TEST_CASE("missing mesh file reports its path") {
  try {
    load_mesh_file("/nonexistent/mesh.txt");
    FAIL("expected error");
  } catch (const MeshError& e) {
    CHECK(message_contains(e, "/nonexistent/mesh.txt"));
  }
}

} // TEST_SUITE
