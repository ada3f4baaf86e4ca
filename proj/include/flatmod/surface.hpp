#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "flatmod/geom.hpp"

namespace flatmod {

/// Euclidean triangle in its own chart, counterclockwise.
struct PlanarTriangle {
  std::array<cplx, 3> p;

  cplx edge_vec(int e) const { return p[(e + 1) % 3] - p[e]; }
  double corner_angle(int j) const { return angle_at(p[(j + 2) % 3], p[j], p[(j + 1) % 3]); }
  double area() const { return 0.5 * cross(p[1] - p[0], p[2] - p[0]); }
};

/// Orientation-preserving planar isometry z -> rot*z + trans.
struct Isometry {
  cplx rot{1.0, 0.0};
  cplx trans{0.0, 0.0};

  cplx operator()(cplx z) const { return rot * z + trans; }
  Isometry then(const Isometry& outer) const {
    // outer \circ this
    return {outer.rot * rot, outer.rot * trans + outer.trans};
  }
  Isometry inverse() const { return {1.0 / rot, -trans / rot}; }
};

/// Pseudo-polygonal model: side vectors in boundary order (their sum
/// vanishes), a pairing of the sides, and the per-pair rotation r with
/// side = r * paired side. Note the sign convention: the linear holonomy
/// across a glued pair is -r, since gluing reverses boundary orientation.
struct PolygonalModel {
  std::vector<cplx> sides;
  std::vector<int> pairing;    // involution without fixed points
  std::vector<cplx> rotations; // rotations[i] * sides[pairing[i]] == sides[i]

  int k() const { return int(sides.size()) / 2; }
  std::vector<cplx> vertices() const;  // V_0 = 0, V_{j+1} = V_j + sides[j]
  void validate(double tol = 1e-9) const;
};

/// A closed flat surface with conical singularities, stored as Euclidean
/// triangles with a complete pairing of their edges.
///
/// Halfedge h = 3*t + e runs from corner e to corner (e+1)%3 of triangle t.
/// Vertex classes are the corner orbits of the gluing; cone points are the
/// marked classes (a marked class may have angle 2pi, e.g. the vertex of a
/// regular torus).
class Surface {
 public:
  std::vector<PlanarTriangle> tris;
  std::vector<int> glue;  // halfedge -> partner halfedge

  Surface() = default;
  Surface(std::vector<PlanarTriangle> triangles, std::vector<int> gluing,
          std::vector<bool> marked_classes = {});

  int num_tris() const { return int(tris.size()); }
  int num_halfedges() const { return 3 * num_tris(); }
  int num_edges() const { return num_halfedges() / 2; }
  int num_vertex_classes() const { return nclasses_; }

  int tri_of(int h) const { return h / 3; }
  int side_of(int h) const { return h % 3; }
  cplx edge_vector(int h) const { return tris[h / 3].edge_vec(h % 3); }
  double edge_length(int h) const { return std::abs(edge_vector(h)); }
  cplx corner_point(int h) const { return tris[h / 3].p[h % 3]; }

  /// Isometry placing the chart of the partner triangle of h into the chart
  /// of h's triangle, matching the shared edge.
  Isometry cross_map(int h) const;

  /// Unit rotation of cross_map(h); equals the spec'd gluing rotation, i.e.
  /// edge_vector(h) == rot * (-edge_vector(glue[h])).
  cplx gluing_rotation(int h) const { return cross_map(h).rot; }

  int vertex_class(int corner) const { return vcls_[corner]; }
  const std::vector<int>& class_corners(int cls) const { return class_corners_[cls]; }
  double class_angle(int cls) const { return class_angle_[cls]; }
  bool is_marked(int cls) const { return marked_[cls]; }
  void set_marked(int cls, bool m);
  int num_marked() const;

  /// Next corner counterclockwise around the vertex of the given corner.
  int next_corner_ccw(int corner) const;

  int euler_characteristic() const { return nclasses_ - num_edges() + num_tris(); }
  int genus() const { return (2 - euler_characteristic()) / 2; }

  double area() const;

  /// (class id, cone angle) for each marked class.
  std::vector<std::pair<int, double>> cone_angles() const;

  /// Largest deviation of unmarked classes from total angle 2pi, and of
  /// the discrete Gauss-Bonnet identity; used by validate().
  double gauss_bonnet_defect() const;

  /// Checks the combinatorial and metric invariants; throws on violation.
  void validate(double tol = 1e-7) const;

  /// Recompute vertex classes and angles after a structural change,
  /// preserving markings through the given corner-representative map
  /// (corner -> was marked).
  void rebuild_classes(const std::vector<bool>& corner_marked);
  void rebuild_classes();  // keeps current per-corner markings

 private:
  int nclasses_ = 0;
  std::vector<int> vcls_;                     // corner -> class
  std::vector<std::vector<int>> class_corners_;
  std::vector<double> class_angle_;
  std::vector<bool> marked_;
};

/// Product of gluing rotations along a closed dual-graph loop given by the
/// halfedges crossed in order. Throws if the path is not a closed loop.
cplx holonomy_along(const Surface& s, const std::vector<int>& crossed);

/// Glue a pseudo-polygon into a closed surface. The model's polygon is
/// ear-clipped; polygon vertices become the surface's vertex classes.
/// Classes with cone angle != 2pi are marked; if all classes are regular the
/// first one is marked so the singular set is never empty.
Surface build_from_polygon(const PolygonalModel& model, double tol = 1e-9);

/// Cut the surface along a graph in the 1-skeleton whose complement is simply
/// connected and develop the complement; returns the resulting pseudo-polygon.
/// With no explicit graph, the complement of a breadth-first dual spanning
/// tree rooted at base_tri is used.
PolygonalModel develop(const Surface& s, int base_tri = 0,
                       const std::vector<int>* cut_edges = nullptr);

/// Torus glued from a hexagon. The three patterns are the three one-face
/// gluings of a hexagon with two vertex classes; pattern 2 is the opposite-
/// side pairing, whose classes alternate around the boundary.
/// Throws if paired sides mismatch in length. If every class is regular the
/// result is flagged (second member true) and both classes stay marked.
std::pair<Surface, bool> hexagon_torus(int pattern, const std::array<cplx, 6>& sides,
                                       double tol = 1e-9);

/// Hexagon side vectors realizing the given pattern from shape parameters.
/// For pattern 2 the free sides are (a, b, c) with the opposite sides
/// determined by the rotations (r1, r2): sides = (a, b, c, r1*a', ...).
std::array<cplx, 6> hexagon_sides_pattern2(cplx a, cplx b, cplx rot1, cplx rot2);

/// Rectangle torus [0,w] x [0,h] with one marked (regular) vertex.
Surface rect_torus(double w, double h);
inline Surface square_torus() { return rect_torus(1.0, 1.0); }

/// Torus C/(Z + tau Z) with one marked vertex.
Surface lattice_torus(cplx tau);

/// Flat sphere obtained by doubling a Euclidean triangle; the cone angles are
/// twice the triangle's angles.
Surface double_triangle_sphere(cplx a, cplx b, cplx c);

/// Direct-isometry test between closed flat surfaces, up to relabeling and a
/// global rotation. Compares canonical triangulations (regular vertices
/// removed, Delaunay); regular tori are compared through lattice invariants.
bool isometric(const Surface& a, const Surface& b, double tol = 1e-7);

}  // namespace flatmod
