#pragma once

#include "flatmod/surface.hpp"

namespace flatmod {

/// Empty-circumdisk test for the hinge of edge h: true when the opposite
/// vertex of the partner triangle, developed across h, is outside or on the
/// circumcircle (cocircular counts as Delaunay; ties are never flipped).
bool is_delaunay_edge(const Surface& s, int h, double tol = 1e-9);

/// Whether flipping h is geometrically valid: the developed hinge is a
/// strictly convex quadrilateral and the hinge consists of two distinct
/// triangle slots.
bool can_flip(const Surface& s, int h);

/// Intrinsic edge flip. Invalid flips throw.
void flip_edge(Surface& s, int h);

/// Flip until every edge is Delaunay. Iteration is capped at 50x the edge
/// count; exceeding the cap signals numeric degeneracy and throws.
/// Returns the number of flips performed.
int make_delaunay(Surface& s, double tol = 1e-9);

/// Remove an unmarked regular vertex class (total angle 2pi) by flipping its
/// degree down to three and deleting it. Throws if the class is marked,
/// non-regular, or cannot be reduced.
void remove_vertex(Surface& s, int cls);

/// Remove every unmarked regular vertex (leaves at least one vertex on the
/// surface). Returns the number removed.
int remove_regular_vertices(Surface& s);

/// Canonical form used for isometry testing: regular vertices removed, then
/// Delaunay.
Surface canonical_triangulation(const Surface& s);

/// Split edge h at parameter t in (0,1) along its direction, subdividing both
/// adjacent triangles. The new vertex is regular and unmarked.
struct EdgeSplit {
  int new_corner;       // a corner at the new vertex, on the side of h
  int first_half;       // halfedge from start(h) to the new vertex
  int second_half;      // halfedge from the new vertex to end(h)
  int spoke;            // halfedge from the new vertex to the apex of h's side
};
EdgeSplit split_edge(Surface& s, int h, double t);

/// Insert a vertex at an interior point of a triangle (three-way split).
/// Returns a corner at the new regular vertex.
int split_triangle_at(Surface& s, int tri, cplx pos);

}  // namespace flatmod
