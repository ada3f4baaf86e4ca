#pragma once

#include <optional>
#include <vector>

#include "flatmod/rational.hpp"
#include "flatmod/surface.hpp"

namespace flatmod {

struct PointRef {
  int tri = 0;
  cplx pos{0, 0};
};

/// Outcome of tracing a straight geodesic.
struct TraceResult {
  enum class Stop { Length, VertexHit };
  Stop stop = Stop::Length;
  int tri = -1;      // triangle where the trace ended
  cplx point{0, 0};  // end point in that triangle's chart
  cplx dir{1, 0};    // final direction in that chart
  double length = 0;
  int hit_class = -1;            // when stop == VertexHit
  double hit_length = 0;         // arc length at the vertex hit
  std::vector<int> crossed;      // halfedges crossed, in order
  std::vector<double> cross_at;  // parameter along each crossed halfedge in (0,1)
};

/// Trace from a point strictly inside a triangle. Stops at max_len or when
/// passing within vertex_tol of a vertex.
TraceResult trace_line(const Surface& s, PointRef start, cplx dir, double max_len,
                       double vertex_tol = 1e-9);

/// Chart of the cone around a vertex class: the star's corners in
/// counterclockwise order with their starting angles. Total angle is the cone
/// angle. Placements map each corner's triangle chart into the cone plane
/// (vertex at the origin, wedge i spanning [base[i], base[i+1]]).
struct ConeChart {
  int cls = -1;
  double total_angle = 0;
  std::vector<int> corners;        // ccw link order
  std::vector<double> base;        // starting angle of each wedge
  std::vector<Isometry> place;     // triangle chart -> cone coordinates

  /// Triangle chart point for polar cone coordinates (r, phi); phi taken
  /// mod total_angle. The point must satisfy r < star radius to be valid.
  PointRef locate(double r, double phi) const;
  int wedge_of(double phi) const;
};

ConeChart cone_chart(const Surface& s, int cls);

/// Radius of the largest cone disk about the class contained in its star
/// (min distance from the vertex to the opposite edges of its triangles).
double star_radius(const Surface& s, const ConeChart& chart);

/// Geodesic segment between cone points, no cone point in its interior.
struct SaddleConnection {
  int from_cls = -1, to_cls = -1;
  cplx vec{0, 0};     // developed vector in cone coordinates at the source
  double angle = 0;   // direction in the source cone chart, in [0, cone angle)
  double length = 0;
  std::vector<int> crossed;   // corridor, for homology evaluation
  int start_corner = -1;      // corner of the source wedge
  int end_corner = -1;        // corner hit at the far end
  cplx deck_rot{1, 0};        // for loops: rotation of the deck map
  cplx deck_trans{0, 0};      // for loops: translation of the deck map
  bool is_loop() const { return from_cls == to_cls; }
};

/// All saddle connections leaving the marked class src, up to length cap.
std::vector<SaddleConnection> saddle_connections_from(const Surface& s, int src, double cap);

/// Saddle connections between all marked classes up to length cap, each
/// geometric segment reported once.
std::vector<SaddleConnection> all_saddle_connections(const Surface& s, double cap);

/// Straight-line visibility distances from one point: per vertex class and
/// per supplied target point (+inf when not visible within cap).
struct UnfoldHits {
  std::vector<double> class_dist;
  std::vector<double> target_dist;
};
UnfoldHits visibility_from_point(const Surface& s, PointRef x, double cap,
                                 const std::vector<PointRef>& targets);

/// Exact distance between two surface points; geodesics may pass through
/// cone points. cap bounds the search; returns +inf if nothing under cap.
double exact_distance(const Surface& s, PointRef x, PointRef y, double cap);

/// Exact distance from a point to the set of marked vertices.
double distance_to_marked(const Surface& s, PointRef x, double cap);

/// Rational homology classes of directed halfedges; rank is 2*genus.
struct HomologyBasis {
  int rank = 0;
  std::vector<std::vector<Rational>> half_class;  // per halfedge

  /// Class of the closed loop that starts at start_corner, runs through the
  /// corridor of crossed halfedges and ends at end_corner (same vertex
  /// class). Within-triangle reroutings do not affect the value.
  std::vector<Rational> corridor_class(const Surface& s, const std::vector<int>& crossed,
                                       int start_corner, int end_corner) const;
  static bool is_zero(const std::vector<Rational>& v);
};

HomologyBasis homology_basis(const Surface& s);

}  // namespace flatmod
