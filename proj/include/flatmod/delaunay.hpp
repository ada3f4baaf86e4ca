#pragma once

#include <optional>

#include "flatmod/mesh_ops.hpp"
#include "flatmod/surface.hpp"
#include "flatmod/unfold.hpp"

namespace flatmod {

/// Delaunay triangulation on the cone points: unmarked regular vertices are
/// removed, then edges are flipped until every hinge passes the
/// empty-circumdisk test (cocircular hinges count as Delaunay).
Surface delaunay(const Surface& s);

bool is_delaunay(const Surface& s, double tol = 1e-9);

/// Shortest saddle connection joining two distinct cone points. It is always
/// realised by a Delaunay edge, which is how it is computed; the witness
/// carries the developed vector. Requires at least two marked classes.
std::pair<double, SaddleConnection> relative_systole(const Surface& s);

/// Max distance to the singular set. Exact: the largest circumradius over the
/// Delaunay triangles.
double relative_diameter(const Surface& s);

/// (lower, upper) bracket of the diameter. The lower bound is the maximum of
/// exact point-to-point distances over a sample set (subdivision points,
/// circumcenters, systole antipodes); the upper bound is 2 n s.
std::pair<double, double> diameter_bounds(const Surface& s, int samples = 400);

struct SystoleResult {
  double length = 0;
  bool regular = false;  // realised by a closed regular geodesic (cylinder core)
  cplx vec{0, 0};        // developed vector of the witness
  SaddleConnection witness;
};

/// Shortest essential closed curve, searched among saddle loops at cone
/// points and cylinder core curves (translation deck classes). Requires
/// genus >= 1 and throws if no witness is found below length_cap.
SystoleResult systole(const Surface& s, double length_cap);

/// Length and corner angle of the unique simple closed broken geodesic
/// through a point at distance r on the cone of angle theta < pi.
std::pair<double, double> cone_closed_geodesic(double theta, double r);

/// The explicit constants (K1, K2) controlling when large diameter forces a
/// long embedded cylinder, for n cone points and holonomy image of order q.
std::pair<double, double> diameter_constants(int n, std::int64_t q);

struct Cylinder {
  double width = 0;     // circumference of the core curve
  double length = 0;    // transverse extent (distance between the boundaries)
  PointRef core_point;  // a point on the core geodesic
  cplx core_dir{1, 0};  // direction of the core geodesic in that chart
};

/// Maximal flat cylinder through the systole witness, when the witness is a
/// regular closed geodesic; none otherwise. Genus one only.
std::optional<Cylinder> find_cylinder(const Surface& s);

/// All four characteristic functions of the area-one normalisation.
struct MetricReport {
  double systole = 0;
  double rel_systole = 0;
  double diameter_lower = 0;
  double diameter_upper = 0;
  double rel_diameter = 0;
  double tol = 1e-9;
  bool systole_regular = false;
  cplx systole_vec{0, 0};
  int delta_from = -1, delta_to = -1;
  cplx delta_vec{0, 0};
};

MetricReport metric_report(const Surface& s, int samples = 400);

/// Copy of the surface scaled by the given factor.
Surface scaled(const Surface& s, double factor);

}  // namespace flatmod
