#pragma once

#include <array>
#include <complex>
#include <vector>

namespace flatmod {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

/// Twice the signed area of triangle (a,b,c); positive for counterclockwise.
inline double orient2(cplx a, cplx b, cplx c) { return cross(b - a, c - a); }

/// Unsigned interior angle at vertex b of the wedge a-b-c, in [0, pi].
double angle_at(cplx a, cplx b, cplx c);

/// Incircle predicate: > 0 when d lies strictly inside the circumcircle of the
/// counterclockwise triangle (a,b,c). Plain double determinant; tolerances are
/// handled by the callers.
double incircle(cplx a, cplx b, cplx c, cplx d);

/// Circumcenter of a non-degenerate triangle.
cplx circumcenter(cplx a, cplx b, cplx c);

/// Shoelace area of a polygon (positive when counterclockwise).
double polygon_area(const std::vector<cplx>& poly);

bool point_in_triangle(cplx p, cplx a, cplx b, cplx c, double eps = 1e-12);

/// Proper-crossing test of open segments (a,b) and (c,d); shared endpoints do
/// not count as crossings.
bool segments_cross(cplx a, cplx b, cplx c, cplx d, double eps = 1e-12);

bool point_in_polygon(cplx p, const std::vector<cplx>& poly);

/// Whether the open segment (a,b) stays inside the simple polygon: it must not
/// cross any boundary edge and its midpoint must lie inside.
bool segment_inside_polygon(cplx a, cplx b, const std::vector<cplx>& poly,
                            double eps = 1e-12);

/// Ear-clipping triangulation of a simple polygon given by its vertex cycle
/// (counterclockwise). Returns index triples into the input. Throws on
/// degenerate input (self-intersection is not detected, but no ear being
/// available is).
std::vector<std::array<int, 3>> ear_clip(const std::vector<cplx>& poly,
                                         double eps = 1e-12);

}  // namespace flatmod
