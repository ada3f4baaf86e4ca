#include "flatmod/geom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace flatmod {

double angle_at(cplx a, cplx b, cplx c) {
  cplx u = a - b, v = c - b;
  double ang = std::atan2(cross(u, v), dot(u, v));
  return std::abs(ang);
}

double incircle(cplx a, cplx b, cplx c, cplx d) {
  // standard 3x3 determinant after translating d to the origin
  double ax = a.real() - d.real(), ay = a.imag() - d.imag();
  double bx = b.real() - d.real(), by = b.imag() - d.imag();
  double cx = c.real() - d.real(), cy = c.imag() - d.imag();
  double a2 = ax * ax + ay * ay;
  double b2 = bx * bx + by * by;
  double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

cplx circumcenter(cplx a, cplx b, cplx c) {
  double d = 2.0 * cross(b - a, c - a);
  if (std::abs(d) < 1e-300) throw std::runtime_error("circumcenter: degenerate triangle");
  double a2 = std::norm(a), b2 = std::norm(b), c2 = std::norm(c);
  double ux = (a2 * (b.imag() - c.imag()) + b2 * (c.imag() - a.imag()) +
               c2 * (a.imag() - b.imag())) /
              d;
  double uy = (a2 * (c.real() - b.real()) + b2 * (a.real() - c.real()) +
               c2 * (b.real() - a.real())) /
              d;
  return {ux, uy};
}

double polygon_area(const std::vector<cplx>& poly) {
  double s = 0;
  int n = int(poly.size());
  for (int i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * s;
}

bool point_in_triangle(cplx p, cplx a, cplx b, cplx c, double eps) {
  double d1 = orient2(a, b, p);
  double d2 = orient2(b, c, p);
  double d3 = orient2(c, a, p);
  bool has_neg = (d1 < -eps) || (d2 < -eps) || (d3 < -eps);
  bool has_pos = (d1 > eps) || (d2 > eps) || (d3 > eps);
  return !(has_neg && has_pos);
}

bool segments_cross(cplx a, cplx b, cplx c, cplx d, double eps) {
  double d1 = orient2(c, d, a);
  double d2 = orient2(c, d, b);
  double d3 = orient2(a, b, c);
  double d4 = orient2(a, b, d);
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
         ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

bool point_in_polygon(cplx p, const std::vector<cplx>& poly) {
  bool inside = false;
  int n = int(poly.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    double xi = poly[i].real(), yi = poly[i].imag();
    double xj = poly[j].real(), yj = poly[j].imag();
    if (((yi > p.imag()) != (yj > p.imag())) &&
        (p.real() < (xj - xi) * (p.imag() - yi) / (yj - yi) + xi))
      inside = !inside;
  }
  return inside;
}

bool segment_inside_polygon(cplx a, cplx b, const std::vector<cplx>& poly, double eps) {
  int n = int(poly.size());
  for (int i = 0; i < n; ++i) {
    cplx c = poly[i], d = poly[(i + 1) % n];
    if (segments_cross(a, b, c, d, eps)) return false;
  }
  return point_in_polygon(0.5 * (a + b), poly);
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<cplx>& poly, double eps) {
  int n = int(poly.size());
  if (n < 3) throw std::invalid_argument("ear_clip: fewer than three vertices");
  if (polygon_area(poly) <= 0)
    throw std::invalid_argument("ear_clip: polygon not counterclockwise");

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> tris;
  tris.reserve(n - 2);

  auto is_ear = [&](int ii) {
    int m = int(idx.size());
    int ip = idx[(ii + m - 1) % m], ic = idx[ii], in = idx[(ii + 1) % m];
    cplx a = poly[ip], b = poly[ic], c = poly[in];
    if (orient2(a, b, c) <= eps) return false;  // reflex or flat corner
    for (int k : idx) {
      if (k == ip || k == ic || k == in) continue;
      if (point_in_triangle(poly[k], a, b, c, -eps)) return false;
    }
    return true;
  };

  int guard = 0;
  while (idx.size() > 3) {
    int m = int(idx.size());
    bool clipped = false;
    // prefer the ear with the fattest corner to keep triangles well shaped
    int best = -1;
    double best_quality = -1;
    for (int ii = 0; ii < m; ++ii) {
      if (!is_ear(ii)) continue;
      int ip = idx[(ii + m - 1) % m], ic = idx[ii], in = idx[(ii + 1) % m];
      double q = angle_at(poly[ip], poly[ic], poly[in]);
      q = std::min(q, kPi - q * 0.0);  // corner angle itself
      if (q > best_quality) {
        best_quality = q;
        best = ii;
      }
    }
    if (best >= 0) {
      int m2 = int(idx.size());
      int ip = idx[(best + m2 - 1) % m2], ic = idx[best], in = idx[(best + 1) % m2];
      tris.push_back({ip, ic, in});
      idx.erase(idx.begin() + best);
      clipped = true;
    }
    if (!clipped || ++guard > 4 * n)
      throw std::runtime_error("ear_clip: no ear found (degenerate polygon)");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

}  // namespace flatmod
