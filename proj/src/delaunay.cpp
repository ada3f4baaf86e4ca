#include "flatmod/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flatmod {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Surface scaled(const Surface& s, double factor) {
  Surface out = s;
  for (auto& t : out.tris)
    for (auto& p : t.p) p *= factor;
  return out;
}

Surface delaunay(const Surface& s) {
  if (s.num_marked() < 1) throw std::invalid_argument("delaunay: no marked points");
  Surface d = s;
  remove_regular_vertices(d);
  make_delaunay(d);
  return d;
}

bool is_delaunay(const Surface& s, double tol) {
  for (int h = 0; h < s.num_halfedges(); ++h)
    if (!is_delaunay_edge(s, h, tol)) return false;
  return true;
}

std::pair<double, SaddleConnection> relative_systole(const Surface& s) {
  if (s.num_marked() < 2)
    throw std::invalid_argument("relative_systole: needs two distinct cone points");
  Surface d = delaunay(s);
  double best = kInf;
  int best_h = -1;
  for (int h = 0; h < d.num_halfedges(); ++h) {
    int ca = d.vertex_class(h);
    int cb = d.vertex_class(3 * (h / 3) + (h % 3 + 1) % 3);
    if (ca == cb) continue;
    double len = d.edge_length(h);
    if (len < best) {
      best = len;
      best_h = h;
    }
  }
  if (best_h < 0) throw std::logic_error("relative_systole: no joining edge found");
  SaddleConnection sc;
  sc.from_cls = d.vertex_class(best_h);
  sc.to_cls = d.vertex_class(3 * (best_h / 3) + (best_h % 3 + 1) % 3);
  sc.vec = d.edge_vector(best_h);
  sc.length = best;
  return {best, sc};
}

double relative_diameter(const Surface& s) {
  Surface d = delaunay(s);
  double r = 0;
  for (const auto& t : d.tris) {
    cplx c = circumcenter(t.p[0], t.p[1], t.p[2]);
    r = std::max(r, std::abs(t.p[0] - c));
  }
  return r;
}

std::pair<double, double> cone_closed_geodesic(double theta, double r) {
  if (theta <= 0 || theta >= kPi)
    throw std::invalid_argument("cone_closed_geodesic: theta must lie in (0, pi)");
  if (r <= 0) throw std::invalid_argument("cone_closed_geodesic: r must be positive");
  return {2.0 * std::sin(theta / 2.0) * r, kPi - theta};
}

std::pair<double, double> diameter_constants(int n, std::int64_t q) {
  if (n < 1 || q < 3) throw std::invalid_argument("diameter_constants: need n >= 1, q >= 3");
  double k1 = (2.0 * n / std::sqrt(kPi)) *
              std::max(2.0, 1.0 + 1.0 / std::tan(kPi / double(q)));
  double k2 = std::sqrt(3.0) / (2.0 * n);
  return {k1, k2};
}

// ---------------------------------------------------------------------------
// systole
// ---------------------------------------------------------------------------

namespace {

// same surface point and direction, allowing representations in adjacent
// charts
bool same_point_dir(const Surface& s, PointRef a, cplx dir_a, PointRef b, cplx dir_b,
                    double tol) {
  if (a.tri == b.tri && std::abs(a.pos - b.pos) < tol && std::abs(dir_a - dir_b) < tol)
    return true;
  for (int e = 0; e < 3; ++e) {
    int h = 3 * a.tri + e;
    Isometry M = s.cross_map(s.glue[h]);  // a-chart -> partner chart
    if (s.glue[h] / 3 != b.tri) continue;
    if (std::abs(M(a.pos) - b.pos) < tol && std::abs(M.rot * dir_a - dir_b) < tol)
      return true;
  }
  return false;
}

// probe whether the parallel line at perpendicular offset delta from the
// saddle loop closes up as a regular geodesic
bool parallel_line_closes(const Surface& s, const ConeChart& ch, double ang, double len,
                          double delta, double side) {
  double r_star = star_radius(s, ch);
  double off = std::min(std::abs(delta), 0.45 * r_star);
  if (off < 1e-12) return false;
  // start a quarter turn along the line so the base point sits strictly
  // inside a wedge rather than on the saddle-loop ray
  double a = ang + side * kPi / 4.0;
  double r0 = off * std::sqrt(2.0);
  PointRef start;
  int wi = -1;
  for (int attempt = 0; attempt < 5; ++attempt) {
    double aa = a + attempt * 1e-7;
    start = ch.locate(r0, aa);
    wi = ch.wedge_of(aa);
    const auto& T = s.tris[start.tri];
    if (point_in_triangle(start.pos, T.p[0], T.p[1], T.p[2], -1e-12)) break;
    wi = -1;
  }
  if (wi < 0) return false;
  cplx dir = std::conj(ch.place[wi].rot) * std::polar(1.0, ang);
  try {
    TraceResult tr = trace_line(s, start, dir, len, 1e-11);
    if (tr.stop != TraceResult::Stop::Length) return false;
    return same_point_dir(s, {tr.tri, tr.point}, tr.dir, start, dir, 1e-7 * (1.0 + len));
  } catch (const std::exception&) {
    return false;
  }
}

bool line_closes_at(const Surface& s, PointRef base, cplx dir, double len) {
  try {
    TraceResult tr = trace_line(s, base, dir, len, 1e-11);
    if (tr.stop != TraceResult::Stop::Length) return false;
    return same_point_dir(s, {tr.tri, tr.point}, tr.dir, base, dir, 1e-7 * (1.0 + len));
  } catch (const std::exception&) {
    return false;
  }
}

struct LoopCandidate {
  SaddleConnection sc;
  bool translation;  // deck rotation trivial
};

std::vector<LoopCandidate> essential_loops(const Surface& s, double cap) {
  HomologyBasis hb = homology_basis(s);
  std::vector<LoopCandidate> out;
  for (int cls = 0; cls < s.num_vertex_classes(); ++cls) {
    if (!s.is_marked(cls)) continue;
    for (auto& sc : saddle_connections_from(s, cls, cap)) {
      if (!sc.is_loop()) continue;
      auto cl = hb.corridor_class(s, sc.crossed, sc.start_corner, sc.end_corner);
      if (HomologyBasis::is_zero(cl)) continue;
      bool translation = std::abs(sc.deck_rot - cplx(1, 0)) < 1e-9;
      out.push_back({sc, translation});
    }
  }
  return out;
}

}  // namespace

SystoleResult systole(const Surface& s, double length_cap) {
  if (s.genus() < 1) throw std::invalid_argument("systole: genus must be at least one");
  Surface d = delaunay(s);
  auto loops = essential_loops(d, length_cap);
  if (loops.empty())
    throw std::runtime_error("systole: no essential loop below the length cap");
  SystoleResult best;
  best.length = kInf;
  for (auto& lc : loops) {
    if (lc.sc.length < best.length) {
      best.length = lc.sc.length;
      best.vec = lc.sc.vec;
      best.witness = lc.sc;
      best.regular = false;
    }
  }
  // a translation class of the same length may be realised by a regular
  // closed geodesic; probe a parallel line right next to the loop
  for (auto& lc : loops) {
    if (!lc.translation || lc.sc.length > best.length + 1e-9) continue;
    ConeChart ch = cone_chart(d, lc.sc.from_cls);
    double probe = 1e-4 * lc.sc.length;
    for (double side : {+1.0, -1.0}) {
      if (parallel_line_closes(d, ch, lc.sc.angle, lc.sc.length, probe, side)) {
        best.regular = true;
        best.witness = lc.sc;
        best.vec = lc.sc.vec;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// diameter
// ---------------------------------------------------------------------------

namespace {

std::vector<PointRef> sample_points(const Surface& s, int budget) {
  std::vector<PointRef> pts;
  int depth = 3;
  // pick the subdivision depth so the total stays near the budget
  while (depth > 1 && s.num_tris() * (depth + 1) * (depth + 2) / 2 > budget) --depth;
  for (int t = 0; t < s.num_tris(); ++t) {
    const auto& T = s.tris[t];
    for (int i = 0; i <= depth; ++i)
      for (int j = 0; j <= depth - i; ++j) {
        int k = depth - i - j;
        cplx p = (double(i) * T.p[0] + double(j) * T.p[1] + double(k) * T.p[2]) /
                 double(depth);
        // nudge corners and edges inward so the point is strictly interior
        cplx centroid = (T.p[0] + T.p[1] + T.p[2]) / 3.0;
        p = p + 1e-7 * (centroid - p);
        pts.push_back({t, p});
      }
    // circumcenters realise the distance-to-singular-set maxima (Voronoi
    // vertices); reach them by a trace from the centroid so that centers on
    // or beyond an edge land in the right chart
    try {
      cplx c = circumcenter(T.p[0], T.p[1], T.p[2]);
      cplx centroid = (T.p[0] + T.p[1] + T.p[2]) / 3.0;
      double dist = std::abs(c - centroid);
      if (dist < 1e-12) {
        pts.push_back({t, centroid});
      } else {
        TraceResult tr =
            trace_line(s, {t, centroid}, (c - centroid) / dist, dist * (1.0 - 1e-9), 1e-12);
        if (tr.stop == TraceResult::Stop::Length) pts.push_back({tr.tri, tr.point});
      }
    } catch (const std::exception&) {
    }
  }
  return pts;
}

}  // namespace

std::pair<double, double> diameter_bounds(const Surface& s, int samples) {
  Surface d = delaunay(s);
  double sN = relative_diameter(d);
  int n = d.num_marked();
  double upper = 2.0 * n * sN;
  double cap = upper * 1.0001 + 1e-12;

  std::vector<PointRef> pts = sample_points(d, samples);
  // antipode of the systole witness, when there is one
  if (d.genus() >= 1) {
    try {
      SystoleResult sy = systole(d, 2.0 * upper + 1e-9);
      ConeChart ch = cone_chart(d, sy.witness.from_cls);
      double r0 = std::min(0.5 * star_radius(d, ch), 0.45 * sy.length);
      PointRef p0 = ch.locate(r0, sy.witness.angle);
      int wi = ch.wedge_of(sy.witness.angle);
      cplx dir = std::conj(ch.place[wi].rot) * std::polar(1.0, sy.witness.angle);
      TraceResult tr = trace_line(d, p0, dir, 0.5 * sy.length - r0, 1e-10);
      if (tr.stop == TraceResult::Stop::Length) pts.push_back({tr.tri, tr.point});
    } catch (const std::exception&) {
    }
  }

  // exact distances: legs to the cone points plus the all-pairs cone-point
  // matrix, and direct visibility between samples
  std::vector<int> marked_ids;
  for (int c = 0; c < d.num_vertex_classes(); ++c)
    if (d.is_marked(c)) marked_ids.push_back(c);
  int m = int(marked_ids.size());

  std::vector<std::vector<double>> G(m, std::vector<double>(m, kInf));
  for (int i = 0; i < m; ++i) G[i][i] = 0;
  for (auto& sc : all_saddle_connections(d, cap)) {
    auto idx = [&](int cls) {
      return int(std::find(marked_ids.begin(), marked_ids.end(), cls) -
                 marked_ids.begin());
    };
    int i = idx(sc.from_cls), j = idx(sc.to_cls);
    G[i][j] = std::min(G[i][j], sc.length);
    G[j][i] = G[i][j];
  }
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        G[i][j] = std::min(G[i][j], G[i][k] + G[k][j]);

  int S = int(pts.size());
  std::vector<std::vector<double>> legs(S, std::vector<double>(m, kInf));
  std::vector<std::vector<double>> vis(S);
  for (int i = 0; i < S; ++i) {
    UnfoldHits u = visibility_from_point(d, pts[i], cap, pts);
    legs[i] = std::move(u.class_dist);
    // compress to marked indices
    std::vector<double> lm(m, kInf);
    for (int k = 0; k < m; ++k) lm[k] = legs[i][marked_ids[k]];
    legs[i] = std::move(lm);
    vis[i] = std::move(u.target_dist);
  }

  double lower = 0;
  for (int i = 0; i < S; ++i) {
    double to_marked = kInf;
    for (int k = 0; k < m; ++k) to_marked = std::min(to_marked, legs[i][k]);
    lower = std::max(lower, to_marked);  // covers D >= s
    for (int j = i + 1; j < S; ++j) {
      double dd = vis[i][j];
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          dd = std::min(dd, legs[i][a] + G[a][b] + legs[j][b]);
      lower = std::max(lower, dd);
    }
  }
  lower = std::min(lower, upper);
  return {lower, upper};
}

// ---------------------------------------------------------------------------
// cylinders and the full report
// ---------------------------------------------------------------------------

std::optional<Cylinder> find_cylinder(const Surface& s) {
  if (s.genus() != 1) throw std::invalid_argument("find_cylinder: genus-one surfaces only");
  Surface d = delaunay(s);
  double sN = relative_diameter(d);
  double upper = 2.0 * d.num_marked() * sN;
  SystoleResult sy = systole(d, 2.0 * upper + 1e-9);
  if (!sy.regular) return std::nullopt;

  ConeChart ch = cone_chart(d, sy.witness.from_cls);
  double len = sy.length;
  double r_star = star_radius(d, ch);
  double max_off = d.area() / len + 1e-9;
  double ang = sy.witness.angle;

  PointRef mid_point{-1, {0, 0}};
  cplx mid_dir{1, 0};
  // march parallel lines away from the saddle loop, one side at a time
  auto widest = [&](double side) -> double {
    double off0 = std::min(1e-3 * len, 0.2 * r_star);
    double aa = ang + side * kPi / 4.0;
    PointRef base = ch.locate(off0 * std::sqrt(2.0), aa);
    int wi = ch.wedge_of(aa);
    cplx dir = std::conj(ch.place[wi].rot) * std::polar(1.0, ang);
    if (!line_closes_at(d, base, dir, len)) return 0.0;
    double cur = off0;
    double step = std::min(0.25 * r_star, 0.1 * max_off);
    cplx perp = side * cplx(0, 1) * dir;
    while (step > 1e-10 * (1.0 + max_off) && cur < max_off - 1e-12) {
      double dt = std::min(step, max_off - cur);
      bool advanced = false;
      try {
        TraceResult tr = trace_line(d, base, perp, dt, 1e-11);
        if (tr.stop == TraceResult::Stop::Length) {
          cplx dir2 = -side * cplx(0, 1) * tr.dir;
          PointRef base2{tr.tri, tr.point};
          if (line_closes_at(d, base2, dir2, len)) {
            base = base2;
            dir = dir2;
            perp = side * cplx(0, 1) * dir;
            cur += dt;
            step *= 1.7;
            advanced = true;
            if (mid_point.tri < 0) {
              mid_point = base;
              mid_dir = dir;
            }
          }
        }
      } catch (const std::exception&) {
      }
      if (!advanced) step *= 0.5;
    }
    return cur;
  };
  double wplus = widest(+1.0), wminus = widest(-1.0);
  double total = std::min(wplus + wminus, d.area() / len);

  Cylinder cyl;
  cyl.width = len;
  cyl.length = total;
  if (mid_point.tri >= 0) {
    cyl.core_point = mid_point;
    cyl.core_dir = mid_dir;
  } else {
    double aa = ang + kPi / 4.0;
    cyl.core_point = ch.locate(std::min(1e-3 * len, 0.2 * r_star) * std::sqrt(2.0), aa);
    cyl.core_dir = std::conj(ch.place[ch.wedge_of(aa)].rot) * std::polar(1.0, ang);
  }
  return cyl;
}

MetricReport metric_report(const Surface& s, int samples) {
  double area = s.area();
  Surface unit = scaled(s, 1.0 / std::sqrt(area));
  MetricReport r;
  r.tol = 1e-9;
  Surface d = delaunay(unit);
  r.rel_diameter = relative_diameter(d);
  auto [lo, up] = diameter_bounds(d, samples);
  r.diameter_lower = lo;
  r.diameter_upper = up;
  if (d.num_marked() >= 2) {
    auto [delta, sc] = relative_systole(d);
    r.rel_systole = delta;
    r.delta_from = sc.from_cls;
    r.delta_to = sc.to_cls;
    r.delta_vec = sc.vec;
  } else {
    r.rel_systole = std::numeric_limits<double>::quiet_NaN();
  }
  if (d.genus() >= 1) {
    SystoleResult sy = systole(d, 2.0 * up + 1e-9);
    r.systole = sy.length;
    r.systole_regular = sy.regular;
    r.systole_vec = sy.vec;
  } else {
    r.systole = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace flatmod
