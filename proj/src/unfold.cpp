#include "flatmod/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

namespace flatmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seg_distance(cplx a, cplx b, cplx p) {
  cplx ab = b - a;
  double t = dot(p - a, ab) / std::norm(ab);
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double unwrap_near(double angle, double ref) {
  return angle + kTwoPi * std::round((ref - angle) / kTwoPi);
}

}  // namespace

TraceResult trace_line(const Surface& s, PointRef start, cplx dir, double max_len,
                       double vertex_tol) {
  TraceResult r;
  int tri = start.tri;
  cplx p = start.pos;
  cplx d = dir / std::abs(dir);
  double remaining = max_len;
  int entry = -1;
  int guard = 0;

  while (true) {
    if (++guard > 200000) throw std::runtime_error("trace_line: crossing cap exceeded");
    double best_t = kInf;
    int best_e = -1;
    double best_u = 0;
    for (int e = 0; e < 3; ++e) {
      int h = 3 * tri + e;
      if (h == entry) continue;
      cplx A = s.tris[tri].p[e], B = s.tris[tri].p[(e + 1) % 3];
      cplx ab = B - A;
      double det = cross(d, -ab);
      if (std::abs(det) < 1e-15) continue;
      cplx rhs = A - p;
      double t = cross(rhs, -ab) / det;
      double u = cross(d, rhs) / det;
      if (t <= 1e-12 || u < -1e-9 || u > 1 + 1e-9) continue;
      if (t < best_t) {
        best_t = t;
        best_e = e;
        best_u = u;
      }
    }
    if (best_e < 0) throw std::runtime_error("trace_line: no exit edge found");
    if (best_t >= remaining) {
      r.stop = TraceResult::Stop::Length;
      r.tri = tri;
      r.point = p + remaining * d;
      r.dir = d;
      r.length = max_len;
      return r;
    }
    int h = 3 * tri + best_e;
    cplx A = s.tris[tri].p[best_e], B = s.tris[tri].p[(best_e + 1) % 3];
    cplx hitpt = p + best_t * d;
    if (std::abs(hitpt - A) < vertex_tol || std::abs(hitpt - B) < vertex_tol) {
      bool atA = std::abs(hitpt - A) < std::abs(hitpt - B);
      r.stop = TraceResult::Stop::VertexHit;
      r.tri = tri;
      r.point = hitpt;
      r.dir = d;
      r.length = max_len - remaining + best_t;
      r.hit_length = r.length;
      r.hit_class = s.vertex_class(atA ? h : 3 * tri + (best_e + 1) % 3);
      return r;
    }
    r.crossed.push_back(h);
    r.cross_at.push_back(best_u);
    remaining -= best_t;
    Isometry M = s.cross_map(s.glue[h]);  // this chart -> partner chart
    p = M(hitpt);
    d = M.rot * d;
    entry = s.glue[h];
    tri = entry / 3;
  }
}

ConeChart cone_chart(const Surface& s, int cls) {
  ConeChart ch;
  ch.cls = cls;
  const auto& corners = s.class_corners(cls);
  if (corners.empty()) throw std::invalid_argument("cone_chart: empty class");
  int c0 = corners[0];
  int c = c0;
  double base = 0;
  do {
    int t = c / 3, j = c % 3;
    ch.corners.push_back(c);
    ch.base.push_back(base);
    cplx u = s.tris[t].p[(j + 1) % 3] - s.tris[t].p[j];
    u /= std::abs(u);
    cplx rot = std::polar(1.0, base) / u;
    ch.place.push_back({rot, -rot * s.tris[t].p[j]});
    base += s.tris[t].corner_angle(j);
    c = s.next_corner_ccw(c);
  } while (c != c0 && int(ch.corners.size()) <= int(corners.size()));
  if (c != c0) throw std::runtime_error("cone_chart: link walk did not close");
  ch.total_angle = base;
  return ch;
}

int ConeChart::wedge_of(double phi) const {
  double a = std::fmod(phi, total_angle);
  if (a < 0) a += total_angle;
  int n = int(corners.size());
  for (int i = n - 1; i >= 0; --i)
    if (base[i] <= a + 1e-15) return i;
  return 0;
}

PointRef ConeChart::locate(double r, double phi) const {
  double a = std::fmod(phi, total_angle);
  if (a < 0) a += total_angle;
  int i = wedge_of(a);
  Isometry inv = place[i].inverse();
  return {corners[i] / 3, inv(std::polar(r, a))};
}

double star_radius(const Surface& s, const ConeChart& chart) {
  double r = kInf;
  for (int c : chart.corners) {
    int t = c / 3, j = c % 3;
    cplx v = s.tris[t].p[j];
    cplx A = s.tris[t].p[(j + 1) % 3], B = s.tris[t].p[(j + 2) % 3];
    r = std::min(r, seg_distance(A, B, v));
  }
  return r;
}

// ---------------------------------------------------------------------------
// visibility unfolding
// ---------------------------------------------------------------------------

namespace {

struct WedgeNode {
  int tri;
  Isometry place;  // chart -> root frame
  double lo, hi;   // angular window, width < pi
  int entry;       // halfedge of tri entered through, -1 for roots
  int parent;
  int root_corner;  // wedge corner that seeded this branch, -1 for interior
};

struct VertexHitRec {
  int cls;
  cplx z;
  double ang;  // unwrapped direction in the root frame (cone sheet aware)
  double dist;
  int node;
  int corner;
};

struct Unfolding {
  std::vector<WedgeNode> nodes;
  std::vector<VertexHitRec> vhits;
  std::vector<double> target_dist;
  std::vector<cplx> target_pos;

  // crossing halfedges source -> hit, each on the side of the triangle it is
  // crossed from
  std::vector<int> corridor(const Surface& s, int node) const {
    std::vector<int> out;
    for (int k = node; k >= 0; k = nodes[k].parent)
      if (nodes[k].entry >= 0) out.push_back(s.glue[nodes[k].entry]);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

class UnfoldEngine {
 public:
  UnfoldEngine(const Surface& s, double cap, const std::vector<PointRef>& targets)
      : s_(s), cap_(cap), targets_(targets) {
    res_.target_dist.assign(targets.size(), kInf);
    res_.target_pos.assign(targets.size(), cplx(0, 0));
    tri_targets_.resize(s.num_tris());
    for (int i = 0; i < int(targets.size()); ++i)
      tri_targets_[targets[i].tri].push_back(i);
  }

  void seed(int tri, const Isometry& place, double lo, double hi, int entry,
            int root_corner = -1) {
    push_node(tri, place, lo, hi, entry, -1, root_corner);
  }

  void scan_root_interior(int tri, cplx src) {
    Isometry id{cplx(1, 0), -src};
    for (int j = 0; j < 3; ++j) {
      cplx z = id(s_.tris[tri].p[j]);
      register_corner(3 * tri + j, z, std::arg(z), -1);
    }
    for (int ti : tri_targets_[tri]) record_target(ti, id(targets_[ti].pos));
  }

  void scan_root_wedge(int tri, const Isometry& place) {
    for (int ti : tri_targets_[tri]) record_target(ti, place(targets_[ti].pos));
  }

  void run() {
    while (!queue_.empty()) {
      int ni = queue_.front();
      queue_.pop();
      expand(ni);
    }
  }

  Unfolding take() { return std::move(res_); }

 private:
  void record_target(int ti, cplx z) {
    double d = std::abs(z);
    if (d > cap_) return;
    if (d < res_.target_dist[ti]) {
      res_.target_dist[ti] = d;
      res_.target_pos[ti] = z;
    }
  }

  void register_corner(int corner, cplx z, double ang, int node) {
    double d = std::abs(z);
    if (d < 1e-11 || d > cap_) return;
    long long ka = llround(ang * 1e7), kd = llround(d * 1e8 / cap_);
    auto key = std::make_tuple(s_.vertex_class(corner), ka, kd);
    if (!seen_.insert(key).second) return;
    res_.vhits.push_back({s_.vertex_class(corner), z, ang, d, node, corner});
  }

  void push_node(int tri, const Isometry& place, double lo, double hi, int entry,
                 int parent, int root_corner) {
    // a pinched window means the ray grazes a vertex; everything beyond it is
    // blocked, so the branch ends here
    if (entry >= 0 && hi - lo < 1e-12) return;
    if (entry >= 0) {
      auto key = std::make_tuple(tri, llround(place.rot.real() * 1e9),
                                 llround(place.rot.imag() * 1e9),
                                 llround(place.trans.real() * 1e7 / cap_),
                                 llround(place.trans.imag() * 1e7 / cap_),
                                 llround(lo * 1e9), llround(hi * 1e9));
      if (!node_seen_.insert(key).second) return;
    }
    if (int(res_.nodes.size()) > 400000)
      throw std::runtime_error("unfold: node cap exceeded");
    res_.nodes.push_back({tri, place, lo, hi, entry, parent, root_corner});
    int ni = int(res_.nodes.size()) - 1;
    double mid = 0.5 * (lo + hi);
    for (int j = 0; j < 3; ++j) {
      cplx z = place(s_.tris[tri].p[j]);
      if (std::abs(z) < 1e-11) continue;
      double a = unwrap_near(std::arg(z), mid);
      if (a >= lo - 1e-9 && a <= hi + 1e-9) register_corner(3 * tri + j, z, a, ni);
    }
    for (int ti : tri_targets_[tri]) {
      cplx z = place(targets_[ti].pos);
      double a = unwrap_near(std::arg(z), mid);
      if (a >= lo - 1e-9 && a <= hi + 1e-9) record_target(ti, z);
    }
    queue_.push(ni);
  }

  void expand(int ni) {
    WedgeNode nd = res_.nodes[ni];
    for (int e = 0; e < 3; ++e) {
      int h = 3 * nd.tri + e;
      if (h == nd.entry) continue;
      cplx A = nd.place(s_.tris[nd.tri].p[e]);
      cplx B = nd.place(s_.tris[nd.tri].p[(e + 1) % 3]);
      if (std::abs(A) < 1e-11 || std::abs(B) < 1e-11) continue;  // radial edge
      if (seg_distance(A, B, {0, 0}) > cap_) continue;
      double mid = 0.5 * (nd.lo + nd.hi);
      double a1 = unwrap_near(std::arg(A), mid);
      double a2 = unwrap_near(std::arg(B), mid);
      double lo = std::max(std::min(a1, a2), nd.lo);
      double hi = std::min(std::max(a1, a2), nd.hi);
      if (std::max(a1, a2) - std::min(a1, a2) > kPi) continue;  // behind the origin
      if (hi < lo - 1e-12) continue;
      int hp = s_.glue[h];
      push_node(hp / 3, s_.cross_map(h).then(nd.place), lo, hi, hp, ni, nd.root_corner);
    }
  }

  const Surface& s_;
  double cap_;
  const std::vector<PointRef>& targets_;
  std::vector<std::vector<int>> tri_targets_;
  std::set<std::tuple<int, long long, long long>> seen_;
  std::set<std::tuple<int, long long, long long, long long, long long, long long, long long>>
      node_seen_;
  Unfolding res_;
  std::queue<int> queue_;
};

Unfolding unfold_interior(const Surface& s, PointRef x, double cap,
                          const std::vector<PointRef>& targets) {
  UnfoldEngine eng(s, cap, targets);
  eng.scan_root_interior(x.tri, x.pos);
  Isometry root{cplx(1, 0), -x.pos};
  for (int e = 0; e < 3; ++e) {
    cplx A = root(s.tris[x.tri].p[e]);
    cplx B = root(s.tris[x.tri].p[(e + 1) % 3]);
    double a1 = std::arg(A);
    double a2 = unwrap_near(std::arg(B), a1);
    double lo = std::min(a1, a2), hi = std::max(a1, a2);
    int hp = s.glue[3 * x.tri + e];
    eng.seed(hp / 3, s.cross_map(3 * x.tri + e).then(root), lo, hi, hp);
  }
  eng.run();
  return eng.take();
}

Unfolding unfold_cone(const Surface& s, const ConeChart& ch, double cap,
                      const std::vector<PointRef>& targets) {
  UnfoldEngine eng(s, cap, targets);
  for (int i = 0; i < int(ch.corners.size()); ++i) {
    int c = ch.corners[i];
    int t = c / 3, j = c % 3;
    eng.scan_root_wedge(t, ch.place[i]);
    double lo = ch.base[i];
    double hi = lo + s.tris[t].corner_angle(j);
    // the root node registers the wedge triangle's far corners; the radial
    // edge guard keeps the expansion to the opposite edge only
    eng.seed(t, ch.place[i], lo, hi, -1, c);
  }
  eng.run();
  return eng.take();
}

}  // namespace

// ---------------------------------------------------------------------------
// public queries
// ---------------------------------------------------------------------------

std::vector<SaddleConnection> saddle_connections_from(const Surface& s, int src, double cap) {
  ConeChart ch = cone_chart(s, src);
  Unfolding u = unfold_cone(s, ch, cap, {});

  std::sort(u.vhits.begin(), u.vhits.end(),
            [](const VertexHitRec& a, const VertexHitRec& b) { return a.dist < b.dist; });
  std::vector<SaddleConnection> out;
  std::vector<double> kept_ang, kept_dist;
  std::map<int, Isometry> wedge_place;
  for (int i = 0; i < int(ch.corners.size()); ++i) wedge_place[ch.corners[i]] = ch.place[i];

  std::set<std::tuple<int, long long, long long>> emitted;
  for (const auto& hit : u.vhits) {
    bool blocked = false;
    for (int i = 0; i < int(kept_ang.size()); ++i) {
      if (kept_dist[i] < hit.dist - 1e-9 && std::abs(kept_ang[i] - hit.ang) < 1e-9) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    kept_ang.push_back(hit.ang);
    kept_dist.push_back(hit.dist);
    // the same geometric segment can be seen at angle 0 and at the full cone
    // angle; canonicalise before emitting
    double ang_mod = std::fmod(hit.ang + 0.5e-9, ch.total_angle);
    if (ang_mod < 0) ang_mod += ch.total_angle;
    if (!emitted
             .insert(std::make_tuple(hit.cls, llround(ang_mod * 1e7),
                                     llround(hit.dist * 1e8 / cap)))
             .second)
      continue;
    if (!s.is_marked(hit.cls)) continue;  // regular vertices block but are no endpoints
    SaddleConnection sc;
    sc.from_cls = src;
    sc.to_cls = hit.cls;
    sc.vec = hit.z;
    sc.angle = hit.ang;
    sc.length = hit.dist;
    if (hit.node >= 0) {
      sc.crossed = u.corridor(s, hit.node);
      sc.start_corner = u.nodes[hit.node].root_corner;
    } else {
      sc.start_corner = -1;
    }
    sc.end_corner = hit.corner;
    if (hit.cls == src) {
      auto it = wedge_place.find(hit.corner);
      if (it == wedge_place.end())
        throw std::logic_error("saddle_connections_from: loop hit outside source chart");
      Isometry g = it->second.inverse().then(hit.node >= 0 ? u.nodes[hit.node].place
                                                           : Isometry{});
      sc.deck_rot = g.rot;
      sc.deck_trans = g.trans;
    }
    out.push_back(std::move(sc));
  }
  return out;
}

std::vector<SaddleConnection> all_saddle_connections(const Surface& s, double cap) {
  std::vector<SaddleConnection> out;
  for (int cls = 0; cls < s.num_vertex_classes(); ++cls) {
    if (!s.is_marked(cls)) continue;
    for (auto& sc : saddle_connections_from(s, cls, cap)) {
      // cross connections appear once from each endpoint; loops keep both
      // orientations (harmless for the metric uses)
      if (sc.is_loop() || sc.from_cls <= sc.to_cls) out.push_back(sc);
    }
  }
  return out;
}

double distance_to_marked(const Surface& s, PointRef x, double cap) {
  Unfolding u = unfold_interior(s, x, cap, {});
  double best = kInf;
  for (auto& h : u.vhits)
    if (s.is_marked(h.cls)) best = std::min(best, h.dist);
  return best;
}

UnfoldHits visibility_from_point(const Surface& s, PointRef x, double cap,
                                 const std::vector<PointRef>& targets) {
  Unfolding u = unfold_interior(s, x, cap, targets);
  UnfoldHits out;
  out.class_dist.assign(s.num_vertex_classes(), kInf);
  for (auto& h : u.vhits)
    out.class_dist[h.cls] = std::min(out.class_dist[h.cls], h.dist);
  out.target_dist = std::move(u.target_dist);
  return out;
}

namespace {

std::vector<std::vector<double>> marked_matrix(const Surface& s, double cap,
                                               std::vector<int>& marked_ids) {
  marked_ids.clear();
  for (int c = 0; c < s.num_vertex_classes(); ++c)
    if (s.is_marked(c)) marked_ids.push_back(c);
  int n = int(marked_ids.size());
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  auto idx = [&](int cls) {
    return int(std::find(marked_ids.begin(), marked_ids.end(), cls) - marked_ids.begin());
  };
  for (auto& sc : all_saddle_connections(s, cap)) {
    int i = idx(sc.from_cls), j = idx(sc.to_cls);
    d[i][j] = std::min(d[i][j], sc.length);
    d[j][i] = d[i][j];
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

}  // namespace

double exact_distance(const Surface& s, PointRef x, PointRef y, double cap) {
  std::vector<PointRef> ty = {y};
  Unfolding ux = unfold_interior(s, x, cap, ty);
  double best = ux.target_dist[0];

  std::vector<PointRef> none;
  Unfolding uy = unfold_interior(s, y, cap, none);

  std::vector<int> marked_ids;
  auto G = marked_matrix(s, cap, marked_ids);
  int n = int(marked_ids.size());
  std::vector<double> legx(n, kInf), legy(n, kInf);
  auto fill_legs = [&](const Unfolding& u, std::vector<double>& leg) {
    for (auto& h : u.vhits) {
      auto it = std::find(marked_ids.begin(), marked_ids.end(), h.cls);
      if (it == marked_ids.end()) continue;
      int i = int(it - marked_ids.begin());
      leg[i] = std::min(leg[i], h.dist);
    }
  };
  fill_legs(ux, legx);
  fill_legs(uy, legy);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      best = std::min(best, legx[i] + G[i][j] + legy[j]);
  return best;
}

// ---------------------------------------------------------------------------
// homology
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<Rational>> rational_kernel(std::vector<std::vector<Rational>> M,
                                                   int ncols) {
  int m = int(M.size());
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < ncols && row < m; ++col) {
    int pr = -1;
    for (int r = row; r < m; ++r)
      if (!M[r][col].is_zero()) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(M[row], M[pr]);
    Rational inv = Rational(1) / M[row][col];
    for (int c = col; c < ncols; ++c) M[row][c] = M[row][c] * inv;
    for (int r = 0; r < m; ++r) {
      if (r == row || M[r][col].is_zero()) continue;
      Rational f = M[r][col];
      for (int c = col; c < ncols; ++c) M[r][c] = M[r][c] - f * M[row][c];
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (int free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(ncols, Rational(0));
    v[free] = Rational(1);
    for (int r = 0; r < int(pivot_col.size()); ++r)
      v[pivot_col[r]] = -M[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

HomologyBasis homology_basis(const Surface& s) {
  int nh = s.num_halfedges();
  std::vector<int> edge_id(nh, -1);
  std::vector<int> canon;
  for (int h = 0; h < nh; ++h) {
    if (h < s.glue[h]) {
      edge_id[h] = int(canon.size());
      edge_id[s.glue[h]] = int(canon.size());
      canon.push_back(h);
    }
  }
  int E = int(canon.size());

  std::vector<bool> in_tree(E, false);
  {
    std::vector<bool> cls_seen(s.num_vertex_classes(), false);
    cls_seen[s.vertex_class(0)] = true;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int e = 0; e < E; ++e) {
        if (in_tree[e]) continue;
        int h = canon[e];
        int ca = s.vertex_class(h);
        int cb = s.vertex_class(3 * (h / 3) + (h % 3 + 1) % 3);
        if (cls_seen[ca] != cls_seen[cb]) {
          in_tree[e] = true;
          cls_seen[ca] = cls_seen[cb] = true;
          grew = true;
        }
      }
    }
  }

  std::vector<int> var_of_edge(E, -1);
  int nvars = 0;
  for (int e = 0; e < E; ++e)
    if (!in_tree[e]) var_of_edge[e] = nvars++;

  std::vector<std::vector<Rational>> M;
  for (int t = 0; t < s.num_tris(); ++t) {
    std::vector<Rational> row(nvars, Rational(0));
    bool nontrivial = false;
    for (int e = 0; e < 3; ++e) {
      int h = 3 * t + e;
      int ue = edge_id[h];
      if (var_of_edge[ue] < 0) continue;
      Rational sgn = (h == canon[ue]) ? Rational(1) : Rational(-1);
      row[var_of_edge[ue]] = row[var_of_edge[ue]] + sgn;
      nontrivial = true;
    }
    if (nontrivial) M.push_back(std::move(row));
  }

  auto basis = rational_kernel(std::move(M), nvars);
  HomologyBasis hb;
  hb.rank = int(basis.size());
  hb.half_class.assign(nh, std::vector<Rational>(hb.rank, Rational(0)));
  for (int h = 0; h < nh; ++h) {
    int ue = edge_id[h];
    int v = var_of_edge[ue];
    if (v < 0) continue;
    Rational sgn = (h == canon[ue]) ? Rational(1) : Rational(-1);
    for (int b = 0; b < hb.rank; ++b) hb.half_class[h][b] = sgn * basis[b][v];
  }
  return hb;
}

bool HomologyBasis::is_zero(const std::vector<Rational>& v) {
  for (auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

std::vector<Rational> HomologyBasis::corridor_class(const Surface& s,
                                                    const std::vector<int>& crossed,
                                                    int start_corner,
                                                    int end_corner) const {
  if (s.vertex_class(start_corner) != s.vertex_class(end_corner))
    throw std::invalid_argument("corridor_class: endpoints on different vertices");
  std::vector<Rational> acc(rank, Rational(0));
  auto add_halfedge = [&](int h, int sign) {
    for (int b = 0; b < rank; ++b)
      acc[b] = acc[b] + (sign > 0 ? half_class[h][b] : -half_class[h][b]);
  };
  auto step_to = [&](int cur, int target) {
    if (cur == target) return;
    int t = cur / 3;
    int a = cur % 3, b = target % 3;
    if ((a + 1) % 3 == b)
      add_halfedge(3 * t + a, +1);
    else
      add_halfedge(3 * t + b, -1);
  };
  int cur = start_corner;
  for (int h : crossed) {
    if (h / 3 != cur / 3) throw std::invalid_argument("corridor_class: corridor broken");
    int hs = h, he = 3 * (h / 3) + (h % 3 + 1) % 3;
    if (cur != hs && cur != he) {
      step_to(cur, hs);
      cur = hs;
    }
    int hp = s.glue[h];
    cur = (cur == hs) ? 3 * (hp / 3) + (hp % 3 + 1) % 3 : hp;
  }
  if (cur / 3 != end_corner / 3)
    throw std::invalid_argument("corridor_class: corridor does not reach the end corner");
  step_to(cur, end_corner);
  return acc;
}

}  // namespace flatmod
