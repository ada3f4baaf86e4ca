#include "flatmod/mesh_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace flatmod {

namespace {

struct Hinge {
  cplx a, b;    // shared edge, from corner of h to the next corner
  cplx dt, dp;  // apex of h's triangle / of the partner developed across h
};

Hinge develop_hinge(const Surface& s, int h) {
  int t = h / 3, e = h % 3;
  int hp = s.glue[h];
  int tp = hp / 3, ep = hp % 3;
  Isometry M = s.cross_map(h);
  return {s.tris[t].p[e], s.tris[t].p[(e + 1) % 3], s.tris[t].p[(e + 2) % 3],
          M(s.tris[tp].p[(ep + 2) % 3])};
}

}  // namespace

bool is_delaunay_edge(const Surface& s, int h, double tol) {
  Hinge q = develop_hinge(s, h);
  double scale = std::max({std::abs(q.a - q.b), std::abs(q.dt - q.a), std::abs(q.dp - q.a)});
  return incircle(q.a, q.b, q.dt, q.dp) <= tol * scale * scale * scale * scale;
}

bool can_flip(const Surface& s, int h) {
  if (s.glue[h] / 3 == h / 3) return false;  // both hinge sides on one slot
  Hinge q = develop_hinge(s, h);
  // the quad cycle a -> dp -> b -> dt must be strictly convex
  return orient2(q.a, q.dp, q.b) > 0 && orient2(q.dp, q.b, q.dt) > 0 &&
         orient2(q.b, q.dt, q.a) > 0 && orient2(q.dt, q.a, q.dp) > 0;
}

void flip_edge(Surface& s, int h) {
  if (!can_flip(s, h)) throw std::runtime_error("flip_edge: flip is not valid here");
  int t = h / 3, e = h % 3;
  int hp = s.glue[h];
  int tp = hp / 3, ep = hp % 3;
  Hinge q = develop_hinge(s, h);

  int A1 = 3 * tp + (ep + 1) % 3;  // a -> dp
  int A2 = 3 * tp + (ep + 2) % 3;  // dp -> b
  int A3 = 3 * t + (e + 1) % 3;    // b -> dt
  int A4 = 3 * t + (e + 2) % 3;    // dt -> a

  // marked state per corner before the rewrite
  std::vector<bool> corner_marked(s.num_halfedges());
  for (int c = 0; c < s.num_halfedges(); ++c)
    corner_marked[c] = s.is_marked(s.vertex_class(c));
  bool ma = corner_marked[h];                       // corner at a
  bool mb = corner_marked[3 * t + (e + 1) % 3];     // corner at b
  bool mdt = corner_marked[3 * t + (e + 2) % 3];    // apex of t
  bool mdp = corner_marked[3 * tp + (ep + 2) % 3];  // apex of partner

  auto remap = [&](int old_h) {
    if (old_h == A1) return 3 * t + 0;
    if (old_h == A2) return 3 * tp + 0;
    if (old_h == A3) return 3 * tp + 1;
    if (old_h == A4) return 3 * t + 2;
    return old_h;
  };
  int o1 = remap(s.glue[A1]), o2 = remap(s.glue[A2]), o3 = remap(s.glue[A3]),
      o4 = remap(s.glue[A4]);

  // slot t becomes (a, dp, dt), slot tp becomes (dp, b, dt); partner charts
  // keep the developed coordinates, which is fine since charts are local
  s.tris[t] = PlanarTriangle{{q.a, q.dp, q.dt}};
  s.tris[tp] = PlanarTriangle{{q.dp, q.b, q.dt}};

  s.glue[3 * t + 0] = o1;
  s.glue[o1] = 3 * t + 0;
  s.glue[3 * t + 2] = o4;
  s.glue[o4] = 3 * t + 2;
  s.glue[3 * tp + 0] = o2;
  s.glue[o2] = 3 * tp + 0;
  s.glue[3 * tp + 1] = o3;
  s.glue[o3] = 3 * tp + 1;
  s.glue[3 * t + 1] = 3 * tp + 2;
  s.glue[3 * tp + 2] = 3 * t + 1;

  corner_marked[3 * t + 0] = ma;
  corner_marked[3 * t + 1] = mdp;
  corner_marked[3 * t + 2] = mdt;
  corner_marked[3 * tp + 0] = mdp;
  corner_marked[3 * tp + 1] = mb;
  corner_marked[3 * tp + 2] = mdt;
  s.rebuild_classes(corner_marked);
}

int make_delaunay(Surface& s, double tol) {
  std::deque<int> queue;
  for (int h = 0; h < s.num_halfedges(); ++h)
    if (h < s.glue[h]) queue.push_back(h);
  int flips = 0;
  long iter = 0;
  const long cap = 50L * s.num_edges();
  while (!queue.empty()) {
    if (++iter > cap + long(queue.size()))
      throw std::runtime_error("make_delaunay: flip iteration cap exceeded (degenerate input?)");
    int h = queue.front();
    queue.pop_front();
    if (is_delaunay_edge(s, h, tol)) continue;
    if (!can_flip(s, h)) {
      // hinge on a single slot: free it by flipping a neighbouring edge first
      int t = h / 3;
      bool freed = false;
      for (int e = 0; e < 3 && !freed; ++e) {
        int h2 = 3 * t + e;
        if (h2 == h || s.glue[h2] == h) continue;
        if (can_flip(s, h2)) {
          flip_edge(s, h2);
          ++flips;
          freed = true;
        }
      }
      queue.push_back(h);
      if (!freed && ++iter > cap)
        throw std::runtime_error("make_delaunay: stuck on an unflippable edge");
      continue;
    }
    flip_edge(s, h);
    ++flips;
    int t = h / 3, tp = s.glue[3 * (h / 3) + 1] / 3;
    queue.push_back(3 * t + 0);
    queue.push_back(3 * t + 2);
    queue.push_back(3 * tp + 0);
    queue.push_back(3 * tp + 1);
    queue.push_back(h);
  }
  return flips;
}

void remove_vertex(Surface& s, int cls) {
  if (s.is_marked(cls)) throw std::invalid_argument("remove_vertex: class is marked");
  if (std::abs(s.class_angle(cls) - kTwoPi) > 1e-7)
    throw std::invalid_argument("remove_vertex: class is not regular");
  if (s.num_vertex_classes() <= 1)
    throw std::invalid_argument("remove_vertex: cannot remove the last vertex");

  int guard = 0;
  while (int(s.class_corners(cls).size()) > 3) {
    if (++guard > 100 * s.num_tris())
      throw std::runtime_error("remove_vertex: could not reduce degree");
    bool flipped = false;
    for (int corner : s.class_corners(cls)) {
      int t = corner / 3, j = corner % 3;
      int h = 3 * t + j;  // edge leaving the vertex
      if (!can_flip(s, h)) continue;
      // the new diagonal joins the two hinge apexes; skip if either apex is
      // this vertex again, since the degree would not drop
      int hp = s.glue[h];
      int apex_t = 3 * t + (j + 2) % 3;
      int apex_p = 3 * (hp / 3) + (hp % 3 + 2) % 3;
      if (s.vertex_class(apex_t) == cls || s.vertex_class(apex_p) == cls) continue;
      // class ids are rebuilt by the flip: track the vertex through a corner
      // that survives untouched
      int track = -1;
      for (int c2 : s.class_corners(cls))
        if (c2 / 3 != t && c2 / 3 != hp / 3) track = c2;
      if (track < 0)
        throw std::runtime_error("remove_vertex: vertex untrackable through flip");
      flip_edge(s, h);
      cls = s.vertex_class(track);
      flipped = true;
      break;
    }
    if (!flipped)
      throw std::runtime_error("remove_vertex: no valid degree-reducing flip");
  }

  // degree three: the three surrounding triangles develop to one triangle
  auto corners = s.class_corners(cls);
  if (corners.size() != 3) throw std::logic_error("remove_vertex: degree is not three");
  int c0 = corners[0];
  int c1 = s.next_corner_ccw(c0);
  int c2 = s.next_corner_ccw(c1);
  if (s.next_corner_ccw(c2) != c0) throw std::logic_error("remove_vertex: link walk broken");
  int t0 = c0 / 3, t1 = c1 / 3, t2 = c2 / 3;
  if (t0 == t1 || t1 == t2 || t0 == t2)
    throw std::runtime_error("remove_vertex: fan triangles not distinct");

  // place the fan in t0's chart; crossing into the next wedge goes through
  // the edge entering the current corner
  auto entering = [](int corner) { return 3 * (corner / 3) + (corner % 3 + 2) % 3; };
  Isometry M1 = s.cross_map(entering(c0));  // t1 -> t0 chart
  Isometry M2 = s.cross_map(entering(c1));  // t2 -> t1 chart
  Isometry M2_in_t0 = M2.then(M1);

  // outer vertices: for corner (t,j) at v, the outer edge is (j+1)%3
  int j0 = c0 % 3, j1 = c1 % 3, j2 = c2 % 3;
  cplx x0 = s.tris[t0].p[(j0 + 1) % 3];
  cplx x1 = M1(s.tris[t1].p[(j1 + 1) % 3]);
  cplx x2 = M2_in_t0(s.tris[t2].p[(j2 + 1) % 3]);

  int O0 = 3 * t0 + (j0 + 1) % 3;  // outer edge of t0: x0 -> x1
  int O1 = 3 * t1 + (j1 + 1) % 3;  // x1 -> x2
  int O2 = 3 * t2 + (j2 + 1) % 3;  // x2 -> x0

  std::vector<bool> corner_marked(s.num_halfedges());
  for (int c = 0; c < s.num_halfedges(); ++c)
    corner_marked[c] = s.is_marked(s.vertex_class(c));
  bool m0 = corner_marked[O0], m1 = corner_marked[O1], m2 = corner_marked[O2];

  // new triangle occupies slot t0; slots t1 > t2 removed afterwards
  auto remap_after_delete = [&](int h, int t_del_a, int t_del_b) {
    // compact halfedge indices after deleting two triangle slots
    int t = h / 3;
    int shift = (t > t_del_a ? 1 : 0) + (t > t_del_b ? 1 : 0);
    return h - 3 * shift;
  };

  int P0 = s.glue[O0], P1 = s.glue[O1], P2 = s.glue[O2];
  if (P0 / 3 == t1 || P0 / 3 == t2 || P1 / 3 == t0 || P1 / 3 == t2 || P2 / 3 == t0 ||
      P2 / 3 == t1)
    throw std::runtime_error("remove_vertex: fan boundary glued into the fan");

  s.tris[t0] = PlanarTriangle{{x0, x1, x2}};
  s.glue[3 * t0 + 0] = P0;
  s.glue[P0] = 3 * t0 + 0;
  s.glue[3 * t0 + 1] = P1;
  s.glue[P1] = 3 * t0 + 1;
  s.glue[3 * t0 + 2] = P2;
  s.glue[P2] = 3 * t0 + 2;
  corner_marked[3 * t0 + 0] = m0;
  corner_marked[3 * t0 + 1] = m1;
  corner_marked[3 * t0 + 2] = m2;

  // delete slots t1, t2 (compact)
  int ta = std::min(t1, t2), tb = std::max(t1, t2);
  std::vector<PlanarTriangle> tris_new;
  std::vector<int> glue_new;
  std::vector<bool> marked_new;
  tris_new.reserve(s.num_tris() - 2);
  for (int t = 0; t < s.num_tris(); ++t) {
    if (t == ta || t == tb) continue;
    tris_new.push_back(s.tris[t]);
    for (int e = 0; e < 3; ++e) {
      glue_new.push_back(remap_after_delete(s.glue[3 * t + e], ta, tb));
      marked_new.push_back(corner_marked[3 * t + e]);
    }
  }
  s.tris = std::move(tris_new);
  s.glue = std::move(glue_new);
  s.rebuild_classes(marked_new);
}

int remove_regular_vertices(Surface& s) {
  int removed = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (int cls = 0; cls < s.num_vertex_classes(); ++cls) {
      if (s.is_marked(cls)) continue;
      if (std::abs(s.class_angle(cls) - kTwoPi) > 1e-7) continue;
      if (s.num_vertex_classes() <= 1) break;
      remove_vertex(s, cls);
      ++removed;
      progress = true;
      break;  // class ids were rebuilt
    }
  }
  return removed;
}

Surface canonical_triangulation(const Surface& s) {
  Surface c = s;
  remove_regular_vertices(c);
  make_delaunay(c);
  return c;
}

EdgeSplit split_edge(Surface& s, int h, double t) {
  if (t <= 0 || t >= 1) throw std::invalid_argument("split_edge: parameter out of range");
  int hp = s.glue[h];
  int tA = h / 3, eA = h % 3;
  int tB = hp / 3, eB = hp % 3;
  if (tA == tB) throw std::invalid_argument("split_edge: hinge on a single slot");

  std::vector<bool> corner_marked(s.num_halfedges());
  for (int c = 0; c < s.num_halfedges(); ++c)
    corner_marked[c] = s.is_marked(s.vertex_class(c));

  cplx A = s.tris[tA].p[eA], B = s.tris[tA].p[(eA + 1) % 3], C = s.tris[tA].p[(eA + 2) % 3];
  cplx X = A + t * (B - A);
  cplx Ap = s.tris[tB].p[eB], Bp = s.tris[tB].p[(eB + 1) % 3],
       Cp = s.tris[tB].p[(eB + 2) % 3];
  // X on the partner side: h start ~ partner end
  cplx Xp = Bp + t * (Ap - Bp);

  int old_nh = s.num_halfedges();
  int tA2 = s.num_tris(), tB2 = tA2 + 1;
  // slot tA becomes (A, X, C); new slot tA2 is (X, B, C)
  // slot tB becomes (A', X', C'); new slot tB2 is (X', B', C')
  int o_AB_bc = s.glue[3 * tA + (eA + 1) % 3];  // partner of (B, C)
  int o_AB_ca = s.glue[3 * tA + (eA + 2) % 3];  // partner of (C, A)
  int o_BA_bc = s.glue[3 * tB + (eB + 1) % 3];
  int o_BA_ca = s.glue[3 * tB + (eB + 2) % 3];
  bool m_A = corner_marked[h], m_B = corner_marked[3 * tA + (eA + 1) % 3],
       m_C = corner_marked[3 * tA + (eA + 2) % 3];
  bool m_Ap = corner_marked[hp], m_Bp = corner_marked[3 * tB + (eB + 1) % 3],
       m_Cp = corner_marked[3 * tB + (eB + 2) % 3];

  auto remap = [&](int old_h) -> int {
    // old outer halfedges that move to new slots
    if (old_h == 3 * tA + (eA + 1) % 3) return 3 * tA2 + 1;  // (B,C)
    if (old_h == 3 * tB + (eB + 1) % 3) return 3 * tB2 + 1;
    if (old_h == 3 * tA + (eA + 2) % 3) return 3 * tA + 2;   // (C,A) stays in slot
    if (old_h == 3 * tB + (eB + 2) % 3) return 3 * tB + 2;
    return old_h;
  };
  o_AB_bc = remap(o_AB_bc);
  o_AB_ca = remap(o_AB_ca);
  o_BA_bc = remap(o_BA_bc);
  o_BA_ca = remap(o_BA_ca);

  s.tris[tA] = PlanarTriangle{{A, X, C}};
  s.tris[tB] = PlanarTriangle{{Ap, Xp, Cp}};
  s.tris.push_back(PlanarTriangle{{X, B, C}});
  s.tris.push_back(PlanarTriangle{{Xp, Bp, Cp}});
  s.glue.resize(3 * s.num_tris(), -1);
  corner_marked.resize(s.num_halfedges(), false);

  // edge pairings: (A,X) ~ (X',B'), (X,B) ~ (A',X')
  s.glue[3 * tA + 0] = 3 * tB2 + 0;
  s.glue[3 * tB2 + 0] = 3 * tA + 0;
  s.glue[3 * tA2 + 0] = 3 * tB + 0;
  s.glue[3 * tB + 0] = 3 * tA2 + 0;
  // spokes: (X,C) ~ (C,X) across the two halves
  s.glue[3 * tA + 1] = 3 * tA2 + 2;
  s.glue[3 * tA2 + 2] = 3 * tA + 1;
  s.glue[3 * tB + 1] = 3 * tB2 + 2;
  s.glue[3 * tB2 + 2] = 3 * tB + 1;
  // outer edges
  s.glue[3 * tA2 + 1] = o_AB_bc;
  s.glue[o_AB_bc] = 3 * tA2 + 1;
  s.glue[3 * tA + 2] = o_AB_ca;
  s.glue[o_AB_ca] = 3 * tA + 2;
  s.glue[3 * tB2 + 1] = o_BA_bc;
  s.glue[o_BA_bc] = 3 * tB2 + 1;
  s.glue[3 * tB + 2] = o_BA_ca;
  s.glue[o_BA_ca] = 3 * tB + 2;

  corner_marked[3 * tA + 0] = m_A;
  corner_marked[3 * tA + 1] = false;  // X
  corner_marked[3 * tA + 2] = m_C;
  corner_marked[3 * tA2 + 0] = false;
  corner_marked[3 * tA2 + 1] = m_B;
  corner_marked[3 * tA2 + 2] = m_C;
  corner_marked[3 * tB + 0] = m_Ap;
  corner_marked[3 * tB + 1] = false;
  corner_marked[3 * tB + 2] = m_Cp;
  corner_marked[3 * tB2 + 0] = false;
  corner_marked[3 * tB2 + 1] = m_Bp;
  corner_marked[3 * tB2 + 2] = m_Cp;
  (void)old_nh;
  s.rebuild_classes(corner_marked);

  EdgeSplit out;
  out.new_corner = 3 * tA + 1;
  out.first_half = 3 * tA + 0;
  out.second_half = 3 * tA2 + 0;
  out.spoke = 3 * tA + 1;
  return out;
}

int split_triangle_at(Surface& s, int tri, cplx pos) {
  const PlanarTriangle T = s.tris[tri];
  if (!point_in_triangle(pos, T.p[0], T.p[1], T.p[2], -1e-12))
    throw std::invalid_argument("split_triangle_at: point not strictly inside");
  std::vector<bool> corner_marked(s.num_halfedges());
  for (int c = 0; c < s.num_halfedges(); ++c)
    corner_marked[c] = s.is_marked(s.vertex_class(c));
  int o0 = s.glue[3 * tri + 0], o1 = s.glue[3 * tri + 1], o2 = s.glue[3 * tri + 2];
  bool m0 = corner_marked[3 * tri + 0], m1 = corner_marked[3 * tri + 1],
       m2 = corner_marked[3 * tri + 2];

  int t1 = s.num_tris(), t2 = t1 + 1;
  auto remap = [&](int old_h) -> int {
    if (old_h == 3 * tri + 1) return 3 * t1 + 0;
    if (old_h == 3 * tri + 2) return 3 * t2 + 0;
    return old_h;
  };
  o1 = remap(o1);
  o2 = remap(o2);
  o0 = remap(o0);

  // slot tri: (p0, p1, X); t1: (p1, p2, X); t2: (p2, p0, X)
  s.tris[tri] = PlanarTriangle{{T.p[0], T.p[1], pos}};
  s.tris.push_back(PlanarTriangle{{T.p[1], T.p[2], pos}});
  s.tris.push_back(PlanarTriangle{{T.p[2], T.p[0], pos}});
  s.glue.resize(3 * s.num_tris(), -1);
  corner_marked.resize(s.num_halfedges(), false);

  s.glue[3 * tri + 0] = o0;
  s.glue[o0] = 3 * tri + 0;
  s.glue[3 * t1 + 0] = o1;
  s.glue[o1] = 3 * t1 + 0;
  s.glue[3 * t2 + 0] = o2;
  s.glue[o2] = 3 * t2 + 0;
  // spokes
  s.glue[3 * tri + 1] = 3 * t1 + 2;
  s.glue[3 * t1 + 2] = 3 * tri + 1;
  s.glue[3 * t1 + 1] = 3 * t2 + 2;
  s.glue[3 * t2 + 2] = 3 * t1 + 1;
  s.glue[3 * t2 + 1] = 3 * tri + 2;
  s.glue[3 * tri + 2] = 3 * t2 + 1;

  corner_marked[3 * tri + 0] = m0;
  corner_marked[3 * tri + 1] = m1;
  corner_marked[3 * tri + 2] = false;
  corner_marked[3 * t1 + 0] = m1;
  corner_marked[3 * t1 + 1] = m2;
  corner_marked[3 * t1 + 2] = false;
  corner_marked[3 * t2 + 0] = m2;
  corner_marked[3 * t2 + 1] = m0;
  corner_marked[3 * t2 + 2] = false;
  s.rebuild_classes(corner_marked);
  return 3 * tri + 2;
}

}  // namespace flatmod
