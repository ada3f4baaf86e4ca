#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include "flatmod/delaunay.hpp"
#include "flatmod/mesh_ops.hpp"
#include "flatmod/surface.hpp"
#include "flatmod/unfold.hpp"

namespace flatmod {

namespace {

// cocircular hinges make the Delaunay triangulation ambiguous; normalise by
// preferring the strictly shorter diagonal where the incircle test ties
void normalize_cocircular(Surface& s, double tol = 1e-9) {
  bool progress = true;
  int guard = 0;
  while (progress && ++guard < 10 * s.num_edges()) {
    progress = false;
    for (int h = 0; h < s.num_halfedges(); ++h) {
      if (h > s.glue[h]) continue;
      if (!can_flip(s, h)) continue;
      int t = h / 3, e = h % 3;
      int hp = s.glue[h];
      Isometry M = s.cross_map(h);
      cplx a = s.tris[t].p[e], b = s.tris[t].p[(e + 1) % 3];
      cplx dt = s.tris[t].p[(e + 2) % 3];
      cplx dp = M(s.tris[hp / 3].p[(hp % 3 + 2) % 3]);
      double scale = std::max(std::abs(a - b), std::abs(dt - dp));
      if (std::abs(incircle(a, b, dt, dp)) > tol * std::pow(scale, 4)) continue;
      if (std::abs(dt - dp) < std::abs(a - b) - tol * scale) {
        flip_edge(s, h);
        progress = true;
      }
    }
  }
}

bool all_classes_regular(const Surface& s) {
  for (int c = 0; c < s.num_vertex_classes(); ++c)
    if (std::abs(s.class_angle(c) - kTwoPi) > 1e-7) return false;
  return true;
}

// invariants of the translation lattice of a regular torus, up to rotation
std::array<double, 3> lattice_signature(const Surface& s, double tol) {
  Surface d = s;
  // a regular torus may carry several marked regular vertices; keep one
  for (int c = 0; c < d.num_vertex_classes(); ++c)
    d.set_marked(c, c == 0);
  make_delaunay(d);
  double cap = 4.0 * std::sqrt(d.area()) + tol;
  std::vector<cplx> decks;
  for (int tries = 0; tries < 4; ++tries) {
    decks.clear();
    for (auto& sc : saddle_connections_from(d, 0, cap))
      if (sc.is_loop() && std::abs(sc.deck_rot - cplx(1, 0)) < 1e-9)
        decks.push_back(sc.deck_trans);
    if (decks.size() >= 2) break;
    cap *= 2.0;
  }
  if (decks.size() < 2)
    throw std::runtime_error("lattice_signature: could not find two lattice vectors");
  std::sort(decks.begin(), decks.end(),
            [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  cplx v1 = decks[0];
  cplx v2;
  bool found = false;
  for (auto& v : decks) {
    if (std::abs(cross(v1, v)) > tol * std::abs(v1) * std::abs(v)) {
      v2 = v;
      found = true;
      break;
    }
  }
  if (!found) throw std::runtime_error("lattice_signature: degenerate lattice");
  return {std::abs(v1), std::abs(v2), std::abs(cross(v1, v2))};
}

// exhaustive anchored matching of two triangulations up to a global rotation
bool triangulations_match(const Surface& a, const Surface& b, double tol) {
  if (a.num_tris() != b.num_tris()) return false;
  int F = a.num_tris();
  auto lens = [](const Surface& s, int h) { return s.edge_length(h); };

  for (int hb0 = 0; hb0 < b.num_halfedges(); ++hb0) {
    if (std::abs(lens(a, 0) - lens(b, hb0)) > tol) continue;
    // propagate the halfedge correspondence 0 -> hb0
    std::vector<int> f(a.num_halfedges(), -1);
    std::vector<int> stack = {0};
    f[0] = hb0;
    bool ok = true;
    auto nexth = [](int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; };
    while (!stack.empty() && ok) {
      int ha = stack.back();
      stack.pop_back();
      int hb = f[ha];
      if (std::abs(lens(a, ha) - lens(b, hb)) > tol) {
        ok = false;
        break;
      }
      int pairs_a[2] = {nexth(ha), a.glue[ha]};
      int pairs_b[2] = {nexth(hb), b.glue[hb]};
      for (int k = 0; k < 2; ++k) {
        int na = pairs_a[k], nb = pairs_b[k];
        if (f[na] == -1) {
          f[na] = nb;
          stack.push_back(na);
        } else if (f[na] != nb) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;
    for (int h = 0; h < a.num_halfedges() && ok; ++h)
      ok = (f[h] >= 0) && std::abs(lens(a, h) - lens(b, f[h])) < tol;
    if (!ok) continue;
    // markings must correspond
    for (int h = 0; h < a.num_halfedges() && ok; ++h)
      ok = a.is_marked(a.vertex_class(h)) == b.is_marked(b.vertex_class(f[h]));
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool isometric(const Surface& a, const Surface& b, double tol) {
  if (a.genus() != b.genus()) return false;
  if (std::abs(a.area() - b.area()) > tol * (1.0 + a.area())) return false;

  bool rega = all_classes_regular(a), regb = all_classes_regular(b);
  if (rega != regb) return false;
  if (rega) {
    if (a.genus() != 1) return false;
    auto sa = lattice_signature(a, tol);
    auto sb = lattice_signature(b, tol);
    for (int i = 0; i < 3; ++i)
      if (std::abs(sa[i] - sb[i]) > tol * (1.0 + sa[i])) return false;
    return true;
  }

  Surface ca = canonical_triangulation(a);
  Surface cb = canonical_triangulation(b);
  normalize_cocircular(ca);
  normalize_cocircular(cb);
  return triangulations_match(ca, cb, tol);
}

}  // namespace flatmod
