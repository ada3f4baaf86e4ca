#include "flatmod/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace flatmod {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<cplx> PolygonalModel::vertices() const {
  std::vector<cplx> v;
  v.reserve(sides.size());
  cplx acc = 0;
  for (cplx s : sides) {
    v.push_back(acc);
    acc += s;
  }
  return v;
}

void PolygonalModel::validate(double tol) const {
  int m = int(sides.size());
  if (m < 3 || m % 2 != 0)
    throw std::invalid_argument("PolygonalModel: side count must be even and >= 4");
  if (int(pairing.size()) != m || int(rotations.size()) != m)
    throw std::invalid_argument("PolygonalModel: pairing/rotations size mismatch");
  cplx sum = 0;
  for (cplx s : sides) sum += s;
  if (std::abs(sum) > tol) throw std::invalid_argument("PolygonalModel: boundary does not close");
  for (int i = 0; i < m; ++i) {
    int j = pairing[i];
    if (j < 0 || j >= m || j == i || pairing[j] != i)
      throw std::invalid_argument("PolygonalModel: pairing is not a fixed-point-free involution");
    if (std::abs(std::abs(rotations[i]) - 1.0) > tol)
      throw std::invalid_argument("PolygonalModel: rotation is not unitary");
    if (std::abs(sides[i] - rotations[i] * sides[j]) > tol * (1.0 + std::abs(sides[i])))
      throw std::invalid_argument("PolygonalModel: side-length/rotation mismatch");
  }
}

Surface::Surface(std::vector<PlanarTriangle> triangles, std::vector<int> gluing,
                 std::vector<bool> marked_classes)
    : tris(std::move(triangles)), glue(std::move(gluing)) {
  if (int(glue.size()) != 3 * int(tris.size()))
    throw std::invalid_argument("Surface: gluing size mismatch");
  rebuild_classes(std::vector<bool>());
  if (!marked_classes.empty()) {
    if (int(marked_classes.size()) != nclasses_)
      throw std::invalid_argument("Surface: marked flag count mismatch");
    marked_ = marked_classes;
  } else {
    // default marking: all non-regular classes; if none, mark class 0
    bool any = false;
    for (int c = 0; c < nclasses_; ++c) {
      marked_[c] = std::abs(class_angle_[c] - kTwoPi) > 1e-7;
      any = any || marked_[c];
    }
    if (!any && nclasses_ > 0) marked_[0] = true;
  }
}

Isometry Surface::cross_map(int h) const {
  int hp = glue[h];
  cplx A = corner_point(h), B = corner_point(3 * (h / 3) + (h % 3 + 1) % 3);
  cplx Ap = corner_point(hp), Bp = corner_point(3 * (hp / 3) + (hp % 3 + 1) % 3);
  cplx rot = (A - B) / (Bp - Ap);
  rot /= std::abs(rot);  // keep it exactly unitary
  return {rot, B - rot * Ap};
}

int Surface::next_corner_ccw(int corner) const {
  int t = corner / 3, j = corner % 3;
  int h = 3 * t + (j + 2) % 3;  // edge entering this corner
  int hp = glue[h];
  return 3 * (hp / 3) + hp % 3;
}

void Surface::set_marked(int cls, bool m) { marked_[cls] = m; }

int Surface::num_marked() const {
  int n = 0;
  for (bool b : marked_) n += b ? 1 : 0;
  return n;
}

void Surface::rebuild_classes(const std::vector<bool>& corner_marked) {
  int nc = num_halfedges();
  UnionFind uf(nc);
  for (int h = 0; h < nc; ++h) {
    int hp = glue[h];
    // start of h ~ end of partner, end of h ~ start of partner
    uf.unite(h, 3 * (hp / 3) + (hp % 3 + 1) % 3);
    uf.unite(3 * (h / 3) + (h % 3 + 1) % 3, hp);
  }
  std::map<int, int> root_to_cls;
  vcls_.assign(nc, -1);
  class_corners_.clear();
  class_angle_.clear();
  for (int c = 0; c < nc; ++c) {
    int r = uf.find(c);
    auto it = root_to_cls.find(r);
    int cls;
    if (it == root_to_cls.end()) {
      cls = int(root_to_cls.size());
      root_to_cls.emplace(r, cls);
      class_corners_.emplace_back();
      class_angle_.push_back(0.0);
    } else {
      cls = it->second;
    }
    vcls_[c] = cls;
    class_corners_[cls].push_back(c);
    class_angle_[cls] += tris[c / 3].corner_angle(c % 3);
  }
  nclasses_ = int(root_to_cls.size());
  std::vector<bool> new_marked(nclasses_, false);
  if (!corner_marked.empty())
    for (int c = 0; c < nc; ++c)
      if (corner_marked[c]) new_marked[vcls_[c]] = true;
  marked_ = new_marked;
}

void Surface::rebuild_classes() {
  std::vector<bool> corner_marked(num_halfedges(), false);
  for (int c = 0; c < num_halfedges(); ++c)
    if (!marked_.empty() && vcls_[c] >= 0 && marked_[vcls_[c]]) corner_marked[c] = true;
  rebuild_classes(corner_marked);
}

double Surface::area() const {
  double a = 0;
  for (const auto& t : tris) a += t.area();
  return a;
}

std::vector<std::pair<int, double>> Surface::cone_angles() const {
  std::vector<std::pair<int, double>> out;
  for (int c = 0; c < nclasses_; ++c)
    if (marked_[c]) out.emplace_back(c, class_angle_[c]);
  return out;
}

double Surface::gauss_bonnet_defect() const {
  double worst = 0;
  for (int c = 0; c < nclasses_; ++c)
    if (!marked_[c]) worst = std::max(worst, std::abs(class_angle_[c] - kTwoPi));
  double total = 0;
  for (int c = 0; c < nclasses_; ++c) total += kTwoPi - class_angle_[c];
  worst = std::max(worst, std::abs(total - kTwoPi * euler_characteristic()));
  return worst;
}

void Surface::validate(double tol) const {
  int nh = num_halfedges();
  if (int(glue.size()) != nh) throw std::runtime_error("Surface: glue size");
  for (int h = 0; h < nh; ++h) {
    if (glue[h] < 0 || glue[h] >= nh || glue[h] == h || glue[glue[h]] != h)
      throw std::runtime_error("Surface: gluing is not a fixed-point-free involution");
    double la = edge_length(h), lb = edge_length(glue[h]);
    if (std::abs(la - lb) > tol * (1.0 + la))
      throw std::runtime_error("Surface: glued edges differ in length");
  }
  for (const auto& t : tris)
    if (t.area() <= 0) throw std::runtime_error("Surface: non-positive triangle");
  if (euler_characteristic() % 2 != 0)
    throw std::runtime_error("Surface: odd Euler characteristic");
  if (gauss_bonnet_defect() > tol)
    throw std::runtime_error("Surface: Gauss-Bonnet defect above tolerance");
}

cplx holonomy_along(const Surface& s, const std::vector<int>& crossed) {
  if (crossed.empty()) return {1.0, 0.0};
  int start = crossed.front() / 3;
  int cur = start;
  cplx rot = 1.0;
  for (int h : crossed) {
    if (h / 3 != cur) throw std::invalid_argument("holonomy_along: path not connected");
    rot *= s.cross_map(h).rot;
    cur = s.glue[h] / 3;
  }
  if (cur != start) throw std::invalid_argument("holonomy_along: path not closed");
  // rotation part of the deck map obtained by developing along the loop
  return rot;
}

Surface build_from_polygon(const PolygonalModel& model, double tol) {
  model.validate(tol);
  std::vector<cplx> verts = model.vertices();
  int m = int(model.sides.size());
  auto tri_idx = ear_clip(verts);

  std::vector<PlanarTriangle> tris;
  tris.reserve(tri_idx.size());
  for (auto& t : tri_idx) tris.push_back(PlanarTriangle{{verts[t[0]], verts[t[1]], verts[t[2]]}});

  // map polygon boundary segment i -> (tri, edge) carrying it
  std::vector<int> boundary_half(m, -1);
  std::map<std::pair<int, int>, int> diag;  // (vertex i, vertex j) -> halfedge
  for (int ti = 0; ti < int(tri_idx.size()); ++ti) {
    for (int e = 0; e < 3; ++e) {
      int a = tri_idx[ti][e], b = tri_idx[ti][(e + 1) % 3];
      if ((a + 1) % m == b)
        boundary_half[a] = 3 * ti + e;
      else
        diag[{a, b}] = 3 * ti + e;
    }
  }

  std::vector<int> glue(3 * tris.size(), -1);
  for (auto& [key, h] : diag) {
    auto it = diag.find({key.second, key.first});
    if (it == diag.end()) throw std::runtime_error("build_from_polygon: unmatched diagonal");
    glue[h] = it->second;
  }
  for (int i = 0; i < m; ++i) {
    if (boundary_half[i] < 0) throw std::runtime_error("build_from_polygon: missing boundary edge");
    glue[boundary_half[i]] = boundary_half[model.pairing[i]];
  }
  Surface s(std::move(tris), std::move(glue));
  s.validate(std::max(tol, 1e-7));
  return s;
}

PolygonalModel develop(const Surface& s, int base_tri, const std::vector<int>* cut_edges) {
  int F = s.num_tris();
  // crossable[h]: the dual graph may walk through edge h
  std::vector<bool> crossable(s.num_halfedges(), true);
  if (cut_edges) {
    for (int h : *cut_edges) {
      crossable[h] = false;
      crossable[s.glue[h]] = false;
    }
  }

  // breadth-first dual spanning tree; placement[t] maps chart of t to the plane
  std::vector<int> order;
  std::vector<Isometry> place(F);
  std::vector<int> state(F, 0);
  std::vector<bool> tree_edge(s.num_halfedges(), false);
  std::queue<int> q;
  q.push(base_tri);
  state[base_tri] = 1;
  place[base_tri] = Isometry{};
  while (!q.empty()) {
    int t = q.front();
    q.pop();
    order.push_back(t);
    for (int e = 0; e < 3; ++e) {
      int h = 3 * t + e;
      if (!crossable[h]) continue;
      int tp = s.glue[h] / 3;
      if (state[tp]) {
        if (!cut_edges) crossable[h] = false;  // not in tree: becomes a cut
        continue;
      }
      state[tp] = 1;
      tree_edge[h] = tree_edge[s.glue[h]] = true;
      place[tp] = s.cross_map(h).then(place[t]);
      q.push(tp);
    }
  }
  if (int(order.size()) != F)
    throw std::invalid_argument("develop: cut complement is not connected");
  if (cut_edges) {
    // with an explicit cut graph the complement must be a tree: E' = F - 1
    int crossable_edges = 0;
    for (int h = 0; h < s.num_halfedges(); ++h) crossable_edges += crossable[h] ? 1 : 0;
    if (crossable_edges / 2 != F - 1)
      throw std::invalid_argument("develop: cut complement is not simply connected");
    for (int h = 0; h < s.num_halfedges(); ++h)
      if (crossable[h] && !tree_edge[h])
        throw std::invalid_argument("develop: cut complement is not simply connected");
  }

  // boundary walk: halfedges whose edge is a cut, in boundary order.
  // Start anywhere; successor of h is the next cut halfedge counterclockwise
  // around the head vertex of h.
  auto is_cut = [&](int h) { return cut_edges ? !crossable[h] : !tree_edge[h]; };
  int h0 = -1;
  for (int h = 0; h < s.num_halfedges() && h0 < 0; ++h)
    if (is_cut(h)) h0 = h;
  if (h0 < 0) throw std::runtime_error("develop: no cut edges (not a closed surface?)");

  std::vector<int> walk;
  int h = h0;
  do {
    walk.push_back(h);
    // pivot clockwise around the head of h until the next cut halfedge
    int head = 3 * (h / 3) + (h % 3 + 1) % 3;  // corner at head of h
    int hn = 3 * (head / 3) + head % 3;        // halfedge leaving the head
    while (!is_cut(hn)) {
      int hp = s.glue[hn];
      hn = 3 * (hp / 3) + (hp % 3 + 1) % 3;
    }
    h = hn;
  } while (h != h0 && int(walk.size()) <= s.num_halfedges());
  if (h != h0) throw std::runtime_error("develop: boundary walk failed");

  PolygonalModel model;
  int b = int(walk.size());
  model.sides.resize(b);
  model.pairing.assign(b, -1);
  model.rotations.assign(b, cplx(1.0, 0.0));
  std::map<int, int> half_to_pos;
  for (int i = 0; i < b; ++i) half_to_pos[walk[i]] = i;
  for (int i = 0; i < b; ++i) {
    int hh = walk[i];
    const Isometry& M = place[hh / 3];
    cplx A = M(s.corner_point(hh));
    cplx B = M(s.corner_point(3 * (hh / 3) + (hh % 3 + 1) % 3));
    model.sides[i] = B - A;
  }
  for (int i = 0; i < b; ++i) {
    int j = half_to_pos.at(s.glue[walk[i]]);
    model.pairing[i] = j;
    model.rotations[i] = model.sides[i] / model.sides[j];
    model.rotations[i] /= std::abs(model.rotations[i]);
  }
  model.validate(1e-7);
  return model;
}

namespace {

// one-face hexagon gluing words with two vertex classes; entry {i, j} glues
// boundary side i to boundary side j
const std::array<std::array<std::pair<int, int>, 3>, 3> kHexPatterns = {{
    // pattern 1: a b c b~ a~ c~  (classes of size 4 and 2)
    {{{0, 4}, {1, 3}, {2, 5}}},
    // pattern 2: a b c a~ b~ c~  (opposite sides; classes alternate)
    {{{0, 3}, {1, 4}, {2, 5}}},
    // pattern 3: a b a~ b~ c c~  (classes of size 5 and 1)
    {{{0, 2}, {1, 3}, {4, 5}}},
}};

}  // namespace

std::pair<Surface, bool> hexagon_torus(int pattern, const std::array<cplx, 6>& sides,
                                       double tol) {
  if (pattern < 1 || pattern > 3)
    throw std::invalid_argument("hexagon_torus: pattern must be 1, 2 or 3");
  PolygonalModel model;
  model.sides.assign(sides.begin(), sides.end());
  model.pairing.assign(6, -1);
  model.rotations.assign(6, cplx(1.0, 0.0));
  for (auto [i, j] : kHexPatterns[pattern - 1]) {
    model.pairing[i] = j;
    model.pairing[j] = i;
    if (std::abs(std::abs(sides[i]) - std::abs(sides[j])) > tol)
      throw std::invalid_argument("hexagon_torus: paired sides differ in length");
    model.rotations[i] = sides[i] / sides[j];
    model.rotations[i] /= std::abs(model.rotations[i]);
    model.rotations[j] = 1.0 / model.rotations[i];
  }
  Surface s = build_from_polygon(model, tol);
  if (s.genus() != 1) throw std::logic_error("hexagon_torus: gluing did not produce a torus");
  bool regular = true;
  for (int c = 0; c < s.num_vertex_classes(); ++c)
    regular = regular && std::abs(s.class_angle(c) - kTwoPi) < 1e-7;
  if (regular)
    for (int c = 0; c < s.num_vertex_classes(); ++c) s.set_marked(c, true);
  return {s, regular};
}

std::array<cplx, 6> hexagon_sides_pattern2(cplx a, cplx b, cplx rot1, cplx rot2) {
  // closure: a + b + c + r1^-1 a' ... we use sides (a, b, c, d, e, f) with
  // d = -rot1*a-ish; solve c from the closing condition given the rotations
  // of the first two pairs; the third rotation follows.
  // pairs (0,3), (1,4), (2,5): s3 = r1 s0? convention: s0 = rot * s3.
  cplx s0 = a, s1 = b;
  cplx s3 = s0 / rot1, s4 = s1 / rot2;
  // s2 + s5 = -(s0+s1+s3+s4), with s5 = s2 / r3 for some unit r3: pick the
  // symmetric solution s2 = s5 = -(s0+s1+s3+s4)/2
  cplx rest = -(s0 + s1 + s3 + s4) * 0.5;
  return {s0, s1, rest, s3, s4, rest};
}

Surface rect_torus(double w, double h) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("rect_torus: need positive sides");
  PolygonalModel model;
  model.sides = {cplx(w, 0), cplx(0, h), cplx(-w, 0), cplx(0, -h)};
  model.pairing = {2, 3, 0, 1};
  model.rotations = {-1, -1, -1, -1};
  Surface s = build_from_polygon(model);
  for (int c = 0; c < s.num_vertex_classes(); ++c) s.set_marked(c, true);
  return s;
}

Surface lattice_torus(cplx tau) {
  if (tau.imag() <= 0) throw std::invalid_argument("lattice_torus: Im tau must be positive");
  PolygonalModel model;
  model.sides = {cplx(1, 0), tau, cplx(-1, 0), -tau};
  model.pairing = {2, 3, 0, 1};
  model.rotations = {-1, -1, -1, -1};
  Surface s = build_from_polygon(model);
  for (int c = 0; c < s.num_vertex_classes(); ++c) s.set_marked(c, true);
  return s;
}

Surface double_triangle_sphere(cplx a, cplx b, cplx c) {
  if (orient2(a, b, c) <= 0) throw std::invalid_argument("double_triangle_sphere: need ccw triangle");
  // front copy (a,b,c) and back copy reflected to stay counterclockwise
  PlanarTriangle front{{a, b, c}};
  PlanarTriangle back{{std::conj(a), std::conj(c), std::conj(b)}};
  // edges: front 0:(a,b) 1:(b,c) 2:(c,a); back 0:(a,c) 1:(c,b) 2:(b,a)
  std::vector<int> glue = {3 + 2, 3 + 1, 3 + 0, 2, 1, 0};
  return Surface({front, back}, glue);
}

}  // namespace flatmod
