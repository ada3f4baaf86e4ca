#include "doctest.h"
#include "flatmod/delaunay.hpp"
#include "flatmod/mesh_ops.hpp"
#include "flatmod/surface.hpp"
#include "flatmod/unfold.hpp"

#include <cmath>
#include <set>

using namespace flatmod;

namespace {

Surface hex_torus_fixture() {
  cplx rot1 = std::polar(1.0, kPi / 3) * (-1.0);
  cplx rot2 = std::polar(1.0, -kPi / 4) * (-1.0);
  auto sides = hexagon_sides_pattern2({1.0, 0.1}, {0.15, 0.9}, rot1, rot2);
  return hexagon_torus(2, sides).first;
}

}  // namespace

TEST_CASE("square torus delaunay: two triangles, edge multiset {1,1,sqrt2}") {
  Surface s = delaunay(square_torus());
  CHECK(s.num_tris() == 2);
  CHECK(is_delaunay(s));
  std::multiset<int> lens;
  std::vector<double> el;
  for (int h = 0; h < s.num_halfedges(); ++h)
    if (h < s.glue[h]) el.push_back(s.edge_length(h));
  std::sort(el.begin(), el.end());
  REQUIRE(el.size() == 3);
  CHECK(el[0] == doctest::Approx(1.0));
  CHECK(el[1] == doctest::Approx(1.0));
  CHECK(el[2] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("delaunay is idempotent (flip-stable)") {
  for (const Surface& s0 : {square_torus(), rect_torus(1, 2), hex_torus_fixture(),
                            double_triangle_sphere({0, 0}, {1, 0}, {0.2, 0.8})}) {
    Surface d = delaunay(s0);
    Surface d2 = d;
    CHECK(make_delaunay(d2) == 0);
  }
}

TEST_CASE("flips preserve area, angles and gauss-bonnet") {
  Surface s = hex_torus_fixture();
  double area = s.area();
  auto cones = s.cone_angles();
  Surface d = delaunay(s);
  d.validate();
  CHECK(d.area() == doctest::Approx(area).epsilon(1e-12));
  auto cones2 = d.cone_angles();
  REQUIRE(cones.size() == cones2.size());
  std::vector<double> a1, a2;
  for (auto& [c, x] : cones) a1.push_back(x);
  for (auto& [c, x] : cones2) a2.push_back(x);
  std::sort(a1.begin(), a1.end());
  std::sort(a2.begin(), a2.end());
  for (size_t i = 0; i < a1.size(); ++i) CHECK(a1[i] == doctest::Approx(a2[i]));
}

TEST_CASE("saddle connections on the square torus match the lattice") {
  Surface s = delaunay(square_torus());
  auto scs = saddle_connections_from(s, 0, 2.2);
  // lattice vectors of Z^2 with norm <= 2.2: (+-1,0),(0,+-1),(+-1,+-1),(+-2,0),(0,+-2)
  // all are loops at the single vertex
  int count_len1 = 0, count_sqrt2 = 0, count_len2 = 0;
  for (auto& sc : scs) {
    CHECK(sc.is_loop());
    if (std::abs(sc.length - 1.0) < 1e-9) ++count_len1;
    if (std::abs(sc.length - std::sqrt(2.0)) < 1e-9) ++count_sqrt2;
    if (std::abs(sc.length - 2.0) < 1e-9) ++count_len2;
    CHECK(std::abs(sc.deck_rot - cplx(1, 0)) < 1e-9);  // translation surface
  }
  CHECK(count_len1 == 4);
  CHECK(count_sqrt2 == 4);
  // (+-2,0),(0,+-2) are blocked by the vertex at (+-1,0),(0,+-1)
  CHECK(count_len2 == 0);
}

TEST_CASE("homology classes of square torus loops") {
  Surface s = delaunay(square_torus());
  HomologyBasis hb = homology_basis(s);
  CHECK(hb.rank == 2);
  auto scs = saddle_connections_from(s, 0, 1.5);
  int essential = 0;
  for (auto& sc : scs) {
    auto cl = hb.corridor_class(s, sc.crossed, sc.start_corner, sc.end_corner);
    if (!HomologyBasis::is_zero(cl)) ++essential;
  }
  CHECK(essential == int(scs.size()));  // every lattice loop is essential
}

TEST_CASE("systole of rectangle tori") {
  SystoleResult s1 = systole(square_torus(), 3.0);
  CHECK(s1.length == doctest::Approx(1.0));
  CHECK(s1.regular);

  SystoleResult s3 = systole(rect_torus(1, 3), 8.0);
  CHECK(s3.length == doctest::Approx(1.0));

  CHECK_THROWS(systole(double_triangle_sphere({0, 0}, {1, 0}, {0, 1}), 3.0));
}

TEST_CASE("relative systole of a two-point torus vs brute force") {
  Surface s = hex_torus_fixture();
  auto [delta, sc] = relative_systole(s);
  // brute force: all saddle connections between the two cone points
  Surface d = delaunay(s);
  double best = 1e18;
  for (auto& c : all_saddle_connections(d, 3.0 * delta))
    if (c.from_cls != c.to_cls) best = std::min(best, c.length);
  CHECK(delta == doctest::Approx(best).epsilon(1e-9));
  CHECK_THROWS(relative_systole(square_torus()));
}

TEST_CASE("relative diameter and diameter bounds on the square torus") {
  Surface s = square_torus();
  double sN = relative_diameter(s);
  CHECK(sN == doctest::Approx(std::sqrt(2.0) / 2));  // circumradius of half square
  auto [lo, up] = diameter_bounds(s, 200);
  double truth = std::sqrt(2.0) / 2;
  CHECK(lo <= truth + 1e-9);
  CHECK(up >= truth - 1e-9);
  CHECK(lo >= truth * 0.98);  // within 2%
  CHECK(up == doctest::Approx(2 * 1 * sN));
}

TEST_CASE("diameter bounds scale linearly") {
  Surface s = hex_torus_fixture();
  auto [lo1, up1] = diameter_bounds(s, 150);
  auto [lo2, up2] = diameter_bounds(scaled(s, 2.0), 150);
  CHECK(lo2 == doctest::Approx(2 * lo1).epsilon(1e-6));
  CHECK(up2 == doctest::Approx(2 * up1).epsilon(1e-9));
}

TEST_CASE("max delaunay edge bounded by twice the diameter upper bound") {
  for (const Surface& s0 : {square_torus(), rect_torus(1, 2), hex_torus_fixture()}) {
    Surface d = delaunay(s0);
    auto [lo, up] = diameter_bounds(d, 150);
    double mx = 0;
    for (int h = 0; h < d.num_halfedges(); ++h) mx = std::max(mx, d.edge_length(h));
    CHECK(mx <= 2 * up + 1e-9);
    (void)lo;
  }
}

TEST_CASE("prop-compare inequalities via metric report") {
  for (const Surface& s0 : {rect_torus(1, 2), hex_torus_fixture()}) {
    MetricReport r = metric_report(s0, 200);
    int n = delaunay(s0).num_marked();
    double D = r.diameter_lower;
    if (!std::isnan(r.rel_systole)) CHECK(D >= r.rel_systole - 1e-6);
    if (!std::isnan(r.systole)) CHECK(D >= r.systole / 2 - 1e-6);
    CHECK(D >= r.rel_diameter - 1e-6);
    CHECK(r.rel_diameter >= D / (2 * n) - 1e-6);
    CHECK(r.diameter_lower <= r.diameter_upper + 1e-12);
  }
}

TEST_CASE("cone closed geodesic formula") {
  auto [len, corner] = cone_closed_geodesic(kPi / 2, 1.0);
  CHECK(len == doctest::Approx(std::sqrt(2.0)));
  CHECK(corner == doctest::Approx(kPi / 2));
  auto [len2, corner2] = cone_closed_geodesic(2 * kPi / 3, 2.0);
  CHECK(len2 == doctest::Approx(2 * std::sqrt(3.0)));
  auto [len3, c3] = cone_closed_geodesic(kPi / 2, 1e-9);
  CHECK(len3 < 1e-8);
  (void)corner2;
  (void)c3;
  CHECK_THROWS(cone_closed_geodesic(kPi, 1.0));
}

TEST_CASE("diameter constants") {
  auto [k1, k2] = diameter_constants(2, 4);
  CHECK(k1 == doctest::Approx(8.0 / std::sqrt(kPi)));
  CHECK(k2 == doctest::Approx(std::sqrt(3.0) / 4));
  auto [k1b, k2b] = diameter_constants(2, 3);
  CHECK(k1b == doctest::Approx((4.0 / std::sqrt(kPi)) * 2.0));
  CHECK(k2b == doctest::Approx(k2));  // K2 depends only on n
  (void)k2b;
}

TEST_CASE("square torus is one big cylinder") {
  auto cyl = find_cylinder(square_torus());
  REQUIRE(cyl.has_value());
  CHECK(cyl->width == doctest::Approx(1.0));
  CHECK(cyl->length == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exact distances on the square torus") {
  Surface s = delaunay(square_torus());
  // distance between (1/4,1/4) and (3/4,3/4)... on the torus the offset
  // (1/2,1/2) has length sqrt(2)/2
  // locate both points: triangle containing them depends on triangulation;
  // use visibility machinery through PointRef in triangle charts
  PointRef a{0, s.tris[0].p[0] * 0.5 + (s.tris[0].p[1] + s.tris[0].p[2]) * 0.25};
  double dm = distance_to_marked(s, a, 3.0);
  CHECK(dm <= std::sqrt(2.0) / 2 + 1e-9);
  CHECK(dm > 0);
}

TEST_CASE("vertex removal keeps geometry") {
  // split the square torus by delaunay, then artificially mark nothing and
  // check regular-vertex removal on a surface with an auxiliary vertex:
  // build a 1x1 torus as two triangles, then flip to create no new vertex --
  // use a hexagon torus whose develop adds no vertices instead; here simply
  // check canonical_triangulation leaves cone surfaces intact
  Surface s = hex_torus_fixture();
  Surface c = canonical_triangulation(s);
  CHECK(c.area() == doctest::Approx(s.area()));
  CHECK(c.num_marked() == s.num_marked());
  CHECK(is_delaunay(c));
}

TEST_CASE("isometry test: scaling and relabeling") {
  Surface s = hex_torus_fixture();
  CHECK(isometric(s, s));
  CHECK(!isometric(s, scaled(s, 1.5)));
  CHECK(isometric(square_torus(), square_torus()));
  CHECK(!isometric(square_torus(), rect_torus(1, 2)));
  // a rotated copy is isometric
  Surface rot = s;
  cplx w = std::polar(1.0, 0.83);
  for (auto& t : rot.tris)
    for (auto& p : t.p) p *= w;
  CHECK(isometric(s, rot));
}
