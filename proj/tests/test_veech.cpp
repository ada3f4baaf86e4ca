#include "doctest.h"
#include "flatmod/delaunay.hpp"
#include "flatmod/mesh_ops.hpp"
#include "flatmod/veech.hpp"

#include <cmath>

using namespace flatmod;

namespace {

PolygonalModel hex_model() {
  cplx rot1 = std::polar(1.0, kPi / 3) * (-1.0);
  cplx rot2 = std::polar(1.0, -kPi / 4) * (-1.0);
  auto sides = hexagon_sides_pattern2({1.0, 0.1}, {0.15, 0.9}, rot1, rot2);
  PolygonalModel m;
  m.sides.assign(sides.begin(), sides.end());
  m.pairing = {3, 4, 5, 0, 1, 2};
  m.rotations.resize(6);
  for (int i = 0; i < 6; ++i) {
    m.rotations[i] = m.sides[i] / m.sides[m.pairing[i]];
    m.rotations[i] /= std::abs(m.rotations[i]);
  }
  return m;
}

}  // namespace

TEST_CASE("signature of explicit matrices") {
  HermitianForm id3{Eigen::MatrixXcd::Identity(3, 3)};
  Signature s = signature(id3);
  CHECK(s.positive == 3);
  CHECK(s.negative == 0);
  CHECK(!s.degenerate);

  Eigen::MatrixXcd m(2, 2);
  m << 1.0, cplx(0, 1), cplx(0, -1), -1.0;  // eigenvalues +-sqrt(2)
  Signature s2 = signature(HermitianForm{m});
  CHECK(s2.positive == 1);
  CHECK(s2.negative == 1);

  Eigen::MatrixXcd deg = Eigen::MatrixXcd::Zero(2, 2);
  deg(0, 0) = 1.0;
  Signature s3 = signature(HermitianForm{deg});
  CHECK(s3.degenerate);
}

TEST_CASE("area form of a genus-one two-point model has signature (1,1)") {
  PolygonalModel m = hex_model();
  LinearParametrisation par = make_parametrisation(m);
  CHECK(par.dim() == 2);  // k-1 = 2
  HermitianForm H = area_form(par);
  // base point evaluates to the surface area
  Surface s = build_from_polygon(m);
  CHECK(H.evaluate(par.base_values()) == doctest::Approx(s.area()).epsilon(1e-10));
  // matches rebuilt areas at perturbations
  CHECK(verify_area_form(par, H, 20) < 1e-8);
  Signature sig = signature(H);
  CHECK(sig.positive == 1);
  CHECK(sig.negative == 1);
  CHECK(!sig.degenerate);
}

TEST_CASE("area form of a three-point sphere is one positive coefficient") {
  Surface sph = double_triangle_sphere({0, 0}, {1, 0}, {0.3, 0.8});
  PolygonalModel m = develop(sph);
  CHECK(int(m.sides.size()) == 4);  // k = 2 for g=0, n=3
  LinearParametrisation par = make_parametrisation(m);
  CHECK(par.dim() == 1);
  HermitianForm H = area_form(par);
  Signature sig = signature(H);
  CHECK(sig.positive == 1);
  CHECK(sig.negative == 0);
  CHECK(H.evaluate(par.base_values()) == doctest::Approx(sph.area()).epsilon(1e-10));
}

TEST_CASE("area positivity at the base point") {
  PolygonalModel m = hex_model();
  LinearParametrisation par = make_parametrisation(m);
  HermitianForm H = area_form(par);
  CHECK(H.evaluate(par.base_values()) > 0);
}

TEST_CASE("surgery extension forms have signature (1, #surgeries)") {
  HermitianForm f0 = surgery_extension_form(1.0, {});
  CHECK(signature(f0).positive == 1);
  for (int n = 1; n <= 4; ++n) {
    std::vector<double> mus(n, 0.37);
    HermitianForm f = surgery_extension_form(2.0, mus);
    Signature sig = signature(f);
    CHECK(sig.positive == 1);
    CHECK(sig.negative == n);
    CHECK(!sig.degenerate);
  }
  CHECK_THROWS(surgery_extension_form(1.0, {-0.5}));
}

TEST_CASE("transition map: identity redevelopment") {
  PolygonalModel m = hex_model();
  LinearParametrisation par = make_parametrisation(m);
  auto identity = [](const PolygonalModel& mm) { return mm; };
  Eigen::MatrixXcd g = transition_map(par, par, identity);
  CHECK((g - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("transition map of the square torus recut is unimodular integer") {
  // parametrisation A: the square cut along (1,0),(0,1)
  Surface sq = square_torus();
  PolygonalModel mA = develop(sq);
  LinearParametrisation A = make_parametrisation(mA);
  CHECK(A.dim() == 2);  // translation torus: both side pairs free

  // parametrisation B: flip the interior diagonal (fixed edge id, so the
  // redevelopment is combinatorially frozen), then develop
  int h_flip = -1;
  {
    Surface base = build_from_polygon_frozen(mA, A.tri_idx);
    for (int h = 0; h < base.num_halfedges(); ++h)
      if (h < base.glue[h] && std::abs(base.edge_length(h) - std::sqrt(2.0)) < 1e-9)
        h_flip = h;
    REQUIRE(h_flip >= 0);
  }
  auto recut = [&](const PolygonalModel& mm) {
    Surface s = build_from_polygon_frozen(mm, A.tri_idx);
    flip_edge(s, h_flip);
    return develop(s);
  };
  PolygonalModel mB = recut(mA);
  LinearParametrisation B = make_parametrisation(mB);
  Eigen::MatrixXcd g = transition_map(A, B, recut);

  // integer entries, determinant of modulus one
  CHECK(max_distance_to_cyclotomic(g, 1) < 1e-9);
  CHECK(std::abs(std::abs(g.determinant()) - 1.0) < 1e-9);

  // the transition preserves the area forms: H_A = g^H H_B g
  HermitianForm HA = area_form(A), HB = area_form(B);
  Eigen::MatrixXcd pulled = g.adjoint() * HB.H * g;
  CHECK((pulled - HA.H).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("distance to cyclotomic rings") {
  Eigen::MatrixXcd m(1, 2);
  m << cplx(3, -2), cplx(-1, 1);
  CHECK(max_distance_to_cyclotomic(m, 4) < 1e-12);  // Gaussian integers
  Eigen::MatrixXcd e(1, 1);
  e << cplx(0.5, std::sqrt(3.0) / 2);  // zeta_6
  CHECK(max_distance_to_cyclotomic(e, 6) < 1e-12);
  CHECK(max_distance_to_cyclotomic(e, 4) > 0.1);
}
