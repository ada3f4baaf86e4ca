#include "flatmod/veech.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace flatmod {

bool HermitianForm::is_hermitian(double tol) const {
  return (H - H.adjoint()).cwiseAbs().maxCoeff() <= tol * (1.0 + H.cwiseAbs().maxCoeff());
}

double HermitianForm::evaluate(const Eigen::VectorXcd& v) const {
  return (v.adjoint() * H * v)(0, 0).real();
}

Signature signature(const HermitianForm& form, double rel_threshold) {
  if (!form.is_hermitian())
    throw std::invalid_argument("signature: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(form.H);
  Signature sig;
  double radius = 0;
  for (int i = 0; i < form.dim(); ++i)
    radius = std::max(radius, std::abs(es.eigenvalues()[i]));
  double thresh = rel_threshold * std::max(radius, 1e-300);
  for (int i = 0; i < form.dim(); ++i) {
    double ev = es.eigenvalues()[i];
    sig.eigenvalues.push_back(ev);
    if (std::abs(ev) <= thresh) {
      ++sig.zero;
      sig.degenerate = true;
    } else if (ev > 0) {
      ++sig.positive;
    } else {
      ++sig.negative;
    }
  }
  return sig;
}

// ---------------------------------------------------------------------------
// linear parametrisations
// ---------------------------------------------------------------------------

std::vector<cplx> LinearParametrisation::sides_for(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd s = expr * v;
  std::vector<cplx> out(s.size());
  for (int i = 0; i < s.size(); ++i) out[i] = s[i];
  return out;
}

Eigen::VectorXcd LinearParametrisation::base_values() const {
  Eigen::VectorXcd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = base.sides[free_idx[i]];
  return v;
}

Eigen::VectorXcd LinearParametrisation::values_of(const PolygonalModel& concrete) const {
  Eigen::VectorXcd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = concrete.sides[free_idx[i]];
  return v;
}

PolygonalModel LinearParametrisation::model_for(const Eigen::VectorXcd& v) const {
  PolygonalModel m = base;
  m.sides = sides_for(v);
  return m;
}

LinearParametrisation make_parametrisation(const PolygonalModel& model) {
  model.validate();
  int m = int(model.sides.size());
  int k = m / 2;

  // nullspace of the pairing relations and the closing condition
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(k + 1, m);
  int row = 0;
  for (int i = 0; i < m; ++i) {
    int j = model.pairing[i];
    if (i < j) {
      C(row, i) = 1.0;
      C(row, j) = -model.rotations[i];
      ++row;
    }
  }
  for (int i = 0; i < m; ++i) C(row, i) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(C);
  lu.setThreshold(1e-10);
  Eigen::MatrixXcd K = lu.kernel();  // m x dim
  int d = int(K.cols());
  // translation-type models (every rotation -1) keep one extra parameter
  if (d < k - 1 || d > k)
    throw std::runtime_error("make_parametrisation: unexpected parameter count (rank-deficient)");

  // lexicographically first independent side subset
  std::vector<int> free_idx;
  Eigen::MatrixXcd rows(0, d);
  for (int i = 0; i < m && int(free_idx.size()) < d; ++i) {
    Eigen::MatrixXcd cand(rows.rows() + 1, d);
    cand << rows, K.row(i);
    Eigen::FullPivLU<Eigen::MatrixXcd> test(cand);
    test.setThreshold(1e-10);
    if (test.rank() == cand.rows()) {
      rows = cand;
      free_idx.push_back(i);
    }
  }
  if (int(free_idx.size()) != d)
    throw std::runtime_error("make_parametrisation: no independent side subset");

  LinearParametrisation par;
  par.base = model;
  par.tri_idx = ear_clip(model.vertices());
  par.free_idx = free_idx;
  par.expr = K * rows.inverse();
  return par;
}

Surface build_from_polygon_frozen(const PolygonalModel& model,
                                  const std::vector<std::array<int, 3>>& tri_idx,
                                  double tol) {
  model.validate(tol);
  std::vector<cplx> verts = model.vertices();
  int m = int(model.sides.size());
  std::vector<PlanarTriangle> tris;
  tris.reserve(tri_idx.size());
  for (auto& t : tri_idx) {
    PlanarTriangle T{{verts[t[0]], verts[t[1]], verts[t[2]]}};
    if (T.area() <= 0)
      throw std::runtime_error("build_from_polygon_frozen: triangulation no longer valid");
    tris.push_back(T);
  }
  std::vector<int> boundary_half(m, -1);
  std::map<std::pair<int, int>, int> diag;
  for (int ti = 0; ti < int(tri_idx.size()); ++ti)
    for (int e = 0; e < 3; ++e) {
      int a = tri_idx[ti][e], b = tri_idx[ti][(e + 1) % 3];
      if ((a + 1) % m == b)
        boundary_half[a] = 3 * ti + e;
      else
        diag[{a, b}] = 3 * ti + e;
    }
  std::vector<int> glue(3 * tris.size(), -1);
  for (auto& [key, h] : diag) glue[h] = diag.at({key.second, key.first});
  for (int i = 0; i < m; ++i) glue[boundary_half[i]] = boundary_half[model.pairing[i]];
  return Surface(std::move(tris), std::move(glue));
}

// ---------------------------------------------------------------------------
// the area form
// ---------------------------------------------------------------------------

HermitianForm area_form(const LinearParametrisation& param) {
  int d = param.dim();
  int m = int(param.base.sides.size());
  // vertex functionals: V_j = sum of sides before j
  std::vector<Eigen::RowVectorXcd> vert(m + 1, Eigen::RowVectorXcd::Zero(d));
  for (int j = 0; j < m; ++j) vert[j + 1] = vert[j] + param.expr.row(j);

  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
  const cplx i4(0, 4);
  for (auto& t : param.tri_idx) {
    // consecutive sides (z, w) of the ccw triangle; its area is Im(conj(z) w)/2
    Eigen::RowVectorXcd alpha = vert[t[1]] - vert[t[0]];
    Eigen::RowVectorXcd beta = vert[t[2]] - vert[t[1]];
    Eigen::MatrixXcd M = alpha.adjoint() * beta;  // v* M v = conj(z) w
    H += (M - M.adjoint()) / i4;
  }
  HermitianForm f{H};
  if (!f.is_hermitian(1e-12))
    throw std::logic_error("area_form: assembled matrix is not Hermitian");
  return f;
}

double verify_area_form(const LinearParametrisation& param, const HermitianForm& form,
                        int trials, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v0 = param.base_values();
  double scale = v0.norm();
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXcd v = v0;
    for (int i = 0; i < v.size(); ++i)
      v[i] += 0.02 * scale * cplx(gauss(rng), gauss(rng));
    PolygonalModel m = param.model_for(v);
    Surface s;
    try {
      s = build_from_polygon_frozen(m, param.tri_idx);
    } catch (const std::exception&) {
      continue;  // perturbation broke the triangulation; skip the sample
    }
    double area = s.area();
    double quad = form.evaluate(v);
    worst = std::max(worst, std::abs(area - quad) / std::max(1e-300, std::abs(area)));
  }
  return worst;
}

Eigen::MatrixXcd transition_map(
    const LinearParametrisation& A, const LinearParametrisation& B,
    const std::function<PolygonalModel(const PolygonalModel&)>& redevelop) {
  int d = A.dim();
  if (B.dim() != d)
    throw std::invalid_argument("transition_map: parametrisations of different leaves");
  Eigen::VectorXcd a0 = A.base_values();
  Eigen::VectorXcd b0 = B.values_of(redevelop(A.model_for(a0)));
  double eps = 1e-3 * a0.norm();
  Eigen::MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXcd a = a0;
    a[i] += eps;
    Eigen::VectorXcd b = B.values_of(redevelop(A.model_for(a)));
    g.col(i) = (b - b0) / eps;
  }
  // the map is linear, so it must reproduce the base point
  if ((g * a0 - b0).norm() > 1e-6 * (1.0 + b0.norm()))
    throw std::runtime_error("transition_map: redevelopment is not linear in the parameters");
  return g;
}

double max_distance_to_cyclotomic(const Eigen::MatrixXcd& M, std::int64_t q) {
  if (q <= 0) throw std::invalid_argument("max_distance_to_cyclotomic: q must be positive");
  // lattice basis (1, zeta_q); for q in {1,2} this degenerates to Z, where
  // only the real axis matters
  double worst = 0;
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) {
      cplx z = M(r, c);
      if (q <= 2) {
        worst = std::max(worst, std::hypot(z.real() - std::round(z.real()), z.imag()));
        continue;
      }
      cplx zeta = std::polar(1.0, kTwoPi / double(q));
      // coordinates in the basis (1, zeta)
      double det = zeta.imag();
      double b = z.imag() / det;
      double a = z.real() - b * zeta.real();
      cplx nearest = std::round(a) + std::round(b) * zeta;
      worst = std::max(worst, std::abs(z - nearest));
    }
  return worst;
}

HermitianForm surgery_extension_form(double base_coeff, const std::vector<double>& mus) {
  int d = 1 + int(mus.size());
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
  H(0, 0) = base_coeff;
  for (int i = 0; i < int(mus.size()); ++i) {
    if (mus[i] <= 0)
      throw std::invalid_argument("surgery_extension_form: removed-area coefficients are positive");
    H(i + 1, i + 1) = -mus[i];
  }
  return HermitianForm{H};
}

}  // namespace flatmod
