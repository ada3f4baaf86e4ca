#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "flatmod/surface.hpp"

namespace flatmod {

/// Complex Hermitian form together with its eigenvalue signature.
struct HermitianForm {
  Eigen::MatrixXcd H;

  int dim() const { return int(H.rows()); }
  bool is_hermitian(double tol = 1e-12) const;
  double evaluate(const Eigen::VectorXcd& v) const;  // real number v* H v
};

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  bool degenerate = false;  // some eigenvalue within threshold of zero
  std::vector<double> eigenvalues;
};

/// Eigenvalue signature with relative threshold (default 1e-9 of the
/// spectral radius).
Signature signature(const HermitianForm& form, double rel_threshold = 1e-9);

/// Linear parametrisation of a leaf around a pseudo-polygonal model: the
/// free side parameters and the expression matrix recovering all sides.
struct LinearParametrisation {
  PolygonalModel base;
  std::vector<std::array<int, 3>> tri_idx;  // frozen polygon triangulation
  std::vector<int> free_idx;                // k-1 free side indices
  Eigen::MatrixXcd expr;                    // (2k) x (k-1): sides = expr * v

  int dim() const { return int(expr.cols()); }
  /// Sides for the given free values.
  std::vector<cplx> sides_for(const Eigen::VectorXcd& v) const;
  /// Free values of the base model.
  Eigen::VectorXcd base_values() const;
  /// Read free values off a concrete model with the same combinatorics.
  Eigen::VectorXcd values_of(const PolygonalModel& concrete) const;
  /// Model with the same pairing/rotations and new sides.
  PolygonalModel model_for(const Eigen::VectorXcd& v) const;
};

/// Builds the parametrisation: eliminates the pairing relations and the
/// closing condition, choosing the lexicographically first independent side
/// subset as free parameters. Throws when rank-deficient.
LinearParametrisation make_parametrisation(const PolygonalModel& model);

/// The area Hermitian form in the free parameters: v* H v is the area of the
/// glued surface for nearby parameter values.
HermitianForm area_form(const LinearParametrisation& param);

/// Worst relative mismatch between v* H v and the glued surface area over
/// random perturbations of the base values; used as an oracle in tests.
double verify_area_form(const LinearParametrisation& param, const HermitianForm& form,
                        int trials = 20, unsigned seed = 1);

/// The matrix g with v_B = g v_A for two parametrisations of the same
/// surface germ. redevelop maps a concrete A-model to the matching B-model
/// (same combinatorics as B's base). Pulls back forms as H_A = g^H H_B g.
Eigen::MatrixXcd transition_map(const LinearParametrisation& A,
                                const LinearParametrisation& B,
                                const std::function<PolygonalModel(const PolygonalModel&)>& redevelop);

/// Entrywise distance to the ring Z[zeta_q] (integer combinations a + b zeta).
double max_distance_to_cyclotomic(const Eigen::MatrixXcd& M, std::int64_t q);

/// Area form of the literal surgery-extension construction: one positive
/// sphere block extended by one negative block -mu per added surgery
/// coordinate.
HermitianForm surgery_extension_form(double base_coeff, const std::vector<double>& mus);

/// Variant of build_from_polygon with a frozen triangulation, for use during
/// parameter perturbations.
Surface build_from_polygon_frozen(const PolygonalModel& model,
                                  const std::vector<std::array<int, 3>>& tri_idx,
                                  double tol = 1e-9);

}  // namespace flatmod
