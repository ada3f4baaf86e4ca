#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "flatmod/rational.hpp"

namespace flatmod {

/// A cone angle stored as an exact fraction of a full turn: the angle is
/// 2*pi*frac. Admissible cone angles are never integer multiples of 2*pi,
/// but intermediate arithmetic (curvature sums, residuals) may produce
/// integers, so the check is separate from construction.
struct RationalAngle {
  Rational frac;  // angle / 2pi

  RationalAngle() = default;
  explicit RationalAngle(Rational f) : frac(f) {}
  RationalAngle(std::int64_t num, std::int64_t den) : frac(num, den) {}

  double radians() const { return 2.0 * 3.141592653589793238462643383279502884 * frac.value(); }
  bool is_multiple_of_two_pi() const { return frac.is_integer(); }

  friend bool operator==(const RationalAngle& a, const RationalAngle& b) {
    return a.frac == b.frac;
  }
  friend bool operator!=(const RationalAngle& a, const RationalAngle& b) {
    return !(a == b);
  }
};

/// Angle datum (g, theta). Constructors sort angles descending (ties broken
/// by original index) so that for the genus-one regime theta_1 is the unique
/// angle in (2pi, 4pi).
struct AngleDatum {
  int genus = 0;
  std::vector<RationalAngle> angles;
  std::vector<int> input_permutation;  // angles[i] was input slot input_permutation[i]

  AngleDatum() = default;
  AngleDatum(int g, std::vector<RationalAngle> theta);

  int n() const { return int(angles.size()); }

  /// Every angle lies strictly between 0 and 2pi except for genus one,
  /// where the leading angle lies in (2pi, 4pi). No angle is an integer
  /// multiple of 2pi.
  bool satisfies_angle_hypothesis() const;

  /// True when the Gauss-Bonnet residual vanishes and the angle hypothesis
  /// holds for the surface regime (g=0 or g=1).
  bool admissible() const;
};

/// Sum of curvatures minus 2pi*chi, as an exact multiple of 2pi.
/// Zero exactly when the datum can be realised by a flat surface.
RationalAngle gauss_bonnet_residual(const AngleDatum& datum);

/// Order m of the subgroup of U(1) generated by the e^{i theta_j}.
/// Pure gcd/lcm arithmetic on the reduced fractions theta_j / 2pi.
std::int64_t minimal_group_order(const AngleDatum& datum);

/// Label (theta, M) of a genus-one leaf: the holonomy image has order
/// q = m*M and the group generated by the cone angles has order m.
struct LeafLabel {
  AngleDatum datum;
  std::int64_t M = 1;
  // derived
  std::int64_t m = 1;  // order of the angle subgroup
  std::int64_t p = 0;  // theta_1 = 2pi (1 + p/m)
  std::int64_t q = 1;  // order of the holonomy image, q = m*M
};

LeafLabel leaf_label(const AngleDatum& datum, std::int64_t M);

enum class SurgeryKind { S1, S2, S3, S4, S5 };

/// Records that the holonomy of `child` is a reduction of the holonomy of
/// `parent`, together with the surgery that produced it.
struct ReductionWitness {
  LeafLabel parent;
  LeafLabel child;
  SurgeryKind kind = SurgeryKind::S1;

  bool consistent() const { return parent.q % child.q == 0; }
};

}  // namespace flatmod
