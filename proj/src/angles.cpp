#include "flatmod/angles.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace flatmod {

AngleDatum::AngleDatum(int g, std::vector<RationalAngle> theta) : genus(g) {
  std::vector<int> idx(theta.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (theta[a].frac != theta[b].frac) return theta[b].frac < theta[a].frac;
    return a < b;  // descending, ties by original index
  });
  angles.reserve(theta.size());
  input_permutation = idx;
  for (int i : idx) angles.push_back(theta[i]);
}

bool AngleDatum::satisfies_angle_hypothesis() const {
  const Rational zero(0), one(1), two(2);
  for (int i = 0; i < n(); ++i) {
    const Rational& f = angles[i].frac;
    if (f.is_integer()) return false;
    if (genus == 1 && i == 0) {
      if (!(one < f && f < two)) return false;
    } else {
      if (!(zero < f && f < one)) return false;
    }
  }
  return true;
}

bool AngleDatum::admissible() const {
  if (genus != 0 && genus != 1) return false;
  if (angles.empty()) return false;
  if (!satisfies_angle_hypothesis()) return false;
  return gauss_bonnet_residual(*this).frac.is_zero();
}

RationalAngle gauss_bonnet_residual(const AngleDatum& datum) {
  Rational sum(0);
  for (const auto& a : datum.angles) sum = sum + (Rational(1) - a.frac);
  sum = sum - Rational(2 - 2 * datum.genus);
  return RationalAngle(sum);
}

std::int64_t minimal_group_order(const AngleDatum& datum) {
  if (datum.angles.empty())
    throw std::invalid_argument("minimal_group_order: empty datum");
  for (const auto& a : datum.angles)
    if (a.is_multiple_of_two_pi())
      throw std::invalid_argument(
          "minimal_group_order: angle is an integer multiple of 2pi");
  std::int64_t L = 1;
  for (const auto& a : datum.angles) L = lcm64(L, a.frac.den);
  // subgroup of Z/L generated by the L*num/den
  std::int64_t d = L;
  for (const auto& a : datum.angles) d = std::gcd(d, (L / a.frac.den) * a.frac.num % L);
  return L / d;
}

LeafLabel leaf_label(const AngleDatum& datum, std::int64_t M) {
  if (M <= 0) throw std::invalid_argument("leaf_label: M must be positive");
  if (datum.genus != 1)
    throw std::invalid_argument("leaf_label: genus-one regime required");
  if (!datum.admissible())
    throw std::invalid_argument("leaf_label: datum is not admissible");

  LeafLabel lab;
  lab.datum = datum;
  lab.M = M;
  lab.m = minimal_group_order(datum);
  Rational excess = datum.angles[0].frac - Rational(1);  // theta_1/2pi - 1 = p/m
  if (lab.m % excess.den != 0)
    throw std::logic_error("leaf_label: excess denominator does not divide m");
  lab.p = excess.num * (lab.m / excess.den);
  lab.q = lab.m * M;
  return lab;
}

}  // namespace flatmod
