#pragma once

#include <optional>
#include <vector>

#include "flatmod/angles.hpp"
#include "flatmod/delaunay.hpp"
#include "flatmod/surface.hpp"

namespace flatmod {

/// Parameters of a surgery. Positions on a cone are given by z0 in the cone
/// chart anchored at the first corner of the target class; split angles are
/// exact rationals and must satisfy the kind's angle equation.
struct SurgerySpec {
  SurgeryKind kind = SurgeryKind::S1;
  int target = 0;   // marked-class ordinal of the main cone point
  int target2 = 1;  // second point (S3, S5)
  cplx z0{0, 0};
  RationalAngle theta1;       // angle at the target, as a fraction of 2pi
  RationalAngle split1;       // theta_1' for S1/S2/S3; for S4 theta_1
  RationalAngle split2;       // theta_1''           ; for S4 theta_2
  RationalAngle split3;       // S4 only: theta_3
  int branch = 0;             // S3 branch index
  double phi2 = 0;            // S3: angular position of q'' (radians)
};

/// One glued seam pair of the rebuilt surface, for reversal.
struct SeamPair {
  int a = -1, b = -1;  // halfedges in the output surface
};

/// A deleted fan triangle around an excised cone point: the triangle
/// (0, r0, r1 e^{i dpsi}) whose outer side was glued to exposed_half.
struct TipUndo {
  double r0 = 0, r1 = 0, dpsi = 0;
  int exposed_half = -1;
};

struct VertexUndo {
  std::vector<TipUndo> tips;  // in angular order around the vertex
  int stub_low = -1, stub_high = -1;
  bool closed = true;
  bool marked_vertex = true;  // restore as a marked cone point
};

struct SurgeryResult {
  Surface surface;
  double width = 0;        // per the width definition of the surgery kind
  double area_defect = 0;  // area removed (S1..S4, positive) or added (S5)
  double mu = 0;           // area_defect / width^2
  double area_before = 0, area_after = 0;
  std::vector<SeamPair> seams;
  std::vector<VertexUndo> undo;        // excision data for reversal
  std::vector<int> added_tris;         // S5: the cylinder slots
  int new_cls_a = -1, new_cls_b = -1;  // classes of the new cone points
  ReductionWitness reduction;          // filled when the caller supplies labels
};

/// Blow up a cone point of angle theta1 < 2pi into two points of angles
/// (split1, split2), both < 2pi, by removing a geodesic bigon around it.
/// z0 is the position of the new split1-point in the cone chart.
SurgeryResult s1(const Surface& s, int cls, RationalAngle theta1, RationalAngle split1,
                 cplx z0);

/// Blow up a cone point of angle theta1 in (2pi, 4pi) into split1 > 2pi and
/// split2 < 2pi by removing a geodesic kite with one vertex at the point.
SurgeryResult s2(const Surface& s, int cls, RationalAngle theta1, RationalAngle split1,
                 cplx z0);

/// Devil's surgery: truncate the cones at two points of a sphere along
/// congruent broken geodesics and glue them, raising the genus. q' sits at
/// z0 on the first cone; phi2 rotates q'' on the second. Angles above pi use
/// a polyline seam (the triangle-augmented truncation).
SurgeryResult s3_devil(const Surface& s, int cls_a, int cls_b, RationalAngle theta_a,
                       RationalAngle theta_b, cplx z0, double phi2 = 0.0);

/// Number of essentially different Devil's surgeries for angles
/// 2 pi r'/(mM), 2 pi r''/(mM): gcd(r', r'').
std::int64_t s3_branch_count(std::int64_t r1, std::int64_t r2);

/// Kite surgery: excise a kite with opposite vertices at the marked point of
/// a regular torus (angle theta2 there) and at z0 (angle theta3), creating a
/// third point of angle theta1 in (2pi, 4pi).
SurgeryResult s4_kite(cplx tau, cplx z0, RationalAngle theta1, RationalAngle theta2,
                      RationalAngle theta3);

/// Glue a flat cylinder of modulus z0 (Im z0 > 0) along the saddle connection
/// realised by the shortest Delaunay edge joining the two classes.
SurgeryResult s5_cylinder(const Surface& s, int cls_a, int cls_b, cplx z0);

/// Undo a surgery using the seams recorded in its result. The result surface
/// must be passed unmodified.
Surface reverse_with_seams(const SurgeryResult& result, SurgeryKind kind);

/// Reverse Thurston's surgery S1 from the surface alone: merge the cone
/// points of angles theta' and theta'' (both < 2pi, theta' + theta'' > 2pi)
/// along the shortest saddle connection between them by regluing the bigon.
Surface reverse_s1(const Surface& s, int cls_a, int cls_b);

/// Reverse Thurston's surgery S2 from the surface alone: given the cone
/// points of angles theta' > 2pi and theta'' < 2pi joined by their shortest
/// saddle connection, extend it across the theta'-point bisecting the angle;
/// absent when the extension meets a cone point earlier.
std::optional<Surface> reverse_s2(const Surface& s, int cls_small, int cls_large);

/// Reverse the kite surgery by checking the collinearity and side-length
/// equalities at the negative-curvature point; absent when they fail.
std::optional<Surface> reverse_s4(const Surface& s);

/// Cone-manifold angle of the codimension-one stratum reached by a surgery:
/// theta1 for S1/S2, 2 pi lcm(m', m'')/M for S3 with angles 2 pi m'/M and
/// 2 pi m''/M, and pi for S4. S5 has no codimension-one stratum.
RationalAngle stratum_cone_angle(SurgeryKind kind, const std::vector<RationalAngle>& params);

/// Dispatch a SurgerySpec against a surface (S4 ignores the surface and uses
/// tau = z0 of target2... S4 takes tau via the spec's phi2/z0 convention).
SurgeryResult apply_surgery(const Surface& s, const SurgerySpec& spec);

}  // namespace flatmod
