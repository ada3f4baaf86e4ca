#include "flatmod/surgeries.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "flatmod/mesh_ops.hpp"
#include "flatmod/unfold.hpp"

namespace flatmod {

namespace {

double rad(const RationalAngle& a) { return a.radians(); }

constexpr double kAngTol = 1e-9;

// ---------------------------------------------------------------------------
// tip excision
//
// Removes star-shaped regions { rho < chain(psi) } around cone points. Chain
// segments are straight in the developed cone. The mesh is refined so the
// chain becomes a sequence of edges, the triangles at the tip are deleted and
// the chain edges are left exposed for the caller to reglue.
//
// Every vertex is collared first (its radial edges are split just inside the
// star), which keeps the refinements of different vertices from interfering.
// ---------------------------------------------------------------------------

struct ChainNode {
  double r = 0;
  double psi = 0;  // unwrapped cone angle; strictly increasing along a chain
};

struct VertexExciseSpec {
  int cls = -1;
  bool closed = false;                        // one chain wrapping the full angle
  std::vector<std::vector<ChainNode>> chains; // disjoint ranges when open
};

struct PieceOut {
  int half = -1;  // exposed halfedge on the kept side
  double psi0 = 0, psi1 = 0;  // relative to the chain start
  double len = 0;
};

struct SubChainOut {
  std::vector<PieceOut> pieces;
  int stub_low = -1, stub_high = -1;  // exposed radials at the range ends
};

struct DeletedTip {
  double r0 = 0, r1 = 0, dpsi = 0;
  int chain = 0;
  double psi0 = 0;  // relative to its chain start
};

struct VertexExciseOut {
  std::vector<SubChainOut> chains;
  std::vector<DeletedTip> tips;  // for undo
  double total_angle = 0;
};

double wrap_angle(double a, double total) {
  double x = std::fmod(a, total);
  if (x < -kAngTol) x += total;
  if (x < 0) x = 0;
  return x;
}

bool angle_close(double a, double b, double total) {
  double d = std::abs(wrap_angle(a, total) - wrap_angle(b, total));
  return d < kAngTol || std::abs(d - total) < kAngTol;
}

double segment_radius(const ChainNode& a, const ChainNode& b, double psi) {
  cplx P1 = std::polar(a.r, 0.0);
  cplx P2 = std::polar(b.r, b.psi - a.psi);
  cplx dir = std::polar(1.0, psi - a.psi);
  double det = cross(dir, P2 - P1);
  if (std::abs(det) < 1e-15) throw std::runtime_error("segment_radius: radial segment");
  return cross(P1, P2 - P1) / det;
}

void collar_vertex(Surface& s, int cls) {
  // split every radial edge at 0.9 of the star radius so the star becomes a
  // clean fan whose refinements cannot reach other vertices' stars
  ConeChart ch0 = cone_chart(s, cls);
  double R = 0.9 * star_radius(s, ch0);
  bool progress = true;
  int guard = 0;
  while (progress) {
    if (++guard > 10000) throw std::runtime_error("collar_vertex: runaway");
    progress = false;
    ConeChart ch = cone_chart(s, cls);
    for (size_t i = 0; i < ch.corners.size(); ++i) {
      int c = ch.corners[i];
      int t = c / 3, j = c % 3;
      int h = 3 * t + j;  // radial edge leaving the vertex
      double len = s.edge_length(h);
      if (len > R * (1 + 1e-12)) {
        split_edge(s, h, R / len);
        progress = true;
        break;  // ids shifted; recompute the chart
      }
    }
  }
}

void ensure_radial(Surface& s, int cls, double psi) {
  ConeChart ch = cone_chart(s, cls);
  psi = wrap_angle(psi, ch.total_angle);
  int n = int(ch.corners.size());
  for (int i = 0; i < n; ++i) {
    double lo = ch.base[i];
    double hi = (i + 1 < n) ? ch.base[i + 1] : ch.total_angle;
    if (psi < lo - kAngTol || psi > hi + kAngTol) continue;
    if (std::abs(psi - lo) < kAngTol || std::abs(psi - hi) < kAngTol) return;
    int c = ch.corners[i];
    int t = c / 3, j = c % 3;
    int h = 3 * t + (j + 1) % 3;  // edge opposite the vertex
    cplx A = ch.place[i](s.tris[t].p[(j + 1) % 3]);
    cplx B = ch.place[i](s.tris[t].p[(j + 2) % 3]);
    cplx dir = std::polar(1.0, psi);
    double det = cross(B - A, -dir);
    if (std::abs(det) < 1e-14) throw std::runtime_error("ensure_radial: parallel ray");
    double tpar = cross(-A, -dir) / det;
    double u = cross(B - A, -A) / det;
    if (u <= 0) throw std::runtime_error("ensure_radial: ray misses the wedge edge");
    if (tpar < 1e-9 || tpar > 1 - 1e-9)
      throw std::runtime_error("ensure_radial: split parameter out of range");
    split_edge(s, h, tpar);
    return;
  }
  throw std::logic_error("ensure_radial: angle not found in chart");
}

void split_radial_at(Surface& s, int cls, double psi, double radius) {
  ConeChart ch = cone_chart(s, cls);
  int n = int(ch.corners.size());
  for (int i = 0; i < n; ++i) {
    if (!angle_close(ch.base[i], psi, ch.total_angle)) continue;
    int c = ch.corners[i];
    int t = c / 3, j = c % 3;
    int h = 3 * t + j;
    double len = s.edge_length(h);
    if (std::abs(radius - len) < 1e-12 * (1 + len)) return;  // already a vertex there
    if (radius >= len)
      throw std::runtime_error("split_radial_at: radius beyond the star");
    split_edge(s, h, radius / len);
    return;
  }
  throw std::logic_error("split_radial_at: no radial edge at the angle");
}

std::vector<VertexExciseOut> excise(Surface& s, std::vector<VertexExciseSpec> specs,
                                    std::vector<bool>* marks_out) {
  // refinement, vertex by vertex
  for (auto& spec : specs) {
    {
      ConeChart ch = cone_chart(s, spec.cls);
      double r_star = star_radius(s, ch);
      for (auto& chain : spec.chains)
        for (auto& nd : chain)
          if (nd.r >= 0.45 * r_star)
            throw std::runtime_error(
                "excise: region exceeds the embedded star (parameter too large)");
    }
    collar_vertex(s, spec.cls);
    // subdivide chains at wedge crossings
    {
      ConeChart ch = cone_chart(s, spec.cls);
      for (auto& chain : spec.chains) {
        std::vector<ChainNode> fine;
        for (size_t k = 0; k + 1 < chain.size(); ++k) {
          fine.push_back(chain[k]);
          double lo = chain[k].psi, hi = chain[k + 1].psi;
          std::vector<double> cuts;
          for (double b : ch.base)
            for (int w = -2; w <= 2; ++w) {
              double a = b + w * ch.total_angle;
              if (a > lo + kAngTol && a < hi - kAngTol) cuts.push_back(a);
            }
          std::sort(cuts.begin(), cuts.end());
          for (double a : cuts)
            fine.push_back({segment_radius(chain[k], chain[k + 1], a), a});
        }
        fine.push_back(chain.back());
        chain = std::move(fine);
      }
    }
    for (auto& chain : spec.chains) {
      for (auto& nd : chain) ensure_radial(s, spec.cls, nd.psi);
      size_t last = chain.size();
      if (spec.closed) --last;  // the wrap node repeats the first
      for (size_t k = 0; k < last; ++k)
        split_radial_at(s, spec.cls, chain[k].psi, chain[k].r);
    }
  }

  // identify tips
  struct TipRec {
    int tri;
    int chord_partner;  // pre-compaction
    int vertex_idx, chain_idx;
    double psi0, psi1, r0, r1;
  };
  std::vector<TipRec> tiprecs;
  struct StubRec {
    int half;  // pre-compaction, kept side
    int vertex_idx, chain_idx;
    bool low;
  };
  std::vector<StubRec> stubrecs;
  std::set<int> del_set;
  std::vector<double> totals(specs.size(), 0.0);

  for (size_t vi = 0; vi < specs.size(); ++vi) {
    auto& spec = specs[vi];
    ConeChart ch = cone_chart(s, spec.cls);
    double total = ch.total_angle;
    totals[vi] = total;
    int nw = int(ch.corners.size());
    for (size_t ci = 0; ci < spec.chains.size(); ++ci) {
      auto& chain = spec.chains[ci];
      double start = chain.front().psi;
      double span = chain.back().psi - start;
      auto node_radius = [&](double psi_rel) -> double {
        for (auto& nd : chain)
          if (std::abs((nd.psi - start) - psi_rel) < 1e-8) return nd.r;
        return -1;
      };
      for (int i = 0; i < nw; ++i) {
        int c = ch.corners[i];
        int t = c / 3, j = c % 3;
        double b0 = ch.base[i];
        double b1 = (i + 1 < nw) ? ch.base[i + 1] : total;
        double rel = wrap_angle(b0 - start, total);
        if (rel > span - kAngTol && !(spec.closed && nw == 1)) {
          if (!angle_close(rel, 0.0, total) || span < kAngTol) continue;
          rel = 0.0;
        }
        double rel1 = rel + (b1 - b0);
        if (rel1 > span + kAngTol) continue;
        double ra = node_radius(rel), rb = node_radius(rel1);
        double la = s.edge_length(3 * t + j);
        double lb = std::abs(s.tris[t].p[(j + 2) % 3] - s.tris[t].p[j]);
        if (ra < 0 || rb < 0) continue;
        if (std::abs(la - ra) > 1e-7 * (1 + ra) || std::abs(lb - rb) > 1e-7 * (1 + rb))
          throw std::logic_error("excise: wedge is not a clean tip");
        int chord = 3 * t + (j + 1) % 3;
        tiprecs.push_back({t, s.glue[chord], int(vi), int(ci), rel, rel1, ra, rb});
        del_set.insert(t);
      }
    }
  }

  // stubs for open chains: radial edges at the range ends, kept side
  for (size_t vi = 0; vi < specs.size(); ++vi) {
    auto& spec = specs[vi];
    if (spec.closed) continue;
    ConeChart ch = cone_chart(s, spec.cls);
    double total = ch.total_angle;
    int nw = int(ch.corners.size());
    for (size_t ci = 0; ci < spec.chains.size(); ++ci) {
      auto& chain = spec.chains[ci];
      double start = wrap_angle(chain.front().psi, total);
      double end = wrap_angle(chain.back().psi, total);
      for (int i = 0; i < nw; ++i) {
        int c = ch.corners[i];
        int t = c / 3, j = c % 3;
        bool deleted = del_set.count(t) > 0;
        if (angle_close(ch.base[i], start, total) && deleted)
          stubrecs.push_back({s.glue[3 * t + j], int(vi), int(ci), true});
        if (angle_close(ch.base[i], end, total) && !deleted) {
          // this wedge sits just above the range; its radial is the high stub
          stubrecs.push_back({3 * t + j, int(vi), int(ci), false});
        }
      }
    }
  }

  // single compaction
  std::vector<int> del(del_set.begin(), del_set.end());
  auto remap = [&](int h) {
    int t = h / 3;
    int shift = 0;
    for (int dt : del) shift += (dt < t) ? 1 : 0;
    return h - 3 * shift;
  };
  std::vector<bool> corner_marked(s.num_halfedges());
  for (int cc = 0; cc < s.num_halfedges(); ++cc)
    corner_marked[cc] = s.is_marked(s.vertex_class(cc));
  std::vector<PlanarTriangle> tris_new;
  std::vector<int> glue_new;
  std::vector<bool> marked_new;
  for (int t = 0; t < s.num_tris(); ++t) {
    if (del_set.count(t)) continue;
    tris_new.push_back(s.tris[t]);
    for (int e = 0; e < 3; ++e) {
      int partner = s.glue[3 * t + e];
      glue_new.push_back(del_set.count(partner / 3) ? -1 : remap(partner));
      marked_new.push_back(corner_marked[3 * t + e]);
    }
  }
  s.tris = std::move(tris_new);
  s.glue = std::move(glue_new);
  if (marks_out) *marks_out = std::move(marked_new);

  std::vector<VertexExciseOut> out(specs.size());
  for (size_t vi = 0; vi < specs.size(); ++vi) {
    out[vi].chains.resize(specs[vi].chains.size());
    out[vi].total_angle = totals[vi];
  }
  for (auto& tr : tiprecs) {
    PieceOut p;
    p.half = remap(tr.chord_partner);
    p.psi0 = tr.psi0;
    p.psi1 = tr.psi1;
    p.len = std::abs(std::polar(tr.r0, 0.0) - std::polar(tr.r1, tr.psi1 - tr.psi0));
    out[tr.vertex_idx].chains[tr.chain_idx].pieces.push_back(p);
    out[tr.vertex_idx].tips.push_back({tr.r0, tr.r1, tr.psi1 - tr.psi0, tr.chain_idx, tr.psi0});
  }
  for (auto& v : out) {
    std::sort(v.tips.begin(), v.tips.end(), [](const DeletedTip& a, const DeletedTip& b) {
      if (a.chain != b.chain) return a.chain < b.chain;
      return a.psi0 < b.psi0;
    });
  }
  for (auto& st : stubrecs) {
    auto& sc = out[st.vertex_idx].chains[st.chain_idx];
    (st.low ? sc.stub_low : sc.stub_high) = remap(st.half);
  }
  for (auto& v : out)
    for (auto& sc : v.chains)
      std::sort(sc.pieces.begin(), sc.pieces.end(),
                [](const PieceOut& a, const PieceOut& b) { return a.psi0 < b.psi0; });
  return out;
}

void glue_pair(Surface& s, int ha, int hb) {
  if (ha < 0 || hb < 0) throw std::logic_error("glue_pair: missing halfedge");
  if (s.glue[ha] >= 0 || s.glue[hb] >= 0)
    throw std::logic_error("glue_pair: halfedge already glued");
  double la = s.edge_length(ha), lb = s.edge_length(hb);
  if (std::abs(la - lb) > 1e-7 * (1 + la))
    throw std::logic_error("glue_pair: seam length mismatch");
  s.glue[ha] = hb;
  s.glue[hb] = ha;
}

void finish_gluing(Surface& s, std::vector<bool> marks) {
  for (int h = 0; h < s.num_halfedges(); ++h)
    if (s.glue[h] < 0) throw std::logic_error("finish_gluing: dangling halfedge");
  marks.resize(s.num_halfedges(), false);
  s.rebuild_classes(marks);
  for (int c = 0; c < s.num_vertex_classes(); ++c)
    if (std::abs(s.class_angle(c) - kTwoPi) > 1e-7) s.set_marked(c, true);
  s.validate(1e-6);
}

// pair the pieces of one chain with the pieces of another under the
// orientation-reversing map psi -> (spanA + spanB offset logic handled by the
// caller through the lambda)
void mirror_glue(Surface& s, const std::vector<PieceOut>& A, const std::vector<PieceOut>& B,
                 double span, const char* what) {
  for (auto& pa : A) {
    if (s.glue[pa.half] >= 0) continue;  // already handled from the other side
    int match = -1;
    for (auto& pb : B)
      if (std::abs(pb.psi0 - (span - pa.psi1)) < 1e-8 &&
          std::abs(pb.psi1 - (span - pa.psi0)) < 1e-8) {
        match = pb.half;
        break;
      }
    if (match < 0) throw std::logic_error(std::string(what) + ": unmatched seam piece");
    glue_pair(s, pa.half, match);
  }
}

std::vector<VertexUndo> make_undo(const std::vector<VertexExciseOut>& exs,
                                  const std::vector<VertexExciseSpec>& specs) {
  std::vector<VertexUndo> undos;
  for (size_t vi = 0; vi < exs.size(); ++vi) {
    for (size_t ci = 0; ci < exs[vi].chains.size(); ++ci) {
      VertexUndo u;
      u.closed = specs[vi].closed;
      u.stub_low = exs[vi].chains[ci].stub_low;
      u.stub_high = exs[vi].chains[ci].stub_high;
      for (auto& tip : exs[vi].tips) {
        if (tip.chain != int(ci)) continue;
        // exposed half of the matching piece
        int half = -1;
        for (auto& p : exs[vi].chains[ci].pieces)
          if (std::abs(p.psi0 - tip.psi0) < 1e-9) half = p.half;
        if (half < 0) throw std::logic_error("make_undo: tip without matching piece");
        u.tips.push_back({tip.r0, tip.r1, tip.dpsi, half});
      }
      undos.push_back(std::move(u));
    }
  }
  return undos;
}

int find_class_with_angle(const Surface& s, double angle, double tol = 1e-6) {
  for (int c = 0; c < s.num_vertex_classes(); ++c)
    if (std::abs(s.class_angle(c) - angle) < tol) return c;
  return -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// S1
// ---------------------------------------------------------------------------

SurgeryResult s1(const Surface& s_in, int cls, RationalAngle theta1, RationalAngle split1,
                 cplx z0) {
  RationalAngle split2{theta1.frac + Rational(1) - split1.frac};
  if (!((Rational(1) - theta1.frac) ==
        (Rational(1) - split1.frac) + (Rational(1) - split2.frac)))
    throw std::invalid_argument("s1: split angles violate the angle equation");
  if (!(Rational(0) < theta1.frac && theta1.frac < Rational(1)))
    throw std::invalid_argument("s1: target angle must lie in (0, 2pi)");
  if (!(split1.frac < Rational(1)) || !(Rational(0) < split2.frac) ||
      !(split2.frac < Rational(1)))
    throw std::invalid_argument("s1: split angles must lie in (0, 2pi)");
  if (!(theta1.frac < split1.frac))
    throw std::invalid_argument("s1: theta1' must exceed theta1");

  Surface s = s_in;
  double th1 = rad(theta1), th1p = rad(split1), th1pp = rad(split2);
  if (std::abs(s.class_angle(cls) - th1) > 1e-7)
    throw std::invalid_argument("s1: surface angle does not match theta1");
  double r = std::abs(z0);
  if (r <= 0) throw std::invalid_argument("s1: z0 must be nonzero");
  double phi = std::arg(z0);
  double rq = r * std::sin(th1p / 2) / std::sin(th1pp / 2);

  double area_before = s.area();
  VertexExciseSpec spec;
  spec.cls = cls;
  spec.closed = true;
  spec.chains = {{{r, phi}, {rq, phi + th1 / 2}, {r, phi + th1}}};
  std::vector<bool> marks;
  std::vector<VertexExciseSpec> specs = {spec};
  auto exs = excise(s, specs, &marks);
  auto& pieces = exs[0].chains[0].pieces;

  double seam_len = 0;
  {
    std::vector<bool> used(pieces.size(), false);
    for (size_t i = 0; i < pieces.size(); ++i) {
      if (used[i]) continue;
      double lo = pieces[i].psi0, hi = pieces[i].psi1;
      int match = -1;
      for (size_t j = 0; j < pieces.size(); ++j) {
        if (used[j] || j == i) continue;
        if (std::abs(pieces[j].psi0 - (th1 - hi)) < 1e-8 &&
            std::abs(pieces[j].psi1 - (th1 - lo)) < 1e-8) {
          match = int(j);
          break;
        }
      }
      if (match < 0) throw std::logic_error("s1: unmatched seam piece");
      glue_pair(s, pieces[i].half, pieces[match].half);
      used[i] = used[match] = true;
      if (hi <= th1 / 2 + kAngTol) seam_len += pieces[i].len;
    }
  }
  finish_gluing(s, marks);

  SurgeryResult out;
  out.surface = std::move(s);
  out.area_before = area_before;
  out.area_after = out.surface.area();
  out.area_defect = area_before - out.area_after;
  out.width = seam_len;
  out.mu = out.area_defect / (seam_len * seam_len);
  for (auto& p : pieces) out.seams.push_back({p.half, out.surface.glue[p.half]});
  out.undo = make_undo(exs, specs);
  out.new_cls_a = find_class_with_angle(out.surface, th1p);
  out.new_cls_b = find_class_with_angle(out.surface, th1pp);
  return out;
}

// ---------------------------------------------------------------------------
// S2
// ---------------------------------------------------------------------------

SurgeryResult s2(const Surface& s_in, int cls, RationalAngle theta1, RationalAngle split1,
                 cplx z0) {
  RationalAngle split2{theta1.frac + Rational(1) - split1.frac};
  if (!(Rational(1) < theta1.frac && theta1.frac < Rational(2)))
    throw std::invalid_argument("s2: target angle must lie in (2pi, 4pi)");
  if (!(Rational(1) < split1.frac))
    throw std::invalid_argument("s2: theta1' must exceed 2pi");
  if (!(Rational(0) < split2.frac && split2.frac < Rational(1)))
    throw std::invalid_argument("s2: theta1'' must lie in (0, 2pi)");

  Surface s = s_in;
  double th1 = rad(theta1), th1p = rad(split1), th1pp = rad(split2);
  if (std::abs(s.class_angle(cls) - th1) > 1e-7)
    throw std::invalid_argument("s2: surface angle does not match theta1");
  double d = std::abs(z0);
  if (d <= 0) throw std::invalid_argument("s2: z0 must be nonzero");
  double phi = std::arg(z0);
  double eta = th1 - kTwoPi;
  double corner = (th1pp - eta) / 2;  // kite angle at the side vertices
  if (corner <= 1e-12) throw std::invalid_argument("s2: degenerate kite");
  double L = d * std::sin(th1pp / 2) / std::sin(corner);
  double l = d * std::sin(eta / 2) / std::sin(corner);

  double area_before = s.area();
  VertexExciseSpec spec;
  spec.cls = cls;
  spec.closed = false;
  spec.chains = {{{d, phi}, {L, phi + eta / 2}},
                 {{L, phi + th1 - eta / 2}, {d, phi + th1}}};
  std::vector<bool> marks;
  std::vector<VertexExciseSpec> specs = {spec};
  auto exs = excise(s, specs, &marks);
  auto& low = exs[0].chains[0];
  auto& high = exs[0].chains[1];

  mirror_glue(s, low.pieces, high.pieces, eta / 2, "s2");
  glue_pair(s, low.stub_high, high.stub_low);  // [a -> apex] with [b -> apex]
  glue_pair(s, low.stub_low, high.stub_high);  // the two copies of [apex -> p]
  finish_gluing(s, marks);

  SurgeryResult out;
  out.surface = std::move(s);
  out.area_before = area_before;
  out.area_after = out.surface.area();
  out.area_defect = area_before - out.area_after;
  out.width = l;
  out.mu = out.area_defect / (l * l);
  for (auto& p : low.pieces) out.seams.push_back({p.half, out.surface.glue[p.half]});
  out.seams.push_back({low.stub_high, out.surface.glue[low.stub_high]});
  out.seams.push_back({low.stub_low, out.surface.glue[low.stub_low]});
  out.undo = make_undo(exs, specs);
  out.new_cls_a = find_class_with_angle(out.surface, th1p);
  out.new_cls_b = find_class_with_angle(out.surface, th1pp);
  (void)L;
  return out;
}

// ---------------------------------------------------------------------------
// S3 (Devil)
// ---------------------------------------------------------------------------

std::int64_t s3_branch_count(std::int64_t r1, std::int64_t r2) {
  if (r1 <= 0 || r2 <= 0) throw std::invalid_argument("s3_branch_count: positive integers");
  return std::gcd(r1, r2);
}

SurgeryResult s3_devil(const Surface& s_in, int cls_a, int cls_b, RationalAngle theta_a,
                       RationalAngle theta_b, cplx z0, double phi2) {
  if (cls_a == cls_b) throw std::invalid_argument("s3: need two distinct cone points");
  if (!(Rational(0) < theta_a.frac && theta_a.frac < Rational(1)) ||
      !(Rational(0) < theta_b.frac && theta_b.frac < Rational(1)))
    throw std::invalid_argument("s3: both angles must lie in (0, 2pi)");
  Surface s = s_in;
  double tha = rad(theta_a), thb = rad(theta_b);
  if (std::abs(s.class_angle(cls_a) - tha) > 1e-7 ||
      std::abs(s.class_angle(cls_b) - thb) > 1e-7)
    throw std::invalid_argument("s3: surface angles do not match the data");
  double ra = std::abs(z0);
  if (ra <= 0) throw std::invalid_argument("s3: z0 must be nonzero");
  double phia = std::arg(z0);
  double rb = ra * std::sin(tha / 2) / std::sin(thb / 2);  // equal seam length

  // common polyline: vertices on the circle of radius ra, equal wedges on
  // cone a; placed congruently (reversed) on cone b
  int segs = std::max({1, int(std::ceil(tha / (0.9 * kPi))), int(std::ceil(thb / (0.9 * kPi)))});
  std::vector<ChainNode> chain_a;
  for (int k = 0; k <= segs; ++k)
    chain_a.push_back({ra, phia + tha * double(k) / segs});

  // the same Euclidean polyline on cone b. The planar shape of chain a:
  std::vector<cplx> shape;
  for (int k = 0; k <= segs; ++k) shape.push_back(std::polar(ra, tha * double(k) / segs));
  // rigid motion g with g(shape[0]) = (rb, 0), g(shape[segs]) = (rb, thb),
  // orientation preserving; the seam on cone b runs in the opposite sense
  cplx q0 = std::polar(rb, 0.0), q1 = std::polar(rb, thb);
  cplx grot = (q1 - q0) / (shape[segs] - shape[0]);
  grot /= std::abs(grot);
  cplx gtr = q0 - grot * shape[0];
  std::vector<ChainNode> chain_b;
  for (int k = 0; k <= segs; ++k) {
    cplx z = grot * shape[k] + gtr;
    double r = std::abs(z), an = std::arg(z);
    if (an < -kAngTol) an += kTwoPi;
    chain_b.push_back({r, phi2 + an});
  }
  // the region on cone b must stay star-shaped about the apex
  for (int k = 0; k + 1 <= segs; ++k)
    if (chain_b[k + 1].psi <= chain_b[k].psi + kAngTol)
      throw std::runtime_error("s3: truncation on the second cone is not star-shaped");
  if (std::abs((chain_b.back().psi - chain_b.front().psi) - thb) > 1e-7)
    throw std::logic_error("s3: seam endpoints do not wrap the second cone");

  // subdivide both chains at a common set of seam arclengths so the exposed
  // pieces match one to one. The seam identification reverses the boundary
  // orientation (as any orientable handle gluing must), so cone b is cut at
  // the mirrored arclengths L - l.
  auto arclen_of = [&](const std::vector<ChainNode>& chain) {
    std::vector<double> acc(1, 0.0);
    for (size_t k = 0; k + 1 < chain.size(); ++k) {
      cplx p1 = std::polar(chain[k].r, 0.0);
      cplx p2 = std::polar(chain[k + 1].r, chain[k + 1].psi - chain[k].psi);
      acc.push_back(acc.back() + std::abs(p2 - p1));
    }
    return acc;
  };
  auto crossing_arclens = [&](const std::vector<ChainNode>& chain, int cls) {
    ConeChart ch = cone_chart(s, cls);
    std::vector<double> outl;
    auto acc = arclen_of(chain);
    for (size_t k = 0; k + 1 < chain.size(); ++k) {
      double lo = chain[k].psi, hi = chain[k + 1].psi;
      for (double b : ch.base)
        for (int w = -2; w <= 2; ++w) {
          double a = b + w * ch.total_angle;
          if (a > lo + kAngTol && a < hi - kAngTol) {
            double rr = segment_radius(chain[k], chain[k + 1], a);
            cplx p1 = std::polar(chain[k].r, 0.0);
            cplx pc = std::polar(rr, a - chain[k].psi);
            outl.push_back(acc[k] + std::abs(pc - p1));
          }
        }
    }
    return outl;
  };
  auto subdivide_at = [&](const std::vector<ChainNode>& chain, std::vector<double> ls) {
    auto acc = arclen_of(chain);
    std::sort(ls.begin(), ls.end());
    std::vector<ChainNode> fine;
    for (size_t k = 0; k + 1 < chain.size(); ++k) {
      fine.push_back(chain[k]);
      cplx p1 = std::polar(chain[k].r, 0.0);
      cplx p2 = std::polar(chain[k + 1].r, chain[k + 1].psi - chain[k].psi);
      for (double l : ls) {
        if (l > acc[k] + 1e-10 && l < acc[k + 1] - 1e-10) {
          double t = (l - acc[k]) / (acc[k + 1] - acc[k]);
          cplx z = p1 + t * (p2 - p1);
          fine.push_back({std::abs(z), chain[k].psi + std::arg(z)});
        }
      }
    }
    fine.push_back(chain.back());
    std::sort(fine.begin(), fine.end(),
              [](const ChainNode& a, const ChainNode& b) { return a.psi < b.psi; });
    return fine;
  };
  double seam_len_total;
  {
    auto acc_a = arclen_of(chain_a);
    auto acc_b = arclen_of(chain_b);
    seam_len_total = acc_a.back();
    if (std::abs(acc_a.back() - acc_b.back()) > 1e-9 * (1 + acc_a.back()))
      throw std::logic_error("s3: seam lengths disagree");
    std::vector<double> common = crossing_arclens(chain_a, cls_a);
    for (double l : crossing_arclens(chain_b, cls_b))
      common.push_back(seam_len_total - l);  // mirrored into a-arclength
    std::vector<double> mirrored;
    for (double l : common) mirrored.push_back(seam_len_total - l);
    chain_a = subdivide_at(chain_a, common);
    chain_b = subdivide_at(chain_b, mirrored);
    if (chain_a.size() != chain_b.size())
      throw std::logic_error("s3: seam subdivisions do not match");
  }

  double area_before = s.area();
  std::vector<VertexExciseSpec> specs = {VertexExciseSpec{cls_a, true, {chain_a}},
                                         VertexExciseSpec{cls_b, true, {chain_b}}};
  std::vector<bool> marks;
  auto exs = excise(s, specs, &marks);
  auto& pa = exs[0].chains[0].pieces;
  auto& pb = exs[1].chains[0].pieces;
  if (pa.size() != pb.size()) throw std::logic_error("s3: seam piece count mismatch");

  // piece k of cone a matches piece (m-1-k) of cone b
  int m = int(pa.size());
  for (int k = 0; k < m; ++k) {
    if (std::abs(pa[k].len - pb[m - 1 - k].len) > 1e-7 * (1 + pa[k].len))
      throw std::logic_error("s3: seam piece length mismatch");
    glue_pair(s, pa[k].half, pb[m - 1 - k].half);
  }
  finish_gluing(s, marks);

  SurgeryResult out;
  out.surface = std::move(s);
  out.area_before = area_before;
  out.area_after = out.surface.area();
  out.area_defect = area_before - out.area_after;
  out.width = seam_len_total;
  out.mu = out.area_defect / (seam_len_total * seam_len_total);
  for (size_t k = 0; k < pa.size(); ++k)
    out.seams.push_back({pa[k].half, out.surface.glue[pa[k].half]});
  out.undo = make_undo(exs, specs);
  out.new_cls_a = find_class_with_angle(out.surface, kTwoPi + tha + thb);
  out.new_cls_b = -1;
  return out;
}

// ---------------------------------------------------------------------------
// S4 (kite on a regular torus)
// ---------------------------------------------------------------------------

SurgeryResult s4_kite(cplx tau, cplx z0, RationalAngle theta1, RationalAngle theta2,
                      RationalAngle theta3) {
  Rational total = (Rational(1) - theta1.frac) + (Rational(1) - theta2.frac) +
                   (Rational(1) - theta3.frac);
  if (!total.is_zero())
    throw std::invalid_argument("s4: curvatures must sum to zero exactly");
  if (!(Rational(1) < theta1.frac && theta1.frac < Rational(2)))
    throw std::invalid_argument("s4: theta1 must lie in (2pi, 4pi)");
  if (!(Rational(0) < theta2.frac && theta2.frac < Rational(1)) ||
      !(Rational(0) < theta3.frac && theta3.frac < Rational(1)))
    throw std::invalid_argument("s4: theta2, theta3 must lie in (0, 2pi)");

  Surface s = lattice_torus(tau);
  int cls = 0;  // the unique vertex class of the torus
  double th1 = rad(theta1), th2 = rad(theta2), th3 = rad(theta3);
  double d = std::abs(z0);
  if (d <= 0) throw std::invalid_argument("s4: z0 must be nonzero");
  double phi = std::arg(z0);

  // kite with opposite vertices at the torus vertex (angle th2 remains) and
  // at z0 (angle th3 remains); the side vertices carry th1/2 each
  double half2 = (kTwoPi - th2) / 2;  // half interior angle at the vertex
  double corner_a = kTwoPi - th1 / 2; // interior angle at the side vertices
  // triangle (v, a, p3): angles half2 at v, corner_a at a, half3 at p3
  double half3 = (kTwoPi - th3) / 2;
  if (std::abs(half2 + corner_a + half3 - kPi) > 1e-9)
    throw std::logic_error("s4: kite angles are inconsistent");
  double la = d * std::sin(half3) / std::sin(corner_a);  // |v a| = |v b|

  double area_before = s.area();
  VertexExciseSpec spec;
  spec.cls = cls;
  spec.closed = false;
  spec.chains = {{{la, phi - half2}, {d, phi}, {la, phi + half2}}};
  std::vector<bool> marks;
  std::vector<VertexExciseSpec> specs = {spec};
  auto exs = excise(s, specs, &marks);
  auto& ch = exs[0].chains[0];

  // seams: the chain halves mirror onto each other and the two boundary
  // radials [v->a], [v->b] close up
  mirror_glue(s, ch.pieces, ch.pieces, 2 * half2, "s4");
  glue_pair(s, ch.stub_low, ch.stub_high);
  finish_gluing(s, marks);

  SurgeryResult out;
  out.surface = std::move(s);
  out.area_before = area_before;
  out.area_after = out.surface.area();
  out.area_defect = area_before - out.area_after;
  // width: distance between the two positive points p2 (the old vertex) and
  // p3 in the surgered torus
  out.new_cls_a = find_class_with_angle(out.surface, th1);
  out.new_cls_b = find_class_with_angle(out.surface, th3);
  {
    Surface d2 = delaunay(out.surface);
    double best = 1e300;
    // p2 and p3 classes on the delaunay copy by angles
    int c2 = find_class_with_angle(d2, th2), c3 = find_class_with_angle(d2, th3);
    if (c2 >= 0 && c3 >= 0) {
      for (int h = 0; h < d2.num_halfedges(); ++h) {
        int ca = d2.vertex_class(h), cb = d2.vertex_class(3 * (h / 3) + (h % 3 + 1) % 3);
        if ((ca == c2 && cb == c3) || (ca == c3 && cb == c2))
          best = std::min(best, d2.edge_length(h));
      }
    }
    out.width = (best < 1e300) ? best : d;
  }
  out.mu = out.area_defect / (out.width * out.width);
  for (auto& p : ch.pieces) out.seams.push_back({p.half, out.surface.glue[p.half]});
  out.seams.push_back({ch.stub_low, out.surface.glue[ch.stub_low]});
  out.undo = make_undo(exs, specs);
  return out;
}

// ---------------------------------------------------------------------------
// S5 (cylinder insertion)
// ---------------------------------------------------------------------------

SurgeryResult s5_cylinder(const Surface& s_in, int cls_a, int cls_b, cplx z0) {
  if (z0.imag() <= 0) throw std::invalid_argument("s5: Im z0 must be positive");
  Surface s = delaunay(s_in);
  if (cls_a == cls_b) throw std::invalid_argument("s5: need two distinct cone points");
  // take the shortest delaunay edge joining the two classes; class ids on the
  // delaunay copy are matched by angle
  double ang_a = s_in.class_angle(cls_a), ang_b = s_in.class_angle(cls_b);
  int ca = find_class_with_angle(s, ang_a), cb = find_class_with_angle(s, ang_b);
  if (ca < 0 || cb < 0) throw std::invalid_argument("s5: classes not found after delaunay");
  int h_cut = -1;
  double best = 1e300;
  for (int h = 0; h < s.num_halfedges(); ++h) {
    int x = s.vertex_class(h), y = s.vertex_class(3 * (h / 3) + (h % 3 + 1) % 3);
    if ((x == ca && y == cb) || (x == cb && y == ca)) {
      if (s.edge_length(h) < best) {
        best = s.edge_length(h);
        h_cut = h;
      }
    }
  }
  if (h_cut < 0) throw std::invalid_argument("s5: no saddle connection edge between the points");

  double area_before = s.area();
  int hp = s.glue[h_cut];
  cplx e = s.edge_vector(h_cut);
  cplx w = e * z0;
  // parallelogram Q0=0, Q1=e, Q2=e+w, Q3=w as two triangles
  int t0 = s.num_tris(), t1 = t0 + 1;
  s.tris.push_back(PlanarTriangle{{cplx(0, 0), e, e + w}});
  s.tris.push_back(PlanarTriangle{{cplx(0, 0), e + w, w}});
  s.glue.resize(3 * s.num_tris(), -1);
  // bottom (Q0->Q1) = 3*t0+0; right (Q1->Q2) = 3*t0+1; diag (Q2->Q0) = 3*t0+2
  // diag2 (Q0->Q2) = 3*t1+0; top (Q2->Q3) = 3*t1+1; left (Q3->Q0) = 3*t1+2
  std::vector<bool> marks(s.num_halfedges(), false);
  for (int c = 0; c < 3 * t0; ++c) marks[c] = s.is_marked(s.vertex_class(c));

  s.glue[h_cut] = 3 * t1 + 1;  // surface side glued to the cylinder top
  int old_partner = hp;
  s.glue[3 * t1 + 1] = h_cut;
  s.glue[old_partner] = 3 * t0 + 0;
  s.glue[3 * t0 + 0] = old_partner;
  s.glue[3 * t0 + 1] = 3 * t1 + 2;
  s.glue[3 * t1 + 2] = 3 * t0 + 1;
  s.glue[3 * t0 + 2] = 3 * t1 + 0;
  s.glue[3 * t1 + 0] = 3 * t0 + 2;

  s.rebuild_classes(marks);
  for (int c = 0; c < s.num_vertex_classes(); ++c)
    if (std::abs(s.class_angle(c) - kTwoPi) > 1e-7) s.set_marked(c, true);
  s.validate(1e-6);

  SurgeryResult out;
  out.surface = std::move(s);
  out.area_before = area_before;
  out.area_after = out.surface.area();
  out.area_defect = out.area_after - area_before;  // added area
  out.width = std::abs(e);                         // circumference of the cylinder
  out.mu = out.area_defect / (out.width * out.width);
  out.seams.push_back({h_cut, 3 * t1 + 1});
  out.seams.push_back({old_partner, 3 * t0 + 0});
  out.added_tris = {t0, t1};
  out.new_cls_a = find_class_with_angle(out.surface, ang_a + ang_b + kTwoPi);
  out.new_cls_b = -1;
  return out;
}

// ---------------------------------------------------------------------------
// reversal and bookkeeping
// ---------------------------------------------------------------------------

RationalAngle stratum_cone_angle(SurgeryKind kind, const std::vector<RationalAngle>& params) {
  switch (kind) {
    case SurgeryKind::S1:
    case SurgeryKind::S2:
      if (params.size() != 1)
        throw std::invalid_argument("stratum_cone_angle: S1/S2 take the blown-up angle");
      return params[0];
    case SurgeryKind::S3: {
      if (params.size() != 2)
        throw std::invalid_argument("stratum_cone_angle: S3 takes the two split angles");
      // angles 2 pi m'/M and 2 pi m''/M: cone angle 2 pi lcm(m', m'')/M
      Rational a = params[0].frac, b = params[1].frac;
      std::int64_t M = std::lcm(a.den, b.den);
      std::int64_t mp = a.num * (M / a.den), mpp = b.num * (M / b.den);
      return RationalAngle(Rational(std::lcm(mp, mpp), M));
    }
    case SurgeryKind::S4:
      return RationalAngle(Rational(1, 2));  // pi
    case SurgeryKind::S5:
      throw std::invalid_argument("stratum_cone_angle: S5 has no codimension-1 stratum");
  }
  throw std::logic_error("stratum_cone_angle: unreachable");
}

SurgeryResult apply_surgery(const Surface& s, const SurgerySpec& spec) {
  // marked-class ordinal -> class id
  std::vector<int> marked;
  for (int c = 0; c < s.num_vertex_classes(); ++c)
    if (s.is_marked(c)) marked.push_back(c);
  auto cls_of = [&](int ordinal) {
    if (ordinal < 0 || ordinal >= int(marked.size()))
      throw std::invalid_argument("apply_surgery: target index out of range");
    return marked[ordinal];
  };
  switch (spec.kind) {
    case SurgeryKind::S1:
      return s1(s, cls_of(spec.target), spec.theta1, spec.split1, spec.z0);
    case SurgeryKind::S2:
      return s2(s, cls_of(spec.target), spec.theta1, spec.split1, spec.z0);
    case SurgeryKind::S3:
      return s3_devil(s, cls_of(spec.target), cls_of(spec.target2), spec.split1,
                      spec.split2, spec.z0, spec.phi2);
    case SurgeryKind::S4:
      throw std::invalid_argument("apply_surgery: S4 builds its own torus; call s4_kite");
    case SurgeryKind::S5:
      return s5_cylinder(s, cls_of(spec.target), cls_of(spec.target2), spec.z0);
  }
  throw std::logic_error("apply_surgery: unreachable");
}

}  // namespace flatmod
