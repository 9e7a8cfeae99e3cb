#include "h3kit/framed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace h3 {

namespace {
constexpr double kJoinTol = 1e-8;
const Isometry kFlipX(cplx(0, 0), cplx(0, 1), cplx(0, 1), cplx(0, 0));  // pi about normal

double vec_angle(const Vec3& u, const Vec3& v) {
  // atan2 form stays accurate for nearly parallel vectors, where acos of the
  // normalized dot product loses half the working precision near 1.
  return std::atan2(u.cross(v).norm(), u.dot(v));
}
}  // namespace

Frame end_frame(const FramedSegment& s) {
  return frame_rotate(frame_translate(s.start, s.length), s.phase);
}
PointH3 initial_point(const FramedSegment& s) { return frame_point(s.start); }
PointH3 terminal_point(const FramedSegment& s) { return frame_point(end_frame(s)); }
Vec3 initial_dir(const FramedSegment& s) { return frame_tangent(s.start); }
Vec3 terminal_dir(const FramedSegment& s) { return frame_tangent(end_frame(s)); }
Vec3 initial_framing(const FramedSegment& s) { return frame_normal(s.start); }
Vec3 terminal_framing(const FramedSegment& s) { return frame_normal(end_frame(s)); }

FramedSegment reverse(const FramedSegment& s) {
  return {Frame{end_frame(s).iso * kFlipX}, s.length, s.phase};
}

FramedSegment rotate(const FramedSegment& s, double phi) {
  return {frame_rotate(s.start, phi), s.length, s.phase};
}

FramedSegment flip(const FramedSegment& s) { return rotate(s, PI); }

double bending_angle(const FramedSegment& s1, const FramedSegment& s2) {
  if (dist(terminal_point(s1), initial_point(s2)) > kJoinTol)
    throw std::runtime_error("bending_angle: endpoints do not match");
  return vec_angle(terminal_dir(s1), initial_dir(s2));
}

bool is_delta_consecutive(const FramedSegment& s1, const FramedSegment& s2, double delta) {
  if (dist(terminal_point(s1), initial_point(s2)) > kJoinTol)
    throw std::runtime_error("is_delta_consecutive: endpoints do not match");
  return vec_angle(terminal_framing(s1), initial_framing(s2)) < delta;  // strict
}

TameReport is_tame(const std::vector<FramedSegment>& segs, const TameParams& params,
                   bool cyclic) {
  TameReport rep;
  rep.tame = true;
  size_t m = segs.size();
  for (size_t i = 0; i < m; ++i) {
    if (segs[i].length < 2.0 * params.L) {
      rep.offending_segments.push_back(static_cast<int>(i));
      rep.tame = false;
    }
  }
  size_t joints = cyclic ? m : (m == 0 ? 0 : m - 1);
  for (size_t i = 0; i < joints; ++i) {
    const FramedSegment& s1 = segs[i];
    const FramedSegment& s2 = segs[(i + 1) % m];
    JointReport jr;
    jr.joint = static_cast<int>(i);
    jr.endpoint_gap = dist(terminal_point(s1), initial_point(s2));
    if (cyclic && i + 1 == m && jr.endpoint_gap > kJoinTol) {
      // Developed cycle: the wrap joint closes through the holonomy, which
      // identifies the terminal frame of the last segment with the start
      // frame of the first; the imputed wrap joint is exact.
      jr.endpoint_gap = 0;
      jr.bending = 0;
      jr.framing_gap = 0;
    } else {
      jr.bending = vec_angle(terminal_dir(s1), initial_dir(s2));
      jr.framing_gap = vec_angle(terminal_framing(s1), initial_framing(s2));
    }
    if (jr.endpoint_gap > kJoinTol || jr.bending > params.theta ||
        jr.framing_gap >= params.delta)
      rep.tame = false;
    rep.joints.push_back(jr);
  }
  return rep;
}

double I_func(double theta) {
  if (theta < 0 || theta >= PI) throw std::runtime_error("I_func: angle out of [0, pi)");
  return 2.0 * std::log(1.0 / std::cos(theta / 2.0));
}

FramedSegment reduced_concatenation(const Chain& chain) {
  if (chain.empty()) throw std::runtime_error("reduced_concatenation: empty chain");
  if (chain.size() == 1) return chain.front();
  PointH3 p0 = initial_point(chain.front());
  PointH3 p1 = terminal_point(chain.back());
  double len = dist(p0, p1);
  if (len < 1e-9) throw std::runtime_error("reduced_concatenation: degenerate (endpoints coincide)");
  Vec3 t0 = dir_between(p0, p1);
  Vec3 n_old = initial_framing(chain.front());
  Vec3 n0 = n_old - t0 * t0.dot(n_old);
  if (n0.norm() < 1e-12)
    throw std::runtime_error("reduced_concatenation: framing antipodal to carrier");
  Frame F = frame_from(p0, t0, n0);
  Frame Fend = frame_translate(F, len);
  Vec3 t1 = frame_tangent(Fend);
  Vec3 n2_old = terminal_framing(chain.back());
  Vec3 n2 = n2_old - t1 * t1.dot(n2_old);
  if (n2.norm() < 1e-12)
    throw std::runtime_error("reduced_concatenation: framing antipodal to carrier");
  n2 = n2.normalized();
  Vec3 nref = frame_normal(Fend);
  Vec3 bref = t1.cross(nref);
  double phase = std::atan2(n2.dot(bref), n2.dot(nref));
  return {F, len, wrap_angle(phase)};
}

CycleResult reduced_cyclic_concatenation(const Cycle& cycle) {
  if (cycle.empty()) throw std::runtime_error("reduced_cyclic_concatenation: empty cycle");
  // The cycle is a developed chain of lifts; the holonomy is the isometry
  // carrying the start frame of the first segment to the terminal frame of
  // the last one (wrap joint imputed as an exact frame match).
  Isometry hol = end_frame(cycle.back()).iso * cycle.front().start.iso.inverse();
  if (classify(hol) != IsoClass::loxodromic)
    throw std::runtime_error("reduced_cyclic_concatenation: null-homotopic or degenerate");
  return {hol, complex_length(hol)};
}

namespace {
void check_hypotheses(const std::vector<FramedSegment>& segs, const TameParams& params,
                      bool cyclic) {
  std::string bad;
  if (!(params.theta > 0 && params.theta < PI)) bad += "theta not in (0,pi); ";
  if (params.L < I_func(params.theta) + 10 * std::log(2.0))
    bad += "L < I(theta) + 10 ln 2; ";
  TameReport tr = is_tame(segs, params, cyclic);
  if (!tr.tame) bad += "chain/cycle not tame or not delta-consecutive; ";
  if (!bad.empty()) throw std::runtime_error("hypotheses violated: " + bad);
}
}  // namespace

LengthPhaseReport verify_length_phase(const std::vector<FramedSegment>& segs,
                                      const TameParams& params, bool cyclic) {
  check_hypotheses(segs, params, cyclic);
  double sum_l = 0, sum_phi = 0, sum_I = 0;
  for (const auto& s : segs) {
    sum_l += s.length;
    sum_phi += s.phase;
  }
  TameReport tr = is_tame(segs, params, cyclic);
  size_t joints = tr.joints.size();
  for (const auto& jr : tr.joints) sum_I += I_func(jr.bending);

  double err = std::exp((-params.L + 10 * std::log(2.0)) / 2.0) * std::sin(params.theta / 2.0);
  double njoints = static_cast<double>(joints);
  LengthPhaseReport rep;
  rep.length_bound = njoints * err / (params.L - std::log(2.0));
  rep.phase_bound = njoints * (params.delta + err);

  double actual_l, actual_phi;
  if (cyclic) {
    CycleResult cr = reduced_cyclic_concatenation(segs);
    actual_l = cr.closed_length.re;
    actual_phi = cr.closed_length.im;
  } else {
    FramedSegment red = reduced_concatenation(segs);
    actual_l = red.length;
    actual_phi = red.phase;
  }
  rep.length_actual = actual_l;
  rep.length_predicted = sum_l - sum_I;
  rep.phase_actual = actual_phi;
  rep.phase_predicted = sum_phi;
  rep.length_margin = rep.length_bound - std::fabs(actual_l - rep.length_predicted);
  rep.phase_margin = rep.phase_bound - circle_dist(actual_phi - sum_phi);
  rep.pass = rep.length_margin > 0 && rep.phase_margin > 0;
  return rep;
}

NearnessReport verify_cycle_nearness(const Cycle& cycle, const TameParams& params) {
  if (!(params.theta > 0 && params.theta < PI))
    throw std::runtime_error("hypotheses violated: theta not in (0,pi)");
  if (params.L < 4.0 * (I_func(params.theta) + 10 * std::log(2.0)))
    throw std::runtime_error("hypotheses violated: L < 4(I(theta) + 10 ln 2)");
  size_t m = cycle.size();
  if (static_cast<double>(m) > params.L)
    throw std::runtime_error("hypotheses violated: m > L");
  // tameness without the framing-closeness requirement
  TameParams loose = params;
  loose.delta = 1e9;
  TameReport tr = is_tame(cycle, loose, true);
  if (!tr.tame) throw std::runtime_error("hypotheses violated: cycle not (L,theta)-tame");

  NearnessReport rep;
  double K = 0;
  for (const auto& jr : tr.joints) {
    double t4 = std::tan(jr.bending / 4.0);
    K = std::max(K, std::log((1 + t4) / (1 - t4)));
  }
  rep.K_bound = K + 0.1;

  // Work per segment in segment-local coordinates. A long developed cycle
  // spans a hyperbolic extent far beyond what a single global chart can hold
  // in doubles (coordinates of points far from the chart's vertical axis lose
  // the digits that place them relative to the closed geodesic), whereas every
  // quantity below is an O(1) geometry problem near the local origin.
  //
  // rel[j] carries segment j+1 into segment j's coordinates; `last` carries
  // the deck image of segment 0 into segment m-1's coordinates and is exact
  // by construction (translate + rotate of the identity frame).
  std::vector<Isometry> rel;
  for (size_t j = 0; j + 1 < m; ++j)
    rel.push_back(cycle[j].start.iso.inverse() * cycle[j + 1].start.iso);
  Isometry last =
      frame_rotate(frame_translate(Frame{}, cycle[m - 1].length), cycle[m - 1].phase).iso;

  const double step = 0.05;
  double g2u = 0, u2g = 0;
  for (size_t i = 0; i < m; ++i) {
    // Holonomy conjugated into segment i's coordinates.
    Isometry H = Isometry::identity();
    for (size_t j = i; j + 1 < m; ++j) H = H * rel[j];
    H = H * last;
    for (size_t j = 0; j < i; ++j) H = H * rel[j];
    if (classify(H) != IsoClass::loxodromic)
      throw std::runtime_error("verify_cycle_nearness: holonomy not loxodromic");

    // The closed geodesic cannot be located near segment i by developing the
    // whole cycle: every such route amplifies roundoff by the exponential of
    // the development radius.  The distance itself is still well conditioned,
    // because a perturbation made d units along the cycle moves the shadowing
    // geodesic here by only e^{-d} of its size.  With segment lengths >= 2L
    // the joints beyond the two adjacent ones sit at least 2L away, so the
    // axis inside this segment's window equals, up to a truncation error
    // ~ theta e^{-2L} (far below the asserted slack), the geodesic that
    // shadows segments i-1, i, i+1 alone: its ideal endpoints are the forward
    // ray limit rel_i(inf) and the backward ray limit rel_{i-1}^{-1}(0), each
    // a single well-conditioned Mobius application.
    const Isometry& fwd = (i + 1 < m) ? rel[i] : last;
    Isometry bwd = ((i > 0) ? rel[i - 1] : last).inverse();
    BoundaryPoint xp = (std::abs(fwd.c) * 1e280 > std::abs(fwd.a))
                           ? BoundaryPoint::at(fwd.a / fwd.c)
                           : BoundaryPoint::infinity();
    BoundaryPoint xn = BoundaryPoint::at(bwd.b / bwd.d);
    Geodesic axl{xn, xp};

    // Segment i runs up the local vertical; its neighbours (with the wrap
    // neighbours pulled back through the deck transformation) are one
    // relative isometry away.
    PointH3 a0{cplx(0, 0), 1.0};
    PointH3 b0{cplx(0, 0), std::exp(cycle[i].length)};
    Isometry to_next = (i + 1 < m) ? rel[i] : last;
    Isometry to_prev = (i > 0) ? rel[i - 1].inverse() : last.inverse();
    double lp = cycle[(i + m - 1) % m].length, ln = cycle[(i + 1) % m].length;
    PointH3 pa = apply(to_prev, a0), pb = apply(to_prev, PointH3{cplx(0, 0), std::exp(lp)});
    PointH3 na = apply(to_next, a0), nb = apply(to_next, PointH3{cplx(0, 0), std::exp(ln)});

    // union -> geodesic: sample along the local vertical segment
    int nsteps = static_cast<int>(std::ceil(cycle[i].length / step));
    for (int k = 0; k <= nsteps; ++k) {
      double s = cycle[i].length * k / nsteps;
      u2g = std::max(u2g, project_to_geodesic(axl, PointH3{cplx(0, 0), std::exp(s)}).first);
    }

    // geodesic -> union: sample the local axis between the projections of the
    // segment's endpoints (with margin); the windows of consecutive segments
    // overlap, so one period of the closed geodesic is fully covered.
    Isometry V = move_to_vertical(axl);
    Isometry Vinv = V.inverse();
    auto axis_param = [&](const PointH3& p) {
      PointH3 q = apply(V, p);
      return std::log(std::sqrt(std::norm(q.w) + q.z * q.z));
    };
    double t0 = axis_param(a0) - 0.5, t1 = axis_param(b0) + 0.5;
    int asteps = static_cast<int>(std::ceil((t1 - t0) / step));
    for (int k = 0; k <= asteps; ++k) {
      double t = t0 + (t1 - t0) * k / asteps;
      PointH3 p = apply(Vinv, PointH3{cplx(0, 0), std::exp(t)});
      double best = dist_to_segment(p, a0, b0);
      best = std::min(best, dist_to_segment(p, pa, pb));
      best = std::min(best, dist_to_segment(p, na, nb));
      g2u = std::max(g2u, best);
    }
  }
  rep.geodesic_to_union = g2u;
  rep.union_to_geodesic = u2g;
  double both = std::max(rep.geodesic_to_union, rep.union_to_geodesic);
  rep.pass = rep.geodesic_to_union <= 1.0 && both <= rep.K_bound;
  return rep;
}

}  // namespace h3
