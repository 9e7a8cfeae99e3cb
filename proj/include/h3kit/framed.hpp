#pragma once
// Algebra of oriented boundary-framed geodesic segments.
//
// A framed segment is stored canonically as (start_frame, length, phase):
// the start frame's base point / tangent / normal are the initial point,
// direction and framing; the terminal frame is
//   start * exp(length*A) * rot(phase)
// so the terminal framing is the parallel transport of the initial framing
// rotated by `phase` (right-handed about the direction of motion).

#include <vector>

#include "h3kit/hyp3.hpp"

namespace h3 {

struct FramedSegment {
  Frame start;
  double length = 1.0;
  double phase = 0.0;  // terminal normal angle, in (-pi, pi]
};

struct TameParams {
  double L = 0;      // each segment must have length >= 2L
  double theta = 0;  // bending angles must stay below theta, in (0, pi)
  double delta = 0;  // framing consecutiveness gap bound
};

// A chain is a sequence of segments with consecutive endpoints coinciding
// (within 1e-8). A cycle is the same data read cyclically: the segments are
// the developed lifts of a closed-up sequence, and the wrap joint closes
// through the holonomy, the isometry identifying the start frame of the
// first segment with the terminal frame of the last; the wrap joint is
// therefore an exact frame match (zero bending and framing gap).
using Chain = std::vector<FramedSegment>;
using Cycle = std::vector<FramedSegment>;

Frame end_frame(const FramedSegment& s);
PointH3 initial_point(const FramedSegment& s);
PointH3 terminal_point(const FramedSegment& s);
Vec3 initial_dir(const FramedSegment& s);
Vec3 terminal_dir(const FramedSegment& s);
Vec3 initial_framing(const FramedSegment& s);
Vec3 terminal_framing(const FramedSegment& s);

FramedSegment reverse(const FramedSegment& s);
FramedSegment flip(const FramedSegment& s);
FramedSegment rotate(const FramedSegment& s, double phi);

// Angle in [0, pi] between terminal direction of s1 and initial direction of
// s2; requires the endpoints to match within 1e-8.
double bending_angle(const FramedSegment& s1, const FramedSegment& s2);
bool is_delta_consecutive(const FramedSegment& s1, const FramedSegment& s2, double delta);

struct JointReport {
  int joint = 0;             // index i for the joint between segment i and i+1
  double bending = 0;        // bending angle
  double framing_gap = 0;    // angle between terminal and initial framings
  double endpoint_gap = 0;   // hyperbolic distance between endpoints
};

struct TameReport {
  bool tame = false;
  std::vector<JointReport> joints;
  std::vector<int> offending_segments;  // segments shorter than 2L
};

TameReport is_tame(const std::vector<FramedSegment>& segs, const TameParams& params,
                   bool cyclic);

double I_func(double theta);  // 2 ln sec(theta/2), for theta in [0, pi)

FramedSegment reduced_concatenation(const Chain& chain);

struct CycleResult {
  Isometry holonomy;
  ComplexLength closed_length;
};
CycleResult reduced_cyclic_concatenation(const Cycle& cycle);

struct LengthPhaseReport {
  bool pass = false;
  double length_actual = 0, length_predicted = 0, length_bound = 0;
  double phase_actual = 0, phase_predicted = 0, phase_bound = 0;
  double length_margin = 0, phase_margin = 0;
};
// Checks the concatenation length/phase estimates for a tame chain (cyclic =
// false) or cycle (cyclic = true). Throws when the hypotheses are violated.
LengthPhaseReport verify_length_phase(const std::vector<FramedSegment>& segs,
                                      const TameParams& params, bool cyclic);

struct NearnessReport {
  bool pass = false;
  double geodesic_to_union = 0;  // sup over sampled closed-geodesic points
  double union_to_geodesic = 0;  // sup over sampled segment points
  double K_bound = 0;
};
NearnessReport verify_cycle_nearness(const Cycle& cycle, const TameParams& params);

}  // namespace h3
