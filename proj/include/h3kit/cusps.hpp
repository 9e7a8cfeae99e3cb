#pragma once
// Cusped-manifold model: a discrete group given by generator matrices,
// relators and cusp data, together with the height function measuring how
// far a point penetrates past the cusp horospheres, the cusp-excursion
// decomposition of geodesic segments, and orbit-ball enumeration.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "h3kit/eisenstein.hpp"
#include "h3kit/hyp3.hpp"

namespace h3 {

// One cusp: a parabolic fixed point, two commuting parabolic stabilizer
// generators (given as words over the manifold's generators), and the size
// of its height-0 horoball (Euclidean diameter at a finite fixed point, or
// the cutoff height for a cusp at infinity).
struct CuspRecord {
  BoundaryPoint fixed_point;
  std::array<std::string, 2> stabilizer_words;
  std::array<Isometry, 2> stabilizer;
  double horoball_size = 1.0;
};

// A horoball, stored as the C^2 vector v = (alpha, beta) whose Hermitian
// square induces its Busemann function: with u(w, z) = (|alpha - beta*w|^2
// + |beta|^2 z^2) / z the ball is {u <= 1} and the penetration depth is
// -ln u.  Isometries act linearly: g . v is the vector of the image ball.
struct Horoball {
  cplx alpha, beta;

  double u(const PointH3& p) const {
    double m = std::abs(alpha - beta * p.w);
    double bz = std::abs(beta) * p.z;
    return (m * m + bz * bz) / p.z;
  }
  double depth(const PointH3& p) const { return -std::log(u(p)); }
  Horoball transformed(const Isometry& g) const {
    return {g.a * alpha + g.b * beta, g.c * alpha + g.d * beta};
  }
  BoundaryPoint center() const;
  // Euclidean diameter at a finite center; cutoff height at infinity.
  double size() const;

  static Horoball at_infinity(double cutoff_height);
  static Horoball at(cplx tangent_point, double diameter);
};

struct CuspedManifold {
  std::vector<std::string> gen_names;  // single-letter names, file order
  std::vector<Isometry> gen_mats;
  std::vector<std::string> relators;
  std::vector<CuspRecord> cusps;
  PointH3 basepoint{cplx(0.0, 0.0), 1.0};
  double margulis = 0.1;

  // Original file bytes, echoed verbatim by save_manifold.
  std::string source_text;

  // Exact-arithmetic engine, present when every generator is an integral
  // Eisenstein matrix of determinant 1 (the bundled fixture is).  Orbit
  // and horoball enumerations then run as exact integer sweeps instead of
  // word searches, which is what makes radius-10 horizons reachable.
  std::shared_ptr<const CongruenceTable> exact;
  std::vector<EMat> gen_emats;

  int gen_index(char name) const;  // -1 when absent
};

// --- manifold file IO --------------------------------------------------------

// Parses the JSON manifold format: "generators" maps single-letter names to
// row-major 2x2 complex matrices with entries [re, im]; "relators" and the
// cusp stabilizers are words over the names with ' marking inverses (an
// uppercase letter is also accepted as the inverse of its lowercase name);
// "cusps" entries hold "fixed_point" ([re, im] or "inf"), "stabilizer"
// (two words) and optional "horoball_size"; plus "basepoint" ([x, y, z])
// and "margulis".  Throws std::runtime_error on malformed input.
CuspedManifold parse_manifold(const std::string& json_text);
CuspedManifold load_manifold(const std::string& path);
// Writes the original bytes back (bit-exact round trip).
void save_manifold(const CuspedManifold& m, const std::string& path);

// Evaluates a word over the manifold's generators.
Isometry evaluate_word(const CuspedManifold& m, const std::string& word);
std::string invert_word(const std::string& word);

// --- validation --------------------------------------------------------------

struct ValidationIssue {
  std::string what;
  double residual = 0.0;
};

struct ValidationReport {
  bool valid = true;
  std::vector<ValidationIssue> issues;
};

// Checks: every relator evaluates to +-identity within 1e-8; each cusp's
// stabilizer generators are parabolic, fix the cusp's boundary point and
// commute within 1e-9; the basepoint has height 0.
ValidationReport validate(const CuspedManifold& m);

// --- orbit enumeration -------------------------------------------------------

struct OrbitElement {
  std::string word;
  Isometry iso;
  double displacement;  // dist(O, g O)
};

// All nonidentity group elements with dist(O, gO) < r, deduplicated modulo
// sign, in canonical order (by displacement, then lexicographic word).
// Breadth-first word search with pruning radius r + 2*(max generator
// displacement); throws "orbit cap exceeded" when r is beyond `cap`.
std::vector<OrbitElement> orbit_ball(const CuspedManifold& m, double r, double cap = 8.0);

// --- heights and excursions --------------------------------------------------

// The orbit horoballs relevant to a neighborhood of a segment [a, b]:
// every horoball whose interior meets the segment's Euclidean "shadow
// region" is included.  Exact (complete) on the Eisenstein engine; on the
// generic engine enumerated via orbit_ball and certified only up to its
// horizon, beyond which "height not certified" is thrown.
// min_depth > 0 restricts the guarantee to balls that can contain a point
// of depth at least min_depth over the segment (a ball needs diameter at
// least e^min_depth times the local height for that), which keeps the
// enumeration tractable when an endpoint sits at a tiny z coordinate;
// shallower balls may be omitted.
std::vector<Horoball> horoballs_meeting(const CuspedManifold& m, const PointH3& a,
                                        const PointH3& b, double slack = 0.0,
                                        double min_depth = 0.0);

// Height of a point: max over orbit horoballs of the penetration depth,
// and 0 in the thick part.
double height_point(const CuspedManifold& m, const PointH3& p);

struct Excursion {
  double entry, exit;  // arclength parameters along the parent segment
  double peak_height;
  double peak_param;
  enum class Kind { initial, terminal, intermediate } kind;
};

// Point at arclength s along the geodesic from a toward b, s in [0, d(a,b)].
PointH3 point_along(const PointH3& a, const PointH3& b, double s);

double height_segment(const CuspedManifold& m, const PointH3& a, const PointH3& b);
// With min_depth > 0, excursions whose peak falls below min_depth may be
// dropped or truncated; peaks at or above it are exact.
std::vector<Excursion> excursions(const CuspedManifold& m, const PointH3& a,
                                  const PointH3& b, double min_depth = 0.0);

// Angle between v and the horosphere through p, in [0, pi/2]; 0 in the
// thick part and 0 whenever v does not point into the cusp (the horizontal
// boundary case is assigned to the 0 branch).
double alpha_angle(const CuspedManifold& m, const PointH3& p, const Vec3& v);

struct GeodesicRep {
  double length;  // dist(O, gO)
  PointH3 from, to;
  double height;
  std::vector<Excursion> exc;
};

GeodesicRep geodesic_rep(const CuspedManifold& m, const Isometry& g);

// Checks that the height-0 horoballs of distinct orbit representatives in
// the given region have nonpositive mutual penetration (within 1e-6);
// throws "cusp normalization too large" otherwise.
void check_horoball_disjointness(const CuspedManifold& m, double radius);

}  // namespace h3
