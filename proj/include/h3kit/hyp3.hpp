#pragma once
// Core hyperbolic geometry in the upper half-space model H^3.
//
// Points are (w, z) with w = x+iy the horizontal coordinate and z > 0 the
// Euclidean height. Isometries are unit-determinant 2x2 complex matrices
// modulo sign, acting by Mobius transformations extended to H^3 via the
// quaternion model q = x + y*i + z*j.
//
// Frames: a frame is an isometry applied to the base frame, which sits at
// (0,0,1) with tangent pointing up (+z) and normal pointing in +x.
// Rotation angles about the tangent are right-handed: rotating the normal
// +x toward +y when the tangent points up.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace h3 {

using cplx = std::complex<double>;
inline constexpr double PI = 3.14159265358979323846;

// Reduce an angle to the canonical representative in (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2 * PI);
  if (a <= -PI) a += 2 * PI;
  if (a > PI) a -= 2 * PI;
  return a;
}

// Distance from zero in R/2piZ, valued in [0, pi].
inline double circle_dist(double a, double b = 0.0) {
  return std::fabs(wrap_angle(a - b));
}

struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    if (n < 1e-300) throw std::runtime_error("cannot normalize zero vector");
    return {x / n, y / n, z / n};
  }
};

struct PointH3 {
  cplx w{0.0, 0.0};
  double z = 1.0;
};

struct BoundaryPoint {
  cplx w{0.0, 0.0};
  bool inf = false;
  static BoundaryPoint infinity() { return {cplx(0, 0), true}; }
  static BoundaryPoint at(cplx v) { return {v, false}; }
};

// Complex length / complex distance: real part plus i*(angle in (-pi, pi]).
struct ComplexLength {
  double re = 0, im = 0;
};

struct Isometry {
  cplx a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};

  Isometry() = default;
  // Normalizes to determinant 1 and to the canonical sign representative.
  Isometry(cplx a_, cplx b_, cplx c_, cplx d_);

  static Isometry identity() { return Isometry(); }

  Isometry operator*(const Isometry& o) const {
    return Isometry(a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
                    c * o.b + d * o.d);
  }
  Isometry inverse() const { return Isometry(d, -b, -c, a); }
  cplx trace() const { return a + d; }
  // Squared Frobenius norm; cosh(dist(O, gO)) equals this over 2.
  double frob2() const {
    return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
  }
  double max_entry_diff(const Isometry& o) const;
};

enum class IsoClass { identity, parabolic, elliptic, loxodromic };

struct Geodesic {
  BoundaryPoint neg, pos;  // oriented from neg to pos
};

struct Frame {
  Isometry iso;
};

struct TangentVector {
  PointH3 p;
  Vec3 dir;  // Euclidean unit direction (angles agree with hyperbolic ones)
};

struct Seam {
  PointH3 foot1, foot2;
  ComplexLength cdist;
};

// --- basic operations -----------------------------------------------------

double dist(const PointH3& p, const PointH3& q);
PointH3 apply(const Isometry& g, const PointH3& p);
BoundaryPoint apply(const Isometry& g, const BoundaryPoint& p);
// Differential of g at p applied to direction v, returned as the Euclidean
// unit direction at the image point.
Vec3 apply_dir(const Isometry& g, const PointH3& p, const Vec3& v);

IsoClass classify(const Isometry& g);
ComplexLength complex_length(const Isometry& g);  // loxodromic only
Geodesic axis(const Isometry& g);                 // loxodromic only

Seam common_perpendicular(const Geodesic& g1, const Geodesic& g2);
ComplexLength complex_distance_along(const Geodesic& ax, const TangentVector& v1,
                                     const TangentVector& v2);

// --- frames ----------------------------------------------------------------

Frame frame_translate(const Frame& f, double t);
Frame frame_rotate(const Frame& f, double phi);  // about the tangent
PointH3 frame_point(const Frame& f);
Vec3 frame_tangent(const Frame& f);
Vec3 frame_normal(const Frame& f);
// Builds the frame with the given base point, unit tangent and unit normal
// (Euclidean unit vectors, assumed orthogonal within ~1e-9).
Frame frame_from(const PointH3& p, const Vec3& tangent, const Vec3& normal);

// --- geodesic helpers -------------------------------------------------------

// Isometry sending g.neg -> 0 and g.pos -> infinity.
Isometry move_to_vertical(const Geodesic& g);
// Euclidean unit tangent of g at a point p on (or near) g, toward g.pos.
Vec3 geodesic_dir_at(const Geodesic& g, const PointH3& p);
// Euclidean unit tangent at p of the geodesic from p to q.
Vec3 dir_between(const PointH3& p, const PointH3& q);
// Distance from p to the geodesic, plus the foot of the perpendicular.
std::pair<double, PointH3> project_to_geodesic(const Geodesic& g, const PointH3& p);
// Point of g at signed arclength s from the point of g nearest to (0,0,1)'s
// projection... (parameterized via move_to_vertical; s=0 at height 1).
PointH3 geodesic_point_at(const Geodesic& g, double s);

// Distance from p to the geodesic segment [u, v] (endpoints in H^3).
double dist_to_segment(const PointH3& p, const PointH3& u, const PointH3& v);

}  // namespace h3
