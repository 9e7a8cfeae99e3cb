#include "h3kit/hyp3.hpp"

#include <algorithm>
#include <cmath>

namespace h3 {

namespace {

// Quaternion q = al + be*j with al, be complex; j*al = conj(al)*j.
struct Quat {
  cplx al{0, 0}, be{0, 0};
  Quat operator*(const Quat& o) const {
    return {al * o.al - be * std::conj(o.be), al * o.be + be * std::conj(o.al)};
  }
  Quat conjugate() const { return {std::conj(al), -be}; }
  double norm2() const { return std::norm(al) + std::norm(be); }
  Quat inv() const {
    double n = norm2();
    if (n < 1e-300) throw std::runtime_error("quaternion inverse of zero");
    Quat c = conjugate();
    return {c.al / n, c.be / n};
  }
};

inline Quat qpoint(const PointH3& p) { return {p.w, cplx(p.z, 0)}; }
inline Quat qc(cplx z) { return {z, cplx(0, 0)}; }
inline Quat qvec(const Vec3& v) { return {cplx(v.x, v.y), cplx(v.z, 0)}; }

constexpr double kClassTol = 1e-9;

}  // namespace

Isometry::Isometry(cplx a_, cplx b_, cplx c_, cplx d_) : a(a_), b(b_), c(c_), d(d_) {
  cplx det = a * d - b * c;
  // ad - bc cancels catastrophically for products with huge entries; those
  // come from unit-determinant factors, so skip the rescale when the
  // computed determinant carries no significant digits.
  double scale = std::abs(a) * std::abs(d) + std::abs(b) * std::abs(c);
  if (scale < 1e12 || std::abs(det) > 1e-10 * scale) {
    if (std::abs(det) < 1e-300) throw std::runtime_error("singular matrix is not an isometry");
    cplx s = std::sqrt(det);
    a /= s; b /= s; c /= s; d /= s;
  }
  // Canonical sign: first of (Re tr, Im tr, Re a, Im a, Re b, Im b, Re c, Im c)
  // larger than 1e-12 in magnitude is made positive.
  double keys[8] = {a.real() + d.real(), a.imag() + d.imag(), a.real(), a.imag(),
                    b.real(),            b.imag(),            c.real(), c.imag()};
  for (double k : keys) {
    if (std::fabs(k) > 1e-12) {
      if (k < 0) { a = -a; b = -b; c = -c; d = -d; }
      break;
    }
  }
}

double Isometry::max_entry_diff(const Isometry& o) const {
  return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c),
                   std::abs(d - o.d)});
}

double dist(const PointH3& p, const PointH3& q) {
  double dz = p.z - q.z;
  double arg = 1.0 + (std::norm(p.w - q.w) + dz * dz) / (2.0 * p.z * q.z);
  return std::acosh(std::max(1.0, arg));
}

PointH3 apply(const Isometry& g, const PointH3& p) {
  // Closed form of the quaternionic Mobius action: the denominator is a sum
  // of squares, so the image height divides out without cancellation.
  cplx cwd = g.c * p.w + g.d;
  double D = std::norm(cwd) + std::norm(g.c) * p.z * p.z;
  if (!(D > 0) || !std::isfinite(D))
    throw std::runtime_error("isometry pushed point out of H^3 (numerics)");
  cplx wp = ((g.a * p.w + g.b) * std::conj(cwd) + g.a * std::conj(g.c) * p.z * p.z) / D;
  double zp = p.z / D;
  if (!(zp > 0) || !std::isfinite(zp))
    throw std::runtime_error("isometry pushed point out of H^3 (numerics)");
  return {wp, zp};
}

BoundaryPoint apply(const Isometry& g, const BoundaryPoint& p) {
  if (p.inf) {
    if (std::abs(g.c) < 1e-14) return BoundaryPoint::infinity();
    return BoundaryPoint::at(g.a / g.c);
  }
  cplx den = g.c * p.w + g.d;
  if (std::abs(den) < 1e-14) return BoundaryPoint::infinity();
  return BoundaryPoint::at((g.a * p.w + g.b) / den);
}

Vec3 apply_dir(const Isometry& g, const PointH3& p, const Vec3& v) {
  // df(v) = (a - f(q) c) v (c q + d)^{-1}.  Expanding f(q) against the
  // denominator gives a - f(q) c = (a - c w') - (z cbar / D) j, which sidesteps
  // the quaternion product whose components cancel at extreme entry scales.
  cplx cwd = g.c * p.w + g.d;
  double D = std::norm(cwd) + std::norm(g.c) * p.z * p.z;
  cplx wp = ((g.a * p.w + g.b) * std::conj(cwd) + g.a * std::conj(g.c) * p.z * p.z) / D;
  Quat A{g.a - g.c * wp, -p.z * std::conj(g.c) / D};
  Quat ustar{std::conj(cwd), -g.c * p.z};
  Quat r = A * qvec(v) * ustar;  // positive multiple of the image direction
  Vec3 out{r.al.real(), r.al.imag(), r.be.real()};
  return out.normalized();
}

IsoClass classify(const Isometry& g) {
  cplx tau = g.trace();
  if (tau.real() < 0) tau = -tau;  // sign-normalized trace
  if (std::fabs(tau.imag()) < kClassTol) {
    if (std::fabs(tau.real() - 2.0) < kClassTol) {
      bool is_id = std::abs(g.b) < kClassTol && std::abs(g.c) < kClassTol &&
                   std::abs(g.a - g.d) < kClassTol;
      return is_id ? IsoClass::identity : IsoClass::parabolic;
    }
    if (tau.real() < 2.0) return IsoClass::elliptic;
  }
  return IsoClass::loxodromic;
}

ComplexLength complex_length(const Isometry& g) {
  if (classify(g) != IsoClass::loxodromic)
    throw std::runtime_error("no complex translation length");
  cplx tau = g.trace();
  cplx sq = std::sqrt(tau * tau - 4.0);
  cplx lam = (tau + sq) / 2.0;
  if (std::abs(lam) < 1.0) lam = (tau - sq) / 2.0;
  return {2.0 * std::log(std::abs(lam)), wrap_angle(2.0 * std::arg(lam))};
}

Geodesic axis(const Isometry& g) {
  if (classify(g) != IsoClass::loxodromic) throw std::runtime_error("axis: not loxodromic");
  if (std::abs(g.c) > 1e-12) {
    cplx disc = std::sqrt((g.d - g.a) * (g.d - g.a) + 4.0 * g.c * g.b);
    // Pick the larger-magnitude root first, then recover the other from the
    // product of roots (-b/c), which avoids cancellation when |a| >> |d|.
    cplx q = g.a - g.d;
    if (std::abs(q + disc) < std::abs(q - disc)) disc = -disc;
    cplx z1 = (q + disc) / (2.0 * g.c);
    cplx z2 = (std::abs(z1) > 0) ? (-g.b / g.c) / z1 : (q - disc) / (2.0 * g.c);
    // attracting fixed point has |c z + d| > 1
    bool z1_att = std::abs(g.c * z1 + g.d) > 1.0;
    cplx att = z1_att ? z1 : z2, rep = z1_att ? z2 : z1;
    return {BoundaryPoint::at(rep), BoundaryPoint::at(att)};
  }
  // fixed points are infinity and b/(d-a)
  cplx z0 = g.b / (g.d - g.a);
  if (std::abs(g.a) > 1.0)
    return {BoundaryPoint::at(z0), BoundaryPoint::infinity()};
  return {BoundaryPoint::infinity(), BoundaryPoint::at(z0)};
}

// --- frames ------------------------------------------------------------------

Frame frame_translate(const Frame& f, double t) {
  double e = std::exp(t / 2.0);
  return {f.iso * Isometry(cplx(e, 0), 0, 0, cplx(1.0 / e, 0))};
}

Frame frame_rotate(const Frame& f, double phi) {
  cplx e = std::exp(cplx(0, phi / 2.0));
  return {f.iso * Isometry(e, 0, 0, std::conj(e))};
}

PointH3 frame_point(const Frame& f) { return apply(f.iso, PointH3{}); }

Vec3 frame_tangent(const Frame& f) { return apply_dir(f.iso, PointH3{}, {0, 0, 1}); }

Vec3 frame_normal(const Frame& f) { return apply_dir(f.iso, PointH3{}, {1, 0, 0}); }

Frame frame_from(const PointH3& p, const Vec3& tangent, const Vec3& normal) {
  Vec3 t = tangent.normalized();
  Vec3 n = (normal - t * t.dot(normal)).normalized();
  Vec3 bn = t.cross(n);
  // Rotation matrix columns: e_x -> n, e_y -> t x n, e_z -> t.
  double R[3][3] = {{n.x, bn.x, t.x}, {n.y, bn.y, t.y}, {n.z, bn.z, t.z}};
  // Quaternion extraction (Shepperd), q = (w,x,y,z) with R(q)v = q v q*.
  double qw, qx, qy, qz;
  double tr = R[0][0] + R[1][1] + R[2][2];
  if (tr > 0) {
    double s = std::sqrt(tr + 1.0) * 2;
    qw = 0.25 * s;
    qx = (R[2][1] - R[1][2]) / s;
    qy = (R[0][2] - R[2][0]) / s;
    qz = (R[1][0] - R[0][1]) / s;
  } else if (R[0][0] > R[1][1] && R[0][0] > R[2][2]) {
    double s = std::sqrt(1.0 + R[0][0] - R[1][1] - R[2][2]) * 2;
    qw = (R[2][1] - R[1][2]) / s;
    qx = 0.25 * s;
    qy = (R[0][1] + R[1][0]) / s;
    qz = (R[0][2] + R[2][0]) / s;
  } else if (R[1][1] > R[2][2]) {
    double s = std::sqrt(1.0 + R[1][1] - R[0][0] - R[2][2]) * 2;
    qw = (R[0][2] - R[2][0]) / s;
    qx = (R[0][1] + R[1][0]) / s;
    qy = 0.25 * s;
    qz = (R[1][2] + R[2][1]) / s;
  } else {
    double s = std::sqrt(1.0 + R[2][2] - R[0][0] - R[1][1]) * 2;
    qw = (R[1][0] - R[0][1]) / s;
    qx = (R[0][2] + R[2][0]) / s;
    qy = (R[1][2] + R[2][1]) / s;
    qz = 0.25 * s;
  }
  // SU(2) lift: k = qw*I + qx*Gx + qy*Gy + qz*Gz with
  // Gx = [[0,i],[i,0]], Gy = [[0,-1],[1,0]], Gz = [[i,0],[0,-i]].
  Isometry k(cplx(qw, qz), cplx(-qy, qx), cplx(qy, qx), cplx(qw, -qz));
  double sz = std::sqrt(p.z);
  Isometry g1(cplx(sz, 0), p.w / sz, 0, cplx(1.0 / sz, 0));
  return {g1 * k};
}

// --- geodesic helpers ----------------------------------------------------------

Isometry move_to_vertical(const Geodesic& g) {
  if (g.neg.inf) {
    if (g.pos.inf) throw std::runtime_error("degenerate geodesic (both endpoints infinite)");
    return Isometry(0, 1, 1, -g.pos.w);
  }
  if (g.pos.inf) return Isometry(1, -g.neg.w, 0, 1);
  double scale = std::max({1.0, std::abs(g.neg.w), std::abs(g.pos.w)});
  if (std::abs(g.pos.w - g.neg.w) < 1e-14 * scale)
    throw std::runtime_error("degenerate geodesic (equal endpoints)");
  // Normalize here: the constructor skips det renormalization at extreme
  // entry scales, and feet far from the origin make det = neg - pos huge.
  cplx s = std::sqrt(g.neg.w - g.pos.w);
  return Isometry(1.0 / s, -g.neg.w / s, 1.0 / s, -g.pos.w / s);
}

Vec3 geodesic_dir_at(const Geodesic& g, const PointH3& p) {
  if (g.neg.inf || g.pos.inf) {
    return g.pos.inf ? Vec3{0, 0, 1} : Vec3{0, 0, -1};
  }
  cplx u = g.pos.w - g.neg.w;
  double L = std::abs(u);
  if (L < 1e-14) throw std::runtime_error("degenerate geodesic");
  cplx uh = u / L;
  cplx m = (g.neg.w + g.pos.w) / 2.0;
  double R = L / 2.0;
  double s = ((p.w - m) * std::conj(uh)).real();
  Vec3 dir{(uh * p.z).real() / R, (uh * p.z).imag() / R, -s / R};
  return dir.normalized();
}

Vec3 dir_between(const PointH3& p, const PointH3& q) {
  cplx dw = q.w - p.w;
  double L = std::abs(dw);
  if (L < 1e-12 * std::max(p.z, q.z)) {
    return q.z > p.z ? Vec3{0, 0, 1} : Vec3{0, 0, -1};
  }
  cplx uh = dw / L;
  // circle center p.w + uh*tau on the boundary, radius R0
  double tau = (L * L + q.z * q.z - p.z * p.z) / (2.0 * L);
  double R0 = std::sqrt(tau * tau + p.z * p.z);
  Vec3 dir{(uh * p.z).real() / R0, (uh * p.z).imag() / R0, tau / R0};
  return dir.normalized();
}

std::pair<double, PointH3> project_to_geodesic(const Geodesic& g, const PointH3& p) {
  Isometry W = move_to_vertical(g);
  PointH3 q = apply(W, p);
  double r = std::abs(q.w);
  double d = std::asinh(r / q.z);
  double foot_h = std::sqrt(r * r + q.z * q.z);
  PointH3 foot = apply(W.inverse(), PointH3{cplx(0, 0), foot_h});
  return {d, foot};
}

PointH3 geodesic_point_at(const Geodesic& g, double s) {
  Isometry W = move_to_vertical(g);
  return apply(W.inverse(), PointH3{cplx(0, 0), std::exp(s)});
}

double dist_to_segment(const PointH3& p, const PointH3& u, const PointH3& v) {
  // map the carrier of [u,v] to the vertical axis; clamp the foot
  Vec3 du = dir_between(u, v);
  Vec3 helper = std::fabs(du.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Frame f = frame_from(u, du, helper - du * du.dot(helper));
  double len = dist(u, v);
  Isometry Winv = f.iso;  // maps vertical segment [1, e^len] to [u, v]
  PointH3 q = apply(Winv.inverse(), p);
  double s = std::log(std::sqrt(std::norm(q.w) + q.z * q.z));  // foot parameter
  s = std::clamp(s, 0.0, len);
  PointH3 foot{cplx(0, 0), std::exp(s)};
  return dist(q, foot);
}

Seam common_perpendicular(const Geodesic& g1, const Geodesic& g2) {
  auto same_bp = [](const BoundaryPoint& x, const BoundaryPoint& y) {
    if (x.inf || y.inf) return x.inf && y.inf;
    return std::abs(x.w - y.w) < 1e-12;
  };
  if (same_bp(g1.neg, g2.neg) || same_bp(g1.neg, g2.pos) || same_bp(g1.pos, g2.neg) ||
      same_bp(g1.pos, g2.pos))
    throw std::runtime_error("no common perpendicular (shared endpoint)");

  Isometry W = move_to_vertical(g1);
  BoundaryPoint b1 = apply(W, g2.neg), b2 = apply(W, g2.pos);
  if (b1.inf || b2.inf || std::abs(b1.w) < 1e-13 || std::abs(b2.w) < 1e-13)
    throw std::runtime_error("no common perpendicular (shared endpoint)");
  cplx z1 = b1.w, z2 = b2.w;

  cplx m = (z1 + z2) / 2.0;
  double R = std::abs(z2 - z1) / 2.0;
  cplx uh = (z2 - z1) / (2.0 * R);
  // foot2 on the image of g2: minimize |w|^2 / z^2 over the semicircle.
  double c1 = (std::conj(uh) * m).real();
  double m2 = std::norm(m);
  double sig;
  if (std::fabs(c1) < 1e-13 * (R * R + m2)) {
    sig = 0.0;
  } else {
    double A = c1, B = R * R + m2, C = c1 * R * R;
    double disc = std::sqrt(std::max(0.0, B * B - 4 * A * C));
    double r1 = (-B + disc) / (2 * A), r2 = (-B - disc) / (2 * A);
    sig = (std::fabs(r1) < R) ? r1 : r2;
    sig = std::clamp(sig, -R + 1e-300, R - 1e-300);
  }
  cplx w2 = m + uh * sig;
  double h2 = std::sqrt(std::max(1e-300, R * R - sig * sig));
  PointH3 foot2p{w2, h2};
  double h1 = std::sqrt(std::norm(w2) + h2 * h2);
  PointH3 foot1p{cplx(0, 0), h1};

  double d = dist(foot1p, foot2p);
  Isometry Winv = W.inverse();
  PointH3 foot1 = apply(Winv, foot1p), foot2 = apply(Winv, foot2p);

  Geodesic g2img{BoundaryPoint::at(z1), BoundaryPoint::at(z2)};
  if (d < 1e-9) {
    // intersecting axes: zero-length seam, pure imaginary complex distance
    Vec3 d1{0, 0, 1};
    Vec3 d2 = geodesic_dir_at(g2img, foot1p);
    double ang = std::acos(std::clamp(d1.dot(d2), -1.0, 1.0));
    return {foot1, foot1, ComplexLength{0.0, ang}};
  }

  // transport the direction of g1 (the +z direction at foot1') along the seam
  Vec3 seam_dir = dir_between(foot1p, foot2p);
  Frame F = frame_from(foot1p, seam_dir, Vec3{0, 0, 1});
  Frame F2 = frame_translate(F, d);
  Vec3 n = frame_normal(F2);
  Vec3 bn = frame_tangent(F2).cross(n);
  Vec3 d2 = geodesic_dir_at(g2img, foot2p);
  double psi = std::atan2(d2.dot(bn), d2.dot(n));
  return {foot1, foot2, ComplexLength{d, wrap_angle(psi)}};
}

ComplexLength complex_distance_along(const Geodesic& ax, const TangentVector& v1,
                                     const TangentVector& v2) {
  Isometry W = move_to_vertical(ax);
  PointH3 p1 = apply(W, v1.p), p2 = apply(W, v2.p);
  if (std::abs(p1.w) > 1e-8 * std::max(1.0, p1.z) ||
      std::abs(p2.w) > 1e-8 * std::max(1.0, p2.z))
    throw std::runtime_error("complex_distance_along: point off axis");
  Vec3 u1 = apply_dir(W, v1.p, v1.dir), u2 = apply_dir(W, v2.p, v2.dir);
  if (std::fabs(u1.z) > 1e-6 || std::fabs(u2.z) > 1e-6)
    throw std::runtime_error("complex_distance_along: vector not normal to axis");
  cplx h1(u1.x, u1.y), h2(u2.x, u2.y);
  double re = std::log(p2.z / p1.z);
  double im = std::arg(h2 * std::conj(h1));
  return {re, wrap_angle(im)};
}

}  // namespace h3
