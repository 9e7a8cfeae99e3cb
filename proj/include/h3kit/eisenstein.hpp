#pragma once
// Exact arithmetic over the Eisenstein order Z[w], w = exp(i*pi/3), w^2 = w-1.
//
// The bundled knot-complement fixture group consists of 2x2 matrices over
// Z[w] with determinant 1; it is a congruence subgroup of level 4, so
// membership reduces to one table lookup on the matrix mod 4. That makes
// orbit counting, connection sweeps and local orbit enumeration exact
// integer computations instead of word searches.

#include <bitset>
#include <cstdint>
#include <functional>
#include <vector>

#include "h3kit/hyp3.hpp"

namespace h3 {

struct EInt {
  long long a = 0, b = 0;  // a + b*w
  EInt operator+(const EInt& o) const { return {a + o.a, b + o.b}; }
  EInt operator-(const EInt& o) const { return {a - o.a, b - o.b}; }
  EInt operator-() const { return {-a, -b}; }
  EInt operator*(const EInt& o) const {
    // (a1 + b1 w)(a2 + b2 w), using w^2 = w - 1
    return {a * o.a - b * o.b, a * o.b + b * o.a + b * o.b};
  }
  bool operator==(const EInt& o) const { return a == o.a && b == o.b; }
  EInt conj() const { return {a + b, -b}; }  // conj(w) = 1 - w
  long long norm2() const { return a * a + a * b + b * b; }
  bool is_zero() const { return a == 0 && b == 0; }
  cplx to_complex() const {
    return cplx(double(a) + 0.5 * double(b), 0.8660254037844386467637231707529362 * double(b));
  }
};

// Nearest-lattice-point division: q with |x - q*y| < |y|. Requires y != 0.
EInt ediv_round(const EInt& x, const EInt& y);
// Extended gcd: returns g and sets u, v with u*x + v*y = g.
EInt egcd(EInt x, EInt y, EInt& u, EInt& v);
bool is_unit(const EInt& x);

struct EMat {
  EInt a, b, c, d;
  EMat operator*(const EMat& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  EInt det() const { return a * d - b * c; }
  EMat inv_unimodular() const { return {d, -b, -c, a}; }  // for det == 1
  bool operator==(const EMat& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
  long long frob2() const { return a.norm2() + b.norm2() + c.norm2() + d.norm2(); }
  Isometry to_isometry() const {
    return Isometry(a.to_complex(), b.to_complex(), c.to_complex(), d.to_complex());
  }
};

// Packs a matrix mod 4 into 16 bits (2 bits per residue coordinate).
uint16_t pack_mod4(const EMat& m);

// The fixture's congruence membership table: the image of the group in
// SL(2, Z[w]/4), built by closure from the two generator matrices.
class CongruenceTable {
 public:
  // gens must have determinant 1 and integral entries.
  explicit CongruenceTable(const std::vector<EMat>& gens);
  bool contains(const EMat& m) const { return member_[pack_mod4(m)]; }
  bool contains_key(uint16_t key) const { return member_[key]; }
  size_t size() const { return count_; }
  size_t full_group_size() const { return full_count_; }  // |SL(2, Z[w]/4)|
  // multiply packed residue matrices
  static uint16_t mul_keys(uint16_t x, uint16_t y);

 private:
  std::bitset<65536> member_;
  size_t count_ = 0;
  size_t full_count_ = 0;
};

// Exact count of group elements g (mod sign, excluding the identity) with
// dist(O, gO) < r for each radius in `radii` (ascending). Counts matrices
// with squared Frobenius norm < 2 cosh r via a sweep over canonical bottom
// rows and their unit twists.
std::vector<long long> count_orbit_ball(const CongruenceTable& table,
                                        const std::vector<double>& radii);

// All group elements gamma (mod sign) with dist(x, gamma*O) <= R.
struct LatticeElement {
  EMat mat;
  double displacement;  // dist(x, gamma O)
};
std::vector<LatticeElement> lattice_ball(const CongruenceTable& table, const PointH3& x,
                                         double R);

// Streams every group element gamma (mod sign) with
// rlo <= dist(x, gamma y) <= rhi to the callback, together with that
// distance.  Same sweep as lattice_ball but with an arbitrary source point
// y and an annulus restriction, so large radii stay affordable when the
// shell is thin.
void sweep_annulus(const CongruenceTable& table, const PointH3& x, const PointH3& y,
                   double rlo, double rhi,
                   const std::function<void(const EMat&, double)>& fn);

// All lattice points m in Z[w] with |m - center| <= radius.
std::vector<EInt> eisenstein_disk(cplx center, double radius);

// Upper-triangular group elements [[1, m], [0, 1]] with |m| <= radius;
// returns the translation amounts m.
std::vector<EInt> parabolic_translations(const CongruenceTable& table, double radius);

// Horoballs of the fixture: images of {z > 1} under the group. Each is a
// ball tangent at fc/sc (first column of a group element) with Euclidean
// diameter 1/|sc|^2. Enumerates those tangent within `radius` of `center`
// with diameter >= min_diam.
struct HoroballSpec {
  EInt fc, sc;  // first column (a, c), c != 0; center a/c, diameter 1/|c|^2
};
std::vector<HoroballSpec> horoballs_near(const CongruenceTable& table, cplx center,
                                         double radius, double min_diam);

// Horoballs (at cutoff h0, diameter 1/(|sc|^2 h0)) that can contain a point
// of a height band: diameter >= zmin, tangency within dw_half +
// sqrt(diam * zmax) of `center`.  Unlike horoballs_near, the tangency
// radius shrinks with the ball, which keeps the output (and the work per
// candidate denominator) bounded when zmin is many orders below zmax.
std::vector<HoroballSpec> horoballs_reaching(const CongruenceTable& table, cplx center,
                                             double dw_half, double zmin, double zmax,
                                             double h0);

// Is (a, c) the first column of some group element? (Requires coprimality;
// checks all 16 second-column residue classes against the table.)
bool column_extends(const CongruenceTable& table, const EInt& a, const EInt& c,
                    EMat* out = nullptr);

}  // namespace h3
