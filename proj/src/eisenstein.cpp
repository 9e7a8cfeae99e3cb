#include "h3kit/eisenstein.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace h3 {

namespace {
constexpr double kSqrt3Over2 = 0.8660254037844386467637231707529362;

inline long long llround_div(long long num, long long den) {
  return std::llround(static_cast<double>(num) / static_cast<double>(den));
}

inline int mod4(long long v) { return static_cast<int>(((v % 4) + 4) & 3); }

inline uint8_t pack_res(const EInt& x) {
  return static_cast<uint8_t>((mod4(x.a) << 2) | mod4(x.b));
}

inline uint8_t mul_res(uint8_t r1, uint8_t r2) {
  int a1 = r1 >> 2, b1 = r1 & 3, a2 = r2 >> 2, b2 = r2 & 3;
  int a = (a1 * a2 - b1 * b2) % 4;
  int b = (a1 * b2 + b1 * a2 + b1 * b2) % 4;
  return static_cast<uint8_t>((((a + 4) & 3) << 2) | ((b + 4) & 3));
}

inline uint8_t add_res(uint8_t r1, uint8_t r2) {
  return static_cast<uint8_t>((((r1 >> 2) + (r2 >> 2)) & 3) << 2 |
                              (((r1 & 3) + (r2 & 3)) & 3));
}

inline uint8_t neg_res(uint8_t r) {
  return static_cast<uint8_t>((((4 - (r >> 2)) & 3) << 2) | ((4 - (r & 3)) & 3));
}

const EInt kUnits[6] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};  // w^k

size_t closure_size(std::bitset<65536>& member, const std::vector<uint16_t>& gens);
}  // namespace

EInt ediv_round(const EInt& x, const EInt& y) {
  if (y.is_zero()) throw std::runtime_error("ediv_round: division by zero");
  EInt num = x * y.conj();
  long long den = y.norm2();
  return {llround_div(num.a, den), llround_div(num.b, den)};
}

EInt egcd(EInt x, EInt y, EInt& u, EInt& v) {
  EInt u0{1, 0}, v0{0, 0}, u1{0, 0}, v1{1, 0};
  while (!y.is_zero()) {
    EInt q = ediv_round(x, y);
    EInt r = x - q * y;
    x = y; y = r;
    EInt u2 = u0 - q * u1, v2 = v0 - q * v1;
    u0 = u1; v0 = v1; u1 = u2; v1 = v2;
  }
  u = u0; v = v0;
  return x;
}

bool is_unit(const EInt& x) { return x.norm2() == 1; }

uint16_t pack_mod4(const EMat& m) {
  return static_cast<uint16_t>((pack_res(m.a) << 12) | (pack_res(m.b) << 8) |
                               (pack_res(m.c) << 4) | pack_res(m.d));
}

uint16_t CongruenceTable::mul_keys(uint16_t x, uint16_t y) {
  uint8_t xa = x >> 12, xb = (x >> 8) & 15, xc = (x >> 4) & 15, xd = x & 15;
  uint8_t ya = y >> 12, yb = (y >> 8) & 15, yc = (y >> 4) & 15, yd = y & 15;
  uint8_t a = add_res(mul_res(xa, ya), mul_res(xb, yc));
  uint8_t b = add_res(mul_res(xa, yb), mul_res(xb, yd));
  uint8_t c = add_res(mul_res(xc, ya), mul_res(xd, yc));
  uint8_t d = add_res(mul_res(xc, yb), mul_res(xd, yd));
  return static_cast<uint16_t>((a << 12) | (b << 8) | (c << 4) | d);
}

namespace {
size_t closure_size(std::bitset<65536>& member, const std::vector<uint16_t>& gens) {
  std::deque<uint16_t> queue;
  uint16_t id = pack_mod4(EMat{{1, 0}, {0, 0}, {0, 0}, {1, 0}});
  member[id] = true;
  queue.push_back(id);
  size_t count = 1;
  while (!queue.empty()) {
    uint16_t cur = queue.front();
    queue.pop_front();
    for (uint16_t g : gens) {
      uint16_t nxt = CongruenceTable::mul_keys(cur, g);
      if (!member[nxt]) {
        member[nxt] = true;
        queue.push_back(nxt);
        ++count;
      }
    }
  }
  return count;
}
}  // namespace

CongruenceTable::CongruenceTable(const std::vector<EMat>& gens) {
  std::vector<uint16_t> keys;
  for (const EMat& g : gens) {
    if (!(g.det() == EInt{1, 0}))
      throw std::runtime_error("congruence table: generator determinant is not 1");
    keys.push_back(pack_mod4(g));
    keys.push_back(pack_mod4(g.inv_unimodular()));
  }
  count_ = closure_size(member_, keys);
  // size of the full SL(2, Z[w]/4), from elementary matrices
  std::bitset<65536> full;
  std::vector<uint16_t> elem = {
      pack_mod4(EMat{{1, 0}, {1, 0}, {0, 0}, {1, 0}}),
      pack_mod4(EMat{{1, 0}, {0, 1}, {0, 0}, {1, 0}}),
      pack_mod4(EMat{{1, 0}, {0, 0}, {1, 0}, {1, 0}}),
      pack_mod4(EMat{{1, 0}, {0, 0}, {0, 1}, {1, 0}})};
  full_count_ = closure_size(full, elem);
}

// --- orbit counting sweep ----------------------------------------------------

namespace {

struct UnitTwist {
  // nibble LUTs: residue -> unit^{-1}*residue (top row), unit*residue (bottom)
  uint8_t inv_mul[16];
  uint8_t mul[16];
};

std::vector<UnitTwist> make_twists() {
  std::vector<UnitTwist> tw(6);
  for (int k = 0; k < 6; ++k) {
    uint8_t up = pack_res(kUnits[k]);
    uint8_t ui = pack_res(kUnits[(6 - k) % 6]);
    for (int r = 0; r < 16; ++r) {
      tw[k].mul[r] = mul_res(up, static_cast<uint8_t>(r));
      tw[k].inv_mul[r] = mul_res(ui, static_cast<uint8_t>(r));
    }
  }
  return tw;
}

// Enumerates integer points t = t1 + t2*w with |t - center| <= radius,
// invoking fn(t1, t2).
template <typename Fn>
void for_disk(cplx center, double radius, Fn&& fn) {
  if (radius < 0) return;
  double cy = center.imag(), cx = center.real();
  long long t2lo = static_cast<long long>(std::ceil((cy - radius) / kSqrt3Over2 - 1e-9));
  long long t2hi = static_cast<long long>(std::floor((cy + radius) / kSqrt3Over2 + 1e-9));
  for (long long t2 = t2lo; t2 <= t2hi; ++t2) {
    double y = t2 * kSqrt3Over2 - cy;
    double rem = radius * radius - y * y;
    if (rem < 0) continue;
    double half = std::sqrt(rem);
    double xc = cx - 0.5 * static_cast<double>(t2);
    long long t1lo = static_cast<long long>(std::ceil(xc - half - 1e-9));
    long long t1hi = static_cast<long long>(std::floor(xc + half + 1e-9));
    for (long long t1 = t1lo; t1 <= t1hi; ++t1) fn(t1, t2);
  }
}

// Canonical bottom rows: c in the sector {c1 >= 1, c2 >= 0} plus the row
// (0, 1); every bottom row of a determinant-1 matrix is a unique unit
// multiple of a canonical one.
std::vector<EInt> canonical_c_list(long long nmax) {
  std::vector<EInt> cs;
  cs.push_back(EInt{0, 0});  // sentinel for the (0,1) row family
  for (long long c1 = 1; c1 * c1 <= nmax; ++c1)
    for (long long c2 = 0; c1 * c1 + c1 * c2 + c2 * c2 <= nmax; ++c2)
      cs.push_back(EInt{c1, c2});
  return cs;
}

}  // namespace

std::vector<long long> count_orbit_ball(const CongruenceTable& table,
                                        const std::vector<double>& radii) {
  size_t nr = radii.size();
  std::vector<long long> S_int(nr);
  for (size_t k = 0; k < nr; ++k)
    S_int[k] = static_cast<long long>(std::floor(2.0 * std::cosh(radii[k])));
  long long S = S_int.back();
  const auto twists = make_twists();
  std::vector<EInt> cs = canonical_c_list(S);
  std::vector<long long> first_bucket(nr + 1, 0);

  std::vector<std::vector<long long>> acc;
#pragma omp parallel
  {
    std::vector<long long> local(nr + 1, 0);
#pragma omp for schedule(dynamic, 8)
    for (long long ci = 0; ci < static_cast<long long>(cs.size()); ++ci) {
      const EInt c = cs[ci];
      auto process_row = [&](const EInt& d) {
        long long R2 = c.norm2() + d.norm2();
        if (R2 <= 0 || R2 >= S) return;
        double rho2 = (static_cast<double>(S - R2) - 1.0 / R2) / R2;
        if (rho2 < 0) return;
        EInt u, v;
        EInt g = egcd(d, c, u, v);
        if (g.norm2() != 1) return;
        // invert the unit gcd: g^{-1} = conj(g) (norm 1)
        EInt gi = g.conj();
        EInt a0 = gi * u, b0 = -(gi * v);
        // center of the t-disk: -(a0 conj(c) + b0 conj(d)) / R2
        EInt numE = a0 * c.conj() + b0 * d.conj();
        cplx center = -numE.to_complex() / static_cast<double>(R2);
        uint8_t rc = pack_res(c), rd = pack_res(d);
        for_disk(center, std::sqrt(rho2) + 1e-9, [&](long long t1, long long t2) {
          EInt t{t1, t2};
          EInt at = a0 + t * c, bt = b0 + t * d;
          long long n = at.norm2() + bt.norm2() + R2;
          if (n > S) return;  // frob2 < 2 cosh r means n <= floor(2 cosh r)
          uint8_t ra = pack_res(at), rb = pack_res(bt);
          for (const auto& tw : twists) {
            uint16_t key = static_cast<uint16_t>(
                (tw.inv_mul[ra] << 12) | (tw.inv_mul[rb] << 8) | (tw.mul[rc] << 4) |
                tw.mul[rd]);
            if (table.contains_key(key)) {
              size_t k = std::lower_bound(S_int.begin(), S_int.end(), n) -
                         S_int.begin();
              ++local[k];
            }
          }
        });
      };
      if (c.is_zero()) {
        process_row(EInt{1, 0});
      } else {
        long long rem = S - c.norm2();
        long long d2hi = static_cast<long long>(std::floor(std::sqrt(rem * 4.0 / 3.0))) + 1;
        for (long long d2 = -d2hi; d2 <= d2hi; ++d2) {
          double disc = static_cast<double>(rem) - 0.75 * d2 * d2;
          if (disc < 0) continue;
          double half = std::sqrt(disc);
          long long d1lo = static_cast<long long>(std::ceil(-0.5 * d2 - half - 1e-9));
          long long d1hi = static_cast<long long>(std::floor(-0.5 * d2 + half + 1e-9));
          for (long long d1 = d1lo; d1 <= d1hi; ++d1) process_row(EInt{d1, d2});
        }
      }
    }
#pragma omp critical
    acc.push_back(local);
  }
  for (const auto& local : acc)
    for (size_t k = 0; k <= nr; ++k) first_bucket[k] += local[k];

  std::vector<long long> counts(nr, 0);
  long long running = 0;
  for (size_t k = 0; k < nr; ++k) {
    running += first_bucket[k];
    counts[k] = running / 2 - 1;  // mod sign, identity excluded
  }
  return counts;
}

// --- local enumeration ---------------------------------------------------------

std::vector<LatticeElement> lattice_ball(const CongruenceTable& table, const PointH3& x,
                                         double R) {
  std::vector<LatticeElement> out;
  double zi = x.z;
  long long nmin = std::max(1LL, static_cast<long long>(std::ceil(std::exp(-R) / zi - 1e-9)));
  long long nmax = static_cast<long long>(std::floor(std::exp(R) / zi + 1e-9));
  long long d2cap = static_cast<long long>(std::floor(std::sqrt(nmax * 4.0 / 3.0))) + 1;
  auto sign_canonical = [](const EInt& c, const EInt& d) {
    long long v[4] = {c.a, c.b, d.a, d.b};
    for (long long q : v) {
      if (q > 0) return true;
      if (q < 0) return false;
    }
    return false;  // zero row, never coprime
  };
  for (long long c2 = -d2cap; c2 <= d2cap; ++c2)
    for (long long c1 = -d2cap; c1 <= d2cap; ++c1) {
      EInt c{c1, c2};
      long long nc = c.norm2();
      if (nc > nmax) continue;
      for (long long e2 = -d2cap; e2 <= d2cap; ++e2)
        for (long long e1 = -d2cap; e1 <= d2cap; ++e1) {
          EInt d{e1, e2};
          long long n = nc + d.norm2();
          if (n < nmin || n > nmax || !sign_canonical(c, d)) continue;
          EInt u, v;
          EInt g = egcd(d, c, u, v);
          if (g.norm2() != 1) continue;
          EInt gi = g.conj();
          EInt a0 = gi * u, b0 = -(gi * v);
          double zg = 1.0 / static_cast<double>(n);
          double bound = (std::cosh(R) - 1.0) * 2.0 * zi * zg - (zg - zi) * (zg - zi);
          if (bound < 0) continue;
          EInt numE = a0 * c.conj() + b0 * d.conj();
          cplx w0 = numE.to_complex() / static_cast<double>(n);
          for_disk(x.w - w0, std::sqrt(bound) + 1e-9, [&](long long t1, long long t2) {
            EInt t{t1, t2};
            EMat m{a0 + t * c, b0 + t * d, c, d};
            if (!table.contains(m)) return;
            PointH3 gO{(m.a * m.c.conj() + m.b * m.d.conj()).to_complex() * zg, zg};
            double disp = dist(x, gO);
            if (disp <= R + 1e-12) out.push_back({m, disp});
          });
        }
    }
  std::sort(out.begin(), out.end(), [](const LatticeElement& l, const LatticeElement& r) {
    if (l.displacement != r.displacement) return l.displacement < r.displacement;
    auto key = [](const EMat& m) {
      return std::array<long long, 8>{m.a.a, m.a.b, m.b.a, m.b.b,
                                      m.c.a, m.c.b, m.d.a, m.d.b};
    };
    return key(l.mat) < key(r.mat);
  });
  return out;
}

void sweep_annulus(const CongruenceTable& table, const PointH3& x, const PointH3& y,
                   double rlo, double rhi,
                   const std::function<void(const EMat&, double)>& fn) {
  // For a fixed bottom row (c, d), write Dz = |c wy + d|^2 + |c|^2 zy^2, so
  // z(gamma y) = zy / Dz is row-determined, and shifting the top row by
  // t * (c, d) moves w(gamma y) by exactly t.  The admissible heights bound
  // Dz, the heights bound the rows, and the admissible w offsets form a
  // disk, exactly as in lattice_ball.
  double zx = x.z, zy = y.z;
  double dz_max = zy * std::exp(rhi) / zx + 1e-9;
  double ch = std::cosh(rhi);
  auto sign_canonical = [](const EInt& c, const EInt& d) {
    long long v[4] = {c.a, c.b, d.a, d.b};
    for (long long q : v) {
      if (q > 0) return true;
      if (q < 0) return false;
    }
    return false;
  };
  long long c_cap = static_cast<long long>(std::floor(dz_max / (zy * zy))) + 1;
  long long c2cap = static_cast<long long>(std::floor(std::sqrt(c_cap * 4.0 / 3.0))) + 1;
  for (long long c2 = -c2cap; c2 <= c2cap; ++c2)
    for (long long c1 = -c2cap; c1 <= c2cap; ++c1) {
      EInt c{c1, c2};
      double cz2 = static_cast<double>(c.norm2()) * zy * zy;
      if (cz2 > dz_max) continue;
      double d_rad = std::sqrt(dz_max - cz2);
      cplx d_center = -c.to_complex() * y.w;
      for_disk(d_center, d_rad + 1e-9, [&](long long d1, long long d2) {
        EInt d{d1, d2};
        if (!sign_canonical(c, d)) return;
        cplx cwd = c.to_complex() * y.w + d.to_complex();
        double Dz = std::norm(cwd) + cz2;
        if (Dz <= 0 || Dz > dz_max) return;
        double zg = zy / Dz;
        EInt u, v;
        EInt g = egcd(d, c, u, v);
        if (g.norm2() != 1) return;
        EInt gi = g.conj();
        EInt a0 = gi * u, b0 = -(gi * v);
        double rho2 = 2.0 * zx * zg * ch - (zx - zg) * (zx - zg) - 2.0 * zx * zg;
        if (rho2 < 0) return;
        cplx w0 = ((a0.to_complex() * y.w + b0.to_complex()) * std::conj(cwd) +
                   a0.to_complex() * std::conj(c.to_complex()) * zy * zy) /
                  Dz;
        for_disk(x.w - w0, std::sqrt(rho2) + 1e-9, [&](long long t1, long long t2) {
          EInt t{t1, t2};
          EMat m{a0 + t * c, b0 + t * d, c, d};
          if (!table.contains(m)) return;
          cplx wg = w0 + t.to_complex();
          double co = (std::norm(x.w - wg) + zx * zx + zg * zg) / (2.0 * zx * zg);
          if (co < 1.0) co = 1.0;
          double disp = std::acosh(co);
          if (disp >= rlo - 1e-12 && disp <= rhi + 1e-12) fn(m, disp);
        });
      });
    }
}

std::vector<EInt> eisenstein_disk(cplx center, double radius) {
  std::vector<EInt> out;
  for_disk(center, radius, [&](long long t1, long long t2) {
    EInt t{t1, t2};
    if (std::abs(t.to_complex() - center) <= radius + 1e-12) out.push_back(t);
  });
  return out;
}

std::vector<HoroballSpec> horoballs_reaching(const CongruenceTable& table, cplx center,
                                             double dw_half, double zmin, double zmax,
                                             double h0) {
  std::vector<HoroballSpec> out;
  if (zmin <= 0) throw std::invalid_argument("horoballs_reaching needs zmin > 0");
  double c_cap2 = 1.0 / (zmin * h0);  // diam = 1/(|c|^2 h0) >= zmin
  for (long long c1 = 1; c1 * c1 <= c_cap2 + 1; ++c1)
    for (long long c2 = 0;; ++c2) {
      EInt c{c1, c2};
      double nc = static_cast<double>(c.norm2());
      if (nc > c_cap2 + 1e-9) break;
      double diam = 1.0 / (nc * h0);
      double rad = (dw_half + std::sqrt(diam * zmax) + 1e-9) * std::sqrt(nc);
      for_disk(center * c.to_complex(), rad, [&](long long t1, long long t2) {
        EInt a{t1, t2};
        if (std::abs(a.to_complex() - center * c.to_complex()) > rad + 1e-12) return;
        if (column_extends(table, a, c)) out.push_back({a, c});
      });
    }
  std::sort(out.begin(), out.end(), [](const HoroballSpec& l, const HoroballSpec& r) {
    return std::array<long long, 4>{l.sc.a, l.sc.b, l.fc.a, l.fc.b} <
           std::array<long long, 4>{r.sc.a, r.sc.b, r.fc.a, r.fc.b};
  });
  return out;
}

std::vector<EInt> parabolic_translations(const CongruenceTable& table, double radius) {
  std::vector<EInt> out;
  for (const EInt& m : eisenstein_disk(cplx(0, 0), radius)) {
    EMat g{{1, 0}, m, {0, 0}, {1, 0}};
    if (table.contains(g)) out.push_back(m);
  }
  std::sort(out.begin(), out.end(), [](const EInt& l, const EInt& r) {
    return std::pair(l.a, l.b) < std::pair(r.a, r.b);
  });
  return out;
}

bool column_extends(const CongruenceTable& table, const EInt& a, const EInt& c,
                    EMat* out) {
  EInt u, v;
  EInt g = egcd(a, c, u, v);
  if (g.norm2() != 1) return false;
  EInt gi = g.conj();
  // a*d - b*c = 1 with d = gi*u, b = -gi*v
  EInt d0 = gi * u, b0 = -(gi * v);
  for (long long t1 = 0; t1 < 4; ++t1)
    for (long long t2 = 0; t2 < 4; ++t2) {
      EInt t{t1, t2};
      EMat m{a, b0 + t * a, c, d0 + t * c};
      if (table.contains(m)) {
        if (out) *out = m;
        return true;
      }
    }
  return false;
}

std::vector<HoroballSpec> horoballs_near(const CongruenceTable& table, cplx center,
                                         double radius, double min_diam) {
  std::vector<HoroballSpec> out;
  double c_cap2 = 1.0 / min_diam;
  for (long long c1 = 1; c1 * c1 <= c_cap2 + 1; ++c1)
    for (long long c2 = 0; ; ++c2) {
      EInt c{c1, c2};
      if (static_cast<double>(c.norm2()) > c_cap2 + 1e-9) break;
      double nc = static_cast<double>(c.norm2());
      for (const EInt& a : eisenstein_disk(center * c.to_complex(),
                                           radius * std::sqrt(nc) + 1e-9)) {
        if (column_extends(table, a, c)) out.push_back({a, c});
      }
    }
  std::sort(out.begin(), out.end(), [](const HoroballSpec& l, const HoroballSpec& r) {
    return std::array<long long, 4>{l.sc.a, l.sc.b, l.fc.a, l.fc.b} <
           std::array<long long, 4>{r.sc.a, r.sc.b, r.fc.a, r.fc.b};
  });
  return out;
}

}  // namespace h3
