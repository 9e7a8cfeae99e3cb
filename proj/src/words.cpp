#include "h3kit/words.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>

namespace h3 {

// --- basic word algebra ---------------------------------------------------------

GroupWord make_word(const CuspedManifold& m, const std::string& letters) {
  GroupWord g;
  g.letters = free_reduce(letters);
  g.iso = evaluate_word(m, g.letters);
  return g;
}

GroupWord concat(const CuspedManifold& m, const GroupWord& a, const GroupWord& b) {
  GroupWord g;
  g.letters = free_reduce(a.letters + b.letters);
  g.iso = a.iso * b.iso;
  (void)m;
  return g;
}

namespace {

char swap_case(char c) {
  return std::isupper(static_cast<unsigned char>(c))
             ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
             : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

std::string invert_letters(const std::string& w) {
  std::string out(w.rbegin(), w.rend());
  for (char& c : out) c = swap_case(c);
  return out;
}

// Deterministic counter-based generator, uniform in [0, 1).
double unit_rand(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (i + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return (x >> 11) * 0x1.0p-53;
}

}  // namespace

GroupWord inverse_word(const CuspedManifold& m, const GroupWord& g) {
  GroupWord out;
  out.letters = invert_letters(g.letters);
  out.iso = g.iso.inverse();
  (void)m;
  return out;
}

double displacement(const CuspedManifold& m, const Isometry& g) {
  return dist(m.basepoint, apply(g, m.basepoint));
}

bool in_B(const CuspedManifold& m, const Isometry& g, double r,
          const std::optional<Isometry>& base) {
  if (g.max_entry_diff(Isometry::identity()) < 1e-10) return false;
  if (base) {
    Isometry h = base->inverse() * g * (*base);
    return displacement(m, h) <= r;
  }
  return displacement(m, g) <= r;
}

// --- reduction constants ----------------------------------------------------------

namespace {

// Translation amount of a parabolic fixing infinity.
cplx parabolic_shift(const Isometry& s) { return s.b / s.d; }

// Conjugator sending the cusp's fixed point to infinity.
Isometry cusp_to_infinity(const CuspRecord& c) {
  if (c.fixed_point.inf) return Isometry::identity();
  return Isometry(cplx(0, 0), cplx(-1, 0), cplx(1, 0), -c.fixed_point.w);
}

}  // namespace

ReductionConstants reduction_constants(const CuspedManifold& m, int samples,
                                       std::uint64_t seed) {
  ReductionConstants rc;

  // D1: the diameter of every cusp cross-section at the height-0 horosphere
  // is at most half the sum of the stabilizer translation lengths there.
  double tau_scale = 1.0;
  for (const CuspRecord& c : m.cusps) {
    Isometry J = cusp_to_infinity(c);
    Horoball hb = (c.fixed_point.inf ? Horoball::at_infinity(c.horoball_size)
                                     : Horoball::at(c.fixed_point.w, c.horoball_size))
                      .transformed(J);
    double h0 = hb.size();
    double t = 0;
    for (const Isometry& s : c.stabilizer) {
      cplx tau = parabolic_shift(J * s * J.inverse());
      t += std::abs(tau);
      tau_scale = std::max(tau_scale, std::abs(tau) / h0);
    }
    rc.D1 = std::max(rc.D1, t / (2.0 * h0));
  }

  // D2: sampled bound on the diameter of the thick part, twice the largest
  // observed distance from a thick sample to the basepoint orbit.
  std::vector<PointH3> orbit_pts;
  if (!m.exact) {
    for (const OrbitElement& e : orbit_ball(m, 5.0, 8.0))
      orbit_pts.push_back(apply(e.iso, m.basepoint));
    orbit_pts.push_back(m.basepoint);
  }
  double worst = 0;
  for (int i = 0; i < samples; ++i) {
    PointH3 p;
    p.w = cplx((2 * unit_rand(seed, 3 * i) - 1) * tau_scale,
               (2 * unit_rand(seed, 3 * i + 1) - 1) * tau_scale);
    p.z = std::exp(std::log(0.1) * unit_rand(seed, 3 * i + 2));  // in [0.1, 1]
    if (height_point(m, p) > 1e-9) continue;
    double best = dist(p, m.basepoint);
    if (m.exact) {
      for (double r = 2.0; best > r && r <= 6.0; r += 1.0)
        for (const LatticeElement& e : lattice_ball(*m.exact, p, r))
          best = std::min(best, e.displacement);
    } else {
      for (const PointH3& q : orbit_pts) best = std::min(best, dist(p, q));
    }
    worst = std::max(worst, best);
  }
  rc.D2 = 2.0 * worst + 0.5;

  rc.D3 = std::max(0.5 * std::log(6.0), std::log(1.0 + 5.0 * rc.D1 * rc.D1));
  rc.D = 2.0 * (rc.D2 + rc.D3) + 2.0;
  return rc;
}

// --- reduction ---------------------------------------------------------------------

namespace {

struct Candidate {
  GroupWord w;
  double score;  // max of the two factor displacements
  double left, right;
};

void push_candidate(const CuspedManifold& m, const GroupWord& g, const GroupWord& w,
                    std::vector<Candidate>& pool) {
  if (w.letters.empty()) return;
  PointH3 O = m.basepoint;
  double dl = dist(O, apply(w.iso, O));
  double dr = dist(O, apply(w.iso.inverse() * g.iso, O));
  pool.push_back({w, std::max(dl, dr), dl, dr});
}

}  // namespace

ReduceResult reduce_element(const CuspedManifold& m, const ReductionConstants& rc,
                            const GroupWord& g, int search_depth) {
  ReduceResult out;
  out.len_g = displacement(m, g.iso);
  if (out.len_g < rc.D) {
    out.left = g;
    out.right = make_word(m, "");
    out.note = "below reduction threshold";
    return out;
  }
  if (g.letters.empty())
    throw std::invalid_argument("reduce_element needs word data");

  PointH3 O = m.basepoint;
  PointH3 gO = apply(g.iso, O);

  // Prefix subwords: their orbit points walk from O to gO.
  std::vector<GroupWord> prefixes;
  {
    Isometry cur = Isometry::identity();
    std::string letters;
    for (char c : g.letters) {
      letters.push_back(c);
      cur = cur * evaluate_word(m, std::string(1, c));
      prefixes.push_back({letters, cur});
    }
  }

  std::vector<Candidate> pool;
  for (const GroupWord& w : prefixes) push_candidate(m, g, w, pool);

  // Deep excursion: split at the peak, augmenting the nearest prefix by
  // cusp-stabilizer translations (the candidates of the cusp case).
  // Only peaks at or above the split threshold D3 matter; the depth filter
  // keeps the horoball enumeration tractable for long elements, whose far
  // endpoint sits at a z coordinate of order e^{-|g|}.
  std::vector<Excursion> exc = excursions(m, O, gO, rc.D3);
  double peak = 0, peak_param = 0;
  for (const Excursion& e : exc)
    if (e.peak_height > peak) peak = e.peak_height, peak_param = e.peak_param;
  if (peak >= rc.D3 && !m.cusps.empty()) {
    PointH3 P = point_along(O, gO, peak_param);
    std::size_t best_i = 0;
    double best_d = 1e300;
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      double d = dist(apply(prefixes[i].iso, O), P);
      if (d < best_d) best_d = d, best_i = i;
    }
    const GroupWord& base = prefixes[best_i];
    int J = std::min(6, static_cast<int>(std::ceil(5.0 * rc.D1)));
    for (const CuspRecord& c : m.cusps) {
      for (int j = -J; j <= J; ++j) {
        for (int k = -J; k <= J; ++k) {
          if (j == 0 && k == 0) continue;
          std::string t;
          std::string s0 = free_reduce(c.stabilizer_words[0]);
          std::string s1 = free_reduce(c.stabilizer_words[1]);
          for (int r = 0; r < std::abs(j); ++r) t += (j > 0 ? s0 : invert_letters(s0));
          for (int r = 0; r < std::abs(k); ++r) t += (k > 0 ? s1 : invert_letters(s1));
          push_candidate(m, g, concat(m, base, make_word(m, t)), pool);
        }
      }
    }
  }

  std::sort(pool.begin(), pool.end(),
            [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
  int tried = 0;
  for (const Candidate& c : pool) {
    if (tried++ >= search_depth) break;
    if (c.left <= out.len_g - 0.5 && c.right <= out.len_g - 0.5) {
      out.reduced = true;
      out.left = c.w;
      out.right = concat(m, inverse_word(m, c.w), g);
      out.len_left = c.left;
      out.len_right = c.right;
      return out;
    }
  }
  throw std::runtime_error("irreducible at depth");
}

ExpressResult express_in_ball(const CuspedManifold& m, const ReductionConstants& rc,
                              const GroupWord& g, double K, int search_depth) {
  if (K < rc.D)
    throw std::invalid_argument("express_in_ball needs K at least the reduction threshold");
  ExpressResult out;
  double len0 = displacement(m, g.iso);
  int max_depth = static_cast<int>(std::ceil(2.0 * (len0 - K))) + 2;

  std::function<void(const GroupWord&, int)> go = [&](const GroupWord& h, int depth) {
    if (displacement(m, h.iso) <= K) {
      out.factors.push_back(h);
      return;
    }
    if (depth > max_depth) throw std::runtime_error("irreducible at depth");
    ReduceResult r = reduce_element(m, rc, h, search_depth);
    if (!r.reduced) {  // |h| in (K, D): still a single ball element when K >= D
      out.factors.push_back(h);
      return;
    }
    ++out.splits;
    go(r.left, depth + 1);
    go(r.right, depth + 1);
  };
  go(g, 0);
  return out;
}

// --- abelianization ------------------------------------------------------------------

namespace {

// Smith normal form of B (n x m), tracking row operations: returns U (n x n,
// unimodular) and overwrites B with U * B_original * V for some unimodular V.
void smith(std::vector<std::vector<long long>>& B, std::vector<std::vector<long long>>& U) {
  std::size_t n = B.size();
  std::size_t mm = n ? B[0].size() : 0;
  U.assign(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) U[i][i] = 1;

  std::size_t k = 0;
  while (k < n && k < mm) {
    // Find a nonzero pivot of minimal magnitude in the trailing block.
    std::size_t pi = k, pj = k;
    long long best = 0;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < mm; ++j)
        if (B[i][j] != 0 && (best == 0 || std::llabs(B[i][j]) < best)) {
          best = std::llabs(B[i][j]);
          pi = i;
          pj = j;
        }
    if (best == 0) break;
    std::swap(B[pi], B[k]);
    std::swap(U[pi], U[k]);
    for (auto& row : B) std::swap(row[pj], row[k]);

    bool clean = true;
    for (std::size_t i = k + 1; i < n; ++i) {
      long long q = B[i][k] / B[k][k];
      if (q != 0) {
        for (std::size_t j = 0; j < mm; ++j) B[i][j] -= q * B[k][j];
        for (std::size_t j = 0; j < n; ++j) U[i][j] -= q * U[k][j];
      }
      if (B[i][k] != 0) clean = false;
    }
    for (std::size_t j = k + 1; j < mm; ++j) {
      long long q = B[k][j] / B[k][k];
      if (q != 0)
        for (std::size_t i = 0; i < n; ++i) B[i][j] -= q * B[i][k];
      if (B[k][j] != 0) clean = false;
    }
    if (!clean) continue;  // re-pivot on the smaller remainders

    // Divisibility fix-up: fold any non-multiple into the pivot column.
    bool redo = false;
    for (std::size_t i = k + 1; i < n && !redo; ++i)
      for (std::size_t j = k + 1; j < mm && !redo; ++j)
        if (B[i][j] % B[k][k] != 0) {
          for (std::size_t r = 0; r < n; ++r) B[r][k] += B[r][j];
          redo = true;
        }
    if (redo) continue;
    if (B[k][k] < 0) {
      for (std::size_t j = 0; j < mm; ++j) B[k][j] = -B[k][j];
      for (std::size_t j = 0; j < n; ++j) U[k][j] = -U[k][j];
    }
    ++k;
  }
}

}  // namespace

std::vector<long long> Abelianization::reduce(const std::vector<long long>& x) const {
  std::size_t n = U.size();
  if (x.size() != n) throw std::invalid_argument("exponent vector has wrong length");
  std::vector<long long> y(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) y[i] += U[i][j] * x[j];
  std::vector<long long> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (diag[i] == 1) continue;
    if (diag[i] == 0)
      out.push_back(y[i]);
    else
      out.push_back(((y[i] % diag[i]) + diag[i]) % diag[i]);
  }
  return out;
}

Abelianization abelianize(const CuspedManifold& m) {
  std::size_t n = m.gen_names.size();
  std::size_t r = m.relators.size();
  // B: columns are relator exponent vectors; the quotient is Z^n / im(B).
  std::vector<std::vector<long long>> B(n, std::vector<long long>(std::max<std::size_t>(r, 1), 0));
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<long long> v = exponent_vector(m, m.relators[j]);
    for (std::size_t i = 0; i < n; ++i) B[i][j] = v[i];
  }
  Abelianization ab;
  smith(B, ab.U);
  ab.diag.assign(n, 0);
  for (std::size_t i = 0; i < n && i < B[i].size(); ++i) ab.diag[i] = std::llabs(B[i][i]);
  for (std::size_t i = 0; i < n; ++i) {
    if (ab.diag[i] == 0)
      ++ab.free_rank;
    else if (ab.diag[i] > 1)
      ab.torsion.push_back(ab.diag[i]);
  }
  std::sort(ab.torsion.begin(), ab.torsion.end());
  return ab;
}

Abelianization h1_so(const CuspedManifold& m) {
  Abelianization ab = abelianize(m);
  ab.torsion.insert(ab.torsion.begin(), 2);  // spin factor
  return ab;
}

// --- sharpness ----------------------------------------------------------------------

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::max(-1.0, std::min(1.0, c)));
}

}  // namespace

bool is_delta_sharp(const CuspedManifold& m, const Isometry& g, double delta,
                    const TangentVector& base) {
  PointH3 O = base.p;
  PointH3 gO = apply(g, O);
  if (dist(O, gO) < 1e-10) return false;
  Vec3 t = base.dir.normalized();
  Vec3 v_out = dir_between(O, gO);
  Vec3 v_back = apply_dir(g.inverse(), gO, dir_between(gO, O));
  Vec3 neg_t{-t.x, -t.y, -t.z};
  (void)m;
  return angle_between(v_out, t) < 100.0 * delta &&
         angle_between(v_back, neg_t) < 100.0 * delta;
}

// --- five-term expression --------------------------------------------------------------

namespace {

FramedSegment transport(const Isometry& g, const FramedSegment& s) {
  FramedSegment out = s;
  out.start.iso = g * s.start.iso;
  return out;
}

}  // namespace

Psi1Result psi1_expression(const CuspedManifold& m, const SpinWord& g, const Psi1Aux& aux) {
  (void)m;
  const auto& legs = aux.tripod.legs;
  for (int i = 1; i < 3; ++i)
    if (dist(initial_point(legs[0]), initial_point(legs[i])) > 1e-6)
      throw std::invalid_argument("tripod legs must share their center");

  const Isometry& G = g.g.iso;
  Psi1Result out;
  out.expression.set_conjugators({G, G * G});

  std::array<std::array<int, 2>, 3> pairs =
      aux.tripod.chirality ? std::array<std::array<int, 2>, 3>{{{0, 1}, {1, 2}, {2, 0}}}
                           : std::array<std::array<int, 2>, 3>{{{0, 2}, {2, 1}, {1, 0}}};
  auto check = [&](const char* name, const Isometry& h, long long coeff) {
    out.expression.add(make_curve(h), coeff);
    AssemblyCheck chk;
    chk.what = std::string(name) + " loxodromic";
    chk.ok = classify(h) == IsoClass::loxodromic;
    chk.value = chk.ok ? complex_length(h).re : 0.0;
    out.report.push_back(chk);
  };
  const char* names[3] = {"[s a01]", "[s a12]", "[s a20]"};
  for (int k = 0; k < 3; ++k) {
    Isometry T = G * transporter(legs[pairs[k][0]]).inverse() * transporter(legs[pairs[k][1]]);
    check(names[k], T, +1);
  }
  check("[s b]", G * transporter(aux.b), -1);
  check("[s b-bar]", G * transporter(aux.b).inverse(), -1);
  return out;
}

Psi1Aux psi1_paired_aux(const CuspedManifold& m, const SpinWord& g, const Psi1Aux& aux) {
  (void)m;
  Isometry Gi = g.g.iso.inverse();
  Psi1Aux out;
  for (int i = 0; i < 3; ++i) out.tripod.legs[i] = transport(Gi, aux.tripod.legs[i]);
  out.tripod.chirality = !aux.tripod.chirality;
  out.b = transport(Gi, aux.b);
  return out;
}

}  // namespace h3
