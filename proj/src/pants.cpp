#include "h3kit/pants.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "h3kit/words.hpp"

namespace h3 {

double complex_length_dist(ComplexLength l, double target) {
  return std::hypot(l.re - target, wrap_angle(l.im));
}

// --- cyclic word canonicalization -----------------------------------------------

namespace {

char swap_case(char c) {
  return std::isupper(static_cast<unsigned char>(c))
             ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
             : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

// Normalizes "a'" inverse marks into uppercase letters.
std::string to_internal(const std::string& word) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    char c = word[i];
    if (c == ' ') continue;
    if (c == '\'') throw std::invalid_argument("dangling inverse mark in word");
    if (i + 1 < word.size() && word[i + 1] == '\'') {
      out.push_back(swap_case(c));
      ++i;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string cyclic_reduce(std::string w) {
  std::size_t b = 0, e = w.size();
  while (e > b + 1 && w[b] == swap_case(w[e - 1])) ++b, --e;
  return w.substr(b, e - b);
}

std::string min_rotation(const std::string& w) {
  if (w.empty()) return w;
  std::string best = w;
  std::string cur = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  return best;
}

std::string invert_letters(const std::string& w) {
  std::string out(w.rbegin(), w.rend());
  for (char& c : out) c = swap_case(c);
  return out;
}

}  // namespace

std::string free_reduce(const std::string& letters) {
  std::string out;
  for (char c : to_internal(letters)) {
    if (!out.empty() && out.back() == swap_case(c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

namespace {

// Canonical form of the cyclic word in its own orientation.
std::string canon_cyclic(const std::string& word) {
  return min_rotation(cyclic_reduce(free_reduce(word)));
}

}  // namespace

GoodCurveClass make_curve(const Isometry& rep, std::string word) {
  GoodCurveClass c;
  c.rep = rep;
  if (classify(rep) == IsoClass::loxodromic) c.clen = complex_length(rep);
  if (!word.empty()) c.word = canon_cyclic(word);
  return c;
}

// --- formal multicurves ----------------------------------------------------------

namespace {

bool iso_close(const Isometry& a, const Isometry& b, double tol = 1e-7) {
  return a.max_entry_diff(b) < tol * (1.0 + std::sqrt(a.frob2()));
}

}  // namespace

int FormalMulticurve::match(const GoodCurveClass& a, const GoodCurveClass& b) const {
  if (!a.word.empty() && !b.word.empty()) {
    if (a.word == b.word) return 1;
    if (a.word == canon_cyclic(invert_letters(b.word))) return -1;
    // Words may still be conjugate through relators; fall through to the
    // matrix test only when the complex lengths agree.
    if (std::fabs(a.clen.re - b.clen.re) > 1e-6) return 0;
  }
  Isometry binv = b.rep.inverse();
  auto try_conj = [&](const Isometry& x) -> int {
    Isometry xb = x * b.rep * x.inverse();
    if (iso_close(xb, a.rep)) return 1;
    Isometry xbi = x * binv * x.inverse();
    if (iso_close(xbi, a.rep)) return -1;
    return 0;
  };
  if (int r = try_conj(Isometry::identity())) return r;
  for (const Isometry& x : conjugators_) {
    if (int r = try_conj(x)) return r;
    if (int r = try_conj(x.inverse())) return r;
  }
  return 0;
}

void FormalMulticurve::add(const GoodCurveClass& c, long long k) {
  if (k == 0) return;
  for (Entry& e : entries_) {
    int s = match(e.curve, c);
    if (s != 0) {
      e.coeff += s * k;
      if (e.curve.word.empty() && !c.word.empty()) {
        e.curve.word = s > 0 ? c.word : canon_cyclic(invert_letters(c.word));
      }
      return;
    }
  }
  entries_.push_back({c, k});
}

void FormalMulticurve::add(const FormalMulticurve& other, long long k) {
  for (const Entry& e : other.entries_) add(e.curve, e.coeff * k);
}

bool FormalMulticurve::zero() const {
  for (const Entry& e : entries_)
    if (e.coeff != 0) return false;
  return true;
}

long long FormalMulticurve::coeff_of(const GoodCurveClass& c) const {
  for (const Entry& e : entries_) {
    int s = match(e.curve, c);
    if (s != 0) return s * e.coeff;
  }
  return 0;
}

std::vector<long long> FormalMulticurve::signature() const {
  std::vector<long long> out;
  for (const Entry& e : entries_)
    if (e.coeff != 0) out.push_back(e.coeff);
  std::sort(out.begin(), out.end());
  return out;
}

// --- half-lengths ----------------------------------------------------------------

HalfLengths half_lengths(const PantsRep& p) {
  std::array<Isometry, 3> cuff = {p.u, p.v, p.third()};
  HalfLengths out;
  std::array<Geodesic, 3> ax;
  for (int i = 0; i < 3; ++i) {
    if (classify(cuff[i]) != IsoClass::loxodromic)
      throw std::runtime_error("degenerate pants: cuff not loxodromic");
    out.l[i] = complex_length(cuff[i]);
    ax[i] = axis(cuff[i]);
  }
  std::array<std::array<Seam, 3>, 3> seam;  // seam[i][j] between axes i and j
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      Seam s = common_perpendicular(ax[i], ax[j]);
      if (s.cdist.re < 1e-9)
        throw std::runtime_error("degenerate pants: cuff axes meet");
      seam[i][j] = s;
      seam[j][i] = {s.foot2, s.foot1, s.cdist};
    }
  }
  for (int i = 0; i < 3; ++i) {
    int ja = (i + 1) % 3, jb = (i + 2) % 3;
    const Seam& sa = seam[i][ja];
    const Seam& sb = seam[i][jb];
    TangentVector va{sa.foot1, dir_between(sa.foot1, sa.foot2)};
    TangentVector vb{sb.foot1, dir_between(sb.foot1, sb.foot2)};
    ComplexLength hl = complex_distance_along(ax[i], va, vb);
    if (hl.re < 0) hl = {-hl.re, wrap_angle(-hl.im)};
    out.hl[i] = hl;
  }
  return out;
}

bool is_good_curve(const Isometry& g, double R, double eps) {
  if (classify(g) != IsoClass::loxodromic) return false;
  return complex_length_dist(complex_length(g), 2 * R) < 2 * eps;
}

bool is_good_pants(const PantsRep& p, double R, double eps) {
  HalfLengths h;
  try {
    h = half_lengths(p);
  } catch (const std::runtime_error&) {
    return false;
  }
  for (int i = 0; i < 3; ++i)
    if (complex_length_dist(h.hl[i], R) >= eps) return false;
  return true;
}

// --- panted ledgers ----------------------------------------------------------------

PantsRep reverse_pants(const PantsRep& p) {
  PantsRep q;
  q.u = p.v.inverse();
  q.v = p.u.inverse();
  if (!p.u_word.empty() && !p.v_word.empty()) {
    q.u_word = invert_letters(to_internal(p.v_word));
    q.v_word = invert_letters(to_internal(p.u_word));
  }
  return q;
}

namespace {

// +1 when q equals a cyclic rotation of p's cuff triple, -1 for a rotation
// of the reversed pants, 0 otherwise.
int pants_match(const PantsRep& p, const PantsRep& q) {
  auto rotations = [](const PantsRep& r) {
    Isometry z = r.third();
    return std::array<std::pair<Isometry, Isometry>, 3>{
        {{r.u, r.v}, {r.v, z}, {z, r.u}}};
  };
  for (const auto& [u, v] : rotations(p))
    if (iso_close(u, q.u) && iso_close(v, q.v)) return 1;
  for (const auto& [u, v] : rotations(reverse_pants(p)))
    if (iso_close(u, q.u) && iso_close(v, q.v)) return -1;
  return 0;
}

}  // namespace

void PantedLedger::add(const PantsRep& p, long long k) {
  if (k == 0) return;
  for (Entry& e : entries) {
    int s = pants_match(e.pants, p);
    if (s != 0) {
      e.coeff += s * k;
      return;
    }
  }
  entries.push_back({p, k});
}

FormalMulticurve boundary(const PantedLedger& ledger) {
  FormalMulticurve out;
  for (const auto& e : ledger.entries) {
    if (e.coeff == 0) continue;
    std::string wu = e.pants.u_word, wv = e.pants.v_word, wz;
    if (!wu.empty() && !wv.empty())
      wz = invert_letters(free_reduce(wu + wv));
    out.add(make_curve(e.pants.u, wu), e.coeff);
    out.add(make_curve(e.pants.v, wv), e.coeff);
    out.add(make_curve(e.pants.third(), wz), e.coeff);
  }
  return out;
}

// --- enumeration --------------------------------------------------------------------

CurveCensus enumerate_good_curves(const CuspedManifold& m, double R, double eps,
                                  double h_cap, double radius_cap) {
  CurveCensus out;
  double want = 2 * R + 2 * eps + 2.0;
  out.radius_used = std::min(want, radius_cap);
  out.horizon_certified = want <= radius_cap + 1e-12;

  std::vector<OrbitElement> orbit = orbit_ball(m, out.radius_used, out.radius_used + 1.0);
  struct Cand {
    GoodCurveClass curve;
    std::string key;  // orientation-free canonical word
  };
  std::vector<Cand> cands;
  for (const OrbitElement& e : orbit) {
    if (classify(e.iso) != IsoClass::loxodromic) continue;
    if (complex_length_dist(complex_length(e.iso), 2 * R) >= 2 * eps) continue;
    std::string cw = canon_cyclic(e.word);
    std::string ci = canon_cyclic(invert_letters(to_internal(e.word)));
    bool forward = cw <= ci;
    GoodCurveClass c = make_curve(forward ? e.iso : e.iso.inverse(),
                                  forward ? cw : ci);
    std::string key = forward ? cw : ci;
    bool dup = false;
    for (const Cand& prev : cands)
      if (prev.key == key) {
        dup = true;
        break;
      }
    if (!dup) cands.push_back({c, key});
  }

  // Cyclic-word dedup misses conjugacies through relators: merge candidates
  // of equal complex length when a bounded conjugator search certifies them
  // conjugate (directly or reversed).
  std::vector<OrbitElement> conj = orbit_ball(m, 4.0, 8.0);
  std::vector<bool> drop(cands.size(), false);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (drop[i]) continue;
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      if (drop[j]) continue;
      const Isometry& gi = cands[i].curve.rep;
      const Isometry& gj = cands[j].curve.rep;
      if (std::fabs(cands[i].curve.clen.re - cands[j].curve.clen.re) > 1e-6) continue;
      if (circle_dist(cands[i].curve.clen.im, cands[j].curve.clen.im) > 1e-6 &&
          circle_dist(cands[i].curve.clen.im, -cands[j].curve.clen.im) > 1e-6)
        continue;
      Isometry gji = gj.inverse();
      for (const OrbitElement& x : conj) {
        Isometry c1 = x.iso * gj * x.iso.inverse();
        Isometry c2 = x.iso * gji * x.iso.inverse();
        if (iso_close(c1, gi) || iso_close(c2, gi)) {
          drop[j] = true;
          break;
        }
      }
    }
  }

  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (drop[i]) continue;
    GoodCurveClass c = cands[i].curve;
    c.height = geodesic_rep(m, c.rep).height;
    if (c.height <= h_cap) out.curves.push_back(c);
  }
  std::sort(out.curves.begin(), out.curves.end(),
            [](const GoodCurveClass& a, const GoodCurveClass& b) {
              return a.word < b.word;
            });
  return out;
}

// --- assembly ------------------------------------------------------------------------

Isometry transporter(const FramedSegment& s) {
  return end_frame(s).iso * s.start.iso.inverse();
}

namespace {

void require_match(const PointH3& a, const PointH3& b, const char* what) {
  if (dist(a, b) > 1e-6)
    throw std::invalid_argument(std::string("segment endpoints do not match: ") + what);
}

AssemblyCheck goodness_check(const char* name, const Isometry& g, double R, double eps) {
  AssemblyCheck chk;
  chk.what = std::string(name) + " goodness";
  chk.bound = 2 * eps;
  if (classify(g) != IsoClass::loxodromic) {
    chk.value = 1e300;
    chk.ok = false;
  } else {
    chk.value = complex_length_dist(complex_length(g), 2 * R);
    chk.ok = chk.value < chk.bound;
  }
  return chk;
}

}  // namespace

SplitResult split_assemble(const FramedSegment& s, const FramedSegment& sp,
                           const FramedSegment& mconn, double R, double eps,
                           const CuspedManifold* m, double h_cap) {
  require_match(terminal_point(s), initial_point(sp), "s end vs s' start");
  require_match(terminal_point(sp), initial_point(s), "s' end vs s start");
  require_match(initial_point(mconn), terminal_point(s), "m start vs s end");
  require_match(terminal_point(mconn), initial_point(s), "m end vs s start");

  Isometry Cs = transporter(s), Csp = transporter(sp), Cm = transporter(mconn);
  Isometry g1 = Csp * Cs;          // [ss']
  Isometry g2 = Cm * Cs;           // [sm]
  Isometry g3 = Csp * Cm.inverse();  // [m-bar s']

  SplitResult out;
  out.pants.u = g2.inverse();
  out.pants.v = g3.inverse();
  out.cuffs = {make_curve(g1), make_curve(g2), make_curve(g3)};
  out.signs = {+1, -1, -1};

  out.report.push_back(goodness_check("[ss']", g1, R, eps));
  out.report.push_back(goodness_check("[sm]", g2, R, eps));
  out.report.push_back(goodness_check("[m-bar s']", g3, R, eps));
  if (m != nullptr) {
    const Isometry* gs[3] = {&g1, &g2, &g3};
    const char* names[3] = {"[ss']", "[sm]", "[m-bar s']"};
    for (int i = 0; i < 3; ++i) {
      AssemblyCheck chk;
      chk.what = std::string(names[i]) + " height";
      chk.bound = h_cap;
      try {
        chk.value = geodesic_rep(*m, *gs[i]).height;
        chk.ok = chk.value <= h_cap;
      } catch (const std::runtime_error&) {
        chk.value = 1e300;
        chk.ok = false;
      }
      out.report.push_back(chk);
    }
  }
  for (const AssemblyCheck& c : out.report) out.all_good = out.all_good && c.ok;
  return out;
}

SwapResult swap_assemble_step1(const FramedSegment& a, const FramedSegment& b,
                               const FramedSegment& ap, const FramedSegment& bp,
                               const FramedSegment& mconn, double R, double eps) {
  SwapResult out;
  struct Piece {
    const FramedSegment *s, *sp;
    long long sign;
    const char* name;
  };
  const Piece pieces[4] = {{&a, &b, +1, "split(a,b)"},
                           {&ap, &bp, +1, "split(a',b')"},
                           {&a, &bp, -1, "split(a,b')"},
                           {&ap, &b, -1, "split(a',b)"}};
  for (const Piece& pc : pieces) {
    SplitResult sr = split_assemble(*pc.s, *pc.sp, mconn, R, eps);
    out.ledger.add(sr.pants, pc.sign);
    for (AssemblyCheck chk : sr.report) {
      chk.what = std::string(pc.name) + " " + chk.what;
      out.report.push_back(chk);
    }
  }
  out.bdry = boundary(out.ledger);
  return out;
}

// --- rewrites ------------------------------------------------------------------------

RewriteResult ledger_rewrite(RewriteKind kind, const FormalMulticurve& in,
                             const std::vector<GoodCurveClass>& operands) {
  RewriteResult out;
  out.curves = in;
  auto require = [&](const GoodCurveClass& c, long long sign, const char* role) {
    long long k = out.curves.coeff_of(c);
    if (sign > 0 ? k < 1 : k > -1)
      throw std::runtime_error(std::string("rewrite operand not present with required sign: ") + role);
  };
  switch (kind) {
    case RewriteKind::swap: {
      if (operands.size() != 4)
        throw std::invalid_argument("swap rewrite takes operands [ab], [a'b'], [ab'], [a'b]");
      require(operands[0], +1, "[ab]");
      require(operands[1], +1, "[a'b']");
      out.curves.add(operands[0], -1);
      out.curves.add(operands[1], -1);
      out.curves.add(operands[2], +1);
      out.curves.add(operands[3], +1);
      out.certificate = "swap: [ab]+[a'b'] -> [ab']+[a'b] (four-pants relation)";
      break;
    }
    case RewriteKind::rotation: {
      if (operands.size() != 3)
        throw std::invalid_argument("rotation rewrite takes three cuff operands");
      for (const auto& c : operands) require(c, +1, "rotation cuff");
      for (const auto& c : operands) out.curves.add(c, -1);
      out.certificate = "rotation: three cuffs bound a rotation pants, sum removed";
      break;
    }
    case RewriteKind::antirotation: {
      if (operands.size() != 3)
        throw std::invalid_argument("antirotation rewrite takes three cuff operands");
      for (const auto& c : operands) require(c, -1, "antirotation cuff");
      for (const auto& c : operands) out.curves.add(c, +1);
      out.certificate = "antirotation: reversed rotation relation, sum restored";
      break;
    }
  }
  return out;
}

// --- homology image --------------------------------------------------------------------

std::vector<long long> exponent_vector(const CuspedManifold& m, const std::string& word) {
  std::vector<long long> v(m.gen_names.size(), 0);
  for (char c : free_reduce(word)) {
    bool inv = std::isupper(static_cast<unsigned char>(c)) != 0;
    char g = inv ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : c;
    int idx = m.gen_index(g);
    if (idx < 0) throw std::invalid_argument(std::string("unknown generator: ") + g);
    v[idx] += inv ? -1 : +1;
  }
  return v;
}

std::vector<long long> phi_h1(const GoodCurveClass& curve, const CuspedManifold& m) {
  if (curve.word.empty())
    throw std::invalid_argument("phi_h1 requires a curve with word data");
  return abelianize(m).reduce(exponent_vector(m, curve.word));
}

std::vector<long long> phi_h1(const FormalMulticurve& mc, const CuspedManifold& m) {
  std::vector<long long> total(m.gen_names.size(), 0);
  for (const auto& e : mc.entries()) {
    if (e.coeff == 0) continue;
    if (e.curve.word.empty())
      throw std::invalid_argument("phi_h1 requires word data on every curve");
    std::vector<long long> v = exponent_vector(m, e.curve.word);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += e.coeff * v[i];
  }
  return abelianize(m).reduce(total);
}

}  // namespace h3
