#include "h3kit/cusps.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace h3 {

namespace {

using nlohmann::json;

constexpr double kDedupTol = 1e-8;

// Canonical phase for a horoball vector: beta real positive, or alpha real
// positive when beta vanishes.  Needed because v and e^{i phi} v describe
// the same ball.
Horoball phase_canonical(const Horoball& h) {
  cplx pivot = (std::abs(h.beta) > 1e-14 * (std::abs(h.alpha) + 1.0)) ? h.beta : h.alpha;
  cplx u = pivot / std::abs(pivot);
  return {h.alpha / u, h.beta / u};
}

struct HoroballKey {
  long long v[4];
  bool operator==(const HoroballKey& o) const {
    return std::equal(v, v + 4, o.v);
  }
};

struct HoroballKeyHash {
  size_t operator()(const HoroballKey& k) const {
    size_t h = 1469598103934665603ull;
    for (long long x : k.v) {
      h ^= static_cast<size_t>(x);
      h *= 1099511628211ull;
    }
    return h;
  }
};

HoroballKey horoball_key(const Horoball& h) {
  Horoball c = phase_canonical(h);
  auto q = [](double x) { return llround(x * 1e6); };
  return {{q(c.alpha.real()), q(c.alpha.imag()), q(c.beta.real()), q(c.beta.imag())}};
}

// Mutual penetration of two horoballs: -2 ln |alpha beta' - beta alpha'|.
// Nonpositive exactly when the balls are disjoint (0 at tangency).
double mutual_penetration(const Horoball& x, const Horoball& y) {
  return -2.0 * std::log(std::abs(x.alpha * y.beta - x.beta * y.alpha));
}

// The geodesic through two distinct interior points, oriented a -> b.
Geodesic geodesic_through(const PointH3& a, const PointH3& b) {
  cplx dw = b.w - a.w;
  double sep = std::abs(dw);
  double scale = std::max({1.0, std::abs(a.w), std::abs(b.w), a.z, b.z});
  if (sep < 1e-13 * scale) {
    // Vertical line; orientation by height.
    if (b.z > a.z) return {BoundaryPoint::at(a.w), BoundaryPoint::infinity()};
    return {BoundaryPoint::infinity(), BoundaryPoint::at(a.w)};
  }
  // Plane section: x along dw from a.w.  Circle center x_c and radius R.
  double xq = sep;
  double xc = (xq * xq + b.z * b.z - a.z * a.z) / (2.0 * xq);
  double R = std::sqrt(xc * xc + a.z * a.z);
  cplx e = dw / sep;
  // a sits at angle with cos = -xc/R relative to center; b is forward of a.
  return {BoundaryPoint::at(a.w + (xc - R) * e), BoundaryPoint::at(a.w + (xc + R) * e)};
}

// Arclength parametrization of the segment [a, b]: maps s in [0, dist(a,b)]
// to points, built once from the vertical chart of the carrier geodesic.
struct SegmentParam {
  Isometry to_vertical, from_vertical;
  double za, L;

  SegmentParam(const PointH3& a, const PointH3& b) {
    Geodesic g = geodesic_through(a, b);
    to_vertical = move_to_vertical(g);
    from_vertical = to_vertical.inverse();
    za = apply(to_vertical, a).z;
    L = dist(a, b);
  }
  PointH3 at(double s) const {
    return apply(from_vertical, PointH3{cplx(0.0, 0.0), za * std::exp(s)});
  }
};

// Penetration of the segment [0, L] (arclength s) into one horoball.
// u(s) = e^{-depth(s)} satisfies u = A cosh(s - L/2) + B sinh(s - L/2); the
// coefficients come from u at the midpoint and at the two endpoints, which
// keeps them stable for long segments.
struct BallOnSegment {
  bool meets = false;
  double entry = 0, exit = 0;     // clamped to [0, L]
  double peak = 0, peak_at = 0;   // max depth over [entry, exit]
};

BallOnSegment ball_on_segment(const Horoball& ball, const SegmentParam& sp,
                              const PointH3& a, const PointH3& b) {
  BallOnSegment r;
  double L = sp.L;
  double ua = ball.u(a), ub = ball.u(b);
  double um = ball.u(sp.at(0.5 * L));
  double A = um;
  double B = (L > 1e-12) ? (ub - ua) / (2.0 * std::sinh(0.5 * L)) : 0.0;
  double disc = 1.0 - (A * A - B * B);
  double h = 0.5 * L;
  auto depth_at = [&](double s) {
    double sh = s - h;
    return -std::log(A * std::cosh(sh) + B * std::sinh(sh));
  };
  if (disc <= 0.0) return r;  // min of u over the whole line is >= 1
  double sq = std::sqrt(disc);
  // Roots of (A+B) x^2 - 2 x + (A-B) = 0 in x = e^{s - L/2}, taken in the
  // cancellation-free pairing.
  double ApB = A + B, AmB = A - B;
  double x1, x2;  // x1 <= x2 as extended reals
  if (ApB > 0) {
    x2 = (1.0 + sq) / ApB;
    x1 = AmB / (ApB * x2);
  } else {
    // Geodesic runs into the ball's cusp point forward; single entry root.
    x1 = AmB / (1.0 + sq);
    x2 = std::numeric_limits<double>::infinity();
  }
  double s1 = (x1 > 0) ? h + std::log(x1) : -std::numeric_limits<double>::infinity();
  double s2 = std::isfinite(x2) ? h + std::log(x2) : std::numeric_limits<double>::infinity();
  double lo = std::max(s1, 0.0), hi = std::min(s2, L);
  if (lo >= hi) return r;
  r.meets = true;
  r.entry = lo;
  r.exit = hi;
  double C2 = A * A - B * B;
  if (C2 > 0) {
    double sp_peak = h + 0.5 * std::log(AmB / ApB);
    if (sp_peak >= lo && sp_peak <= hi) {
      r.peak = -0.5 * std::log(C2);
      r.peak_at = sp_peak;
      return r;
    }
  }
  double da = depth_at(lo), db = depth_at(hi);
  r.peak = std::max(da, db);
  r.peak_at = (da >= db) ? lo : hi;
  return r;
}

int letter_index(const CuspedManifold& m, char c) {
  int idx = m.gen_index(c);
  if (idx >= 0) return idx;
  return -1;
}

}  // namespace

// --- Horoball ---------------------------------------------------------------

BoundaryPoint Horoball::center() const {
  if (std::abs(beta) < 1e-154) return BoundaryPoint::infinity();
  return BoundaryPoint::at(alpha / beta);
}

double Horoball::size() const {
  double ab = std::abs(beta);
  if (ab < 1e-154) return std::abs(alpha) * std::abs(alpha);
  return 1.0 / (ab * ab);
}

Horoball Horoball::at_infinity(double cutoff_height) {
  return {cplx(std::sqrt(cutoff_height), 0.0), cplx(0.0, 0.0)};
}

Horoball Horoball::at(cplx tangent_point, double diameter) {
  double s = 1.0 / std::sqrt(diameter);
  return {tangent_point * s, cplx(s, 0.0)};
}

// --- words ------------------------------------------------------------------

int CuspedManifold::gen_index(char name) const {
  for (size_t i = 0; i < gen_names.size(); ++i)
    if (gen_names[i].size() == 1 && gen_names[i][0] == name) return static_cast<int>(i);
  return -1;
}

Isometry evaluate_word(const CuspedManifold& m, const std::string& word) {
  Isometry out = Isometry::identity();
  for (size_t i = 0; i < word.size(); ++i) {
    char c = word[i];
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    bool inv = false;
    char base = c;
    if (std::isupper(static_cast<unsigned char>(c)) &&
        m.gen_index(c) < 0) {  // uppercase shorthand for the inverse
      base = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      inv = true;
    }
    if (i + 1 < word.size() && word[i + 1] == '\'') {
      inv = !inv;
      ++i;
    }
    int idx = letter_index(m, base);
    if (idx < 0)
      throw std::runtime_error(std::string("word references unknown generator '") + c +
                               "'");
    out = out * (inv ? m.gen_mats[idx].inverse() : m.gen_mats[idx]);
  }
  return out;
}

std::string invert_word(const std::string& word) {
  std::vector<std::pair<char, bool>> letters;
  for (size_t i = 0; i < word.size(); ++i) {
    char c = word[i];
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    bool inv = false;
    if (std::isupper(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      inv = true;
    }
    if (i + 1 < word.size() && word[i + 1] == '\'') {
      inv = !inv;
      ++i;
    }
    letters.push_back({c, inv});
  }
  std::string out;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    out += it->first;
    if (!it->second) out += '\'';
  }
  return out;
}

// --- manifold IO ------------------------------------------------------------

namespace {

cplx parse_cplx(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::runtime_error("manifold file: complex number must be [re, im]");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

bool is_eisenstein(cplx v, EInt* out) {
  // v = a + b w with w = exp(i pi/3): b = Im/Im(w), a = Re - b/2.
  double b = v.imag() / 0.8660254037844386467637231707529362;
  double a = v.real() - 0.5 * b;
  long long ai = llround(a), bi = llround(b);
  if (std::abs(a - ai) > 1e-9 || std::abs(b - bi) > 1e-9) return false;
  if (out) *out = EInt{ai, bi};
  return true;
}

}  // namespace

CuspedManifold parse_manifold(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("manifold file: invalid JSON: ") + e.what());
  }
  CuspedManifold m;
  m.source_text = json_text;
  if (!j.contains("generators") || !j["generators"].is_object())
    throw std::runtime_error("manifold file: missing 'generators' object");
  // Deterministic generator order: the JSON object keys sorted.
  std::map<std::string, json> gens = j["generators"].get<std::map<std::string, json>>();
  for (const auto& [name, mat] : gens) {
    if (name.size() != 1 || !std::islower(static_cast<unsigned char>(name[0])))
      throw std::runtime_error("manifold file: generator names must be single lowercase letters");
    if (!mat.is_array() || mat.size() != 4)
      throw std::runtime_error("manifold file: generator matrix must be 4 row-major entries");
    m.gen_names.push_back(name);
    m.gen_mats.push_back(Isometry(parse_cplx(mat[0]), parse_cplx(mat[1]),
                                  parse_cplx(mat[2]), parse_cplx(mat[3])));
  }
  if (j.contains("relators"))
    for (const auto& r : j["relators"]) m.relators.push_back(r.get<std::string>());
  if (j.contains("basepoint")) {
    const json& b = j["basepoint"];
    if (!b.is_array() || b.size() != 3)
      throw std::runtime_error("manifold file: basepoint must be [x, y, z]");
    m.basepoint = PointH3{cplx(b[0].get<double>(), b[1].get<double>()), b[2].get<double>()};
  }
  if (j.contains("margulis")) m.margulis = j["margulis"].get<double>();
  if (j.contains("cusps"))
    for (const auto& c : j["cusps"]) {
      CuspRecord rec;
      const json& fp = c.at("fixed_point");
      if (fp.is_string() && fp.get<std::string>() == "inf")
        rec.fixed_point = BoundaryPoint::infinity();
      else
        rec.fixed_point = BoundaryPoint::at(parse_cplx(fp));
      const json& st = c.at("stabilizer");
      if (!st.is_array() || st.size() != 2)
        throw std::runtime_error("manifold file: cusp stabilizer must list two words");
      rec.stabilizer_words = {st[0].get<std::string>(), st[1].get<std::string>()};
      rec.stabilizer = {evaluate_word(m, rec.stabilizer_words[0]),
                        evaluate_word(m, rec.stabilizer_words[1])};
      if (c.contains("horoball_size")) rec.horoball_size = c["horoball_size"].get<double>();
      m.cusps.push_back(rec);
    }
  // Exact engine when every generator is integral Eisenstein with det 1.
  std::vector<EMat> emats;
  bool exact_ok = !m.gen_mats.empty();
  for (const Isometry& g : m.gen_mats) {
    EMat e;
    exact_ok = exact_ok && is_eisenstein(g.a, &e.a) && is_eisenstein(g.b, &e.b) &&
               is_eisenstein(g.c, &e.c) && is_eisenstein(g.d, &e.d) &&
               e.det() == EInt{1, 0};
    if (!exact_ok) break;
    emats.push_back(e);
  }
  if (exact_ok) {
    m.gen_emats = emats;
    m.exact = std::make_shared<CongruenceTable>(emats);
  }
  return m;
}

CuspedManifold load_manifold(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifold file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifold(ss.str());
}

void save_manifold(const CuspedManifold& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifold file: " + path);
  out << m.source_text;
}

// --- validation --------------------------------------------------------------

ValidationReport validate(const CuspedManifold& m) {
  ValidationReport rep;
  auto fail = [&](std::string what, double res) {
    rep.valid = false;
    rep.issues.push_back({std::move(what), res});
  };
  for (const std::string& r : m.relators) {
    Isometry g;
    try {
      g = evaluate_word(m, r);
    } catch (const std::exception& e) {
      fail(std::string("relator '") + r + "': " + e.what(), 0.0);
      continue;
    }
    // Canonical sign makes +-identity compare against identity directly.
    double res = g.max_entry_diff(Isometry::identity());
    if (res > 1e-8) fail("relator '" + r + "' does not evaluate to +-identity", res);
  }
  for (size_t ci = 0; ci < m.cusps.size(); ++ci) {
    const CuspRecord& c = m.cusps[ci];
    std::string tag = "cusp " + std::to_string(ci);
    for (int k = 0; k < 2; ++k) {
      const Isometry& s = c.stabilizer[k];
      if (classify(s) != IsoClass::parabolic)
        fail(tag + " stabilizer '" + c.stabilizer_words[k] + "' is not parabolic", 0.0);
      BoundaryPoint img = apply(s, c.fixed_point);
      double res;
      if (c.fixed_point.inf)
        res = img.inf ? 0.0 : 1.0;
      else
        res = img.inf ? 1.0 : std::abs(img.w - c.fixed_point.w);
      if (res > 1e-8)
        fail(tag + " stabilizer '" + c.stabilizer_words[k] + "' does not fix the cusp point",
             res);
    }
    double comm = (c.stabilizer[0] * c.stabilizer[1])
                      .max_entry_diff(c.stabilizer[1] * c.stabilizer[0]);
    if (comm > 1e-9) fail(tag + " stabilizer generators do not commute", comm);
    if (c.horoball_size <= 0) fail(tag + " horoball_size must be positive", c.horoball_size);
  }
  if (!m.cusps.empty()) {
    double h = height_point(m, m.basepoint);
    if (h > 1e-9) fail("basepoint does not lie in the thick part (height > 0)", h);
  }
  return rep;
}

// --- orbit enumeration -------------------------------------------------------

namespace {

struct MatKey {
  long long v[8];
  bool operator==(const MatKey& o) const { return std::equal(v, v + 8, o.v); }
};
struct MatKeyHash {
  size_t operator()(const MatKey& k) const {
    size_t h = 1469598103934665603ull;
    for (long long x : k.v) {
      h ^= static_cast<size_t>(x);
      h *= 1099511628211ull;
    }
    return h;
  }
};

MatKey mat_key(const Isometry& g) {
  auto q = [](double x) { return llround(x * 1e5); };
  return {{q(g.a.real()), q(g.a.imag()), q(g.b.real()), q(g.b.imag()),
           q(g.c.real()), q(g.c.imag()), q(g.d.real()), q(g.d.imag())}};
}

}  // namespace

std::vector<OrbitElement> orbit_ball(const CuspedManifold& m, double r, double cap) {
  if (r > cap) throw std::runtime_error("orbit cap exceeded");
  const PointH3 O = m.basepoint;
  // The four letters in canonical order: a, a', b, b', ...
  struct Letter {
    std::string text;
    Isometry iso;
  };
  std::vector<Letter> letters;
  double max_disp = 0.0;
  for (size_t i = 0; i < m.gen_names.size(); ++i) {
    letters.push_back({m.gen_names[i], m.gen_mats[i]});
    letters.push_back({m.gen_names[i] + "'", m.gen_mats[i].inverse()});
    max_disp = std::max(max_disp, dist(O, apply(m.gen_mats[i], O)));
  }
  double prune = r + 2.0 * max_disp;

  std::unordered_map<MatKey, char, MatKeyHash> seen;
  std::vector<OrbitElement> out;
  struct Node {
    std::string word;
    Isometry iso;
  };
  std::vector<Node> layer{{"", Isometry::identity()}};
  seen[mat_key(Isometry::identity())] = 1;
  while (!layer.empty()) {
    std::vector<Node> next;
    for (const Node& n : layer)
      for (const Letter& l : letters) {
        Isometry g = n.iso * l.iso;
        MatKey key = mat_key(g);
        if (seen.count(key)) continue;
        seen[key] = 1;
        double d = dist(O, apply(g, O));
        if (d < r) out.push_back({n.word + l.text, g, d});
        if (d <= prune) next.push_back({n.word + l.text, g});
      }
    layer = std::move(next);
  }
  std::sort(out.begin(), out.end(), [](const OrbitElement& x, const OrbitElement& y) {
    if (x.displacement != y.displacement) return x.displacement < y.displacement;
    return x.word < y.word;
  });
  return out;
}

// --- heights -----------------------------------------------------------------

namespace {

// Base horoballs of the manifold's cusps.
std::vector<Horoball> base_horoballs(const CuspedManifold& m) {
  std::vector<Horoball> out;
  for (const CuspRecord& c : m.cusps) {
    if (c.fixed_point.inf)
      out.push_back(Horoball::at_infinity(c.horoball_size));
    else
      out.push_back(Horoball::at(c.fixed_point.w, c.horoball_size));
  }
  return out;
}

// Exact-engine enumeration: the (single) cusp at infinity with cutoff h0 has
// orbit horoballs tangent at a/c with diameter 1/(|c|^2 h0).  Collects every
// ball that can reach depth > -slack over the segment, by tiling it into
// unit-length pieces.
std::vector<Horoball> horoballs_exact(const CuspedManifold& m, const PointH3& a,
                                      const PointH3& b, double slack, double min_depth) {
  double h0 = 1.0;
  for (const CuspRecord& c : m.cusps)
    if (c.fixed_point.inf) h0 = c.horoball_size;
  std::vector<Horoball> out{Horoball::at_infinity(h0)};
  std::unordered_map<HoroballKey, char, HoroballKeyHash> seen;
  double boost = std::exp(slack);
  // A point at height z and horizontal offset rho from the tangency of a
  // ball of diameter D sits at depth ln(z D / (rho^2 + z^2)); depth >=
  // min_depth therefore needs D >= e^min_depth z and rho <= sqrt(z D
  // e^-min_depth).
  double gain = std::exp(min_depth);
  SegmentParam sp(a, b);
  int pieces = std::max(1, static_cast<int>(std::ceil(sp.L)));
  PointH3 prev = a;
  for (int k = 1; k <= pieces; ++k) {
    PointH3 cur = (k == pieces) ? b : sp.at(sp.L * k / pieces);
    double zmax = std::max(prev.z, cur.z) * std::cosh(1.0);  // covers an interior apex
    double zmin = std::min(prev.z, cur.z) / boost;
    cplx mid = 0.5 * (prev.w + cur.w);
    double dw_half = 0.5 * std::abs(cur.w - prev.w);
    for (const HoroballSpec& hs : horoballs_reaching(
             *m.exact, mid, dw_half, zmin * gain, zmax * boost / gain, h0)) {
      double diam = 1.0 / (static_cast<double>(hs.sc.norm2()) * h0);
      Horoball ball = Horoball::at(hs.fc.to_complex() / hs.sc.to_complex(), diam);
      if (seen.emplace(horoball_key(ball), 1).second) out.push_back(ball);
    }
    prev = cur;
  }
  return out;
}

// Generic enumeration via orbit_ball, with the certification margin of the
// chord-height relation: every ball penetrated to depth h by a point p has
// an orbit representative g with d(p, gO) <= d(O, p) + 2(h + 1) at our
// normalizations, so a word horizon covering that radius certifies h.
std::vector<Horoball> horoballs_generic(const CuspedManifold& m, const PointH3& a,
                                        const PointH3& b, double slack) {
  const PointH3 O = m.basepoint;
  double dseg = std::max(dist(O, a), dist(O, b));
  std::vector<Horoball> base = base_horoballs(m);
  std::vector<Horoball> out;
  std::unordered_map<HoroballKey, char, HoroballKeyHash> seen;
  auto add = [&](const Horoball& h) {
    if (seen.emplace(horoball_key(h), 1).second) out.push_back(h);
  };
  double cand_height = 1.0;
  for (int round = 0; round < 4; ++round) {
    double r = dseg + 2.0 * (cand_height + 1.0) + slack;
    if (r > 8.0) throw std::runtime_error("height not certified");
    out.clear();
    seen.clear();
    for (const Horoball& h : base) add(h);
    for (const OrbitElement& g : orbit_ball(m, r))
      for (const Horoball& h : base) add(h.transformed(g.iso));
    double hmax = 0.0;
    SegmentParam sp(a, b);
    for (const Horoball& h : out) {
      BallOnSegment bs = ball_on_segment(h, sp, a, b);
      if (bs.meets) hmax = std::max(hmax, bs.peak);
    }
    if (hmax <= cand_height) return out;
    cand_height = hmax + 0.5;
  }
  throw std::runtime_error("height not certified");
}

}  // namespace

std::vector<Horoball> horoballs_meeting(const CuspedManifold& m, const PointH3& a,
                                        const PointH3& b, double slack, double min_depth) {
  if (m.cusps.empty()) return {};
  bool all_inf = true;
  for (const CuspRecord& c : m.cusps) all_inf = all_inf && c.fixed_point.inf;
  if (m.exact && all_inf && m.cusps.size() == 1)
    return horoballs_exact(m, a, b, slack, min_depth);
  return horoballs_generic(m, a, b, slack);  // complete: the filter is a guarantee floor
}

double height_point(const CuspedManifold& m, const PointH3& p) {
  double h = 0.0;
  for (const Horoball& ball : horoballs_meeting(m, p, p))
    h = std::max(h, ball.depth(p));
  return h;
}

namespace {

std::vector<Excursion> excursions_impl(const CuspedManifold& m, const PointH3& a,
                                       const PointH3& b, double* height_out,
                                       double min_depth = 0.0) {
  SegmentParam sp(a, b);
  std::vector<BallOnSegment> hits;
  for (const Horoball& ball : horoballs_meeting(m, a, b, 0.0, min_depth)) {
    BallOnSegment bs = ball_on_segment(ball, sp, a, b);
    if (bs.meets) hits.push_back(bs);
  }
  std::sort(hits.begin(), hits.end(),
            [](const BallOnSegment& x, const BallOnSegment& y) { return x.entry < y.entry; });
  std::vector<Excursion> out;
  double hmax = 0.0;
  for (const BallOnSegment& bs : hits) {
    hmax = std::max(hmax, bs.peak);
    if (!out.empty() && bs.entry <= out.back().exit + 1e-12) {
      Excursion& e = out.back();
      e.exit = std::max(e.exit, bs.exit);
      if (bs.peak > e.peak_height) {
        e.peak_height = bs.peak;
        e.peak_param = bs.peak_at;
      }
    } else {
      out.push_back({bs.entry, bs.exit, bs.peak, bs.peak_at, Excursion::Kind::intermediate});
    }
  }
  for (Excursion& e : out) {
    bool ini = e.entry <= 1e-9, ter = e.exit >= sp.L - 1e-9;
    e.kind = ini ? Excursion::Kind::initial
                 : (ter ? Excursion::Kind::terminal : Excursion::Kind::intermediate);
    if (ini && ter) e.kind = Excursion::Kind::initial;  // whole-segment excursion
  }
  if (height_out) *height_out = hmax;
  return out;
}

}  // namespace

PointH3 point_along(const PointH3& a, const PointH3& b, double s) {
  return SegmentParam(a, b).at(s);
}

double height_segment(const CuspedManifold& m, const PointH3& a, const PointH3& b) {
  double h = 0.0;
  excursions_impl(m, a, b, &h);
  return h;
}

std::vector<Excursion> excursions(const CuspedManifold& m, const PointH3& a,
                                  const PointH3& b, double min_depth) {
  return excursions_impl(m, a, b, nullptr, min_depth);
}

double alpha_angle(const CuspedManifold& m, const PointH3& p, const Vec3& v) {
  double best = 0.0;
  Horoball deepest{cplx(1.0, 0.0), cplx(0.0, 0.0)};
  for (const Horoball& ball : horoballs_meeting(m, p, p)) {
    double d = ball.depth(p);
    if (d > best) {
      best = d;
      deepest = ball;
    }
  }
  if (best <= 0.0) return 0.0;
  Vec3 toward;
  BoundaryPoint c = deepest.center();
  if (c.inf) {
    toward = Vec3{0.0, 0.0, 1.0};
  } else {
    // Pull the vertical direction back through the inversion sending the
    // tangent point to infinity.
    Isometry inv(cplx(0.0, 0.0), cplx(-1.0, 0.0), cplx(1.0, 0.0), -c.w);
    PointH3 q = apply(inv, p);
    toward = apply_dir(inv.inverse(), q, Vec3{0.0, 0.0, 1.0});
  }
  double into = toward.dot(v);
  if (into <= 0.0) return 0.0;  // pointing down the cusp (or along the horosphere)
  return std::asin(std::min(1.0, into));
}

GeodesicRep geodesic_rep(const CuspedManifold& m, const Isometry& g) {
  if (classify(g) == IsoClass::identity)
    throw std::runtime_error("geodesic_rep: identity has no geodesic representative");
  GeodesicRep rep;
  rep.from = m.basepoint;
  rep.to = apply(g, m.basepoint);
  rep.length = dist(rep.from, rep.to);
  rep.exc = excursions_impl(m, rep.from, rep.to, &rep.height);
  return rep;
}

void check_horoball_disjointness(const CuspedManifold& m, double radius) {
  PointH3 O = m.basepoint;
  PointH3 high{O.w, O.z * std::exp(radius)};
  std::vector<Horoball> balls = horoballs_meeting(m, O, high, radius);
  for (size_t i = 0; i < balls.size(); ++i)
    for (size_t j = i + 1; j < balls.size(); ++j)
      if (mutual_penetration(balls[i], balls[j]) > 1e-6)
        throw std::runtime_error("cusp normalization too large");
}

}  // namespace h3
