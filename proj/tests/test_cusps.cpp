#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "h3kit/cusps.hpp"

using namespace h3;

namespace {

const CuspedManifold& fixture() {
  static CuspedManifold m = load_manifold(std::string(H3_DATA_DIR) + "/figure_eight.json");
  return m;
}

std::mt19937 rng(4242);
double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Quantized matrix key for deduplicating isometries modulo sign.  The
// Isometry constructor canonicalizes the sign, but near-zero entries can
// make that choice jitter between computation paths, so the key is taken
// as the minimum over both signs.
std::string mat_key(const Isometry& g) {
  auto q = [](double x) { return std::round(x * 1e4) / 1e4 + 0.0; };
  auto fmt = [&](double s, const Isometry& m) {
    char buf[180];
    std::snprintf(buf, sizeof buf, "%.4f %.4f %.4f %.4f %.4f %.4f %.4f %.4f",
                  q(s * m.a.real()), q(s * m.a.imag()), q(s * m.b.real()),
                  q(s * m.b.imag()), q(s * m.c.real()), q(s * m.c.imag()),
                  q(s * m.d.real()), q(s * m.d.imag()));
    return std::string(buf);
  };
  return std::min(fmt(1.0, g), fmt(-1.0, g));
}

}  // namespace

TEST_CASE("fixture loads, validates, and has the exact engine") {
  const CuspedManifold& m = fixture();
  CHECK(m.gen_names.size() == 2);
  CHECK(m.relators.size() == 1);
  CHECK(m.cusps.size() == 1);
  CHECK(m.cusps[0].fixed_point.inf);
  CHECK(m.exact != nullptr);
  ValidationReport vr = validate(m);
  for (const auto& i : vr.issues) MESSAGE(i.what);
  CHECK(vr.valid);
}

TEST_CASE("save round trip is bit exact") {
  const CuspedManifold& m = fixture();
  std::string path = "roundtrip.json";
  save_manifold(m, path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == m.source_text);
}

TEST_CASE("malformed input throws, corrupted relator invalidates") {
  CHECK_THROWS(parse_manifold("not json"));
  CHECK_THROWS(parse_manifold("{\"generators\": {\"ab\": [[1,0],[0,0],[0,0],[1,0]]}}"));

  // A typo in the relator must be caught by validation, not silently passed.
  std::string text = fixture().source_text;
  std::size_t at = text.find("abABAbaBAB");
  REQUIRE(at != std::string::npos);
  text.replace(at, 10, "abABAbaBAb");
  CuspedManifold bad = parse_manifold(text);
  ValidationReport vr = validate(bad);
  CHECK_FALSE(vr.valid);
  REQUIRE_FALSE(vr.issues.empty());
  CHECK(vr.issues[0].residual > 1e-6);
}

TEST_CASE("word evaluation: inverse marks, uppercase, inversion") {
  const CuspedManifold& m = fixture();
  Isometry a = evaluate_word(m, "a");
  CHECK(evaluate_word(m, "a'").max_entry_diff(a.inverse()) < 1e-15);
  CHECK(evaluate_word(m, "A").max_entry_diff(a.inverse()) < 1e-15);
  std::string w = "ab'aB";
  Isometry g = evaluate_word(m, w);
  CHECK(evaluate_word(m, invert_word(w)).max_entry_diff(g.inverse()) < 1e-12);
}

TEST_CASE("orbit ball: empty below the shortest displacement") {
  // d(O, aO) = acosh(3/2) is the smallest over all generators, and no
  // shorter element exists: the ball below it must be empty.
  CHECK(orbit_ball(fixture(), 0.9).empty());
  auto orb = orbit_ball(fixture(), 1.0);
  REQUIRE_FALSE(orb.empty());
  CHECK(orb[0].displacement == doctest::Approx(std::acosh(1.5)).epsilon(1e-12));
  CHECK(orb[0].word == "a");
}

TEST_CASE("orbit ball closed under inverses and monotone in radius") {
  const CuspedManifold& m = fixture();
  auto orb = orbit_ball(m, 3.0);
  std::set<std::string> keys;
  for (const auto& e : orb) keys.insert(mat_key(e.iso));
  for (const auto& e : orb) {
    CHECK(keys.count(mat_key(e.iso.inverse())) == 1);
    CHECK(e.displacement == doctest::Approx(dist(m.basepoint, apply(e.iso, m.basepoint))));
    CHECK(e.iso.max_entry_diff(evaluate_word(m, e.word)) < 1e-9);
  }
  auto small = orbit_ball(m, 2.0);
  CHECK(small.size() < orb.size());
  std::set<std::string> big_keys = keys;
  for (const auto& e : small) CHECK(big_keys.count(mat_key(e.iso)) == 1);
}

TEST_CASE("orbit ball at r=3 matches an unpruned word-search oracle") {
  const CuspedManifold& m = fixture();
  // Oracle: free-reduced words to depth 12, no geometric pruning, matrix
  // dedup; everything with displacement < 3 must coincide with orbit_ball.
  std::map<std::string, double> oracle;
  struct Node {
    Isometry g;
    int last;
  };
  Isometry gens[4] = {m.gen_mats[0], m.gen_mats[0].inverse(), m.gen_mats[1],
                      m.gen_mats[1].inverse()};
  std::vector<Node> cur = {{Isometry::identity(), -1}};
  std::set<std::string> seen;
  for (int depth = 0; depth < 12; ++depth) {
    std::vector<Node> next;
    for (const Node& n : cur)
      for (int i = 0; i < 4; ++i) {
        if (n.last >= 0 && (n.last ^ 1) == i) continue;
        Node t{n.g * gens[i], i};
        std::string k = mat_key(t.g);
        if (!seen.insert(k).second) continue;
        double d = dist(m.basepoint, apply(t.g, m.basepoint));
        if (d < 3.0 && t.g.max_entry_diff(Isometry::identity()) > 1e-9) oracle[k] = d;
        next.push_back(t);
      }
    cur = std::move(next);
    if (cur.size() > 400000) break;
  }
  auto orb = orbit_ball(m, 3.0);
  CHECK(orb.size() == oracle.size());
  for (const auto& e : orb) CHECK(oracle.count(mat_key(e.iso)) == 1);
}

TEST_CASE("orbit ball matches the exact counter") {
  const CuspedManifold& m = fixture();
  REQUIRE(m.exact != nullptr);
  std::vector<double> radii = {2.0, 3.0, 4.0};
  std::vector<long long> exact = count_orbit_ball(*m.exact, radii);
  for (std::size_t i = 0; i < radii.size(); ++i)
    CHECK(static_cast<long long>(orbit_ball(m, radii[i]).size()) == exact[i]);
}

TEST_CASE("height of the basepoint is zero, scaling the cutoff is linear") {
  const CuspedManifold& m = fixture();
  CHECK(height_point(m, m.basepoint) == 0.0);
  // A point at Euclidean height e over the cusp has depth exactly 1.
  PointH3 p{cplx(0.31, 0.17), std::exp(1.0)};
  CHECK(height_point(m, p) == doctest::Approx(1.0).epsilon(1e-12));
  PointH3 deep{cplx(-1.2, 0.8), std::exp(4.0)};
  CHECK(height_point(m, deep) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("height of generic points matches a direct horoball oracle") {
  const CuspedManifold& m = fixture();
  REQUIRE(m.exact != nullptr);
  for (int trial = 0; trial < 40; ++trial) {
    PointH3 p{cplx(urand(-1.5, 1.5), urand(-1.5, 1.5)), urand(0.05, 2.0)};
    // Oracle: depth against the cusp ball at infinity and against every
    // tangent ball of the fixture near p, enumerated directly.
    // Only balls with diameter above the sample's height can reach positive
    // depth there, so min_diam 0.04 is complete for z >= 0.05.
    double h = std::log(p.z);  // cusp at infinity, cutoff 1
    for (const HoroballSpec& s : horoballs_near(*m.exact, p.w, 4.0, 0.04)) {
      cplx c = s.fc.to_complex() / s.sc.to_complex();
      double diam = 1.0 / static_cast<double>(s.sc.norm2());
      // Ball tangent at c with Euclidean diameter diam: u = |w-c|^2/(diam z)
      // + z/diam is the Busemann scale; depth = ln(1/u) when u < 1.
      double u = (std::norm(p.w - c) / p.z + p.z) / diam;
      h = std::max(h, -std::log(u));
    }
    h = std::max(h, 0.0);
    CHECK(height_point(m, p) == doctest::Approx(h).epsilon(1e-9));
  }
}

TEST_CASE("horoball representation round trips") {
  Horoball b = Horoball::at(cplx(0.5, -0.25), 0.3);
  CHECK_FALSE(b.center().inf);
  CHECK(b.center().w == cplx(0.5, -0.25));
  CHECK(b.size() == doctest::Approx(0.3));
  CHECK(b.depth(PointH3{cplx(0.5, -0.25), 0.3}) == doctest::Approx(0.0).epsilon(1e-12));

  Horoball binf = Horoball::at_infinity(2.0);
  CHECK(binf.center().inf);
  CHECK(binf.size() == doctest::Approx(2.0));

  // Transport is equivariant: depth at gp of the transformed ball equals
  // depth at p of the original.
  Isometry g(cplx(1.3, 0.2), cplx(0.4, -1.0), cplx(0.0, 0.5),
             (cplx(1, 0) + cplx(0.4, -1.0) * cplx(0.0, 0.5)) / cplx(1.3, 0.2));
  PointH3 p{cplx(0.4, -0.3), 0.5};
  CHECK(b.transformed(g).depth(apply(g, p)) == doctest::Approx(b.depth(p)).epsilon(1e-9));
}

TEST_CASE("vertical chord through a cusp excursion has the closed-form length") {
  const CuspedManifold& m = fixture();
  // Endpoints on the horosphere z = 1: the whole segment lies in the cusp
  // ball at infinity, peaking at height ln R, and its length is exactly
  // 2(h + ln(1 + sqrt(1 - e^{-2h}))) <= 2(h + ln 2).
  for (double x : {0.8, 1.7, 3.0}) {
    PointH3 a{cplx(-x, 0.13), 1.0}, b{cplx(x, 0.13), 1.0};
    double R = std::sqrt(x * x + 1.0);
    double h = std::log(R);
    auto exc = excursions(m, a, b);
    REQUIRE_FALSE(exc.empty());
    // The deepest excursion is the infinity-ball chord spanning everything.
    const Excursion& e = exc.front();
    double L = dist(a, b);
    CHECK(e.peak_height == doctest::Approx(h).epsilon(1e-8));
    CHECK(e.exit - e.entry == doctest::Approx(L).epsilon(1e-8));
    double chord = 2.0 * (h + std::log(1.0 + std::sqrt(1.0 - std::exp(-2.0 * h))));
    CHECK(L == doctest::Approx(chord).epsilon(1e-8));
    CHECK(L <= 2.0 * (h + std::log(2.0)) + 1e-12);
    CHECK(height_segment(m, a, b) == doctest::Approx(h).epsilon(1e-8));
    CHECK(e.kind == Excursion::Kind::initial);
  }
}

TEST_CASE("segment height matches a dense scan of point heights") {
  const CuspedManifold& m = fixture();
  for (int trial = 0; trial < 6; ++trial) {
    PointH3 a{cplx(urand(-1, 1), urand(-1, 1)), urand(0.3, 1.6)};
    PointH3 b{cplx(urand(-1, 1), urand(-1, 1)), urand(0.3, 1.6)};
    double L = dist(a, b);
    if (L < 0.2) continue;
    double scan = 0.0;
    int n = static_cast<int>(L / 0.01) + 1;
    for (int i = 0; i <= n; ++i)
      scan = std::max(scan, height_point(m, point_along(a, b, L * i / n)));
    // The scan undershoots by at most the grid spacing (height is
    // 1-Lipschitz along the segment) and can never overshoot.
    double hs = height_segment(m, a, b);
    CHECK(hs >= scan - 1e-9);
    CHECK(hs <= scan + 2e-2);
  }
}

TEST_CASE("excursion kinds and merge behaviour") {
  const CuspedManifold& m = fixture();
  // Vertical segment from deep in the cusp down to a thick-part point:
  // the single excursion starts at the segment start, so it is initial.
  PointH3 a{cplx(0.5, 0.1), std::exp(1.5)};
  PointH3 b{cplx(0.5, 0.1), 0.9};
  REQUIRE(height_point(m, b) == 0.0);
  auto exc = excursions(m, a, b);
  REQUIRE_FALSE(exc.empty());
  CHECK(exc.front().kind == Excursion::Kind::initial);
  CHECK(exc.front().entry == doctest::Approx(0.0));
  CHECK(exc.front().peak_height == doctest::Approx(1.5).epsilon(1e-9));
  // Reversed: the excursion ends at the segment end, so it is terminal.
  auto rexc = excursions(m, b, a);
  REQUIRE_FALSE(rexc.empty());
  bool has_terminal = false;
  for (const auto& e : rexc) has_terminal = has_terminal || e.kind == Excursion::Kind::terminal;
  CHECK(has_terminal);
}

TEST_CASE("alpha angle: vertical, horizontal and thick-part directions") {
  const CuspedManifold& m = fixture();
  PointH3 p{cplx(0.0, 0.0), 2.0};  // depth ln 2 in the infinity cusp
  CHECK(alpha_angle(m, p, Vec3{0, 0, 1}) == doctest::Approx(PI / 2).epsilon(1e-12));
  CHECK(alpha_angle(m, p, Vec3{1, 0, 0}) == doctest::Approx(0.0));
  CHECK(alpha_angle(m, p, Vec3{0, 0, -1}) == doctest::Approx(0.0));
  double mid = alpha_angle(m, p, Vec3{1, 0, 1}.normalized());
  CHECK(mid == doctest::Approx(PI / 4).epsilon(1e-9));
  // Thick part: angle is defined as zero.
  CHECK(alpha_angle(m, m.basepoint, Vec3{0, 0, 1}) == 0.0);
}

TEST_CASE("geodesic representative: length, endpoints, reversal symmetry") {
  const CuspedManifold& m = fixture();
  Isometry a = evaluate_word(m, "a");
  GeodesicRep r = geodesic_rep(m, a);
  CHECK(r.length == doctest::Approx(std::acosh(1.5)).epsilon(1e-12));
  CHECK(dist(r.from, m.basepoint) < 1e-12);
  CHECK(dist(r.to, apply(a, m.basepoint)) < 1e-12);
  Isometry g = evaluate_word(m, "abAbb");
  GeodesicRep rg = geodesic_rep(m, g);
  GeodesicRep ri = geodesic_rep(m, g.inverse());
  CHECK(rg.length == doctest::Approx(ri.length).epsilon(1e-12));
  CHECK(rg.height == doctest::Approx(ri.height).epsilon(1e-9));
}

TEST_CASE("horoball disjointness holds for the fixture, fails when inflated") {
  const CuspedManifold& m = fixture();
  CHECK_NOTHROW(check_horoball_disjointness(m, 2.5));
  // Lowering the cutoff height enlarges the cusp ball and all its orbit
  // images, so at 0.8 neighbouring balls overlap.
  CuspedManifold inflated = m;
  inflated.cusps[0].horoball_size = 0.8;
  CHECK_THROWS_WITH_AS(check_horoball_disjointness(inflated, 2.5),
                       doctest::Contains("cusp normalization too large"),
                       std::runtime_error);
}

TEST_CASE("horoball enumeration count stays within the volume bound") {
  const CuspedManifold& m = fixture();
  for (double r : {1.0, 2.0, 3.0}) {
    PointH3 a{cplx(-0.4, 0.2), 0.8}, b{cplx(std::sinh(r), 0.2), 0.8};
    auto balls = horoballs_meeting(m, a, b);
    double span = dist(a, b);
    CHECK(static_cast<double>(balls.size()) <= 4.0 * std::exp(2.0 * (span + 2.0)));
    // Every reported ball really meets the segment's neighborhood: its
    // depth somewhere on the segment is above the -2(span) floor.
    for (const Horoball& hb : balls) {
      double best = -1e300;
      int n = 200;
      for (int i = 0; i <= n; ++i)
        best = std::max(best, hb.depth(point_along(a, b, span * i / n)));
      CHECK(best > -2.0 * (span + 4.0));
    }
  }
}

TEST_CASE("point_along interpolates by arclength") {
  PointH3 a{cplx(0.2, -0.4), 0.7}, b{cplx(-1.0, 0.9), 1.9};
  double L = dist(a, b);
  for (double f : {0.0, 0.25, 0.5, 1.0}) {
    PointH3 p = point_along(a, b, f * L);
    CHECK(dist(a, p) == doctest::Approx(f * L).epsilon(1e-9));
    CHECK(dist(p, b) == doctest::Approx((1 - f) * L).epsilon(1e-9));
  }
}
