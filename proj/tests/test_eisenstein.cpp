#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "h3kit/eisenstein.hpp"

using namespace h3;

namespace {
std::mt19937 rng(424242);
long long irand(long long lo, long long hi) {
  return std::uniform_int_distribution<long long>(lo, hi)(rng);
}

const EInt W{0, 1};  // w = exp(i pi/3)

// Fixture group generators: [[1,1],[0,1]] and [[1,0],[-w,1]].
std::vector<EMat> fixture_gens() {
  return {EMat{{1, 0}, {1, 0}, {0, 0}, {1, 0}}, EMat{{1, 0}, {0, 0}, {0, -1}, {1, 0}}};
}

std::array<long long, 8> mat_key(const EMat& m) {
  return {m.a.a, m.a.b, m.b.a, m.b.b, m.c.a, m.c.b, m.d.a, m.d.b};
}

EMat sign_normalize(const EMat& m) {
  for (long long v : mat_key(m)) {
    if (v > 0) return m;
    if (v < 0) return {-m.a, -m.b, -m.c, -m.d};
  }
  return m;
}

// Independent oracle: breadth-first closure of the group inside a Frobenius
// ball, then count elements below each threshold.
std::set<std::array<long long, 8>> bfs_ball(long long frob_cap) {
  std::vector<EMat> gens = fixture_gens();
  std::vector<EMat> step;
  for (const auto& g : gens) {
    step.push_back(g);
    step.push_back(g.inv_unimodular());
  }
  std::set<std::array<long long, 8>> seen;
  std::vector<EMat> frontier{EMat{{1, 0}, {0, 0}, {0, 0}, {1, 0}}};
  seen.insert(mat_key(frontier[0]));
  while (!frontier.empty()) {
    std::vector<EMat> next;
    for (const auto& m : frontier)
      for (const auto& g : step) {
        EMat p = sign_normalize(m * g);
        if (p.frob2() > frob_cap) continue;
        if (seen.insert(mat_key(p)).second) next.push_back(p);
      }
    frontier = std::move(next);
  }
  return seen;
}
}  // namespace

TEST_CASE("Eisenstein arithmetic: w^2 = w - 1, norm, conjugate") {
  CHECK(W * W == EInt{-1, 1});
  CHECK((W * W * W) == EInt{-1, 0});  // w^3 = -1
  for (int k = 0; k < 200; ++k) {
    EInt x{irand(-50, 50), irand(-50, 50)};
    CHECK(x.norm2() == (x * x.conj()).a);
    CHECK((x * x.conj()).b == 0);
    CHECK(std::abs(x.to_complex()) ==
          doctest::Approx(std::sqrt(double(x.norm2()))).epsilon(1e-12));
  }
}

TEST_CASE("rounded division leaves a remainder of norm at most 3/4 |y|^2") {
  for (int k = 0; k < 500; ++k) {
    EInt x{irand(-100, 100), irand(-100, 100)};
    EInt y{irand(-20, 20), irand(-20, 20)};
    if (y.is_zero()) continue;
    EInt q = ediv_round(x, y);
    EInt r = x - q * y;
    CHECK(4 * r.norm2() <= 3 * y.norm2());
  }
  CHECK_THROWS(ediv_round(EInt{1, 0}, EInt{0, 0}));
}

TEST_CASE("extended gcd: Bezout identity and common divisibility") {
  for (int k = 0; k < 300; ++k) {
    EInt x{irand(-60, 60), irand(-60, 60)};
    EInt y{irand(-60, 60), irand(-60, 60)};
    if (x.is_zero() && y.is_zero()) continue;
    EInt u, v;
    EInt g = egcd(x, y, u, v);
    CHECK(u * x + v * y == g);
    CHECK_FALSE(g.is_zero());
    // g divides both inputs exactly
    EInt qx = ediv_round(x, g), qy = ediv_round(y, g);
    CHECK((x - qx * g).is_zero());
    CHECK((y - qy * g).is_zero());
  }
}

TEST_CASE("units are exactly the six norm-one elements") {
  int count = 0;
  for (long long a = -2; a <= 2; ++a)
    for (long long b = -2; b <= 2; ++b)
      if (is_unit(EInt{a, b})) ++count;
  CHECK(count == 6);
}

TEST_CASE("congruence table: closure size and index in SL(2, Z[w]/4)") {
  CongruenceTable table(fixture_gens());
  CHECK(table.size() == 320);
  CHECK(table.full_group_size() == 3840);  // index 12, mod sign 6
  // generators and simple products are members
  EMat A = fixture_gens()[0], B = fixture_gens()[1];
  CHECK(table.contains(A));
  CHECK(table.contains(B));
  CHECK(table.contains(A * B * A.inv_unimodular()));
  CHECK(table.contains(EMat{{1, 0}, {0, 0}, {0, 0}, {1, 0}}));
}

TEST_CASE("congruence membership agrees with word closure on a ball") {
  CongruenceTable table(fixture_gens());
  auto ball = bfs_ball(60);
  for (const auto& key : ball) {
    EMat m{{key[0], key[1]}, {key[2], key[3]}, {key[4], key[5]}, {key[6], key[7]}};
    CHECK(table.contains(m));
  }
}

TEST_CASE("orbit counting matches the word-closure oracle at small radii") {
  CongruenceTable table(fixture_gens());
  std::vector<double> radii{2.0, 3.0, 4.0};
  std::vector<long long> counts = count_orbit_ball(table, radii);
  // oracle: closure within a generous Frobenius cap, then threshold
  long long cap = static_cast<long long>(std::floor(2 * std::cosh(radii.back() + 2.0)));
  auto ball = bfs_ball(cap);
  for (size_t i = 0; i < radii.size(); ++i) {
    long long S = static_cast<long long>(std::floor(2 * std::cosh(radii[i])));
    long long n = -1;  // identity excluded
    for (const auto& key : ball) {
      EMat m{{key[0], key[1]}, {key[2], key[3]}, {key[4], key[5]}, {key[6], key[7]}};
      // frob2 < 2 cosh r for integer frob2 means frob2 <= floor(2 cosh r)
      if (m.frob2() <= S) ++n;
    }
    CHECK(counts[i] == n);
  }
  // monotone in the radius
  CHECK(counts[0] <= counts[1]);
  CHECK(counts[1] <= counts[2]);
}

TEST_CASE("lattice ball finds exactly the displaced elements") {
  CongruenceTable table(fixture_gens());
  PointH3 x{cplx(0.3, 0.2), 1.1};
  double R = 2.5;
  auto elems = lattice_ball(table, x, R);
  // every element is a member within range, sorted by displacement
  for (size_t i = 0; i < elems.size(); ++i) {
    CHECK(table.contains(elems[i].mat));
    CHECK(elems[i].displacement <= R + 1e-9);
    PointH3 gO = apply(elems[i].mat.to_isometry(), PointH3{cplx(0, 0), 1});
    CHECK(dist(x, gO) == doctest::Approx(elems[i].displacement).epsilon(1e-9));
    if (i) CHECK(elems[i - 1].displacement <= elems[i].displacement + 1e-12);
  }
  // cross-check against the word-closure oracle
  long long cap = static_cast<long long>(std::floor(2 * std::cosh(R + 2.0)));
  auto ball = bfs_ball(cap);
  size_t expected = 0;
  for (const auto& key : ball) {
    EMat m{{key[0], key[1]}, {key[2], key[3]}, {key[4], key[5]}, {key[6], key[7]}};
    PointH3 gO = apply(m.to_isometry(), PointH3{cplx(0, 0), 1});
    if (dist(x, gO) <= R + 1e-12) ++expected;
  }
  CHECK(elems.size() == expected);
}

TEST_CASE("eisenstein disk enumerates the hexagonal lattice") {
  auto pts = eisenstein_disk(cplx(0, 0), 1.01);
  CHECK(pts.size() == 7);  // origin plus six units
  auto far = eisenstein_disk(cplx(10.5, 3.2), 2.0);
  for (const auto& t : pts) CHECK(std::abs(t.to_complex()) <= 1.01 + 1e-9);
  for (const auto& t : far) CHECK(std::abs(t.to_complex() - cplx(10.5, 3.2)) <= 2.0 + 1e-9);
  // count agrees with brute force over a box
  size_t brute = 0;
  for (long long a = 0; a <= 20; ++a)
    for (long long b = -10; b <= 20; ++b)
      if (std::abs(EInt{a, b}.to_complex() - cplx(10.5, 3.2)) <= 2.0) ++brute;
  CHECK(far.size() == brute);
}

TEST_CASE("parabolic translations form the cusp lattice") {
  CongruenceTable table(fixture_gens());
  auto ts = parabolic_translations(table, 8.0);
  // contains 0 and the generator translation 1
  bool has0 = false, has1 = false;
  for (const auto& t : ts) {
    has0 |= t == EInt{0, 0};
    has1 |= t == EInt{1, 0};
    EMat g{{1, 0}, t, {0, 0}, {1, 0}};
    CHECK(table.contains(g));
  }
  CHECK(has0);
  CHECK(has1);
  // membership is closed under addition of found translations (spot check)
  if (ts.size() >= 2) {
    EInt s = ts[1] + ts[1];
    if (std::abs(s.to_complex()) <= 8.0) {
      bool found = false;
      for (const auto& t : ts) found |= t == s;
      CHECK(found);
    }
  }
}

TEST_CASE("column extension and horoball enumeration") {
  CongruenceTable table(fixture_gens());
  // (1, -w) is the first column of generator b's inverse-style relatives
  EMat out;
  bool ok = column_extends(table, EInt{1, 0}, EInt{0, -1}, &out);
  CHECK(ok);
  CHECK(out.det() == EInt{1, 0});
  CHECK(table.contains(out));
  CHECK(out.a == EInt{1, 0});
  CHECK(out.c == EInt{0, -1});
  // non-coprime column cannot extend
  CHECK_FALSE(column_extends(table, EInt{2, 0}, EInt{0, 2}, nullptr));

  auto balls = horoballs_near(table, cplx(0, 0), 3.0, 0.2);
  CHECK(!balls.empty());
  for (const auto& hb : balls) {
    CHECK(hb.sc.norm2() <= 5);  // diameter 1/|c|^2 >= 0.2
    CHECK(std::abs(hb.fc.to_complex() / hb.sc.to_complex()) <= 3.0 + 1e-6);
    CHECK(column_extends(table, hb.fc, hb.sc, nullptr));
  }
}
