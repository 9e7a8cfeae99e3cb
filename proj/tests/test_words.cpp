#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "h3kit/words.hpp"

using namespace h3;

namespace {

const CuspedManifold& fixture() {
  static CuspedManifold m = load_manifold(std::string(H3_DATA_DIR) + "/figure_eight.json");
  return m;
}

const ReductionConstants& constants() {
  static ReductionConstants rc = reduction_constants(fixture());
  return rc;
}

std::string repeat(const std::string& w, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += w;
  return out;
}

}  // namespace

TEST_CASE("word algebra: make, concat, inverse, free reduction") {
  const CuspedManifold& m = fixture();
  CHECK(free_reduce("aa'") == "");
  CHECK(free_reduce("ab'ba") == "aa");
  CHECK(free_reduce("ab'") == "aB");  // internal letters: uppercase inverse

  GroupWord w = make_word(m, "ab'a");
  CHECK(w.letters == "aBa");
  CHECK(w.iso.max_entry_diff(evaluate_word(m, "ab'a")) < 1e-12);

  GroupWord wi = inverse_word(m, w);
  CHECK(wi.letters == "AbA");  // reversed, case-swapped: inverse of aBa
  CHECK((w.iso * wi.iso).max_entry_diff(Isometry::identity()) < 1e-12);

  GroupWord c = concat(m, w, wi);
  CHECK(c.letters.empty());
  CHECK(c.iso.max_entry_diff(Isometry::identity()) < 1e-12);
}

TEST_CASE("displacement balls exclude the identity and follow the base") {
  const CuspedManifold& m = fixture();
  Isometry a = evaluate_word(m, "a");
  CHECK(displacement(m, a) == doctest::Approx(std::acosh(1.5)));
  CHECK(in_B(m, a, 1.0));
  CHECK_FALSE(in_B(m, a, 0.9));
  CHECK_FALSE(in_B(m, Isometry::identity(), 100.0));
  // Conjugating the base can change membership: the same element seen from
  // a far-away orbit has larger displacement.
  Isometry far = evaluate_word(m, "abab");
  CHECK_FALSE(in_B(m, a, 1.0, far));
  CHECK(in_B(m, a, displacement(m, far.inverse() * a * far) + 1e-9, far));
}

TEST_CASE("reduction constants of the fixture") {
  const ReductionConstants& rc = constants();
  // Cusp cross-section: stabilizer translations 1 and 2*sqrt(3) at the
  // height-1 horosphere.
  CHECK(rc.D1 == doctest::Approx((1.0 + 2 * std::sqrt(3.0)) / 2).epsilon(1e-9));
  CHECK(rc.D3 == doctest::Approx(std::log(1.0 + 5.0 * rc.D1 * rc.D1)));
  CHECK(rc.D == doctest::Approx(2 * (rc.D2 + rc.D3) + 2));
  CHECK(rc.D2 > 0.5);
  CHECK(rc.D < 25.0);  // the fixture's threshold is modest
  // Deterministic in the seed.
  ReductionConstants rc2 = reduction_constants(fixture());
  CHECK(rc2.D2 == rc.D2);
}

TEST_CASE("reduce_element splits with verified decrements") {
  const CuspedManifold& m = fixture();
  const ReductionConstants& rc = constants();

  GroupWord g = make_word(m, repeat("ab", 18));
  REQUIRE(displacement(m, g.iso) > rc.D);
  ReduceResult r = reduce_element(m, rc, g);
  REQUIRE(r.reduced);
  CHECK(r.len_left <= r.len_g - 0.5);
  CHECK(r.len_right <= r.len_g - 0.5);
  CHECK(r.len_left == doctest::Approx(displacement(m, r.left.iso)));
  CHECK(r.len_right == doctest::Approx(displacement(m, r.right.iso)));
  // Exact check on the letters: left * right free-reduces to g.
  CHECK(free_reduce(r.left.letters + r.right.letters) == g.letters);
  // The matrices agree up to fp error accumulated over the long products.
  CHECK((r.left.iso * r.right.iso).max_entry_diff(g.iso) <
        1e-7 * std::sqrt(g.iso.frob2()));

  // Below the threshold nothing is split.
  GroupWord small = make_word(m, "ab");
  ReduceResult s = reduce_element(m, rc, small);
  CHECK_FALSE(s.reduced);
  CHECK(s.note == "below reduction threshold");
  CHECK(s.left.letters == small.letters);

  // With no search budget every candidate is rejected.
  CHECK_THROWS_WITH_AS(reduce_element(m, rc, g, 0),
                       doctest::Contains("irreducible"), std::runtime_error);
}

TEST_CASE("express_in_ball: bounded factors multiplying back to g") {
  const CuspedManifold& m = fixture();
  const ReductionConstants& rc = constants();

  GroupWord g = make_word(m, repeat("ab", 20));
  double len0 = displacement(m, g.iso);
  double K = rc.D + 0.5;
  REQUIRE(len0 > K);

  ExpressResult ex = express_in_ball(m, rc, g, K);
  REQUIRE_FALSE(ex.factors.empty());
  CHECK(ex.factors.size() >
        1);  // g itself is outside B_K, so at least one split happened
  double cap = std::pow(2.0, std::ceil(2.0 * (len0 - K)) + 1);
  CHECK(static_cast<double>(ex.factors.size()) <= cap);
  Isometry prod;
  std::string letters;
  for (const GroupWord& f : ex.factors) {
    CHECK(displacement(m, f.iso) <= K + 1e-9);
    prod = prod * f.iso;
    letters += f.letters;
  }
  CHECK(free_reduce(letters) == g.letters);  // exact product identity
  CHECK(prod.max_entry_diff(g.iso) < 1e-7 * std::sqrt(g.iso.frob2()));
  CHECK(ex.splits + 1 == static_cast<int>(ex.factors.size()));

  CHECK_THROWS_AS(express_in_ball(m, rc, g, rc.D - 1.0), std::invalid_argument);
}

TEST_CASE("abelianization of the fixture is Z") {
  const CuspedManifold& m = fixture();
  Abelianization ab = abelianize(m);
  CHECK(ab.torsion.empty());
  CHECK(ab.free_rank == 1);

  // The relator's exponent vector maps to zero.
  std::vector<long long> rel = exponent_vector(m, m.relators[0]);
  std::vector<long long> z = ab.reduce(rel);
  for (long long x : z) CHECK(x == 0);

  // Linearity on the free part.
  std::vector<long long> ea = {1, 0}, eb = {0, 1};
  std::vector<long long> ra = ab.reduce(ea), rb = ab.reduce(eb);
  std::vector<long long> sum = ab.reduce({1, 1});
  REQUIRE(ra.size() == sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) CHECK(sum[i] == ra[i] + rb[i]);
  // Both generators are nontrivial in H1.
  auto nonzero = [](const std::vector<long long>& v) {
    for (long long x : v)
      if (x != 0) return true;
    return false;
  };
  CHECK(nonzero(ra));
  CHECK(nonzero(rb));
}

TEST_CASE("spin homology adds one order-2 factor") {
  const CuspedManifold& m = fixture();
  Abelianization so = h1_so(m);
  CHECK(so.free_rank == 1);
  REQUIRE(so.torsion.size() == 1);
  CHECK(so.torsion[0] == 2);
}

TEST_CASE("direction sharpness at the basepoint") {
  const CuspedManifold& m = fixture();
  PointH3 O = m.basepoint;
  double e = std::exp(1.0);
  Isometry vertical(e, 0.0, 0.0, 1.0 / e);  // axis through O, pointing up
  TangentVector up{O, Vec3{0, 0, 1}};
  TangentVector side{O, Vec3{1, 0, 0}};
  CHECK(is_delta_sharp(m, vertical, 0.01, up));
  CHECK_FALSE(is_delta_sharp(m, vertical, 0.01, side));
  // 100 * delta above pi/2 accepts even the sideways frame.
  CHECK(is_delta_sharp(m, vertical, 0.017, side));
  // Near-identity elements are never sharp.
  CHECK_FALSE(is_delta_sharp(m, Isometry::identity(), 0.01, up));
}

TEST_CASE("five-term expression and its antisymmetry pairing") {
  const CuspedManifold& m = fixture();
  Frame center{evaluate_word(m, "ab")};
  Psi1Aux aux;
  aux.tripod.legs = {FramedSegment{frame_rotate(center, 0.0), 1.3, 0.2},
                     FramedSegment{frame_rotate(center, 2.1), 1.7, -0.4},
                     FramedSegment{frame_rotate(center, 4.2), 0.9, 0.9}};
  aux.tripod.chirality = true;
  aux.b = FramedSegment{Frame{evaluate_word(m, "b")}, 2.0, 0.3};

  SpinWord g{make_word(m, "ab'ab"), false};
  Psi1Result r1 = psi1_expression(m, g, aux);
  REQUIRE(r1.report.size() == 5);
  CHECK(r1.expression.signature().size() <= 5);

  // The paired data for g^-1 cancels the expression term by term once the
  // powers of g are allowed as conjugators.
  SpinWord gi{inverse_word(m, g.g), g.spin};
  Psi1Aux paired = psi1_paired_aux(m, g, aux);
  CHECK_FALSE(paired.tripod.chirality);
  Psi1Result r2 = psi1_expression(m, gi, paired);

  FormalMulticurve total;
  total.set_conjugators({g.g.iso, g.g.iso * g.g.iso});
  total.add(r1.expression, 1);
  total.add(r2.expression, 1);
  CHECK(total.zero());

  // Legs must share a center.
  Psi1Aux bad = aux;
  bad.tripod.legs[1].start = Frame{evaluate_word(m, "b")};
  CHECK_THROWS_WITH_AS(psi1_expression(m, g, bad), doctest::Contains("center"),
                       std::invalid_argument);
}
