#pragma once
// Words in the manifold's generators: evaluation, displacement balls,
// length reduction with verified decrements, expression of deep elements as
// bounded products, abelianization and homology with spin, direction
// sharpness, and the five-term formal expression with its antisymmetry
// pairing.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "h3kit/cusps.hpp"
#include "h3kit/framed.hpp"
#include "h3kit/hyp3.hpp"
#include "h3kit/pants.hpp"

namespace h3 {

struct GroupWord {
  std::string letters;  // lowercase generator, uppercase inverse
  Isometry iso;         // cached evaluation
};

GroupWord make_word(const CuspedManifold& m, const std::string& letters);
GroupWord concat(const CuspedManifold& m, const GroupWord& a, const GroupWord& b);
GroupWord inverse_word(const CuspedManifold& m, const GroupWord& g);
// Free reduction plus cancellation of trivial-evaluation prefixes is NOT
// attempted; letters are kept as given, only adjacent inverse pairs drop.
std::string free_reduce(const std::string& letters);

// Displacement of g from the basepoint orbit: d(O, gO).
double displacement(const CuspedManifold& m, const Isometry& g);

// Membership of g in the displacement ball B_r (identity excluded); when s
// is given, the ball about distinct base orbits: d(sO, g sO) <= r.
bool in_B(const CuspedManifold& m, const Isometry& g, double r,
          const std::optional<Isometry>& base = std::nullopt);

// --- reduction constants -------------------------------------------------------

struct ReductionConstants {
  double D1 = 0;  // max cusp cross-section diameter at the horoball cutoff
  double D2 = 0;  // sampled diameter bound of the thick part
  double D3 = 0;  // excursion split threshold: max(ln(6)/2, ln(1+5*D1^2))
  double D = 0;   // reduction threshold 2*(D2+D3)+2
};

ReductionConstants reduction_constants(const CuspedManifold& m, int samples = 400,
                                       std::uint64_t seed = 7);

// --- reduction ------------------------------------------------------------------

struct ReduceResult {
  bool reduced = false;
  GroupWord left, right;  // g = left * right when reduced
  double len_g = 0, len_left = 0, len_right = 0;
  std::string note;  // "below reduction threshold" pass-through, etc.
};

// Splits g as left*right with both factors at least 1/2 shorter than g
// (displacement lengths).  Splits at the deepest cusp excursion of the
// geodesic representative when one exceeds D3, augmenting candidates by
// cusp-stabilizer translations; otherwise near the midpoint.  Decrements
// are always verified; throws "irreducible at depth" when no candidate in
// the search pool achieves them.
ReduceResult reduce_element(const CuspedManifold& m, const ReductionConstants& rc,
                            const GroupWord& g, int search_depth = 64);

struct ExpressResult {
  std::vector<GroupWord> factors;  // each with displacement <= K, product = g
  int splits = 0;
};

// Expresses g as a product of at most 2^(ceil(2(|g|-K))+1) elements of B_K,
// K >= D, by repeated verified splitting.
ExpressResult express_in_ball(const CuspedManifold& m, const ReductionConstants& rc,
                              const GroupWord& g, double K, int search_depth = 64);

// --- homology --------------------------------------------------------------------

struct Abelianization {
  std::vector<long long> torsion;  // invariant factors > 1
  int free_rank = 0;
  // Reduce an exponent vector to canonical coordinates (torsion coords
  // reduced into [0, d), then free coords).
  std::vector<long long> reduce(const std::vector<long long>& x) const;
  // Internals: SNF change of basis, class of x is (U x) reduced.
  std::vector<std::vector<long long>> U;
  std::vector<long long> diag;  // full diagonal incl. 1s and 0s
};

Abelianization abelianize(const CuspedManifold& m);
// H1 of the orientation double cover data: the abelianization with an extra
// order-2 spin factor.
Abelianization h1_so(const CuspedManifold& m);

// --- sharpness -------------------------------------------------------------------

// True when the geodesic representative of g leaves the basepoint within
// angle 100*delta of t and returns within 100*delta of -t (directions
// measured at the basepoint, arrival direction pulled back by g^-1 and
// reversed).  The reference direction is an explicit parameter; there is
// no implicit base frame.
bool is_delta_sharp(const CuspedManifold& m, const Isometry& g, double delta,
                    const TangentVector& base);

// --- five-term expression ----------------------------------------------------------

struct Tripod {
  std::array<FramedSegment, 3> legs;  // from a common center
  bool chirality = true;
};

struct SpinWord {
  GroupWord g;
  bool spin = false;
};

struct Psi1Aux {
  Tripod tripod;
  FramedSegment b;
};

struct Psi1Result {
  FormalMulticurve expression;  // +[s a01] +[s a12] +[s a20] -[s b] -[s b-bar]
  std::vector<AssemblyCheck> report;
};

Psi1Result psi1_expression(const CuspedManifold& m, const SpinWord& g, const Psi1Aux& aux);
// The paired auxiliary data for g^-1 under which the two expressions cancel
// term by term (legs and chord transported by g^-1, chirality flipped).
Psi1Aux psi1_paired_aux(const CuspedManifold& m, const SpinWord& g, const Psi1Aux& aux);

}  // namespace h3
