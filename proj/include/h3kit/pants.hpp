#pragma once
// Good curves and good pants: complex half-lengths, goodness predicates,
// curve enumeration with conjugacy dedup, the integer ledger of formal
// multicurves and panted collections with its boundary map, assembly of
// pants from bigons and connections, and the formal rewrite rules.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "h3kit/cusps.hpp"
#include "h3kit/framed.hpp"
#include "h3kit/hyp3.hpp"

namespace h3 {

// Distance in C / 2 pi i Z from a complex value to a real target.
double complex_length_dist(ComplexLength l, double target);

struct GoodCurveClass {
  Isometry rep;        // conjugacy representative
  ComplexLength clen;  // complex length of rep
  double height = 0.0;
  std::string word;  // canonical cyclic word when known, else empty
};

GoodCurveClass make_curve(const Isometry& rep, std::string word = {});

// A pair of pants with cuff holonomies u, v, (uv)^-1.
struct PantsRep {
  Isometry u, v;
  std::string u_word, v_word;  // optional
  Isometry third() const { return (u * v).inverse(); }
};

struct HalfLengths {
  std::array<ComplexLength, 3> hl;  // for cuffs u, v, (uv)^-1
  std::array<ComplexLength, 3> l;   // full complex lengths
};

// Complex half-lengths: for each cuff, the complex distance along its axis
// between the feet of the two seams (common perpendiculars to the other
// two cuff axes).  Throws on degenerate pants (shared axes).
HalfLengths half_lengths(const PantsRep& p);

bool is_good_curve(const Isometry& g, double R, double eps);
bool is_good_pants(const PantsRep& p, double R, double eps);

// --- formal ledgers -----------------------------------------------------------

// Integer combination of good-curve classes modulo the orientation-reversal
// relation (a curve plus its reverse is zero).  Entries with word data are
// identified by canonical cyclic words; entries without are identified when
// their matrices match modulo sign, inverse, and the supplied candidate
// conjugators.
class FormalMulticurve {
 public:
  struct Entry {
    GoodCurveClass curve;
    long long coeff = 0;
  };

  void add(const GoodCurveClass& c, long long k);
  void add(const FormalMulticurve& other, long long k = 1);
  // Extra conjugators to try when matching matrix-only entries.
  void set_conjugators(std::vector<Isometry> cs) { conjugators_ = std::move(cs); }

  const std::vector<Entry>& entries() const { return entries_; }
  bool zero() const;
  // Coefficient of the class of c (negated when c matches a stored entry
  // reversed); 0 when absent.
  long long coeff_of(const GoodCurveClass& c) const;
  std::vector<long long> signature() const;  // sorted nonzero coefficients

 private:
  std::vector<Entry> entries_;
  std::vector<Isometry> conjugators_;
  // 1: same class; -1: reverse class; 0: distinct.
  int match(const GoodCurveClass& a, const GoodCurveClass& b) const;
};

struct PantedLedger {
  struct Entry {
    PantsRep pants;
    long long coeff = 0;
  };
  std::vector<Entry> entries;
  double height_bound = 0.0;

  void add(const PantsRep& p, long long k);
};

// Oriented boundary: each pants contributes its three cuffs with its
// coefficient; linear, and the reversed pants contributes the negatives.
FormalMulticurve boundary(const PantedLedger& ledger);
PantsRep reverse_pants(const PantsRep& p);

// --- enumeration ---------------------------------------------------------------

struct CurveCensus {
  std::vector<GoodCurveClass> curves;
  bool horizon_certified = true;  // false when 2R+2eps exceeded the radius
  double radius_used = 0.0;
};

CurveCensus enumerate_good_curves(const CuspedManifold& m, double R, double eps,
                                  double h_cap, double radius_cap = 8.0);

// --- assembly -------------------------------------------------------------------

// The path transporter of a framed segment: the isometry carrying its start
// frame to its end frame.
Isometry transporter(const FramedSegment& s);

struct AssemblyCheck {
  std::string what;
  double value = 0.0, bound = 0.0;
  bool ok = true;
};

struct SplitResult {
  PantsRep pants;
  std::array<GoodCurveClass, 3> cuffs;  // [ss'], reverse[sm], reverse[m-bar s']
  std::array<long long, 3> signs;       // {+1, -1, -1}
  std::vector<AssemblyCheck> report;
  bool all_good = true;
};

// Splits the bigon (s, s') along the connection m (a segment from the
// terminal point of s back to its initial point): pants with cuffs [ss'],
// reverse[sm], reverse[m-bar s'].  Goodness and height failures are
// reported, not fatal; endpoint mismatches throw.
SplitResult split_assemble(const FramedSegment& s, const FramedSegment& sp,
                           const FramedSegment& mconn, double R, double eps,
                           const CuspedManifold* m = nullptr, double h_cap = 1e9);

struct SwapResult {
  PantedLedger ledger;  // four pants with signs +,+,-,-
  FormalMulticurve bdry;
  std::vector<AssemblyCheck> report;
};

// Step-one swap assembly: pastes the four pants split off the shared
// connection; the boundary is [ab] + [a'b'] - [ab'] - [a'b].
SwapResult swap_assemble_step1(const FramedSegment& a, const FramedSegment& b,
                               const FramedSegment& ap, const FramedSegment& bp,
                               const FramedSegment& mconn, double R, double eps);

// --- rewrites --------------------------------------------------------------------

enum class RewriteKind { swap, rotation, antirotation };

struct RewriteResult {
  FormalMulticurve curves;
  std::string certificate;
};

// Formal rewrites on multicurves: swap replaces [ab]+[a'b'] by [ab']+[a'b]
// (operands: the four curves in that order); rotation consumes three
// curves of coefficient +1; antirotation consumes three of coefficient -1.
// Operands must be present with the required signs.
RewriteResult ledger_rewrite(RewriteKind kind, const FormalMulticurve& in,
                             const std::vector<GoodCurveClass>& operands);

// --- homology image ---------------------------------------------------------------

// Exponent-sum vector of the curve's word in the generator basis; the image
// in H1 is this vector reduced by the words module's abelianization.
std::vector<long long> exponent_vector(const CuspedManifold& m, const std::string& word);
std::vector<long long> phi_h1(const GoodCurveClass& curve, const CuspedManifold& m);
std::vector<long long> phi_h1(const FormalMulticurve& mc, const CuspedManifold& m);

}  // namespace h3
