#pragma once
// Computational core of the connection search: Cartan (KAK) factorization
// of isometries, window membership with margins, window measure estimates,
// orbit counting against e^{2t}, the injectivity-radius proxy, and the
// search for framed connection segments between two frames.

#include <cstdint>
#include <string>
#include <vector>

#include "h3kit/cusps.hpp"
#include "h3kit/framed.hpp"
#include "h3kit/hyp3.hpp"

namespace h3 {

// g = k_minus * diag(e^{(d+i psi)/2}, e^{-(d+i psi)/2}) * k_plus with both
// k factors in SU(2).  The canonical representative of the residual U(1)
// freedom makes the top-left entry of k_plus real nonnegative.
struct CartanFactors {
  Isometry k_minus, k_plus;
  double d = 0.0;    // translation part, = dist(O, gO)
  double psi = 0.0;  // rotation part, in (-pi, pi]
  bool compact = false;  // input within 1e-12 of unitary: d = 0, psi absorbed
};

CartanFactors cartan_decompose(const Isometry& g);
Isometry cartan_reconstruct(const CartanFactors& f);

// Rotation angle of a (near-)unitary isometry, in [0, pi]; the distance
// from the identity in the compact-factor metric.
double rotation_angle(const Isometry& k);

struct Window {
  double t;      // target length, > 0
  double theta;  // target phase
  double delta;  // ball radius in each factor
  // The small-ball regime of the estimates wants delta < pi/100; the desk
  // scale searches run far above it, so this is a flag, not an error.
  bool small_delta() const { return delta < 3.14159265358979e-2; }
};

struct WindowMargins {
  bool inside = false;
  double d_margin = 0, psi_margin = 0, km_margin = 0, kp_margin = 0;
  double min_margin() const;
};

// Strict membership: |d - t| < delta, circle distance(psi, theta) < delta,
// and both compact factors within delta of the identity in rotation angle.
WindowMargins in_window(const Isometry& g, const Window& w);

// min(1, half the smallest frame displacement under nontrivial group
// elements), with the frame metric proxied by base-point distance plus
// compact-part rotation angle.  word_bound caps the enumeration effort;
// the result is monotone nonincreasing in it.
double epsilon_inj(const CuspedManifold& m, const Frame& f, int word_bound);

struct EtaEstimate {
  double analytic = 0;
  double monte_carlo = 0;
  double stderr_ = 0;
  long long samples = 0;
  bool small_ball = true;  // false flags delta > 0.1 (outside the regime)
};

// Window measure with the product slice convention: (1/4)^2 times the
// area pi delta^2 of each compact-slice ball times (2 delta)^2 for the
// length-phase factor; Monte Carlo integrates the same convention.
EtaEstimate eta_E_ball(double delta, long long samples = 1000000, uint64_t seed = 1);

struct ConnectConfig {
  double delta_prime = 0.0;  // reported, not enforced (non-constructive in the source)
  double T = 5.0;
  double C = 3.0;
  double kappa = 0.5;
  double horizon = 12.0;  // enumeration radius cap
};

struct WindowCount {
  long long count = 0;
  double normalized = 0;  // count * e^{-2t}
};

// Exact count of enumerated gamma with g^-1 gamma h in the window.
// Throws "enumeration horizon too small" when t + delta exceeds the
// configured horizon.
WindowCount count_in_window(const CuspedManifold& m, const Frame& g, const Frame& h,
                            const Window& w, const ConnectConfig& cfg = {});

struct HeightCaps {
  double initial, terminal, intermediate;
};

// Caps of the connection statement, phrased from the frame data: the
// initial cap is h_p + min(ln sec alpha, ln(1/delta) + C) and the
// intermediate cap is (1/2) ln t + C ln(1/delta) + C.
HeightCaps connection_height_caps(const CuspedManifold& m, const Frame& p,
                                  const Frame& q, const Window& w,
                                  const ConnectConfig& cfg = {});

struct ConnectionHit {
  FramedSegment seg;
  Isometry gamma;
  CartanFactors factors;
  WindowMargins margins;
  std::vector<Excursion> exc;
  bool caps_ok = true;
  std::vector<std::string> flags;  // excursions exceeding their caps
};

// Every in-window gamma converted to its framed segment (start frame
// g k_minus, length d, phase psi), annotated with excursions and flagged
// against the caps; sorted by decreasing window margin.
std::vector<ConnectionHit> find_connections(const CuspedManifold& m, const Frame& p,
                                            const Frame& q, const Window& w,
                                            const HeightCaps& caps,
                                            const ConnectConfig& cfg = {});

}  // namespace h3
