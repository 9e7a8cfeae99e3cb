#include "h3kit/connect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace h3 {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Deterministic counter-based generator: the i-th sample never depends on
// how many threads produced the others.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline double unit_double(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Enumerates candidate gamma with dist(x, gamma y) in [rlo, rhi] and hands
// them to fn; exact sweep on the Eisenstein engine, word search otherwise.
void enumerate_candidates(const CuspedManifold& m, const PointH3& x, const PointH3& y,
                          double rlo, double rhi, double horizon,
                          const std::function<void(const Isometry&)>& fn) {
  if (rhi > horizon) throw std::runtime_error("enumeration horizon too small");
  if (m.exact) {
    sweep_annulus(*m.exact, x, y, rlo, rhi,
                  [&](const EMat& e, double) { fn(e.to_isometry()); });
    return;
  }
  // Word search measures displacement from the basepoint; translate the
  // annulus condition through the triangle inequality.
  const PointH3 O = m.basepoint;
  double r = rhi + dist(O, x) + dist(O, y);
  for (const OrbitElement& g : orbit_ball(m, r)) {
    double d = dist(x, apply(g.iso, y));
    if (d >= rlo - 1e-12 && d <= rhi + 1e-12) fn(g.iso);
  }
  double did = dist(x, y);
  if (did >= rlo - 1e-12 && did <= rhi + 1e-12) fn(Isometry::identity());
}

}  // namespace

double rotation_angle(const Isometry& k) {
  double half = std::min(1.0, std::abs(k.trace()) / 2.0);
  return 2.0 * std::acos(half);
}

CartanFactors cartan_decompose(const Isometry& g) {
  CartanFactors f;
  // H = g g* is Hermitian positive with det 1; its larger eigenvalue is
  // e^d. Stable via tr H = frob2 >= 2.
  double tr = g.frob2();
  double gap = std::sqrt(std::max(0.0, tr * tr - 4.0));
  double lmax = 0.5 * (tr + gap);
  f.d = std::log(lmax);
  if (f.d < 1e-12) {
    f.compact = true;
    f.d = 0.0;
    f.psi = 0.0;
    f.k_minus = g;
    f.k_plus = Isometry::identity();
    return f;
  }
  cplx Hq = g.a * std::conj(g.c) + g.b * std::conj(g.d);  // off-diagonal of H
  double Hp = std::norm(g.a) + std::norm(g.b);            // top-left of H
  double Hr = tr - Hp;
  // Eigenvector of H for lmax: the larger of the two columns of
  // (H - lmin I); both are lmax-eigenvectors since (H-lmin)(H-lmax) = 0.
  cplx u1, u2;
  if (std::abs(lmax - Hr) >= std::abs(lmax - Hp)) {
    u1 = lmax - Hr;  // first column: (Hp - lmin, conj(Hq))
    u2 = std::conj(Hq);
  } else {
    u1 = Hq;  // second column: (Hq, Hr - lmin)
    u2 = lmax - Hp;
  }
  double n = std::sqrt(std::norm(u1) + std::norm(u2));
  u1 /= n;
  u2 /= n;
  f.k_minus = Isometry(u1, -std::conj(u2), u2, std::conj(u1));
  Isometry M = f.k_minus.inverse() * g;
  // M = diag(mu, 1/mu) * k_plus with |mu| = e^{d/2}; the phase of mu is
  // pinned by making the top-left of k_plus real nonnegative.
  double mu_abs = std::sqrt(std::norm(M.a) + std::norm(M.b));
  cplx pivot = (std::abs(M.a) > 1e-14 * mu_abs) ? M.a : M.b;
  cplx mu = mu_abs * (pivot / std::abs(pivot));
  f.psi = wrap_angle(2.0 * std::arg(mu));
  f.k_plus = Isometry(M.a / mu, M.b / mu, -std::conj(M.b / mu), std::conj(M.a / mu));
  return f;
}

Isometry cartan_reconstruct(const CartanFactors& f) {
  cplx half = std::exp(cplx(f.d / 2.0, f.psi / 2.0));
  Isometry mid(half, 0.0, 0.0, 1.0 / half);
  return f.k_minus * mid * f.k_plus;
}

double WindowMargins::min_margin() const {
  return std::min(std::min(d_margin, psi_margin), std::min(km_margin, kp_margin));
}

WindowMargins in_window(const Isometry& g, const Window& w) {
  CartanFactors f = cartan_decompose(g);
  WindowMargins r;
  r.d_margin = w.delta - std::abs(f.d - w.t);
  r.psi_margin = w.delta - circle_dist(f.psi, w.theta);
  r.km_margin = w.delta - rotation_angle(f.k_minus);
  r.kp_margin = w.delta - rotation_angle(f.k_plus);
  r.inside = r.d_margin > 0 && r.psi_margin > 0 && r.km_margin > 0 && r.kp_margin > 0;
  return r;
}

double epsilon_inj(const CuspedManifold& m, const Frame& f, int word_bound) {
  // Displacements of 2 or more are capped away; the enumeration radius also
  // grows with word_bound so the value is monotone nonincreasing in it.
  double radius = std::min(2.0, 0.25 * static_cast<double>(word_bound));
  if (radius <= 0) return 1.0;
  PointH3 p = frame_point(f);
  double best = 2.0;
  auto consider = [&](const Isometry& gamma) {
    Isometry rel = f.iso.inverse() * gamma * f.iso;
    if (classify(rel) == IsoClass::identity) return;
    CartanFactors cf = cartan_decompose(rel);
    double disp = cf.d + rotation_angle(cf.k_minus * cf.k_plus);
    best = std::min(best, disp);
  };
  if (m.exact) {
    sweep_annulus(*m.exact, p, p, 0.0, radius,
                  [&](const EMat& e, double) { consider(e.to_isometry()); });
  } else {
    double r = std::min(radius + 2.0 * dist(m.basepoint, p),
                        std::min(8.0, 0.25 * word_bound + 2.0 * dist(m.basepoint, p)));
    for (const OrbitElement& g : orbit_ball(m, r)) consider(g.iso);
  }
  return std::min(1.0, 0.5 * best);
}

EtaEstimate eta_E_ball(double delta, long long samples, uint64_t seed) {
  EtaEstimate e;
  e.samples = samples;
  e.small_ball = delta <= 0.1;
  e.analytic = (1.0 / 16.0) * (kPi * delta * delta) * (kPi * delta * delta) *
               (2.0 * delta) * (2.0 * delta);
  if (delta <= 0) return e;
  long long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (long long i = 0; i < samples; ++i) {
    uint64_t s = splitmix64(seed * 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(i));
    double x[6];
    for (int k = 0; k < 6; ++k) {
      s = splitmix64(s);
      x[k] = (2.0 * unit_double(s) - 1.0) * delta;
    }
    bool in = (x[0] * x[0] + x[1] * x[1] < delta * delta) &&
              (x[2] * x[2] + x[3] * x[3] < delta * delta);
    // x[4], x[5] (length and phase offsets) are inside their box by
    // construction; sampled anyway to keep the six-dimensional convention
    // explicit.
    if (in) ++hits;
  }
  double cell = (1.0 / 16.0) * std::pow(2.0 * delta, 6);
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  e.monte_carlo = cell * p;
  e.stderr_ = cell * std::sqrt(std::max(p * (1.0 - p), 1e-300) /
                               static_cast<double>(samples));
  return e;
}

WindowCount count_in_window(const CuspedManifold& m, const Frame& g, const Frame& h,
                            const Window& w, const ConnectConfig& cfg) {
  if (cfg.delta_prime > 0) {
    if (epsilon_inj(m, g, 32) <= cfg.delta_prime ||
        epsilon_inj(m, h, 32) <= cfg.delta_prime)
      throw std::runtime_error("count_in_window: frame injectivity below delta_prime");
  }
  PointH3 p = frame_point(g), q = frame_point(h);
  Isometry gi = g.iso.inverse();
  WindowCount out;
  enumerate_candidates(m, p, q, std::max(0.0, w.t - w.delta - 1e-9),
                       w.t + w.delta + 1e-9, cfg.horizon, [&](const Isometry& gamma) {
                         if (in_window(gi * gamma * h.iso, w).inside) ++out.count;
                       });
  out.normalized = static_cast<double>(out.count) * std::exp(-2.0 * w.t);
  return out;
}

HeightCaps connection_height_caps(const CuspedManifold& m, const Frame& p,
                                  const Frame& q, const Window& w,
                                  const ConnectConfig& cfg) {
  double ld = std::log(1.0 / w.delta) + cfg.C;
  PointH3 pp = frame_point(p), qq = frame_point(q);
  double hp = height_point(m, pp), hq = height_point(m, qq);
  double ap = alpha_angle(m, pp, frame_tangent(p));
  Vec3 back = frame_tangent(q);
  double aq = alpha_angle(m, qq, Vec3{-back.x, -back.y, -back.z});
  auto sec_term = [&](double alpha) {
    if (alpha >= kPi / 2 - 1e-12) return ld;
    return std::min(std::log(1.0 / std::cos(alpha)), ld);
  };
  HeightCaps caps;
  caps.initial = hp + sec_term(ap);
  caps.terminal = hq + sec_term(aq);
  caps.intermediate = 0.5 * std::log(std::max(w.t, 1.0)) +
                      cfg.C * std::log(1.0 / w.delta) + cfg.C;
  return caps;
}

std::vector<ConnectionHit> find_connections(const CuspedManifold& m, const Frame& p,
                                            const Frame& q, const Window& w,
                                            const HeightCaps& caps,
                                            const ConnectConfig& cfg) {
  PointH3 pp = frame_point(p), qq = frame_point(q);
  if (height_point(m, pp) > cfg.kappa * w.t || height_point(m, qq) > cfg.kappa * w.t)
    throw std::runtime_error("find_connections: frame heights exceed the kappa*t gate");
  Isometry gi = p.iso.inverse();
  std::vector<ConnectionHit> out;
  enumerate_candidates(
      m, pp, qq, std::max(0.0, w.t - w.delta - 1e-9), w.t + w.delta + 1e-9, cfg.horizon,
      [&](const Isometry& gamma) {
        Isometry rel = gi * gamma * q.iso;
        WindowMargins mg = in_window(rel, w);
        if (!mg.inside) return;
        ConnectionHit hit;
        hit.gamma = gamma;
        hit.margins = mg;
        hit.factors = cartan_decompose(rel);
        hit.seg = FramedSegment{Frame{p.iso * hit.factors.k_minus}, hit.factors.d,
                                hit.factors.psi};
        PointH3 a = frame_point(hit.seg.start);
        PointH3 b = frame_point(end_frame(hit.seg));
        hit.exc = excursions(m, a, b);
        for (const Excursion& e : hit.exc) {
          double cap = e.kind == Excursion::Kind::initial
                           ? caps.initial
                           : (e.kind == Excursion::Kind::terminal ? caps.terminal
                                                                  : caps.intermediate);
          if (e.peak_height > cap) {
            hit.caps_ok = false;
            hit.flags.push_back(
                "excursion peak " + std::to_string(e.peak_height) + " exceeds cap " +
                std::to_string(cap));
          }
        }
        out.push_back(std::move(hit));
      });
  std::sort(out.begin(), out.end(), [](const ConnectionHit& x, const ConnectionHit& y) {
    double mx = x.margins.min_margin(), my = y.margins.min_margin();
    if (mx != my) return mx > my;
    auto key = [](const Isometry& g) {
      return std::array<double, 8>{g.a.real(), g.a.imag(), g.b.real(), g.b.imag(),
                                   g.c.real(), g.c.imag(), g.d.real(), g.d.imag()};
    };
    return key(x.gamma) < key(y.gamma);
  });
  return out;
}

}  // namespace h3
