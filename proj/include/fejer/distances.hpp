#pragma once

// Generalized distances on R^d: the metric, the Bregman-type distance
// phi(x,y) = |x|^2 - 2<x,Jy> + |y|^2 over l_p, and a small catalog of
// (weakly) triangular distances, each carrying its moduli.

#include "fejer/moduli.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fejer {

using Point = Eigen::VectorXd;

/// Uniform double in [0,1) from 53 random bits.
inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double lp_norm(const Point& x, double p) {
  double s = x.cwiseAbs().maxCoeff();
  if (x.size() == 0 || s == 0.0) return 0.0;
  if (std::isinf(p)) return s;
  double acc = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]) / s, p);
  return s * std::pow(acc, 1.0 / p);
}

/// Point drawn uniformly in the cube [-r,r]^d and rescaled into the l_p
/// ball of radius r when it falls outside.
inline Point random_in_ball(std::mt19937_64& rng, unsigned dim, double p, double r) {
  Point x(dim);
  for (unsigned i = 0; i < dim; ++i) x[i] = (2 * unit_real(rng) - 1) * r;
  double n = lp_norm(x, p);
  if (n > r) x *= r / n * unit_real(rng);
  return x;
}

/// l_p^d with integer p >= 2 and the constants used by the Alber/Figiel bounds.
struct LpSpace {
  unsigned dim = 2;
  unsigned p = 2;
  Rational M = 1;
  RealModulus eta;
  Rational L_low = 1;
  Rational L_high = Rational(318, 100);

  static RealModulus default_eta(unsigned p) {
    // eps^p / (p 2^p)
    return RealModulus(
        [p](const Rational& e) {
          return Rational(pow_rat(e, p) / Rational(Nat(p) * (Nat(1) << p)));
        },
        "eta_lp");
  }

  static LpSpace make(unsigned dim, unsigned p, Rational M = 1) {
    if (dim < 1) throw std::invalid_argument("dimension must be at least 1");
    if (p < 2) throw std::invalid_argument("p must be an integer >= 2");
    LpSpace s;
    s.dim = dim;
    s.p = p;
    s.M = std::move(M);
    s.eta = default_eta(p);
    return s;
  }

  double pd() const { return static_cast<double>(p); }
  double q() const { return pd() / (pd() - 1.0); }
  Rational q_exact() const { return Rational(Nat(p), Nat(p - 1)); }
  double norm(const Point& x) const { return lp_norm(x, pd()); }
  double dual_norm(const Point& u) const { return lp_norm(u, q()); }
  double dist(const Point& x, const Point& y) const { return norm(x - y); }
};

namespace detail {
inline Point power_map(const Point& x, double expo) {
  double s = lp_norm(x, expo);
  Point out = Point::Zero(x.size());
  if (s == 0.0) return out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double a = std::abs(x[i]) / s;
    double v = s * std::pow(a, expo - 1.0);
    out[i] = x[i] < 0 ? -v : v;
  }
  return out;
}
}  // namespace detail

/// Jx = |x|_p^{2-p} (|x_i|^{p-1} sgn x_i).
inline Point duality_map(const LpSpace& space, const Point& x) {
  if (space.p == 2) return x;
  return detail::power_map(x, space.pd());
}

/// J^{-1} u: the duality map of l_q applied to u.
inline Point duality_map_inverse(const LpSpace& space, const Point& u) {
  if (space.p == 2) return u;
  return detail::power_map(u, space.q());
}

struct DualityReport {
  std::size_t checked = 0;
  double pairing_err = 0;    ///< max |<x,Jx> - |x|^2| / (1 + |x|^2)
  double norm_err = 0;       ///< max ||Jx|_q - |x||
  double roundtrip_err = 0;  ///< max |J^{-1}Jx - x|_inf
};

/// <x,Jx> = |x|^2, |Jx|_q = |x| and J^{-1}J = id on random points of the ball of radius r.
inline DualityReport duality_identity_check(const LpSpace& space, std::size_t points, double r, std::mt19937_64& rng) {
  DualityReport rep;
  for (std::size_t i = 0; i < points; ++i) {
    Point x = random_in_ball(rng, space.dim, space.pd(), r);
    Point jx = duality_map(space, x);
    double n = space.norm(x);
    rep.pairing_err = std::max(rep.pairing_err, std::abs(x.dot(jx) - n * n) / (1 + n * n));
    rep.norm_err = std::max(rep.norm_err, std::abs(space.dual_norm(jx) - n));
    rep.roundtrip_err = std::max(rep.roundtrip_err, (duality_map_inverse(space, jx) - x).cwiseAbs().maxCoeff());
    ++rep.checked;
  }
  return rep;
}

inline double phi_eval(const LpSpace& space, const Point& x, const Point& y) {
  double nx = space.norm(x), ny = space.norm(y);
  double v = nx * nx - 2.0 * x.dot(duality_map(space, y)) + ny * ny;
  return v < 0 ? 0.0 : v;
}

/// Real-valued consistency moduli on the ball of radius b:
///   |x-y| <= Lambda(eps) -> phi(x,y) <= eps,   phi(x,y) <= lambda(eps) -> |x-y| <= eps.
struct ConsistencyModuli {
  RealModulus lambda;
  RealModulus Lambda;
};

inline ConsistencyModuli phi_consistency_moduli(const LpSpace& space, const Rational& b) {
  if (b <= 0) throw std::invalid_argument("ball radius must be positive");
  RealModulus eta = space.eta;
  Rational Lh = space.L_high, Ll = space.L_low;
  RealModulus lam(
      [eta, Lh, b](const Rational& e) { return Rational(b * b / Lh * eta(e / (4 * b))); }, "lambda~");
  RealModulus Lam([Ll, b](const Rational& e) { return Rational(e * Ll / (16 * b)); }, "Lambda~");
  return {lam, Lam};
}

struct NatConsistencyModuli {
  NatModulus lambda;
  NatModulus Lambda;
};

/// Integer forms: Lambda(k) = ceil(16 b (k+1) / L_low) - 1,
/// lambda(k) = ceil((L_high / b^2) / eta(1/(4b(k+1)))) - 1.
inline NatConsistencyModuli phi_consistency_moduli_nat(const LpSpace& space, const Rational& b) {
  if (b <= 0) throw std::invalid_argument("ball radius must be positive");
  RealModulus eta = space.eta;
  Rational Lh = space.L_high, Ll = space.L_low;
  auto lam = NatModulus::unary(
      [eta, Lh, b](const Nat& k) {
        Rational e = eta(Rational(1) / (4 * b * Rational(k + 1)));
        return monus(ceil_rat(Lh / (b * b) / e), Nat(1));
      },
      true, "lambda");
  auto Lam = NatModulus::unary(
      [Ll, b](const Nat& k) { return monus(ceil_rat(16 * b * Rational(k + 1) / Ll), Nat(1)); }, true,
      "Lambda");
  return {lam, Lam};
}

struct TriangularityModuli {
  NatModulus theta;
  NatModulus theta_weak;
};

/// theta(k) = lambda(2k+1), theta_weak(k) = lambda(2 Lambda(k) + 1).
inline TriangularityModuli consistency_to_triangularity(const NatModulus& lambda,
                                                        const NatModulus& Lambda) {
  bool mono = lambda.monotone() && Lambda.monotone();
  auto th = NatModulus::unary([lambda](const Nat& k) { return lambda(Nat(2 * k + 1)); }, lambda.monotone(),
                              "theta");
  auto tw = NatModulus::unary(
      [lambda, Lambda](const Nat& k) { return lambda(Nat(2 * Lambda(k) + 1)); }, mono, "theta_weak");
  return {th, tw};
}

struct RealTriangularityModuli {
  RealModulus theta;
  RealModulus theta_weak;
};

/// theta(eps) = lambda(eps/2), theta_weak(eps) = lambda(Lambda(eps)/2).
inline RealTriangularityModuli consistency_to_triangularity(const RealModulus& lambda,
                                                            const RealModulus& Lambda) {
  RealModulus th([lambda](const Rational& e) { return lambda(e / 2); }, "theta");
  RealModulus tw([lambda, Lambda](const Rational& e) { return lambda(Lambda(e) / 2); }, "theta_weak");
  return {th, tw};
}

/// A distance function with whichever moduli it certifies.
struct GeneralizedDistance {
  std::string kind;
  std::function<double(const Point&, const Point&)> eval;
  NatModulus theta;       ///< triangularity: phi(y,x),phi(y,z) small -> d(x,z) small
  NatModulus theta_weak;  ///< weak triangularity: ... -> phi(x,z) small
  std::optional<ConsistencyModuli> consistency;
  bool symmetric = false;
  bool reflexive = false;

  double operator()(const Point& x, const Point& y) const { return eval(x, y); }
};

inline GeneralizedDistance metric_distance(double p = 2.0) {
  GeneralizedDistance g;
  g.kind = "metric";
  g.eval = [p](const Point& x, const Point& y) { return lp_norm(x - y, p); };
  g.theta = g.theta_weak = NatModulus::affine(2, 1);
  g.symmetric = g.reflexive = true;
  return g;
}

inline GeneralizedDistance bregman_distance(const LpSpace& space) {
  GeneralizedDistance g;
  g.kind = "phi";
  g.eval = [space](const Point& x, const Point& y) { return phi_eval(space, x, y); };
  g.consistency = phi_consistency_moduli(space, space.M);
  auto nat = phi_consistency_moduli_nat(space, space.M);
  auto tri = consistency_to_triangularity(nat.lambda, nat.Lambda);
  g.theta = tri.theta;
  g.theta_weak = tri.theta_weak;
  g.reflexive = true;
  return g;
}

struct CatalogParams {
  double c = 1.0;                               ///< constant value / diameter bound
  std::function<Point(const Point&)> map;      ///< for map_pullback
  std::function<bool(const Point&)> in_set;    ///< for set_restricted
  double p = 2.0;                               ///< norm exponent
};

/// Smallest natural cbar with c >= 1/(cbar+1).
inline Nat constant_cbar(const Rational& c) {
  if (c <= 0) throw std::invalid_argument("constant distance needs c > 0");
  return monus(ceil_rat(Rational(1) / c), Nat(1));
}

inline GeneralizedDistance catalog_distance(const std::string& kind, const CatalogParams& prm = {}) {
  GeneralizedDistance g;
  g.kind = kind;
  double p = prm.p;
  auto two_k_plus_1 = NatModulus::affine(2, 1);
  if (kind == "metric") return metric_distance(p);
  if (kind == "norm_sum") {
    g.eval = [p](const Point& x, const Point& y) { return lp_norm(x, p) + lp_norm(y, p); };
    g.theta = g.theta_weak = two_k_plus_1;
    g.symmetric = true;
  } else if (kind == "norm_right") {
    g.eval = [p](const Point&, const Point& y) { return lp_norm(y, p); };
    g.theta = g.theta_weak = two_k_plus_1;
  } else if (kind == "constant") {
    double c = prm.c;
    Nat cbar = constant_cbar(rat_from_double(c));
    g.eval = [c](const Point&, const Point&) { return c; };
    g.theta = g.theta_weak = NatModulus::constant(Nat(cbar + 1));
    g.symmetric = true;
  } else if (kind == "map_pullback") {
    if (!prm.map) throw std::invalid_argument("map_pullback needs a map");
    auto T = prm.map;
    g.eval = [T, p](const Point& x, const Point& y) {
      Point tx = T(x);
      return std::max(lp_norm(tx - y, p), lp_norm(tx - T(y), p));
    };
    g.theta = g.theta_weak = two_k_plus_1;
  } else if (kind == "set_restricted") {
    if (!prm.in_set) throw std::invalid_argument("set_restricted needs a membership test");
    auto F = prm.in_set;
    double c = prm.c;
    Rational cr = rat_from_double(c);
    g.eval = [F, c, p](const Point& x, const Point& y) {
      return (F(x) && F(y)) ? lp_norm(x - y, p) : c;
    };
    g.theta = g.theta_weak = NatModulus::unary(
        [cr](const Nat& k) {
          Nat n0 = ceil_rat(Rational(1) / (cr * Rational(k + 1))) + 1;
          return monus(Nat(2 * n0 * (k + 1)), Nat(1));
        },
        true, "theta_set");
    g.symmetric = true;
  } else {
    throw std::invalid_argument("unknown distance kind: " + kind);
  }
  return g;
}

/// Monte-Carlo audit of the triangularity (and weak triangularity)
/// implications for k <= k_max. Triples are drawn uniformly in the ball of
/// radius `radius` and, to make the premise bite, also clustered around a
/// random centre and around the origin at the premise's scale.
inline ModulusReport check_triangularity(const GeneralizedDistance& g, std::mt19937_64& rng, unsigned dim,
                                         double radius, std::size_t triples, unsigned k_max = 6,
                                         double p = 2.0, double tol = 1e-12) {
  ModulusReport rep;
  for (std::size_t t = 0; t < triples; ++t) {
    unsigned k = static_cast<unsigned>(rng() % (k_max + 1));
    double th = to_double(g.theta(Nat(k)));
    double thw = to_double(g.theta_weak(Nat(k)));
    double scale = 1.0 / (std::min(th, thw) + 1.0);
    Point y, x, z;
    switch (t % 3) {
      case 0:
        y = random_in_ball(rng, dim, p, radius);
        x = random_in_ball(rng, dim, p, radius);
        z = random_in_ball(rng, dim, p, radius);
        break;
      case 1:
        y = random_in_ball(rng, dim, p, radius * 0.9);
        x = y + random_in_ball(rng, dim, p, scale);
        z = y + random_in_ball(rng, dim, p, scale);
        break;
      default:
        y = random_in_ball(rng, dim, p, scale);
        x = random_in_ball(rng, dim, p, scale);
        z = random_in_ball(rng, dim, p, scale);
        break;
    }
    double a = g(y, x), b = g(y, z);
    double target = 1.0 / (k + 1.0);
    if (a <= 1.0 / (th + 1.0) && b <= 1.0 / (th + 1.0)) {
      ++rep.checked;
      double d = lp_norm(x - z, p);
      if (d > target + tol) rep.violations.push_back({"strong k=" + std::to_string(k), d, target});
    }
    if (a <= 1.0 / (thw + 1.0) && b <= 1.0 / (thw + 1.0)) {
      ++rep.checked;
      double w = g(x, z);
      if (w > target + tol) rep.violations.push_back({"weak k=" + std::to_string(k), w, target});
    }
  }
  return rep;
}

/// Audits both consistency implications of the real moduli on pairs in
/// the ball of radius b. Half of the pairs are placed at the premise's
/// scale so the implications are exercised rather than vacuous.
inline ModulusReport check_consistency(const LpSpace& space, const ConsistencyModuli& cm, const Rational& b,
                                       const std::vector<Rational>& eps_list, std::mt19937_64& rng,
                                       std::size_t pairs, double tol = 1e-12) {
  ModulusReport rep;
  double bd = to_double(b);
  for (const auto& eps : eps_list) {
    double e = to_double(eps);
    double lam = to_double(cm.lambda(eps));
    double Lam = to_double(cm.Lambda(eps));
    for (std::size_t t = 0; t < pairs; ++t) {
      Point x = random_in_ball(rng, space.dim, space.pd(), bd);
      Point y;
      if (t % 2 == 0) {
        y = random_in_ball(rng, space.dim, space.pd(), bd);
      } else {
        double r = (t % 4 == 1) ? Lam : std::max(e, Lam) * 2;
        y = x + random_in_ball(rng, space.dim, space.pd(), r);
        double ny = space.norm(y);
        if (ny > bd) y *= bd / ny;
      }
      double d = space.dist(x, y);
      double ph = phi_eval(space, x, y);
      if (d <= Lam) {
        ++rep.checked;
        if (ph > e + tol) rep.violations.push_back({"Lambda eps=" + eps.str(), ph, e});
      }
      if (ph <= lam) {
        ++rep.checked;
        if (d > e + tol) rep.violations.push_back({"lambda eps=" + eps.str(), d, e});
      }
    }
  }
  return rep;
}

/// (2/L_high) b^2 eta(|x-y|/4b) <= phi(x,y) <= 16 b |x-y| on pairs in the ball of radius b.
inline ModulusReport alber_bounds_check(const LpSpace& space, const Rational& b, std::size_t trials,
                                        std::mt19937_64& rng, double tol = 1e-12) {
  ModulusReport rep;
  double bd = to_double(b);
  double Lh = to_double(space.L_high);
  for (std::size_t t = 0; t < trials; ++t) {
    Point x = random_in_ball(rng, space.dim, space.pd(), bd);
    Point y = (t % 2 == 0) ? random_in_ball(rng, space.dim, space.pd(), bd)
                           : Point(x + random_in_ball(rng, space.dim, space.pd(), bd * 0.05));
    double ny = space.norm(y);
    if (ny > bd) y *= bd / ny;
    double d = space.dist(x, y);
    double ph = phi_eval(space, x, y);
    double lower = d == 0 ? 0.0 : 2.0 / Lh * bd * bd * to_double(space.eta(rat_from_double(d / (4 * bd))));
    double upper = 16.0 * bd * d;
    ++rep.checked;
    if (lower > ph + tol) rep.violations.push_back({"lower", lower, ph});
    if (ph > upper + tol) rep.violations.push_back({"upper", ph, upper});
  }
  return rep;
}

}  // namespace fejer
