#pragma once

// Alternating-inertia iteration x^{k+1} = T xbar^k for alpha-averaged maps on
// R^d, its closed-form moduli and the resulting rates.

#include "fejer/rates.hpp"

#include <cmath>
#include <numbers>

namespace fejer::hilbert {

struct AveragedMap {
  Rational alpha;
  std::function<Point(const Point&)> eval;
  std::string kind;
  Point xhat;           ///< a known fixed point
  Rational rho_scale;   ///< rho(eps) = rho_scale * eps is a modulus of regularity (0 when unknown)

  Point operator()(const Point& x) const { return eval(x); }
};

/// T = (1-a) Id + a R_theta on R^2; a-averaged, Fix T = {0}.
inline AveragedMap rotation_average(double theta, const Rational& a = rat(1, 2)) {
  if (a <= 0 || a >= 1) throw std::invalid_argument("averaging weight must lie in (0,1)");
  double c = std::cos(theta), s = std::sin(theta), w = to_double(a);
  AveragedMap T;
  T.alpha = a;
  T.kind = "rotation-average";
  T.eval = [c, s, w](const Point& x) {
    if (x.size() != 2) throw std::invalid_argument("rotation-average acts on R^2");
    Point r(2);
    r << c * x[0] - s * x[1], s * x[0] + c * x[1];
    return Point((1 - w) * x + w * r);
  };
  T.xhat = Point::Zero(2);
  // ||x - Tx|| = 2a sin(theta/2) ||x||; rounded down to 10 decimals.
  double exact = 2 * w * std::abs(std::sin(theta / 2));
  T.rho_scale = Rational(Nat(static_cast<std::int64_t>(std::floor(exact * 1e10))), Nat(10'000'000'000LL));
  return T;
}

/// T = (1-a) Id + a P_B with P_B the projection onto the closed unit ball;
/// (a/2)-averaged, Fix T = B.
inline AveragedMap projection_average(unsigned dim, const Rational& a = rat(1, 2)) {
  if (a <= 0 || a > 1) throw std::invalid_argument("averaging weight must lie in (0,1]");
  double w = to_double(a);
  AveragedMap T;
  T.alpha = a / 2;
  T.kind = "projection-average";
  T.eval = [w](const Point& x) {
    double n = x.norm();
    Point p = n > 1.0 ? Point(x / n) : x;
    return Point((1 - w) * x + w * p);
  };
  T.xhat = Point::Zero(dim);
  T.rho_scale = a;
  return T;
}

/// Resolvent of A = Id: J x = x / (1 + lambda); firmly nonexpansive.
inline AveragedMap resolvent_identity(unsigned dim, const Rational& lambda) {
  if (lambda <= 0) throw std::invalid_argument("resolvent parameter must be positive");
  double l = to_double(lambda);
  AveragedMap T;
  T.alpha = rat(1, 2);
  T.kind = "resolvent";
  T.eval = [l](const Point& x) { return Point(x / (1 + l)); };
  T.xhat = Point::Zero(dim);
  T.rho_scale = lambda / (1 + lambda);
  return T;
}

/// (1-a)||(Id-T)x-(Id-T)y||^2 <= a(||x-y||^2 - ||Tx-Ty||^2) + tol on random pairs.
inline ModulusReport averagedness_check(const AveragedMap& T, unsigned dim, std::size_t pairs, double radius,
                                        std::mt19937_64& rng, double tol = 1e-10) {
  ModulusReport rep;
  double a = to_double(T.alpha);
  for (std::size_t i = 0; i < pairs; ++i) {
    Point x = random_in_ball(rng, dim, 2.0, radius), y = random_in_ball(rng, dim, 2.0, radius);
    Point tx = T(x), ty = T(y);
    double lhs = (1 - a) * ((x - tx) - (y - ty)).squaredNorm();
    double rhs = a * ((x - y).squaredNorm() - (tx - ty).squaredNorm());
    ++rep.checked;
    if (lhs > rhs + tol) rep.violations.push_back({"pair " + std::to_string(i), lhs, rhs});
  }
  return rep;
}

struct InertiaSchedule {
  std::function<Rational(std::size_t)> alpha_k;

  static InertiaSchedule constant(const Rational& c) {
    return {[c](std::size_t) { return c; }};
  }
  /// Cycles through `values`.
  static InertiaSchedule periodic(std::vector<Rational> values) {
    if (values.empty()) throw std::invalid_argument("empty inertia schedule");
    return {[values](std::size_t k) { return values[k % values.size()]; }};
  }
};

struct HilbertRun {
  Point x0;
  std::vector<Point> points;
  std::vector<Point> bars;
  std::vector<double> residuals;
  Point xhat;
  Rational M;  ///< integer >= every ||x^k - xhat||, ||xbar^k - xhat||

  IterationRun as_run() const { return {points, residuals, xhat}; }
};

inline double af_residual_hilbert(const AveragedMap& T, const Point& x) { return (x - T(x)).norm(); }

/// x^0..x^n with xbar^k = x^k (k even), x^k + alpha_k (x^k - x^{k-1}) (k odd).
inline HilbertRun iterate_alternating(const AveragedMap& T, const InertiaSchedule& sched, const Point& x0,
                                      std::size_t n) {
  Rational cap = (1 - T.alpha) / T.alpha;
  HilbertRun run;
  run.x0 = x0;
  run.xhat = T.xhat;
  run.points.reserve(n + 1);
  run.bars.reserve(n + 1);
  run.points.push_back(x0);
  double mx = (x0 - T.xhat).norm();
  for (std::size_t k = 0; k <= n; ++k) {
    const Point& xk = run.points[k];
    Point bar = xk;
    if (k % 2 == 1) {
      Rational ak = sched.alpha_k(k);
      if (ak < 0 || ak > cap)
        throw std::invalid_argument("inertia out of range: alpha_" + std::to_string(k) + " = " + ak.str() +
                                    " exceeds (1-alpha)/alpha = " + cap.str());
      bar = xk + to_double(ak) * (xk - run.points[k - 1]);
    }
    mx = std::max({mx, (xk - T.xhat).norm(), (bar - T.xhat).norm()});
    Point next = T(bar);
    run.residuals.push_back(af_residual_hilbert(T, xk));
    run.bars.push_back(std::move(bar));
    if (k < n) run.points.push_back(std::move(next));
  }
  run.M = Rational(ceil_rat(rat_from_double(mx)));
  if (run.M == 0) run.M = 1;
  return run;
}

inline ApproximationFamily af_family(const AveragedMap& T) {
  return {[T](const Point& x) { return af_residual_hilbert(T, x); }, {}};
}

/// Phi(k) = 2 max{1, ceil(alpha/(1-alpha) b^2 (k+1)^2)}.
inline Nat phi_bound_hilbert(const Rational& alpha, const Rational& b, const Nat& k) {
  if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("alpha must lie in (0,1)");
  Rational v = alpha / (1 - alpha) * b * b * Rational((k + 1) * (k + 1));
  return 2 * std::max(Nat(1), ceil_rat(v));
}

namespace detail {
inline Nat coeff(const Rational& alpha, int add) { return ceil_rat((3 - alpha) / (alpha * alpha) + add); }
inline Nat chi_like(const Rational& alpha, const Rational& M, const Nat& m, const Nat& r, int add) {
  return monus(ceil_rat(Rational(2 * m * m * coeff(alpha, add)) * M * Rational((r + 1) * (r + 1))), Nat(1));
}
}  // namespace detail

/// (chi, zeta) = 2m^2 ceil((3-alpha)/alpha^2 + {2,4}) M (r+1)^2 - 1, truncated at 0.
inline std::pair<Nat, Nat> chi_zeta_hilbert(const Rational& alpha, const Rational& M, const Nat& n, const Nat& m,
                                            const Nat& r) {
  (void)n;
  return {detail::chi_like(alpha, M, m, r, 2), detail::chi_like(alpha, M, m, r, 4)};
}

inline NatModulus chi_modulus(const Rational& alpha, const Rational& M) {
  return NatModulus::ternary(
      [alpha, M](const Nat&, const Nat& m, const Nat& r) { return detail::chi_like(alpha, M, m, r, 2); }, true, "chi");
}
inline NatModulus zeta_modulus(const Rational& alpha, const Rational& M) {
  return NatModulus::ternary(
      [alpha, M](const Nat&, const Nat& m, const Nat& r) { return detail::chi_like(alpha, M, m, r, 4); }, true, "zeta");
}

/// gamma(k) = ceil(2(k+1) sqrt(d) M)^d.
inline Nat gamma_box(unsigned d, const Rational& M, const Nat& k) {
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  if (M <= 0) throw std::invalid_argument("radius must be positive");
  Rational s = Rational(2 * (k + 1)) * M;
  Nat base = ceil_sqrt_rat(s * s * Rational(Nat(d)));
  return boost::multiprecision::pow(base, d);
}

inline NatModulus gamma_box_modulus(unsigned d, const Rational& M) {
  return NatModulus::unary([d, M](const Nat& k) { return gamma_box(d, M, k); }, true, "gamma");
}

/// Uniform closedness moduli of Fix T for nonexpansive T: (4k+3, 2k+1).
inline std::pair<Nat, Nat> closedness_nonexpansive(const Nat& k) { return {4 * k + 3, 2 * k + 1}; }

struct MetastabilityParams {
  Rational alpha;
  unsigned d = 2;
  Rational M = 1;
};

/// Psi(k,g) = 2 Psi_0(P, 2k+1, g') + 3 with P = ceil((64k+64) sqrt(d) M)^d,
/// g'(n) = g(n+3) + 3, Psi_0(n+1) = Phi^M(eta^M(Psi_0(n), 4K+3)).
inline RateResult metastability_hilbert(const MetastabilityParams& prm, const Nat& k, const CounterFunction& g,
                                        bool g_monotone, const Budget& budget = {}) {
  const Rational& alpha = prm.alpha;
  if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("alpha must lie in (0,1)");
  Rational M = prm.M;
  Rational s = Rational(64 * k + 64) * M;
  Nat P = boost::multiprecision::pow(ceil_sqrt_rat(s * s * Rational(Nat(prm.d))), prm.d);
  Nat K = 2 * k + 1;
  Nat level = 4 * K + 3;
  Nat c4 = detail::coeff(alpha, 4);
  auto Phi = [alpha, M](const Nat& j) {
    return 2 * std::max(Nat(1), ceil_rat(alpha / (1 - alpha) * M * M * Rational((j + 1) * (j + 1)))) + 1;
  };
  auto eta = NatModulus::binary(
      [K, c4, M, g](const Nat& n, const Nat& r) {
        Nat gp = g(Nat(2 * n + 3)) + 3;
        Nat h = gp / 2;
        Nat v = monus(ceil_rat(Rational(2 * h * h * c4) * M * Rational((2 * r + 4) * (2 * r + 4))), Nat(1));
        return std::max(Nat(2 * K + 1), v);
      },
      g_monotone, "eta");
  auto etaM = majorize(eta, budget.steps);
  auto step = [etaM, Phi, level](const Nat& prev) { return Phi(etaM(prev, level)); };
  RateResult out = fejer::detail::run_recursion(step, P, budget, Nat(2), Nat(3));
  out.level = level;
  return out;
}

/// max{3, 2 ceil(alpha/(1-alpha) b^2 (ceil(1/rho(delta/4)) + 1)^2)}.
inline Nat convergence_rate_hilbert(const RealModulus& rho, const Rational& alpha, const Rational& b,
                                    const Rational& delta) {
  if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("alpha must lie in (0,1)");
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  Nat inv = ceil_rat(1 / rho(delta / 4));
  Nat v = 2 * ceil_rat(alpha / (1 - alpha) * b * b * Rational((inv + 1) * (inv + 1)));
  return std::max(Nat(3), v);
}

// ---------------------------------------------------------------------------
// Lemma checks on a recorded run.

struct LemmaSuite {
  double summed_lhs = 0, summed_rhs = 0;  ///< (1-a)/a sum ||x^{2i+2} - xbar^{2i+1}||^2 vs ||x^0 - xhat||^2
  ModulusReport odd_step;                 ///< ||x^{2k+3}-x^{2k+2}|| <= ||x^{2k+2}-xbar^{2k+1}||
  ModulusReport fejer_exact;              ///< even and +3 steps against xhat
  ModulusReport fejer_approx;             ///< slack forms for approximate fixed points

  bool summed_ok(double tol) const { return summed_lhs <= summed_rhs + tol; }
};

struct ApproxPoint {
  Point x;
  double eps;
};

/// Approximate fixed points around xhat with ||x - Tx|| close to each eps.
inline std::vector<ApproxPoint> sample_approx_fixed_points(const AveragedMap& T, unsigned dim,
                                                           const std::vector<double>& eps_list,
                                                           std::size_t per_eps, std::mt19937_64& rng) {
  std::vector<ApproxPoint> out;
  for (double e : eps_list)
    for (std::size_t i = 0; i < per_eps; ++i) {
      Point dir = random_in_ball(rng, dim, 2.0, 1.0);
      if (dir.norm() == 0) dir = Point::Unit(dim, 0);
      dir.normalize();
      // bisection along a ray for residual e; falls back to xhat when unreachable
      double lo = 0, hi = 1;
      while (af_residual_hilbert(T, T.xhat + hi * dir) < e && hi < 1e6) hi *= 2;
      for (int it = 0; it < 100; ++it) {
        double mid = (lo + hi) / 2;
        (af_residual_hilbert(T, T.xhat + mid * dir) < e ? lo : hi) = mid;
      }
      Point x = T.xhat + lo * dir;
      out.push_back({x, std::max(af_residual_hilbert(T, x), 0.0)});
    }
  return out;
}

inline LemmaSuite lemma_suite(const AveragedMap& T, const HilbertRun& run, const std::vector<ApproxPoint>& approx,
                              double tol_fejer = 1e-12, double tol_approx = 1e-10) {
  LemmaSuite out;
  const auto& x = run.points;
  const auto& xb = run.bars;
  std::size_t n = x.size();
  double a = to_double(T.alpha);
  for (std::size_t i = 0; 2 * i + 2 < n; ++i) out.summed_lhs += (x[2 * i + 2] - xb[2 * i + 1]).squaredNorm();
  out.summed_lhs *= (1 - a) / a;
  out.summed_rhs = (x[0] - run.xhat).squaredNorm();

  for (std::size_t k = 0; 2 * k + 3 < n; ++k) {
    double lhs = (x[2 * k + 3] - x[2 * k + 2]).norm(), rhs = (x[2 * k + 2] - xb[2 * k + 1]).norm();
    ++out.odd_step.checked;
    if (lhs > rhs + tol_fejer) out.odd_step.violations.push_back({"k=" + std::to_string(k), lhs, rhs});
  }
  for (std::size_t k = 0; 2 * k + 2 < n; ++k) {
    double base = (x[2 * k] - run.xhat).norm();
    double e2 = (x[2 * k + 2] - run.xhat).norm();
    ++out.fejer_exact.checked;
    if (e2 > base + tol_fejer) out.fejer_exact.violations.push_back({"even k=" + std::to_string(k), e2, base});
    if (2 * k + 3 < n) {
      double e3 = (x[2 * k + 3] - run.xhat).norm();
      ++out.fejer_exact.checked;
      if (e3 > base + tol_fejer) out.fejer_exact.violations.push_back({"odd k=" + std::to_string(k), e3, base});
    }
  }
  Rational c2 = (3 - T.alpha) / (T.alpha * T.alpha) + 2;
  double cf2 = to_double(c2), cf4 = cf2 + 2;
  for (const auto& ap : approx) {
    Point tx = T(ap.x);
    double b = 0;
    for (const auto& xk : x) {
      Point txk = T(xk);
      b = std::max({b, (xk - ap.x).norm(), (xk - tx).norm(), (txk - ap.x).norm(), (xk - txk).norm()});
    }
    for (std::size_t k = 0; 2 * k + 2 < n; ++k) {
      double base = (x[2 * k] - ap.x).squaredNorm();
      double e2 = (x[2 * k + 2] - ap.x).squaredNorm();
      ++out.fejer_approx.checked;
      if (e2 > base + cf2 * b * ap.eps + tol_approx)
        out.fejer_approx.violations.push_back({"even k=" + std::to_string(k), e2, base + cf2 * b * ap.eps});
      if (2 * k + 3 < n) {
        double e3 = (x[2 * k + 3] - ap.x).squaredNorm();
        ++out.fejer_approx.checked;
        if (e3 > base + cf4 * b * ap.eps + tol_approx)
          out.fejer_approx.violations.push_back({"odd k=" + std::to_string(k), e3, base + cf4 * b * ap.eps});
      }
    }
  }
  return out;
}

struct PhiBoundWitness {
  bool found = false;
  std::size_t n = 0;  ///< x^{2n} in AF_k
  Nat bound;
};

/// Smallest n <= Phi(k) with residual(x^{2n}) <= 1/(k+1).
inline PhiBoundWitness approx_fpoint_scan(const HilbertRun& run, const Rational& alpha, const Rational& b,
                                          const Nat& k) {
  PhiBoundWitness w;
  w.bound = phi_bound_hilbert(alpha, b, k);
  double target = 1.0 / (to_double(k) + 1.0);
  for (std::size_t n = 0; 2 * n < run.residuals.size() && Nat(n) <= w.bound; ++n)
    if (run.residuals[2 * n] <= target) {
      w.found = true;
      w.n = n;
      return w;
    }
  if (Nat(2) * w.bound >= Nat(run.residuals.size()))
    throw RunTooShort("run too short for the approximate F-point scan",
                      static_cast<std::size_t>(to_u64(2 * w.bound + 1)));
  return w;
}

}  // namespace fejer::hilbert
