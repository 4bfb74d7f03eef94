#pragma once

// Approximation families, (partial, quasi-) Fejér data and the empirical
// checkers for the monotonicity definitions.

#include "fejer/distances.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace fejer {

/// AF_k either through a residual (x in AF_k iff residual(x) <= 1/(k+1))
/// or through an explicit membership predicate.
struct ApproximationFamily {
  std::function<double(const Point&)> residual;
  std::function<bool(const Nat&, const Point&)> member_fn;

  bool member(const Nat& k, const Point& x) const {
    if (member_fn) return member_fn(k, x);
    if (!residual) throw std::logic_error("approximation family without residual or predicate");
    return residual(x) <= 1.0 / (to_double(k) + 1.0);
  }
  /// Largest level the point reaches, capped at k_cap.
  std::uint64_t level(const Point& x, std::uint64_t k_cap) const {
    std::uint64_t k = 0;
    while (k < k_cap && member(Nat(k + 1), x)) ++k;
    return k;
  }
};

/// A recorded trajectory.
struct IterationRun {
  std::vector<Point> points;
  std::vector<double> residuals;  ///< residual(x_n), same length as points when filled
  Point reference;                ///< a known solution

  std::size_t size() const { return points.size(); }
  const Point& operator[](std::size_t n) const { return points.at(n); }
};

/// A sequence given by x0 and a step rule, extended on demand behind a mutex.
class MemoSequence {
 public:
  using Step = std::function<Point(std::size_t n, const std::vector<Point>& history)>;

  MemoSequence(Point x0, Step step) : step_(std::move(step)) { pts_.push_back(std::move(x0)); }
  static MemoSequence from_run(const IterationRun& run) {
    auto pts = run.points;
    MemoSequence s(pts.at(0), [pts](std::size_t n, const std::vector<Point>&) {
      if (n >= pts.size()) throw std::out_of_range("recorded run too short");
      return pts[n];
    });
    return s;
  }

  Point at(std::size_t n) const {
    std::lock_guard lock(*mu_);
    while (pts_.size() <= n) pts_.push_back(step_(pts_.size(), pts_));
    return pts_[n];
  }

 private:
  Step step_;
  mutable std::vector<Point> pts_;
  mutable std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
};

using RealFn = std::function<double(double)>;

/// Data of a partially (phi_n)-(G,H)-quasi-Fejér monotone sequence.
struct FejerInstance {
  std::function<Point(std::size_t)> seq;
  /// phi_n(p, x); a constant family ignores n.
  std::function<double(std::size_t, const Point&, const Point&)> phi_n;
  RealFn G = [](double a) { return a; };
  RealFn H = [](double a) { return a; };
  ApproximationFamily family;
  StepFunction f = StepFunction::identity();
  ErrorSchedule errors = ErrorSchedule::zero();
  NatModulus chi, zeta, Phi, omega, delta, gamma;
  /// 0: zeta in the f-monotone form; odd s: zeta in the shifted form
  /// H(phi(p,x_{2(n+l)+s})) <= G(phi(p,x_{2n})) + ... with f(n) = n - (s-1)/2.
  unsigned zeta_shift = 0;

  static FejerInstance from_run(const IterationRun& run, const GeneralizedDistance& phi) {
    FejerInstance inst;
    auto pts = std::make_shared<std::vector<Point>>(run.points);
    inst.seq = [pts](std::size_t n) -> Point {
      if (n >= pts->size()) throw std::out_of_range("run too short: need index " + std::to_string(n));
      return (*pts)[n];
    };
    inst.phi_n = [phi](std::size_t, const Point& p, const Point& x) { return phi(p, x); };
    return inst;
  }
};

struct FejerViolation {
  std::size_t solution = 0;
  std::uint64_t n = 0, m = 0, r = 0;
  double lhs = 0, rhs = 0;
};

struct FejerReport {
  std::vector<FejerViolation> violations;
  std::size_t checked = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  bool ok() const { return violations.empty(); }
  bool has(std::uint64_t n, std::uint64_t m) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const FejerViolation& v) { return v.n == n && v.m == m; });
  }
};

namespace detail {
/// prefix[i] = sum_{j<i} eps_j in doubles.
inline std::vector<double> error_prefix(const ErrorSchedule& e, std::size_t n) {
  std::vector<double> pre(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + to_double(e.eps(Nat(i)));
  return pre;
}
inline double esum(const std::vector<double>& pre, std::size_t from, std::size_t to_incl) {
  if (to_incl + 1 <= from) return 0.0;
  return pre[to_incl + 1] - pre[from];
}
inline std::size_t fval(const StepFunction& f, std::size_t n) { return static_cast<std::size_t>(to_u64(f(Nat(n)))); }
}  // namespace detail

/// H(phi_{2(n+m)}(p,x_{2(n+m)})) <= G(phi_{2n}(p,x_{2n})) + sum_{i=n}^{n+m-1} eps_i + tol
/// for every 2(n+m) <= n_max.
inline FejerReport check_quasi_fejer(const FejerInstance& inst, const std::vector<Point>& solutions,
                                     std::size_t n_max, double tol) {
  FejerReport rep;
  std::size_t half = n_max / 2;
  auto pre = detail::error_prefix(inst.errors, half + 1);
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    const Point& p = solutions[s];
    std::vector<double> hv(half + 1), gv(half + 1);
    for (std::size_t n = 0; n <= half; ++n) {
      double v = inst.phi_n(2 * n, p, inst.seq(2 * n));
      hv[n] = inst.H(v);
      gv[n] = inst.G(v);
    }
    for (std::size_t n = 0; n <= half; ++n)
      for (std::size_t m = 0; n + m <= half; ++m) {
        double lhs = hv[n + m];
        double rhs = gv[n] + (m == 0 ? 0.0 : detail::esum(pre, n, n + m - 1));
        ++rep.checked;
        rep.min_slack = std::min(rep.min_slack, rhs - lhs);
        if (lhs > rhs + tol) rep.violations.push_back({s, n, m, 0, lhs, rhs});
      }
  }
  return rep;
}

/// H(phi_{2(n+m)+1}(p,x_{2(n+m)+1})) <= G(phi_{2f(n)}(p,x_{2f(n)})) + sum_{i=f(n)}^{n+m} eps_i + tol
/// for every 2(n+m)+1 <= n_max.
inline FejerReport check_f_monotone(const FejerInstance& inst, const std::vector<Point>& solutions,
                                    std::size_t n_max, double tol) {
  FejerReport rep;
  if (n_max == 0) return rep;
  std::size_t half = (n_max - 1) / 2;
  auto pre = detail::error_prefix(inst.errors, half + 1);
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    const Point& p = solutions[s];
    std::vector<double> odd(half + 1), even(half + 1);
    for (std::size_t n = 0; n <= half; ++n) {
      odd[n] = inst.H(inst.phi_n(2 * n + 1, p, inst.seq(2 * n + 1)));
      even[n] = inst.G(inst.phi_n(2 * n, p, inst.seq(2 * n)));
    }
    for (std::size_t n = 0; n <= half; ++n) {
      std::size_t fn = detail::fval(inst.f, n);
      for (std::size_t m = 0; n + m <= half; ++m) {
        double lhs = odd[n + m];
        double rhs = even[fn] + detail::esum(pre, fn, n + m);
        ++rep.checked;
        rep.min_slack = std::min(rep.min_slack, rhs - lhs);
        if (lhs > rhs + tol) rep.violations.push_back({s, n, m, 0, lhs, rhs});
      }
    }
  }
  return rep;
}

struct GridPoint {
  std::uint64_t n, m, r;
};

/// For every (n,m,r) and every sample p in AF_{modulus(n,m,r)} checks the
/// defining clause of the uniform modulus with 1/(r+1) slack (strict
/// inequalities tested non-strictly up to tol). `which` is "chi" or "zeta".
inline FejerReport check_uniform_modulus(const FejerInstance& inst, const std::string& which,
                                         const std::vector<GridPoint>& grid,
                                         const std::vector<Point>& samples, double tol = 1e-12) {
  if (which != "chi" && which != "zeta") throw std::invalid_argument("which must be chi or zeta");
  const NatModulus& mod = which == "chi" ? inst.chi : inst.zeta;
  FejerReport rep;
  std::size_t need = 0;
  for (const auto& gp : grid) need = std::max<std::size_t>(need, 2 * (gp.n + gp.m) + std::max(inst.zeta_shift, 1u) + 1);
  auto pre = detail::error_prefix(inst.errors, need + 2);
  for (const auto& gp : grid) {
    Nat k = mod(Nat(gp.n), Nat(gp.m), Nat(gp.r));
    double slack = 1.0 / (gp.r + 1.0);
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const Point& p = samples[s];
      if (!inst.family.member(k, p)) continue;
      for (std::uint64_t l = 0; l <= gp.m; ++l) {
        double lhs, rhs;
        if (which == "chi") {
          std::size_t a = 2 * (gp.n + l), b = 2 * gp.n;
          lhs = inst.H(inst.phi_n(a, p, inst.seq(a)));
          rhs = inst.G(inst.phi_n(b, p, inst.seq(b))) + (l == 0 ? 0.0 : detail::esum(pre, gp.n, gp.n + l - 1));
        } else if (inst.zeta_shift == 0) {
          std::size_t fn = detail::fval(inst.f, gp.n);
          std::size_t a = 2 * (gp.n + l) + 1, b = 2 * fn;
          lhs = inst.H(inst.phi_n(a, p, inst.seq(a)));
          rhs = inst.G(inst.phi_n(b, p, inst.seq(b))) + detail::esum(pre, fn, gp.n + l);
        } else {
          std::size_t s2 = (inst.zeta_shift - 1) / 2;
          std::size_t fn = gp.n > s2 ? gp.n - s2 : 0;
          std::size_t a = 2 * (gp.n + l) + inst.zeta_shift, b = 2 * gp.n;
          lhs = inst.H(inst.phi_n(a, p, inst.seq(a)));
          rhs = inst.G(inst.phi_n(b, p, inst.seq(b))) + detail::esum(pre, fn, gp.n + l + s2);
        }
        ++rep.checked;
        rep.min_slack = std::min(rep.min_slack, rhs + slack - lhs);
        if (lhs > rhs + slack + tol) rep.violations.push_back({s, gp.n, gp.m, gp.r, lhs, rhs + slack});
      }
    }
  }
  return rep;
}

/// Moduli for the even subsequence and the odd-to-even link derived from a
/// modulus of the full sequence.
struct PartialFromFull {
  NatModulus chi_even;  ///< chi'(n,m,r) = chi(2n,2m,r)
  NatModulus eta;       ///< eta(n,m,r) = chi(2n,2m+1,r)
  ErrorSchedule errors; ///< eps~_n = eps_{2n} + eps_{2n+1}, xi~(k) = ceil(xi(k)/2)
};

inline PartialFromFull derive_partial_from_full(const NatModulus& chi, const ErrorSchedule& eps) {
  if (chi.arity() != 3) throw std::invalid_argument("chi must have arity 3");
  PartialFromFull out;
  out.chi_even = NatModulus::ternary(
      [chi](const Nat& n, const Nat& m, const Nat& r) { return chi(Nat(2 * n), Nat(2 * m), r); },
      chi.monotone(), "chi'");
  out.eta = NatModulus::ternary(
      [chi](const Nat& n, const Nat& m, const Nat& r) { return chi(Nat(2 * n), Nat(2 * m + 1), r); },
      chi.monotone(), "eta");
  auto e = eps.eps;
  auto xi = eps.xi;
  out.errors.eps = [e](const Nat& n) { return Rational(e(Nat(2 * n)) + e(Nat(2 * n + 1))); };
  out.errors.xi = NatModulus::unary([xi](const Nat& k) { return ceil_rat(Rational(xi(k), Nat(2))); },
                                    xi.monotone(), "xi~");
  return out;
}

/// zeta^(n,m,r) = max{chi(f(n), f(n+m)-f(n), 2r+1), zeta(n+m, 2r+1)}.
inline NatModulus mixed_gh_f_modulus(const NatModulus& chi, const NatModulus& zeta2, const StepFunction& f) {
  if (chi.arity() != 3 || zeta2.arity() != 2) throw std::invalid_argument("need chi of arity 3 and zeta of arity 2");
  return NatModulus::ternary(
      [chi, zeta2, f](const Nat& n, const Nat& m, const Nat& r) {
        Nat fn = f(n), fnm = f(Nat(n + m));
        return std::max(chi(fn, monus(fnm, fn), Nat(2 * r + 1)), zeta2(Nat(n + m), Nat(2 * r + 1)));
      },
      false, "zeta^");
}

/// a^_n = a_n for n >= s or n even, a_{n-1} for odd n < s.
template <class T>
std::vector<T> hat_sequence(const std::vector<T>& a, unsigned s) {
  if (s % 2 == 0) throw std::invalid_argument("shift s must be odd");
  std::vector<T> out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = (n < s && n % 2 == 1) ? a[n - 1] : a[n];
  return out;
}

struct AffineShift {
  unsigned s = 1;
  StepFunction f;     ///< f(n) = n - s', kappa(L) = L + s'
  NatModulus zeta;    ///< zeta^(n,m,r) = max{zeta(n,m,r), chi(0,s',r)}
  NatModulus Phi;     ///< Phi'(k) = Phi(k) + s'
};

inline AffineShift affine_shift(unsigned s, const NatModulus& chi, const NatModulus& zeta, const NatModulus& Phi) {
  if (s % 2 == 0) throw std::invalid_argument("shift s must be odd");
  Nat sp = (s - 1) / 2;
  AffineShift out;
  out.s = s;
  out.f = StepFunction::lag(sp);
  if (zeta.valid() && chi.valid())
    out.zeta = NatModulus::ternary(
        [chi, zeta, sp](const Nat& n, const Nat& m, const Nat& r) { return std::max(zeta(n, m, r), chi(Nat(0), sp, r)); },
        zeta.monotone() && chi.monotone(), "zeta^");
  if (Phi.valid())
    out.Phi = NatModulus::unary([Phi, sp](const Nat& k) { return Nat(Phi(k) + sp); }, Phi.monotone(), "Phi'");
  return out;
}

enum class TbDirection { cover_to_sequence, sequence_to_cover };

/// cover -> sequence: gamma(k) = alpha(theta(k)) + 1;
/// sequence -> cover: alpha(k) = gamma(theta(k)) - 1.
inline NatModulus convert_tb_modulus(const NatModulus& mod, const NatModulus& theta, TbDirection dir) {
  bool mono = mod.monotone() && theta.monotone();
  if (dir == TbDirection::cover_to_sequence)
    return NatModulus::unary([mod, theta](const Nat& k) { return Nat(mod(theta(k)) + 1); }, mono, "gamma");
  return NatModulus::unary(
      [mod, theta](const Nat& k) {
        Nat v = mod(theta(k));
        if (v == 0) throw std::domain_error("sequence modulus value 0 has no cover form");
        return Nat(v - 1);
      },
      mono, "alpha");
}

struct ClosednessAndTb {
  NatModulus gamma, omega, delta;
};

/// gamma'(k) = gamma(Lambda(k)), omega'(k) = lambda(omega(k)), delta'(k) = delta(k).
inline ClosednessAndTb convert_closedness_and_tb(const NatModulus& gamma, const NatModulus& omega,
                                                 const NatModulus& delta, const NatModulus& lambda,
                                                 const NatModulus& Lambda) {
  ClosednessAndTb out;
  if (gamma.valid())
    out.gamma = NatModulus::unary([gamma, Lambda](const Nat& k) { return gamma(Lambda(k)); },
                                  gamma.monotone() && Lambda.monotone(), "gamma'");
  if (omega.valid())
    out.omega = NatModulus::unary([omega, lambda](const Nat& k) { return lambda(omega(k)); },
                                  omega.monotone() && lambda.monotone(), "omega'");
  out.delta = delta;
  return out;
}

/// Pigeonhole property of a total-boundedness modulus on one sequence:
/// exists 0 <= i < j <= gamma(k) with dist(x_j, x_i) <= 1/(k+1).
inline bool pigeonhole_holds(const std::vector<Point>& xs, const Nat& gamma_k, const Nat& k,
                             const std::function<double(const Point&, const Point&)>& dist) {
  std::size_t top = static_cast<std::size_t>(std::min<Nat>(gamma_k, Nat(xs.size() - 1)));
  if (Nat(top) < gamma_k) throw std::invalid_argument("sequence shorter than gamma(k)+1");
  double target = 1.0 / (to_double(k) + 1.0);
  for (std::size_t j = 1; j <= top; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (dist(xs[j], xs[i]) <= target) return true;
  return false;
}

/// Uniform closedness: q in AF_{delta(k)} and d(q,p) <= 1/(omega(k)+1) -> p in AF_k.
inline ModulusReport check_uniform_closedness(const ApproximationFamily& fam, const NatModulus& omega,
                                              const NatModulus& delta,
                                              const std::function<double(const Point&, const Point&)>& dist,
                                              const std::vector<std::pair<Point, Point>>& pairs, unsigned k_max) {
  ModulusReport rep;
  for (unsigned k = 0; k <= k_max; ++k) {
    Nat dk = delta(Nat(k));
    double rad = 1.0 / (to_double(omega(Nat(k))) + 1.0);
    for (const auto& [q, p] : pairs) {
      if (!fam.member(dk, q) || dist(q, p) > rad) continue;
      ++rep.checked;
      if (!fam.member(Nat(k), p))
        rep.violations.push_back({"k=" + std::to_string(k), dist(q, p), rad});
    }
  }
  return rep;
}

}  // namespace fejer
