#pragma once

// Mann-type proximal point algorithm x_{n+1} = J^{-1}(a_n J x_n + (1-a_n) J J_{r_n} x_n)
// in l_p^d, with numerically realised resolvents and the quantitative bounds
// built on the Bregman-type distance phi.

#include "fejer/rates.hpp"

#include <Eigen/Dense>

namespace fejer::banach {

enum class OperatorKind { scaled_duality, coordinatewise_cubic };

/// Single-valued monotone operator T : l_p^d -> l_q^d.
struct MonotoneOperator {
  OperatorKind kind = OperatorKind::scaled_duality;
  Rational c = 1;            ///< scaled duality: T = c J
  Point shift;               ///< coordinatewise cubic: (T x)_i = (x_i - shift_i)^3
  Point c_pt, d_pt;          ///< d_pt = T(c_pt)
  Rational C = 0, D = 0;     ///< C >= |c_pt|, D >= |d_pt|_q
  Point zero;                ///< a point of zer T

  Point apply(const LpSpace& space, const Point& x) const {
    if (kind == OperatorKind::scaled_duality) return to_double(c) * duality_map(space, x);
    Point out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double t = x[i] - shift[i];
      out[i] = t * t * t;
    }
    return out;
  }
  Eigen::MatrixXd jacobian(const LpSpace& space, const Point& x) const;
};

inline MonotoneOperator scaled_duality(unsigned dim, const Rational& c) {
  if (c < 0) throw std::invalid_argument("scaled duality needs c >= 0");
  MonotoneOperator T;
  T.kind = OperatorKind::scaled_duality;
  T.c = c;
  T.c_pt = T.d_pt = T.zero = Point::Zero(dim);
  return T;
}

inline MonotoneOperator coordinatewise_cubic(const Point& shift, const Rational& C) {
  MonotoneOperator T;
  T.kind = OperatorKind::coordinatewise_cubic;
  T.shift = shift;
  T.c = 0;
  T.c_pt = T.zero = shift;
  T.d_pt = Point::Zero(shift.size());
  T.C = C;
  T.D = 0;
  return T;
}

/// DJ(x) = (p-1) diag(a_i^{p-2}) + (2-p) v v^T with a = |x|/|x|_p, v = sgn(x) a^{p-1}.
inline Eigen::MatrixXd duality_jacobian(const LpSpace& space, const Point& x) {
  auto n = x.size();
  if (space.p == 2) return Eigen::MatrixXd::Identity(n, n);
  double s = space.norm(x);
  if (s == 0.0) return Eigen::MatrixXd::Zero(n, n);
  double p = space.pd();
  Eigen::VectorXd a = x.cwiseAbs() / s, v(n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = (p - 1) * std::pow(a[i], p - 2);
    v[i] = (x[i] < 0 ? -1.0 : 1.0) * std::pow(a[i], p - 1);
  }
  out += (2 - p) * v * v.transpose();
  return out;
}

inline Eigen::MatrixXd MonotoneOperator::jacobian(const LpSpace& space, const Point& x) const {
  if (kind == OperatorKind::scaled_duality) return to_double(c) * duality_jacobian(space, x);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double t = x[i] - shift[i];
    out(i, i) = 3 * t * t;
  }
  return out;
}

class ResolventError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResolventOptions {
  double tol = 1e-12;
  int max_iter = 200;
  bool closed_form = true;  ///< use z = x/(1+rc) for scaled duality operators
};

/// |Jz + r Tz - Jx|_q.
inline double resolvent_residual(const LpSpace& space, const MonotoneOperator& T, double r, const Point& x,
                                 const Point& z) {
  return space.dual_norm(duality_map(space, z) + r * T.apply(space, z) - duality_map(space, x));
}

/// J_r x = (J + rT)^{-1} J x.
inline Point resolvent(const LpSpace& space, const MonotoneOperator& T, const Rational& r, const Point& x,
                       const ResolventOptions& opt = {}) {
  if (r <= 0) throw std::invalid_argument("resolvent parameter must be positive");
  double rd = to_double(r);
  if (T.kind == OperatorKind::scaled_duality && opt.closed_form) return Point(x / (1.0 + rd * to_double(T.c)));
  Point Jx = duality_map(space, x);
  bool zero_in_T0 = T.apply(space, Point::Zero(x.size())).norm() == 0.0;
  if (zero_in_T0 && space.dual_norm(Jx) <= opt.tol) return Point::Zero(x.size());
  auto theta = [&](const Point& z) { return Point(duality_map(space, z) + rd * T.apply(space, z) - Jx); };
  Point z = x;
  Point th = theta(z);
  double f = th.norm();
  for (int it = 0; it < opt.max_iter; ++it) {
    if (space.dual_norm(th) <= opt.tol) return z;
    Eigen::MatrixXd Jac = duality_jacobian(space, z) + rd * T.jacobian(space, z);
    Point step = Jac.colPivHouseholderQr().solve(-th);
    if (!step.allFinite() || step.norm() == 0.0) step = -th;
    double t = 1.0;
    Point cand;
    double fc = 0;
    for (int ls = 0; ls < 60; ++ls) {
      cand = z + t * step;
      fc = theta(cand).norm();
      if (fc < f) break;
      t /= 2;
    }
    if (!(fc < f)) {
      // no decrease along Newton direction: settle if already tight
      if (space.dual_norm(th) <= 10 * opt.tol) return z;
      break;
    }
    z = cand;
    th = theta(z);
    f = th.norm();
  }
  if (space.dual_norm(th) <= opt.tol) return z;
  throw ResolventError("resolvent solver did not converge (residual " + std::to_string(space.dual_norm(th)) + ")");
}

/// mu(R,b) = max{(1+C)(b+RD)+C, 1}.
inline Rational mu_resolvent_bound(const Rational& C, const Rational& D, const Rational& R, const Rational& b) {
  return std::max(Rational((1 + C) * (b + R * D) + C), Rational(1));
}

/// Lipschitz modulus of J: |Jz - Jw|_q <= (p-1)|z - w|_p.
struct OmegaJ {
  Rational L;

  static OmegaJ for_space(const LpSpace& space) { return {Rational(Nat(space.p - 1))}; }
  /// omega(eps, b) = eps / L.
  Rational real(const Rational& eps) const { return eps / L; }
  /// omega(k, b) = ceil(L(k+1)) - 1.
  Nat nat(const Nat& k) const { return monus(ceil_rat(L * Rational(k + 1)), Nat(1)); }
  NatModulus modulus() const {
    Rational l = L;
    return NatModulus::unary([l](const Nat& k) { return monus(ceil_rat(l * Rational(k + 1)), Nat(1)); }, true,
                             "omega_J");
  }
};

struct KtReport {
  ModulusReport rep;
  double min_gap = std::numeric_limits<double>::infinity();  ///< phi(x,y) - phi(x,J_r y) - phi(J_r y, y)
};

/// phi(z, J_r y) + phi(J_r y, y) <= phi(z, y) + tol for z in zer T.
inline KtReport kt_inequality_check(const LpSpace& space, const MonotoneOperator& T, const Point& z,
                                    const std::vector<Point>& ys, const Rational& r, double tol = 1e-10) {
  KtReport out;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    Point jy = resolvent(space, T, r, ys[i]);
    double lhs = phi_eval(space, z, jy) + phi_eval(space, jy, ys[i]);
    double rhs = phi_eval(space, z, ys[i]);
    ++out.rep.checked;
    out.min_gap = std::min(out.min_gap, rhs - lhs);
    if (lhs > rhs + tol) out.rep.violations.push_back({"sample " + std::to_string(i), lhs, rhs});
  }
  return out;
}

struct QuantKtResult {
  bool premise = false;
  double residual = 0, threshold = 0;
  double lhs = 0, rhs = 0;
  Rational E;
  bool ok() const { return !premise || lhs <= rhs; }
};

/// If |x - J_s x| <= omega(eps/2E, max{b, mu(s,b)}) then
/// phi(x, J_r y) + phi(J_r y, y) <= phi(x, y) + eps (+ tol).
inline QuantKtResult quant_kt_inequality(const LpSpace& space, const MonotoneOperator& T, const Point& x,
                                         const Point& y, const Rational& r, const Rational& s, const Rational& eps,
                                         const OmegaJ& omega, double tol = 1e-10) {
  QuantKtResult out;
  Rational b = ceil_rat(rat_from_double(std::max(space.norm(x), space.norm(y))));
  Rational mr = mu_resolvent_bound(T.C, T.D, r, b), ms = mu_resolvent_bound(T.C, T.D, s, b);
  out.E = std::max(Rational(2 * (mr + b)), Rational(2 * r / s * (mr + ms)));
  out.threshold = to_double(omega.real(eps / (2 * out.E)));
  out.residual = space.norm(x - resolvent(space, T, s, x));
  out.premise = out.residual <= out.threshold;
  Point jy = resolvent(space, T, r, y);
  out.lhs = phi_eval(space, x, jy) + phi_eval(space, jy, y);
  out.rhs = phi_eval(space, x, y) + to_double(eps) + tol;
  return out;
}

// ---------------------------------------------------------------------------
// Schedules and runs.

struct MannSchedule {
  std::vector<Rational> alpha;  ///< cycled
  std::vector<Rational> r;      ///< cycled
  Rational alpha_bar, r_bar;

  Rational alpha_n(std::size_t n) const { return alpha[n % alpha.size()]; }
  Rational r_n(std::size_t n) const { return r[n % r.size()]; }
  /// max{r_i | i <= n}
  Rational r_max_upto(const Nat& n) const {
    std::size_t lim = n >= Nat(r.size()) ? r.size() : static_cast<std::size_t>(n) + 1;
    return *std::max_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(lim));
  }
  bool constant_r() const { return std::all_of(r.begin(), r.end(), [&](const Rational& v) { return v == r[0]; }); }

  void validate() const {
    if (alpha.empty() || r.empty()) throw std::invalid_argument("empty Mann schedule");
    if (alpha_bar >= 1) throw std::invalid_argument("alpha_bar must be < 1");
    if (r_bar <= 0) throw std::invalid_argument("r_bar must be positive");
    for (const auto& a : alpha)
      if (a < 0 || a >= alpha_bar) throw std::invalid_argument("alpha_n out of range [0, alpha_bar)");
    for (const auto& v : r)
      if (v < r_bar) throw std::invalid_argument("r_n below r_bar");
  }
};

inline Point mann_step(const LpSpace& space, const MonotoneOperator& T, const MannSchedule& sched, const Point& x,
                       std::size_t n, const ResolventOptions& opt = {}) {
  double a = to_double(sched.alpha_n(n));
  Point y = resolvent(space, T, sched.r_n(n), x, opt);
  if (space.p == 2) return Point(a * x + (1 - a) * y);
  return duality_map_inverse(space, a * duality_map(space, x) + (1 - a) * duality_map(space, y));
}

struct BanachRun {
  LpSpace space;
  std::vector<Point> points;
  std::vector<Point> resolvents;           ///< J_{r_n} x_n
  std::vector<double> residuals;           ///< |x_n - J_{r_n} x_n|
  std::vector<double> resolvent_residuals; ///< |J z + r T z - J x|_q for z = J_{r_n} x_n
  Rational M;                              ///< integer >= |x_n|, |J_{r_n} x_n|

  IterationRun as_run(const Point& zero) const { return {points, residuals, zero}; }
};

inline BanachRun run_mann(const LpSpace& space, const MonotoneOperator& T, const MannSchedule& sched,
                          const Point& x0, std::size_t n, const ResolventOptions& opt = {}) {
  sched.validate();
  BanachRun run;
  run.space = space;
  run.points.reserve(n + 1);
  run.points.push_back(x0);
  double mx = space.norm(x0);
  for (std::size_t i = 0; i <= n; ++i) {
    const Point& x = run.points[i];
    Point y = resolvent(space, T, sched.r_n(i), x, opt);
    run.resolvent_residuals.push_back(resolvent_residual(space, T, to_double(sched.r_n(i)), x, y));
    run.residuals.push_back(space.norm(x - y));
    mx = std::max({mx, space.norm(x), space.norm(y)});
    if (i < n) {
      double a = to_double(sched.alpha_n(i));
      Point next = space.p == 2 ? Point(a * x + (1 - a) * y)
                                : duality_map_inverse(space, a * duality_map(space, x) + (1 - a) * duality_map(space, y));
      run.points.push_back(std::move(next));
    }
    run.resolvents.push_back(std::move(y));
  }
  run.M = Rational(ceil_rat(rat_from_double(mx)));
  if (run.M == 0) run.M = 1;
  return run;
}

/// AF_k: |x - J_{r_i} x| <= 1/(k+1) for all i <= k.
inline ApproximationFamily af_family(const LpSpace& space, const MonotoneOperator& T, const MannSchedule& sched) {
  ApproximationFamily fam;
  fam.member_fn = [space, T, sched](const Nat& k, const Point& x) {
    double target = 1.0 / (to_double(k) + 1.0);
    std::size_t lim = k >= Nat(sched.r.size()) ? sched.r.size() : static_cast<std::size_t>(k) + 1;
    for (std::size_t i = 0; i < lim; ++i)
      if (space.norm(x - resolvent(space, T, sched.r[i], x)) > target) return false;
    return true;
  };
  return fam;
}

// ---------------------------------------------------------------------------
// Constants and moduli.

struct Constants {
  LpSpace space;
  MonotoneOperator op;
  MannSchedule sched;
  Rational M = 1;   ///< integer bound on the run
  Rational b = 1;   ///< b >= phi(z, x_0)
  OmegaJ omega;
};

/// E0_{n,m} = max{2(mu(rh,M)+M), 2 rh r_n^{-1} (mu(rh,M) + mu(r_n,M))}, rh = max{r_i | i <= n+m-1}; rounded up.
inline Nat E0(const Constants& c, const Nat& n, const Nat& m) {
  Rational rh = c.sched.r_max_upto(monus(n + m, Nat(1)));
  Rational rn = n >= Nat(c.sched.r.size()) ? c.sched.r[static_cast<std::size_t>(n % c.sched.r.size())]
                                           : c.sched.r[static_cast<std::size_t>(n)];
  Rational mh = mu_resolvent_bound(c.op.C, c.op.D, rh, c.M), mn = mu_resolvent_bound(c.op.C, c.op.D, rn, c.M);
  return ceil_rat(std::max(Rational(2 * (mh + c.M)), Rational(2 * rh / rn * (mh + mn))));
}

/// E1_k = max{2(mu(rt,M)+M), 2 rt (rbar^{-1} mu(rt,M) + max{(1+C)(rbar^{-1} M + D) + C, rbar^{-1}})},
/// rt = max{r_i | i <= k}; rounded up.
inline Nat E1(const Constants& c, const Nat& k) {
  Rational rt = c.sched.r_max_upto(k);
  Rational ib = 1 / c.sched.r_bar;
  Rational mt = mu_resolvent_bound(c.op.C, c.op.D, rt, c.M);
  Rational inner = std::max(Rational((1 + c.op.C) * (ib * c.M + c.op.D) + c.op.C), ib);
  return ceil_rat(std::max(Rational(2 * (mt + c.M)), Rational(2 * rt * (ib * mt + inner))));
}

/// E for the rate of convergence (resolvent J_1).
inline Nat E_rate(const Constants& c) {
  Rational ib = 1 / c.sched.r_bar;
  Rational m1 = mu_resolvent_bound(c.op.C, c.op.D, 1, c.M);
  Rational inner = std::max(Rational((1 + c.op.C) * (ib * c.M + c.op.D) + c.op.C), ib);
  return ceil_rat(std::max(Rational(2 * (m1 + c.M)), Rational(2 * (ib * m1 + inner))));
}

/// chi(n,m,r) = max{n, omega(2 E0 (((r+1)(m-1) - 1) + 1) + 1, M+1)}.
inline Nat chi_banach(const Constants& c, const Nat& n, const Nat& m, const Nat& r) {
  Nat inner = monus((r + 1) * monus(m, Nat(1)), Nat(1)) + 1;
  return std::max(n, c.omega.nat(2 * E0(c, n, m) * inner + 1));
}

inline NatModulus chi_modulus(const Constants& c) {
  return NatModulus::ternary([c](const Nat& n, const Nat& m, const Nat& r) { return chi_banach(c, n, m, r); },
                             c.sched.constant_r(), "chi");
}

/// Integer consistency moduli on the ball of radius B = M+1, plus theta with 8B.
struct PhiModuli {
  NatModulus lambda, Lambda, theta;
};

inline PhiModuli phi_moduli(const Constants& c) {
  Rational B = c.M + 1;
  auto nm = phi_consistency_moduli_nat(c.space, B);
  RealModulus eta = c.space.eta;
  Rational Lh = c.space.L_high;
  auto th = NatModulus::unary(
      [eta, Lh, B](const Nat& k) {
        Rational e = eta(Rational(1) / (8 * B * Rational(k + 1)));
        return monus(ceil_rat(Lh / (B * B) / e), Nat(1));
      },
      true, "theta");
  return {nm.lambda, nm.Lambda, th};
}

/// Phi(k) = 2 ceil((lambda(omega(2 E1_k (lambda(k)+1) + 1, M+1)) + 1) b / (1 - alpha_bar)).
inline Nat phi_bound_banach(const Constants& c, const NatModulus& lambda, const Nat& k) {
  Nat lk = lambda(k);
  Nat w = c.omega.nat(2 * E1(c, k) * (lk + 1) + 1);
  return 2 * ceil_rat(Rational(lambda(w) + 1) * c.b / (1 - c.sched.alpha_bar));
}

/// gamma(k) = ceil(2(k+1) d^{1-1/p} M)^d: total boundedness of the l_p ball
/// of radius M through the enclosing Euclidean ball of radius d^{1/2-1/p} M.
inline Nat gamma_lp(const LpSpace& space, const Rational& M, const Nat& k) {
  unsigned p = space.p, d = space.dim;
  Rational base = Rational(2 * (k + 1)) * M;
  Rational q = pow_rat(base, p) * Rational(boost::multiprecision::pow(Nat(d), p - 1));
  return boost::multiprecision::pow(ceil_root_rat(q, p), d);
}

struct BanachMetaDetail {
  Nat k_prime, k0, theta0, P, level;
};

/// Psi~(lambda(k), g) with k0 = max{k', lambda(omega_F(k'))}, k' = lambda(k),
/// Psi = 2 Psi_0(P) with P = gamma(Lambda(16 theta(k0) + 15)),
/// Psi_0(n+1) = Phi^M(eta^M_{k0}(Psi_0(n), 2 theta(k0) + 1)).
inline RateResult metastability_banach(const Constants& c, const Nat& k, const CounterFunction& g, bool g_monotone,
                                       const Budget& budget = {}, BanachMetaDetail* detail_out = nullptr) {
  PhiModuli pm = phi_moduli(c);
  auto omegaF = [](const Nat& j) { return Nat(4 * j + 3); };
  auto deltaF = [](const Nat& j) { return Nat(2 * j + 1); };
  Nat kp = pm.lambda(k);
  Nat k0 = std::max(kp, pm.lambda(omegaF(kp)));
  Nat th0 = pm.theta(k0);
  Nat P = gamma_lp(c.space, c.M, pm.Lambda(Nat(16 * th0 + 15)));
  Nat level = 2 * th0 + 1;
  Nat dk = deltaF(k0);
  auto eta = NatModulus::binary(
      [c, g, dk](const Nat& n, const Nat& r) {
        Nat h = g(Nat(2 * n)) / 2;
        Nat a = std::max(dk, chi_banach(c, 2 * n, 2 * h, r));
        Nat z = chi_banach(c, 2 * n, 2 * h + 1, r);
        Nat d = chi_banach(c, n, Nat(0), Nat(4 * r + 3));
        return std::max({a, z, d});
      },
      g_monotone && c.sched.constant_r(), "eta_k");
  auto etaM = majorize(eta, budget.steps);
  auto lambda = pm.lambda;
  auto step = [c, lambda, etaM, level](const Nat& prev) { return phi_bound_banach(c, lambda, etaM(prev, level)); };
  RateResult out = fejer::detail::run_recursion(step, P, budget, Nat(2), Nat(0));
  out.level = level;
  if (detail_out) *detail_out = {kp, k0, th0, P, level};
  return out;
}

/// mu(delta) = 2 tau(rho'(theta(lt(delta))/2)) with
/// lt(e) = (B^2/L) eta(e/(4B)), Lt(e) = e L_low/(16B), theta(e) = lt(e/2), rho'(e) = rho(Lt(e/2)),
/// tau(e) = 2 ceil(b / (lt(omega(lt(e)/2E, M)) (1 - alpha_bar))).
inline Nat convergence_rate_banach(const RealModulus& rho, const Constants& c, const Rational& delta) {
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  Rational B = c.M + 1;
  RealModulus eta = c.space.eta;
  Rational Lh = c.space.L_high, Ll = c.space.L_low;
  auto lt = [&](const Rational& e) { return Rational(B * B / Lh * eta(e / (4 * B))); };
  auto Lt = [&](const Rational& e) { return Rational(e * Ll / (16 * B)); };
  auto theta = [&](const Rational& e) { return lt(e / 2); };
  auto rho_p = [&](const Rational& e) { return rho(Lt(e / 2)); };
  Rational E(E_rate(c));
  auto tau = [&](const Rational& e) {
    Rational w = c.omega.real(lt(e) / (2 * E));
    return Nat(2 * ceil_rat(c.b / (lt(w) * (1 - c.sched.alpha_bar))));
  };
  return 2 * tau(rho_p(theta(lt(delta)) / 2));
}

/// For T = cJ: J_1 x = x/(1+c), so |x - J_1 x| = |x| c/(1+c) and rho(eps) = eps c/(1+c).
inline RealModulus rho_scaled_duality(const Rational& c) {
  if (c <= 0) throw std::invalid_argument("regularity needs c > 0");
  return RealModulus::scale(c / (1 + c));
}

// ---------------------------------------------------------------------------
// Run-level checks.

/// Smallest n <= 2 ceil(b/(eps(1-alpha_bar))) with phi(J_{r_{2n}} x_{2n}, x_{2n}) <= eps.
struct LiminfWitness {
  bool found = false;
  std::size_t n = 0;
  Nat bound;
};

inline LiminfWitness liminf_scan(const BanachRun& run, const Rational& b, const Rational& alpha_bar,
                                 const Rational& eps) {
  LiminfWitness w;
  w.bound = 2 * ceil_rat(b / (eps * (1 - alpha_bar)));
  double e = to_double(eps);
  for (std::size_t n = 0; 2 * n < run.points.size() && Nat(n) <= w.bound; ++n)
    if (phi_eval(run.space, run.resolvents[2 * n], run.points[2 * n]) <= e) {
      w.found = true;
      w.n = n;
      return w;
    }
  if (Nat(2) * w.bound >= Nat(run.points.size()))
    throw RunTooShort("run too short for the liminf scan", static_cast<std::size_t>(to_u64(2 * w.bound + 1)));
  return w;
}

/// phi(z, x_{n+1}) <= phi(z, x_n) + tol along the run.
inline ModulusReport phi_monotone_check(const BanachRun& run, const Point& z, double tol = 1e-10) {
  ModulusReport rep;
  for (std::size_t n = 0; n + 1 < run.points.size(); ++n) {
    double a = phi_eval(run.space, z, run.points[n]), b = phi_eval(run.space, z, run.points[n + 1]);
    ++rep.checked;
    if (b > a + tol) rep.violations.push_back({"n=" + std::to_string(n), b, a});
  }
  return rep;
}

/// Largest gap between the p = 2 pipeline (generic solver) and x_{n+1} = a x_n + (1-a) x_n/(1+r).
inline double p2_crossval(const MannSchedule& sched, const Point& x0, std::size_t n) {
  LpSpace sp = LpSpace::make(static_cast<unsigned>(x0.size()), 2);
  MonotoneOperator T = scaled_duality(static_cast<unsigned>(x0.size()), 1);
  ResolventOptions opt;
  opt.closed_form = false;
  BanachRun run = run_mann(sp, T, sched, x0, n, opt);
  Point h = x0;
  double worst = 0;
  for (std::size_t i = 0; i < run.points.size(); ++i) {
    worst = std::max(worst, (run.points[i] - h).cwiseAbs().maxCoeff());
    double a = to_double(sched.alpha_n(i)), r = to_double(sched.r_n(i));
    h = a * h + (1 - a) * h / (1 + r);
  }
  return worst;
}

}  // namespace fejer::banach
