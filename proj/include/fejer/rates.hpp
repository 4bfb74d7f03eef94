#pragma once

// Exact evaluators for the rates of metastability Psi and the
// regularity-based rates of convergence mu, and the brute-force scan they
// are checked against.

#include "fejer/fejer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fejer {

/// Work limits for a Psi evaluation. `steps` bounds the number of Psi_0
/// recursion steps; `max_bits` bounds the size of the values carried.
struct Budget {
  std::uint64_t steps = 1'000'000;
  std::size_t max_bits = std::size_t(1) << 14;
};

/// Result of a Psi evaluation.
///
/// When `exact` is false the recursion was stopped early at step `steps`;
/// since Psi_0 is nondecreasing, `value` (built from the last computed
/// Psi_0) is then a certified lower bound of the true rate.
struct RateResult {
  Nat value;
  bool exact = true;
  std::uint64_t steps = 0;
  std::vector<Nat> trace;  ///< Psi_0(0), Psi_0(1), ... up to the stopping point
  Nat P;                   ///< number of recursion steps the formula asks for
  Nat khat;
  Nat level;               ///< the fixed second argument of eta^M
  bool certified_lower = true;  ///< an inexact value is a lower bound only when the step map is monotone
  std::string note;
};

enum class PsiVariant { general, with_closedness, single, single_error_free, metric };

inline const char* to_string(PsiVariant v) {
  switch (v) {
    case PsiVariant::general: return "general";
    case PsiVariant::with_closedness: return "with-closedness";
    case PsiVariant::single: return "single-distance";
    case PsiVariant::single_error_free: return "single-distance-error-free";
    case PsiVariant::metric: return "metric-version";
  }
  return "?";
}

struct MetastabilityInputs {
  NatModulus gamma, alphaG, betaH, A, theta;
  NatModulus chi, zeta;      ///< arity 3
  NatModulus Phi;            ///< liminf-bound Phi(k,n); unary in the error-free variant
  NatModulus xi, kappa, pi;
  NatModulus omega, delta;   ///< uniform closedness
  NatModulus eta;            ///< optional arity-2 override of the composite eta(n,r)
  StepFunction f = StepFunction::identity();
  CounterFunction g = [](const Nat&) { return Nat(0); };
  bool g_monotone = false;   ///< lets eta^M skip the prefix scan when everything involved is monotone
  Nat k = 0;
};

namespace detail {

inline void require(const NatModulus& m, int arity, const char* what, PsiVariant v) {
  if (!m.valid())
    throw std::invalid_argument(std::string("missing modulus ") + what + " for variant " + to_string(v));
  if (m.arity() != arity)
    throw std::invalid_argument(std::string("modulus ") + what + " must have arity " + std::to_string(arity));
}

/// Runs Psi_0(0)=0, Psi_0(i+1)=step(Psi_0(i)) up to P steps and returns mult*Psi_0+add. A repeated
/// value is a fixed point of the step, so the remaining steps are skipped.
inline RateResult run_recursion(const std::function<Nat(const Nat&)>& step, const Nat& P, const Budget& budget,
                                const Nat& mult, const Nat& add) {
  RateResult out;
  out.P = P;
  Nat cur = 0;
  out.trace.push_back(cur);
  Nat i = 0;
  while (i < P) {
    if (out.steps >= budget.steps) {
      out.exact = false;
      out.note = "step budget " + std::to_string(budget.steps) + " reached";
      break;
    }
    Nat next;
    try {
      next = step(cur);
    } catch (const ResourceExhausted& e) {
      out.exact = false;
      out.note = e.what();
      break;
    }
    ++out.steps;
    ++i;
    if (next == cur) {
      out.note = "fixed point after " + std::to_string(out.steps) + " steps";
      break;
    }
    cur = std::move(next);
    out.trace.push_back(cur);
    if (boost::multiprecision::msb(cur + 1) + 1 > budget.max_bits && i < P) {
      out.exact = false;
      out.note = "value size exceeds " + std::to_string(budget.max_bits) + " bits";
      break;
    }
  }
  out.value = mult * cur + add;
  return out;
}

}  // namespace detail

/// Shared evaluator behind the psi_* entry points.
inline RateResult psi_evaluate(const MetastabilityInputs& in, PsiVariant variant, const Budget& budget = {}) {
  using detail::require;
  bool closed = variant == PsiVariant::with_closedness;
  bool error_free = variant == PsiVariant::single_error_free;
  bool single = variant == PsiVariant::single || error_free;
  require(in.gamma, 1, "gamma", variant);
  require(in.alphaG, 1, "alpha_G", variant);
  require(in.betaH, 1, "beta_H", variant);
  require(in.A, 1, "A", variant);
  require(in.theta, 1, "theta", variant);
  require(in.Phi, error_free ? 1 : 2, "Phi", variant);
  if (!in.eta.valid()) {
    require(in.chi, 3, "chi", variant);
    require(in.zeta, 3, "zeta", variant);
  } else {
    require(in.eta, 2, "eta", variant);
  }
  if (!error_free) {
    require(in.xi, 1, "xi", variant);
    require(in.kappa, 1, "kappa", variant);
    if (!single) require(in.pi, 1, "pi", variant);
  }
  if (closed) {
    require(in.omega, 1, "omega", variant);
    require(in.delta, 1, "delta", variant);
  }

  const Nat& k = in.k;
  Nat t = in.theta(k);
  if (closed) t = std::max(t, in.omega(k));
  Nat At = in.A(t);
  Nat r0 = 4 * in.betaH(At) + 3;
  Nat aG = in.alphaG(r0);
  Nat c1 = 2 * aG + 1;
  Nat c2 = 2 * in.alphaG(Nat(2 * in.betaH(aG) + 1)) + 1;
  Nat cmax = std::max(c1, c2);
  Nat P = in.gamma(cmax);

  Nat khat = 0;
  if (!error_free) {
    Nat x1 = in.xi(Nat(2 * in.betaH(At) + 1));
    khat = std::max({in.kappa(in.xi(Nat(4 * in.betaH(aG) + 3))), x1, in.kappa(x1)});
    if (!single) khat = std::max(khat, in.kappa(in.pi(cmax)));
  }

  NatModulus eta;
  if (in.eta.valid()) {
    eta = in.eta;
  } else {
    auto chi = in.chi, zeta = in.zeta, alphaG = in.alphaG, betaH = in.betaH;
    auto f = in.f;
    auto g = in.g;
    eta = NatModulus::binary(
        [=](const Nat& n, const Nat& r) {
          Nat m = g(Nat(2 * n)) / 2;
          Nat fn = f(n);
          return std::max({chi(n, m, r), zeta(n, m, r), chi(fn, Nat(n - fn), Nat(4 * betaH(alphaG(r)) + 3))});
        },
        in.g_monotone && chi.monotone() && zeta.monotone(), "eta");
  }
  if (closed) {
    Nat dk = in.delta(k);
    auto base = eta;
    eta = NatModulus::binary([base, dk](const Nat& n, const Nat& r) { return std::max(dk, base(n, r)); },
                             base.monotone(), "eta~");
  }
  NatModulus etaM = majorize(eta, budget.steps);
  NatModulus Phi = in.Phi;

  std::function<Nat(const Nat&)> step;
  if (error_free)
    step = [=](const Nat& prev) { return Phi(etaM(prev, r0)); };
  else
    step = [=](const Nat& prev) { return Phi(etaM(prev, r0), khat); };

  RateResult out = detail::run_recursion(step, P, budget, Nat(2), Nat(0));
  if (!out.exact && !Phi.monotone()) {
    out.certified_lower = false;
    out.note += "; Phi not declared monotone, value is not a certified lower bound";
  }
  out.khat = khat;
  out.level = r0;
  return out;
}

inline RateResult psi_general(const MetastabilityInputs& in, const Budget& b = {}) {
  return psi_evaluate(in, PsiVariant::general, b);
}
inline RateResult psi_with_closedness(const MetastabilityInputs& in, const Budget& b = {}) {
  return psi_evaluate(in, PsiVariant::with_closedness, b);
}
/// `error_free` selects the unary-Phi recursion without xi and kappa.
inline RateResult psi_single(const MetastabilityInputs& in, bool error_free, const Budget& b = {}) {
  return psi_evaluate(in, error_free ? PsiVariant::single_error_free : PsiVariant::single, b);
}

/// gamma'(k) = gamma(Lambda(k)); with closedness moduli present,
/// omega'(k) = lambda(omega(k)) when `psi_consistent` (delta unchanged).
inline RateResult psi_metric(const MetastabilityInputs& in, const NatModulus& lambda, const NatModulus& Lambda,
                             bool psi_consistent = false, const Budget& b = {}) {
  if (!lambda.valid() || !Lambda.valid()) throw std::invalid_argument("psi_metric needs consistency moduli");
  MetastabilityInputs conv = in;
  auto c = convert_closedness_and_tb(in.gamma, psi_consistent ? in.omega : NatModulus(), in.delta, lambda, Lambda);
  conv.gamma = c.gamma;
  if (psi_consistent && in.omega.valid()) conv.omega = c.omega;
  bool closed = in.omega.valid() && in.delta.valid();
  return psi_evaluate(conv, closed ? PsiVariant::with_closedness : PsiVariant::general, b);
}

// ---------------------------------------------------------------------------
// Rates of convergence from moduli of regularity.

enum class MuVariant { general, single, single_error_free, metric };

using RationalToNat = std::function<Nat(const Rational&)>;

struct RegularityInputs {
  RealModulus rho;
  RealModulus alphaG = RealModulus::identity();
  RealModulus betaH = RealModulus::identity();
  RealModulus A = RealModulus::identity();
  RealModulus theta = RealModulus::identity();
  std::function<Nat(const Rational&, const Nat&)> tau2;  ///< tau(eps, n)
  RationalToNat tau1;                                     ///< tau(eps), error-free form
  RationalToNat xi;                                       ///< real-argument Cauchy rate
  RationalToNat pi;                                       ///< real-argument rate for phi_n -> phi
  NatModulus kappa;
  RealModulus Lambda;                                     ///< metric variant: rho'(e) = rho(Lambda(e/2))
};

/// rho'(eps) = rho(Lambda(eps/2)).
inline RealModulus translate_rho(const RealModulus& rho, const RealModulus& Lambda) {
  return RealModulus([rho, Lambda](const Rational& e) { return rho(Lambda(e / 2)); }, "rho'");
}

/// mu(delta) per variant; the conclusion holds for n, m >= 2 mu(delta).
/// The metric variant uses the general formula with rho' in place of rho,
/// or the error-free formula when only tau1 is supplied.
inline Nat mu_rate(const RegularityInputs& in, MuVariant variant, const Rational& delta) {
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  if (!in.rho.valid()) throw std::invalid_argument("missing modulus rho");
  RealModulus rho = in.rho;
  if (variant == MuVariant::metric) {
    if (!in.Lambda.valid()) throw std::invalid_argument("metric variant needs Lambda");
    rho = translate_rho(in.rho, in.Lambda);
  }
  Rational e = in.betaH(in.A(in.theta(delta))) / 2;
  Rational a = in.alphaG(e) / 2;
  Rational target = rho(a);
  bool error_free = variant == MuVariant::single_error_free || (variant == MuVariant::metric && !in.tau2);
  if (error_free) {
    if (!in.tau1) throw std::invalid_argument("missing tau(eps)");
    return in.tau1(target);
  }
  if (!in.tau2 || !in.xi || !in.kappa.valid()) throw std::invalid_argument("missing tau, xi or kappa");
  Nat start = in.kappa(in.xi(e));
  if (variant == MuVariant::general || variant == MuVariant::metric) {
    if (!in.pi) throw std::invalid_argument("missing pi");
    start = std::max(start, in.kappa(in.pi(a)));
  }
  return in.tau2(target, start);
}

// ---------------------------------------------------------------------------
// Brute-force oracle.

struct MetastabilityWitness {
  std::size_t N = 0;
  std::size_t window_end = 0;
};

class RunTooShort : public std::runtime_error {
 public:
  RunTooShort(const std::string& what, std::size_t required) : std::runtime_error(what), required_(required) {}
  std::size_t required() const { return required_; }

 private:
  std::size_t required_;
};

/// Minimal N such that psi(x_i,x_j) <= 1/(k+1) for all i,j in [N; N+g(N)]
/// (and x_i in AF_k when `require_membership`). Throws RunTooShort when no
/// such N has a window inside the recorded range.
inline MetastabilityWitness brute_force_metastability(const IterationRun& run,
                                                      const std::function<double(const Point&, const Point&)>& psi,
                                                      const ApproximationFamily& family, const Nat& k,
                                                      const CounterFunction& g, bool require_membership,
                                                      std::size_t N_limit = std::numeric_limits<std::size_t>::max()) {
  double target = 1.0 / (to_double(k) + 1.0);
  std::size_t size = run.size();
  std::vector<char> member;
  if (require_membership) {
    member.resize(size);
    for (std::size_t i = 0; i < size; ++i) member[i] = family.member(k, run[i]) ? 1 : 0;
  }
  std::size_t required = 0;
  for (std::size_t N = 0; N < size && N <= N_limit; ++N) {
    Nat gN = g(Nat(N));
    Nat endN = Nat(N) + gN;
    if (endN >= Nat(size)) {
      required = static_cast<std::size_t>(std::min<Nat>(endN + 1, Nat(std::numeric_limits<std::size_t>::max())));
      continue;
    }
    std::size_t end = static_cast<std::size_t>(endN);
    bool ok = true;
    for (std::size_t i = N; i <= end && ok; ++i) {
      if (require_membership && !member[i]) ok = false;
      for (std::size_t j = N; j <= end && ok; ++j)
        if (i != j && psi(run[i], run[j]) > target) ok = false;
    }
    if (ok) return {N, end};
  }
  throw RunTooShort("no metastability witness within the recorded range", std::max(required, size + 1));
}

}  // namespace fejer
