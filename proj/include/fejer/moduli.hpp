#pragma once

// Number-theoretic and real-valued moduli. Every quantitative statement in
// the library is parameterised by these: G/H-moduli, moduli of
// triangularity and consistency, Fejér moduli χ/ζ, liminf-bounds Φ, Cauchy
// rates ξ, rates of divergence κ, and so on.

#include "fejer/numeric.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fejer {

/// Thrown when an evaluation would exceed its configured work budget.
class ResourceExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A total function ℕ^arity → ℕ, arity 1..3.
///
/// `monotone` records a caller's promise that the function is nondecreasing
/// in every argument. It is never trusted for correctness of the values
/// themselves; majorize() uses it to skip the prefix scan, and
/// check_monotone() can audit it on a grid.
class NatModulus {
 public:
  using Fn = std::function<Nat(std::span<const Nat>)>;

  NatModulus() = default;
  NatModulus(int arity, Fn fn, bool monotone = false, std::string name = {})
      : arity_(arity), fn_(std::move(fn)), monotone_(monotone), name_(std::move(name)) {
    if (arity < 1 || arity > 3) throw std::invalid_argument("NatModulus arity must be 1, 2 or 3");
    if (!fn_) throw std::invalid_argument("NatModulus needs a function");
  }

  static NatModulus unary(std::function<Nat(const Nat&)> f, bool monotone = false, std::string name = {}) {
    return NatModulus(
        1, [f = std::move(f)](std::span<const Nat> a) { return f(a[0]); }, monotone, std::move(name));
  }
  static NatModulus binary(std::function<Nat(const Nat&, const Nat&)> f, bool monotone = false,
                           std::string name = {}) {
    return NatModulus(
        2, [f = std::move(f)](std::span<const Nat> a) { return f(a[0], a[1]); }, monotone,
        std::move(name));
  }
  static NatModulus ternary(std::function<Nat(const Nat&, const Nat&, const Nat&)> f,
                            bool monotone = false, std::string name = {}) {
    return NatModulus(
        3, [f = std::move(f)](std::span<const Nat> a) { return f(a[0], a[1], a[2]); }, monotone,
        std::move(name));
  }

  static NatModulus identity() {
    return unary([](const Nat& k) { return k; }, true, "id");
  }
  static NatModulus constant(Nat c, int arity = 1) {
    return NatModulus(
        arity, [c = std::move(c)](std::span<const Nat>) { return c; }, true, "const");
  }
  /// k ↦ a·k + b.
  static NatModulus affine(Nat a, Nat b) {
    return unary([a = std::move(a), b = std::move(b)](const Nat& k) { return Nat(a * k + b); },
                 true, "affine");
  }

  bool valid() const { return static_cast<bool>(fn_); }
  int arity() const { return arity_; }
  bool monotone() const { return monotone_; }
  const std::string& name() const { return name_; }

  Nat operator()(const Nat& a) const { return call({a}); }
  Nat operator()(const Nat& a, const Nat& b) const { return call({a, b}); }
  Nat operator()(const Nat& a, const Nat& b, const Nat& c) const { return call({a, b, c}); }

 private:
  Nat call(std::initializer_list<Nat> args) const {
    if (!fn_) throw std::logic_error("evaluating an empty modulus");
    if (static_cast<int>(args.size()) != arity_)
      throw std::invalid_argument("modulus '" + name_ + "' has arity " + std::to_string(arity_) +
                                  ", called with " + std::to_string(args.size()));
    std::array<Nat, 3> buf;
    std::size_t i = 0;
    for (const auto& a : args) buf[i++] = a;
    Nat out = fn_(std::span<const Nat>(buf.data(), args.size()));
    if (out < 0) throw std::domain_error("modulus '" + name_ + "' returned a negative value");
    return out;
  }

  int arity_ = 1;
  Fn fn_;
  bool monotone_ = false;
  std::string name_;
};

/// A function from positive rationals to positive rationals.
class RealModulus {
 public:
  using Fn = std::function<Rational(const Rational&)>;

  RealModulus() = default;
  explicit RealModulus(Fn fn, std::string name = {}) : fn_(std::move(fn)), name_(std::move(name)) {}

  static RealModulus identity() {
    return RealModulus([](const Rational& e) { return e; }, "id");
  }
  /// ε ↦ c·ε.
  static RealModulus scale(Rational c) {
    return RealModulus([c = std::move(c)](const Rational& e) { return Rational(c * e); }, "scale");
  }

  bool valid() const { return static_cast<bool>(fn_); }
  const std::string& name() const { return name_; }

  Rational operator()(const Rational& eps) const {
    if (!fn_) throw std::logic_error("evaluating an empty real modulus");
    if (eps <= 0) throw std::domain_error("real modulus evaluated at a non-positive argument");
    Rational out = fn_(eps);
    if (out <= 0) throw std::domain_error("real modulus '" + name_ + "' returned a non-positive value");
    return out;
  }

 private:
  Fn fn_;
  std::string name_;
};

/// g : ℕ → ℕ, the counterfunction of a metastability statement.
using CounterFunction = std::function<Nat(const Nat&)>;

/// The step function f of f-monotonicity together with an optional rate
/// of divergence κ (f(n) ≥ L for all n ≥ κ(L)).
struct StepFunction {
  std::function<Nat(const Nat&)> f;
  NatModulus kappa;

  static StepFunction identity() {
    return {[](const Nat& n) { return n; }, NatModulus::identity()};
  }
  /// f(n) = n ∸ s with rate of divergence κ(L) = L + s.
  static StepFunction lag(Nat s) {
    return {[s](const Nat& n) { return monus(n, s); },
            NatModulus::unary([s](const Nat& L) { return Nat(L + s); }, true, "kappa")};
  }
  Nat operator()(const Nat& n) const { return f(n); }
};

/// A violation list; empty means the property held on every sample.
struct Violation {
  std::string where;
  double lhs = 0;
  double rhs = 0;
};

struct ModulusReport {
  std::vector<Violation> violations;
  std::size_t checked = 0;
  bool ok() const { return violations.empty(); }
};

/// f^M(k) = max{f(j) | j ≤ k}.
///
/// Monotone-declared moduli are returned unchanged. Otherwise the prefix
/// maximum is computed by an incremental scan over a shared cache; a scan
/// beyond `scan_budget` new points throws ResourceExhausted. For arity > 1
/// only the first argument is majorized.
inline NatModulus majorize(const NatModulus& f, std::uint64_t scan_budget = 1'000'000) {
  if (f.monotone()) return f;
  struct Cache {
    std::mutex mu;
    // key: trailing arguments; value: prefix maxima for j = 0..size-1
    std::map<std::vector<Nat>, std::vector<Nat>> prefix;
  };
  auto cache = std::make_shared<Cache>();
  int arity = f.arity();
  auto fn = [f, cache, scan_budget, arity](std::span<const Nat> a) -> Nat {
    std::vector<Nat> rest(a.begin() + 1, a.end());
    const Nat& k = a[0];
    std::lock_guard lock(cache->mu);
    auto& pm = cache->prefix[rest];
    if (Nat(pm.size()) > k) return pm[static_cast<std::size_t>(k)];
    if (k - Nat(pm.size()) >= Nat(scan_budget))
      throw ResourceExhausted("majorant scan up to " + format_nat(k, 40) + " exceeds budget");
    std::size_t target = static_cast<std::size_t>(k);
    std::array<Nat, 3> args;
    for (std::size_t i = 0; i < rest.size(); ++i) args[i + 1] = rest[i];
    while (pm.size() <= target) {
      args[0] = Nat(pm.size());
      Nat v;
      switch (arity) {
        case 1: v = f(args[0]); break;
        case 2: v = f(args[0], args[1]); break;
        default: v = f(args[0], args[1], args[2]); break;
      }
      if (!pm.empty() && pm.back() > v) v = pm.back();
      pm.push_back(std::move(v));
    }
    return pm[target];
  };
  return NatModulus(arity, fn, true, f.name() + "^M");
}

/// α_G = max{α_G1, α_G2} and β_H = max{β_H1, β_H2}: moduli for
/// G = max{G1, G2} and H = min{H1, H2}.
inline std::pair<NatModulus, NatModulus> combine_gh(const NatModulus& aG1, const NatModulus& aG2,
                                                    const NatModulus& bH1, const NatModulus& bH2) {
  auto pmax = [](NatModulus x, NatModulus y, std::string name) {
    bool mono = x.monotone() && y.monotone();
    return NatModulus::unary(
        [x = std::move(x), y = std::move(y)](const Nat& k) { return std::max(x(k), y(k)); }, mono,
        std::move(name));
  };
  return {pmax(aG1, aG2, "alpha_G"), pmax(bH1, bH2, "beta_H")};
}

/// Real-valued function R+ → R+ as used by G and H.
using ScalarFn = std::function<Rational(const Rational&)>;

/// Audits "a ≤ 1/(α_G(k)+1) → G(a) ≤ 1/(k+1)" for k ≤ k_max on the samples.
inline ModulusReport gh_modulus_check(const ScalarFn& G, const NatModulus& alphaG,
                                      std::span<const Rational> samples, unsigned k_max = 20) {
  ModulusReport rep;
  for (unsigned k = 0; k <= k_max; ++k) {
    Rational bound(Nat(1), alphaG(Nat(k)) + 1);
    Rational target(Nat(1), Nat(k + 1));
    for (const auto& a : samples) {
      if (a > bound) continue;
      ++rep.checked;
      Rational ga = G(a);
      if (ga > target)
        rep.violations.push_back({"k=" + std::to_string(k) + ", a=" + a.str(), to_double(ga),
                                  to_double(target)});
    }
  }
  return rep;
}

/// Audits "H(a) ≤ 1/(β_H(k)+1) → a ≤ 1/(k+1)" for k ≤ k_max on the samples.
inline ModulusReport h_modulus_check(const ScalarFn& H, const NatModulus& betaH,
                                     std::span<const Rational> samples, unsigned k_max = 20) {
  ModulusReport rep;
  for (unsigned k = 0; k <= k_max; ++k) {
    Rational bound(Nat(1), betaH(Nat(k)) + 1);
    Rational target(Nat(1), Nat(k + 1));
    for (const auto& a : samples) {
      if (H(a) > bound) continue;
      ++rep.checked;
      if (a > target)
        rep.violations.push_back({"k=" + std::to_string(k) + ", a=" + a.str(), to_double(a),
                                  to_double(target)});
    }
  }
  return rep;
}

/// min_{0≤i≤k-1} a_i, asserting it is ≤ A/k (pigeonhole on a summable list).
inline Rational min_partial_sum_bound(std::span<const Rational> a, const Rational& A, std::size_t k) {
  if (k == 0 || a.size() < k) throw std::invalid_argument("min_partial_sum_bound needs 1 ≤ k ≤ |a|");
  Rational total(0);
  for (const auto& v : a) {
    if (v < 0) throw std::invalid_argument("min_partial_sum_bound needs nonnegative entries");
    total += v;
  }
  if (total > A) throw std::invalid_argument("min_partial_sum_bound: sum exceeds A");
  Rational m = *std::min_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k));
  if (m > A / Rational(Nat(k))) throw std::logic_error("pigeonhole bound violated");
  return m;
}

/// Nondecreasing check of a unary modulus on 0..n-1.
inline ModulusReport check_monotone(const NatModulus& f, std::uint64_t n) {
  ModulusReport rep;
  Nat prev = f(Nat(0));
  for (std::uint64_t k = 1; k < n; ++k) {
    Nat cur = f(Nat(k));
    ++rep.checked;
    if (cur < prev)
      rep.violations.push_back({"k=" + std::to_string(k), to_double(prev), to_double(cur)});
    prev = std::move(cur);
  }
  return rep;
}

/// Summable errors (ε_n) with a Cauchy rate ξ: Σ_{i≥ξ(k)} ε_i ≤ 1/(k+1).
struct ErrorSchedule {
  std::function<Rational(const Nat&)> eps;
  NatModulus xi;

  static ErrorSchedule zero() {
    return {[](const Nat&) { return Rational(0); }, NatModulus::constant(Nat(0))};
  }

  /// Audits the Cauchy rate: partial tail sums Σ_{i=ξ(k)}^{N} ε_i ≤ 1/(k+1)
  /// for every truncation N < n_terms. The truncated sums are a lower bound
  /// of the infinite tail, so callers add their own remainder bound.
  ModulusReport check_cauchy_rate(unsigned k_max, std::uint64_t n_terms,
                                  const Rational& remainder = Rational(0)) const {
    ModulusReport rep;
    for (unsigned k = 0; k <= k_max; ++k) {
      std::uint64_t start = to_u64(xi(Nat(k)));
      double tail = 0;  // compensated double sum, final compare done in rationals
      double c = 0;
      for (std::uint64_t i = start; i < n_terms; ++i) {
        double y = to_double(eps(Nat(i))) - c;
        double t = tail + y;
        c = (t - tail) - y;
        tail = t;
      }
      ++rep.checked;
      Rational total = rat_from_double(tail) + remainder;
      Rational target(Nat(1), Nat(k + 1));
      if (total > target)
        rep.violations.push_back({"k=" + std::to_string(k), to_double(total), to_double(target)});
    }
    return rep;
  }
};

}  // namespace fejer
