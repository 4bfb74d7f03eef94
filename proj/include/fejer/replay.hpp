#pragma once

// Random small rate instances (every modulus a lookup table with values
// <= 20) and a straight-line uint64 replay of the Psi formulas, used to
// cross-check the arbitrary-precision evaluator.

#include "fejer/rates.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace fejer::replay {

constexpr std::size_t kTable = 64;
using Table = std::array<std::uint64_t, kTable>;

struct SmallInstance {
  Table gamma{}, alphaG{}, betaH{}, A{}, theta{}, xi{}, kappa{}, pi{}, omega{}, delta{}, g{}, Phi1{};
  std::uint64_t seed = 0;  ///< keys the hashed binary/ternary moduli
  std::uint64_t lag = 0;   ///< f(n) = n - lag
  std::uint64_t k = 0;
};

inline std::uint64_t at(const Table& t, std::uint64_t x) { return t[std::min<std::uint64_t>(x, kTable - 1)]; }

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hashed table value in [0, 20] for clamped arguments.
inline std::uint64_t hashed(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0) {
  auto cl = [](std::uint64_t v) { return std::min<std::uint64_t>(v, kTable - 1); };
  return mix(seed ^ mix(tag * 1000003 + cl(a) * 4096 * 64 + cl(b) * 64 + cl(c))) % 21;
}

inline std::uint64_t Phi2(const SmallInstance& s, std::uint64_t k, std::uint64_t n) { return hashed(s.seed, 1, k, n); }
inline std::uint64_t chi(const SmallInstance& s, std::uint64_t n, std::uint64_t m, std::uint64_t r) {
  return hashed(s.seed, 2, n, m, r);
}
inline std::uint64_t zeta(const SmallInstance& s, std::uint64_t n, std::uint64_t m, std::uint64_t r) {
  return hashed(s.seed, 3, n, m, r);
}

inline SmallInstance random_instance(std::mt19937_64& rng) {
  SmallInstance s;
  auto fill = [&](Table& t, std::uint64_t hi) {
    for (auto& v : t) v = rng() % (hi + 1);
  };
  fill(s.gamma, 6);
  for (Table* t : {&s.alphaG, &s.betaH, &s.A, &s.theta, &s.xi, &s.kappa, &s.pi, &s.omega, &s.delta, &s.g, &s.Phi1})
    fill(*t, 20);
  s.seed = rng();
  s.lag = rng() % 3;
  s.k = rng() % 6;
  return s;
}

inline MetastabilityInputs to_inputs(const SmallInstance& s) {
  auto u = [](const Table& t, const char* name) {
    return NatModulus::unary([t](const Nat& x) { return Nat(at(t, x > Nat(kTable) ? kTable : to_u64(x))); }, false,
                             name);
  };
  auto c64 = [](const Nat& x) { return x > Nat(kTable) ? std::uint64_t(kTable) : to_u64(x); };
  MetastabilityInputs in;
  in.gamma = u(s.gamma, "gamma");
  in.alphaG = u(s.alphaG, "alpha_G");
  in.betaH = u(s.betaH, "beta_H");
  in.A = u(s.A, "A");
  in.theta = u(s.theta, "theta");
  in.xi = u(s.xi, "xi");
  in.kappa = u(s.kappa, "kappa");
  in.pi = u(s.pi, "pi");
  in.omega = u(s.omega, "omega");
  in.delta = u(s.delta, "delta");
  in.Phi = NatModulus::binary([s, c64](const Nat& k, const Nat& n) { return Nat(Phi2(s, c64(k), c64(n))); });
  in.chi = NatModulus::ternary(
      [s, c64](const Nat& n, const Nat& m, const Nat& r) { return Nat(chi(s, c64(n), c64(m), c64(r))); });
  in.zeta = NatModulus::ternary(
      [s, c64](const Nat& n, const Nat& m, const Nat& r) { return Nat(zeta(s, c64(n), c64(m), c64(r))); });
  in.f = StepFunction::lag(Nat(s.lag));
  Table g = s.g;
  in.g = [g, c64](const Nat& n) { return Nat(at(g, c64(n))); };
  in.k = s.k;
  return in;
}

/// Error-free variant inputs: unary Phi from the Phi1 table.
inline MetastabilityInputs to_inputs_error_free(const SmallInstance& s) {
  MetastabilityInputs in = to_inputs(s);
  Table t = s.Phi1;
  in.Phi = NatModulus::unary([t](const Nat& x) { return Nat(at(t, x > Nat(kTable) ? kTable : to_u64(x))); });
  return in;
}

/// Straight-line evaluation of 2 Psi_0(P) for the given variant.
inline std::uint64_t replay(const SmallInstance& s, PsiVariant v) {
  bool closed = v == PsiVariant::with_closedness;
  bool error_free = v == PsiVariant::single_error_free;
  bool single = v == PsiVariant::single || error_free;
  std::uint64_t k = s.k;
  std::uint64_t t = at(s.theta, k);
  if (closed && at(s.omega, k) > t) t = at(s.omega, k);
  std::uint64_t At = at(s.A, t);
  std::uint64_t r0 = 4 * at(s.betaH, At) + 3;
  std::uint64_t aG = at(s.alphaG, r0);
  std::uint64_t c1 = 2 * aG + 1;
  std::uint64_t c2 = 2 * at(s.alphaG, 2 * at(s.betaH, aG) + 1) + 1;
  std::uint64_t cm = c1 > c2 ? c1 : c2;
  std::uint64_t P = at(s.gamma, cm);

  std::uint64_t khat = 0;
  if (!error_free) {
    std::uint64_t t1 = at(s.kappa, at(s.xi, 4 * at(s.betaH, aG) + 3));
    std::uint64_t t2 = at(s.xi, 2 * at(s.betaH, At) + 1);
    std::uint64_t t3 = at(s.kappa, at(s.xi, 2 * at(s.betaH, At) + 1));
    khat = t1;
    if (t2 > khat) khat = t2;
    if (t3 > khat) khat = t3;
    if (!single) {
      std::uint64_t t4 = at(s.kappa, at(s.pi, cm));
      if (t4 > khat) khat = t4;
    }
  }

  auto eta = [&](std::uint64_t n, std::uint64_t r) {
    std::uint64_t m = at(s.g, 2 * n) / 2;
    std::uint64_t fn = n > s.lag ? n - s.lag : 0;
    std::uint64_t e = chi(s, n, m, r);
    std::uint64_t z = zeta(s, n, m, r);
    std::uint64_t d = chi(s, fn, n - fn, 4 * at(s.betaH, at(s.alphaG, r)) + 3);
    if (z > e) e = z;
    if (d > e) e = d;
    if (closed && at(s.delta, k) > e) e = at(s.delta, k);
    return e;
  };
  auto etaM = [&](std::uint64_t n, std::uint64_t r) {
    std::uint64_t best = 0;
    for (std::uint64_t j = 0; j <= n; ++j) {
      std::uint64_t e = eta(j, r);
      if (e > best) best = e;
    }
    return best;
  };

  std::uint64_t psi0 = 0;
  for (std::uint64_t i = 0; i < P; ++i) {
    std::uint64_t e = etaM(psi0, r0);
    psi0 = error_free ? at(s.Phi1, e) : Phi2(s, e, khat);
  }
  return 2 * psi0;
}

struct OracleReport {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

/// psi_general / psi_single / psi_with_closedness / error-free against replay on `count` random instances.
inline OracleReport oracle_equivalence(std::size_t count, std::mt19937_64& rng) {
  OracleReport rep;
  for (std::size_t i = 0; i < count; ++i) {
    SmallInstance s = random_instance(rng);
    auto in = to_inputs(s);
    auto ef = to_inputs_error_free(s);
    struct Case {
      PsiVariant v;
      const MetastabilityInputs* in;
    };
    for (const Case& c : {Case{PsiVariant::general, &in}, Case{PsiVariant::single, &in},
                          Case{PsiVariant::with_closedness, &in}, Case{PsiVariant::single_error_free, &ef}}) {
      Nat got = psi_evaluate(*c.in, c.v).value;
      std::uint64_t want = replay(s, c.v);
      if (got != Nat(want)) {
        if (rep.mismatches == 0)
          rep.first_mismatch = std::string(to_string(c.v)) + " instance " + std::to_string(i) + ": " + got.str() +
                               " vs " + std::to_string(want);
        ++rep.mismatches;
      }
    }
    ++rep.instances;
  }
  return rep;
}

}  // namespace fejer::replay
