#include "fejer/replay.hpp"

#include <gtest/gtest.h>

using namespace fejer;

namespace {

MetastabilityInputs identity_inputs(std::uint64_t k) {
  MetastabilityInputs in;
  in.gamma = in.alphaG = in.betaH = in.A = in.theta = NatModulus::identity();
  in.xi = in.kappa = in.pi = NatModulus::identity();
  in.Phi = NatModulus::binary([](const Nat&, const Nat& n) { return n; }, true);
  in.chi = in.zeta = NatModulus::constant(Nat(0), 3);
  in.k = k;
  return in;
}

// k-hat for identity moduli, written out by hand:
// r0 = 4k+3, c = max(2 r0 + 1, 2(2 r0 + 1) + 1), khat = max(4 r0 + 3, 2k+1, c).
std::uint64_t identity_khat(std::uint64_t k, bool with_pi) {
  std::uint64_t r0 = 4 * k + 3;
  std::uint64_t c = std::max(2 * r0 + 1, 2 * (2 * r0 + 1) + 1);
  std::uint64_t kh = std::max(4 * r0 + 3, 2 * k + 1);
  return with_pi ? std::max(kh, c) : kh;
}

Point pt1(double v) {
  Point p(1);
  p << v;
  return p;
}

IterationRun line_run(const std::vector<double>& v) {
  IterationRun run;
  for (double x : v) run.points.push_back(pt1(x));
  return run;
}

double absdist(const Point& a, const Point& b) { return std::abs(a[0] - b[0]); }

}  // namespace

TEST(Psi, ZeroCounterfunctionGivesTwiceKhat) {
  for (std::uint64_t k : {0u, 1u, 5u}) {
    auto in = identity_inputs(k);
    auto gen = psi_general(in);
    EXPECT_TRUE(gen.exact);
    EXPECT_EQ(gen.khat, Nat(identity_khat(k, true)));
    EXPECT_EQ(gen.value, Nat(2 * identity_khat(k, true)));
    EXPECT_EQ(gen.level, Nat(4 * k + 3));
    auto single = psi_single(in, false);
    EXPECT_EQ(single.value, Nat(2 * identity_khat(k, false)));
  }
}

TEST(Psi, ErrorFreeSpecValue) {
  MetastabilityInputs in = identity_inputs(1);
  in.Phi = NatModulus::identity();
  in.eta = NatModulus::binary([](const Nat& n, const Nat& r) { return std::max(n, r); }, true);
  auto r = psi_single(in, true);
  EXPECT_EQ(r.value, Nat(14));
  EXPECT_EQ(r.level, Nat(7));
  ASSERT_GE(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0], Nat(0));
  EXPECT_EQ(r.trace[1], Nat(7));
  EXPECT_TRUE(r.exact);
}

TEST(Psi, ZeroRecursionLengthGivesZero) {
  auto in = identity_inputs(3);
  in.gamma = NatModulus::constant(Nat(0));
  EXPECT_EQ(psi_general(in).value, Nat(0));
  EXPECT_EQ(psi_single(in, false).value, Nat(0));
  in.omega = in.delta = NatModulus::identity();
  EXPECT_EQ(psi_with_closedness(in).value, Nat(0));
  auto ef = in;
  ef.Phi = NatModulus::identity();
  EXPECT_EQ(psi_single(ef, true).value, Nat(0));
  EXPECT_EQ(psi_general(in).P, Nat(0));
}

TEST(Psi, TraceFollowsRecursionByHand) {
  // Phi(j, n) = j + 1, eta(n, r) = n: Psi_0(i) = i, so 2 Psi_0(P) = 2P.
  auto in = identity_inputs(0);
  in.Phi = NatModulus::binary([](const Nat& j, const Nat&) { return Nat(j + 1); }, true);
  in.eta = NatModulus::binary([](const Nat& n, const Nat&) { return n; }, true);
  auto r = psi_general(in);
  // k=0: r0=3, c = max(7, 15) = 15, P = gamma(15) = 15
  EXPECT_EQ(r.P, Nat(15));
  EXPECT_EQ(r.value, Nat(30));
  ASSERT_EQ(r.trace.size(), 16u);
  for (std::size_t i = 0; i < r.trace.size(); ++i) EXPECT_EQ(r.trace[i], Nat(i));
}

TEST(Psi, CounterfunctionFloorsHalfOfGAtTwoN) {
  // chi(n, m, r) = m exposes floor(g(2n)/2); Phi(j, n) = j + 1 keeps the recursion moving.
  auto in = identity_inputs(0);
  in.chi = NatModulus::ternary([](const Nat&, const Nat& m, const Nat&) { return m; }, true);
  in.Phi = NatModulus::binary([](const Nat& j, const Nat&) { return Nat(j + 1); }, true);
  in.gamma = NatModulus::constant(Nat(2));
  in.g = [](const Nat& n) { return Nat(3 * n + 1); };
  // Psi_0(1) = 1 + max(eta(0)) = 1 + floor(1/2) = 1 and the third term chi(f(0), 0, .) = 0
  // Psi_0(2) = 1 + max(eta(0), eta(1)) = 1 + floor(7/2) = 4
  auto r = psi_general(in);
  EXPECT_EQ(r.value, Nat(8));
}

TEST(Psi, MissingModulusNamesVariant) {
  auto in = identity_inputs(0);
  in.xi = NatModulus();
  try {
    psi_general(in);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("xi"), std::string::npos);
  }
  auto ef = identity_inputs(0);
  ef.Phi = NatModulus::identity();
  ef.xi = ef.kappa = NatModulus();
  EXPECT_NO_THROW(psi_single(ef, true));
  EXPECT_THROW(psi_with_closedness(identity_inputs(0)), std::invalid_argument);
  auto wrong = identity_inputs(0);
  wrong.Phi = NatModulus::identity();
  EXPECT_THROW(psi_general(wrong), std::invalid_argument);
}

TEST(Psi, ClosednessWithNeutralModuliMatchesGeneral) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    auto s = replay::random_instance(rng);
    s.omega = s.theta;
    s.delta.fill(0);
    auto in = replay::to_inputs(s);
    EXPECT_EQ(psi_with_closedness(in).value, psi_general(in).value) << t;
  }
}

TEST(Psi, ClosednessDominatesForMonotoneModuli) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 40; ++t) {
    auto in = identity_inputs(rng() % 4);
    std::uint64_t a = 1 + rng() % 3, b = rng() % 5;
    in.Phi = NatModulus::binary([a, b](const Nat& j, const Nat& n) { return Nat(a * j + n + b); }, true);
    in.chi = NatModulus::ternary([](const Nat& n, const Nat& m, const Nat& r) { return Nat(n + m + r); }, true);
    in.gamma = NatModulus::unary([](const Nat& k) { return std::min(k, Nat(6)); }, true);
    in.g_monotone = true;
    in.omega = NatModulus::affine(1 + rng() % 3, rng() % 4);
    std::uint64_t d = (t % 4 == 0) ? 1'000'000 : rng() % 50;
    in.delta = NatModulus::constant(Nat(d));
    auto gen = psi_general(in), cl = psi_with_closedness(in);
    EXPECT_GE(cl.value, gen.value) << t;
    if (d == 1'000'000 && cl.P > 0) EXPECT_GE(cl.value, Nat(2 * 1'000'000));
  }
}

TEST(Psi, RecursionOracleEquivalence) {
  std::mt19937_64 rng(12345);
  auto rep = replay::oracle_equivalence(50, rng);
  EXPECT_EQ(rep.instances, 50u);
  EXPECT_EQ(rep.mismatches, 0u) << rep.first_mismatch;
}

TEST(Psi, Deterministic) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 10; ++t) {
    auto s = replay::random_instance(rng);
    auto a = psi_general(replay::to_inputs(s)), b = psi_general(replay::to_inputs(s));
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.trace, b.trace);
  }
}

TEST(Psi, MetricWithIdentityConsistencyMatchesGeneral) {
  std::mt19937_64 rng(5);
  auto id = NatModulus::identity();
  for (int t = 0; t < 20; ++t) {
    auto in = replay::to_inputs(replay::random_instance(rng));
    EXPECT_EQ(psi_metric(in, id, id).value, psi_with_closedness(in).value);
    in.omega = in.delta = NatModulus();
    EXPECT_EQ(psi_metric(in, id, id).value, psi_general(in).value);
  }
  auto in = identity_inputs(1);
  in.Phi = NatModulus::binary([](const Nat& j, const Nat&) { return Nat(j + 1); }, true);
  in.eta = NatModulus::binary([](const Nat& n, const Nat&) { return n; }, true);
  auto plain = psi_metric(in, id, id);
  auto doubled = psi_metric(in, id, NatModulus::affine(2, 1));
  // P = gamma(Lambda(c)) with c = 31: 31 vs 63
  EXPECT_EQ(plain.P, Nat(31));
  EXPECT_EQ(doubled.P, Nat(63));
  EXPECT_GE(doubled.value, plain.value);
  EXPECT_THROW(psi_metric(in, NatModulus(), id), std::invalid_argument);
}

TEST(Psi, BudgetGivesCertifiedLowerBoundOnlyForMonotonePhi) {
  auto in = identity_inputs(0);
  in.Phi = NatModulus::binary([](const Nat& j, const Nat&) { return Nat(j + 1); }, true);
  in.eta = NatModulus::binary([](const Nat& n, const Nat&) { return n; }, true);
  in.gamma = NatModulus::constant(Nat(1'000'000'000));
  Budget b;
  b.steps = 1000;
  auto r = psi_general(in, b);
  EXPECT_FALSE(r.exact);
  EXPECT_TRUE(r.certified_lower);
  EXPECT_EQ(r.value, Nat(2000));
  in.Phi = NatModulus::binary([](const Nat& j, const Nat&) { return Nat(j + 1); }, false);
  auto u = psi_general(in, b);
  EXPECT_FALSE(u.exact);
  EXPECT_FALSE(u.certified_lower);
}

TEST(Psi, BitBudgetStopsDoublingRecursion) {
  auto in = identity_inputs(0);
  in.Phi = NatModulus::binary([](const Nat& j, const Nat&) { return Nat(2 * j + 1); }, true);
  in.eta = NatModulus::binary([](const Nat& n, const Nat&) { return n; }, true);
  in.gamma = NatModulus::constant(Nat(100'000));
  Budget b;
  b.max_bits = 64;
  auto r = psi_general(in, b);
  EXPECT_FALSE(r.exact);
  EXPECT_LE(r.steps, 70u);
  EXPECT_GE(r.value, Nat(1) << 64);
}

TEST(Mu, SingleErrorFreeSpecValue) {
  RegularityInputs in;
  in.rho = RealModulus::identity();
  in.tau1 = [](const Rational& e) { return ceil_rat(Rational(1) / e); };
  EXPECT_EQ(mu_rate(in, MuVariant::single_error_free, Rational(1)), Nat(4));
  // delta huge: monotone moduli give a value no larger than at delta = 1
  EXPECT_LE(mu_rate(in, MuVariant::single_error_free, Rational(1'000'000)), Nat(4));
  EXPECT_THROW(mu_rate(in, MuVariant::single_error_free, Rational(0)), std::invalid_argument);
}

TEST(Mu, RhoTranslation) {
  auto r = translate_rho(RealModulus::identity(), RealModulus::scale(rat(1, 16)));
  for (int i = 1; i < 10; ++i) EXPECT_EQ(r(rat(i, 7)), rat(i, 7) / 32);
}

TEST(Mu, GeneralEqualsErrorFreeWhenTauIgnoresStart) {
  RegularityInputs in;
  in.rho = RealModulus::scale(rat(1, 3));
  in.alphaG = RealModulus::scale(rat(1, 2));
  in.tau1 = [](const Rational& e) { return ceil_rat(Rational(5) / e); };
  in.tau2 = [](const Rational& e, const Nat&) { return ceil_rat(Rational(5) / e); };
  in.xi = [](const Rational& e) { return ceil_rat(Rational(1) / e); };
  in.pi = in.xi;
  in.kappa = NatModulus::identity();
  for (int i = 1; i < 20; ++i) {
    Rational d = rat(i, 10);
    Nat ef = mu_rate(in, MuVariant::single_error_free, d);
    EXPECT_EQ(mu_rate(in, MuVariant::general, d), ef);
    EXPECT_EQ(mu_rate(in, MuVariant::single, d), ef);
  }
}

TEST(Mu, GeneralTakesMaxOfStartIndices) {
  RegularityInputs in;
  in.rho = RealModulus::identity();
  in.tau2 = [](const Rational&, const Nat& n) { return n; };
  in.xi = [](const Rational& e) { return ceil_rat(Rational(1) / e); };
  in.pi = [](const Rational& e) { return ceil_rat(Rational(10) / e); };
  in.kappa = NatModulus::affine(1, 1);
  // delta = 1: e = 1/2, a = 1/4; start = max(kappa(xi(1/2)), kappa(pi(1/4))) = max(3, 41)
  EXPECT_EQ(mu_rate(in, MuVariant::general, Rational(1)), Nat(41));
  EXPECT_EQ(mu_rate(in, MuVariant::single, Rational(1)), Nat(3));
  in.Lambda = RealModulus::identity();
  // metric: rho'(a) = a/2, tau ignores it, start unchanged
  EXPECT_EQ(mu_rate(in, MuVariant::metric, Rational(1)), Nat(41));
  RegularityInputs missing = in;
  missing.pi = nullptr;
  EXPECT_THROW(mu_rate(missing, MuVariant::general, Rational(1)), std::invalid_argument);
  missing.Lambda = RealModulus();
  EXPECT_THROW(mu_rate(missing, MuVariant::metric, Rational(1)), std::invalid_argument);
}

TEST(BruteForce, ConstantRunHasZeroWitness) {
  auto run = line_run(std::vector<double>(10, 0.25));
  ApproximationFamily fam{[](const Point& x) { return std::abs(x[0]); }, {}};
  for (int k = 0; k < 3; ++k) {
    auto w = brute_force_metastability(run, absdist, fam, Nat(k), [](const Nat&) { return Nat(3); }, false);
    EXPECT_EQ(w.N, 0u);
    EXPECT_EQ(w.window_end, 3u);
  }
}

TEST(BruteForce, HarmonicSequenceMinimalWitness) {
  std::vector<double> v(50);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = 1.0 / (n + 1.0);
  auto run = line_run(v);
  ApproximationFamily fam{[](const Point& x) { return std::abs(x[0]); }, {}};
  // k = 2, g(n) = n + 1: [0,1] spans 1/2 > 1/3; [1,3] spans 1/4
  auto w = brute_force_metastability(run, absdist, fam, Nat(2), [](const Nat& n) { return Nat(n + 1); }, false);
  EXPECT_EQ(w.N, 1u);
  // with membership x_i <= 1/3 needed: first N with x_N <= 1/3 is N = 2
  auto m = brute_force_metastability(run, absdist, fam, Nat(2), [](const Nat& n) { return Nat(n + 1); }, true);
  EXPECT_EQ(m.N, 2u);
}

TEST(BruteForce, OscillationIsNotFound) {
  std::vector<double> v(40);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = (n % 2) ? 1.0 : -1.0;
  auto run = line_run(v);
  ApproximationFamily fam{[](const Point& x) { return std::abs(x[0]); }, {}};
  try {
    brute_force_metastability(run, absdist, fam, Nat(0), [](const Nat&) { return Nat(1); }, false);
    FAIL();
  } catch (const RunTooShort& e) {
    EXPECT_GT(e.required(), v.size());
  }
}
