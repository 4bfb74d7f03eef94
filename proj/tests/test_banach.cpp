#include "fejer/banach.hpp"

#include <gtest/gtest.h>

using namespace fejer;
using namespace fejer::banach;

namespace {

Point p2(double a, double b) {
  Point x(2);
  x << a, b;
  return x;
}

MannSchedule simple_schedule() {
  MannSchedule s;
  s.alpha = {rat(1, 4)};
  s.r = {Rational(1)};
  s.alpha_bar = rat(1, 2);
  s.r_bar = 1;
  return s;
}

Constants cj_constants(unsigned p, const Rational& c = 1) {
  Constants k;
  k.space = LpSpace::make(2, p);
  k.op = scaled_duality(2, c);
  k.sched = simple_schedule();
  k.M = 1;
  k.b = 1;
  k.omega = OmegaJ::for_space(k.space);
  return k;
}

// 407.04 (k+1)^2 rounded up, minus one: lambda for p = 2 on the ball of radius B = 2.
Nat lambda_p2_B2(const Nat& k) { return ceil_rat(Rational(40704, 100) * Rational((k + 1) * (k + 1))) - 1; }

}  // namespace

TEST(Operators, MonotoneOnRandomPairs) {
  std::mt19937_64 rng(1);
  Point shift = p2(0.3, -0.2);
  for (unsigned p : {2u, 3u, 4u}) {
    auto sp = LpSpace::make(2, p);
    for (const auto& T : {scaled_duality(2, rat(3, 2)), coordinatewise_cubic(shift, Rational(1))}) {
      double worst = 0;
      for (int i = 0; i < 1000; ++i) {
        Point x = random_in_ball(rng, 2, sp.pd(), 3), y = random_in_ball(rng, 2, sp.pd(), 3);
        worst = std::min(worst, (x - y).dot(T.apply(sp, x) - T.apply(sp, y)));
      }
      EXPECT_GE(worst, -1e-12);
    }
  }
  EXPECT_THROW(scaled_duality(2, Rational(-1)), std::invalid_argument);
}

TEST(Operators, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  auto sp = LpSpace::make(3, 4);
  Point shift(3);
  shift << 0.1, 0.2, -0.3;
  for (const auto& T : {scaled_duality(3, Rational(2)), coordinatewise_cubic(shift, Rational(1))})
    for (int t = 0; t < 20; ++t) {
      Point x = random_in_ball(rng, 3, 4.0, 2.0);
      Eigen::MatrixXd Jac = T.jacobian(sp, x), fd(3, 3);
      const double h = 1e-6;
      for (int j = 0; j < 3; ++j) {
        Point a = x, b = x;
        a[j] += h;
        b[j] -= h;
        fd.col(j) = (T.apply(sp, a) - T.apply(sp, b)) / (2 * h);
      }
      EXPECT_LT((Jac - fd).cwiseAbs().maxCoeff(), 1e-5);
    }
}

TEST(Resolvent, SpecExamples) {
  auto s4 = LpSpace::make(2, 4);
  Point x = p2(0.8, -1.3);
  auto zero = scaled_duality(2, Rational(0));
  EXPECT_EQ(resolvent(s4, zero, Rational(3), x), x);
  ResolventOptions generic;
  generic.closed_form = false;
  Point z0 = resolvent(s4, zero, Rational(3), x, generic);
  EXPECT_LT((z0 - x).cwiseAbs().maxCoeff(), 1e-10);

  auto cj = scaled_duality(2, Rational(1));
  Point half = resolvent(s4, cj, Rational(1), x);
  EXPECT_EQ(half, Point(x / 2));
  Point half_generic = resolvent(s4, cj, Rational(1), x, generic);
  EXPECT_LT((half_generic - x / 2).cwiseAbs().maxCoeff(), 1e-10);

  auto s2 = LpSpace::make(2, 2);
  Point z = resolvent(s2, cj, rat(5, 2), x, generic);
  EXPECT_LT((z - x / 3.5).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(resolvent(s2, cj, Rational(0), x), std::invalid_argument);
}

TEST(Resolvent, ResidualSmallAcrossRandomInputs) {
  std::mt19937_64 rng(3);
  Point shift = p2(0.3, -0.2);
  ResolventOptions generic;
  generic.closed_form = false;
  for (unsigned p : {2u, 4u})
    for (const auto& T : {scaled_duality(2, rat(1, 2)), coordinatewise_cubic(shift, Rational(1))}) {
      auto sp = LpSpace::make(2, p);
      double worst = 0;
      for (int i = 0; i < 1000; ++i) {
        Point x = random_in_ball(rng, 2, sp.pd(), 2.0);
        Rational r = rat(1 + static_cast<std::int64_t>(rng() % 30), 10);
        Point z = resolvent(sp, T, r, x, generic);
        worst = std::max(worst, resolvent_residual(sp, T, to_double(r), x, z));
      }
      EXPECT_LE(worst, 1e-10) << "p=" << p;
    }
}

TEST(Resolvent, BoundedByMu) {
  EXPECT_EQ(mu_resolvent_bound(0, 0, 5, rat(1, 2)), Rational(1));
  EXPECT_EQ(mu_resolvent_bound(0, 0, 5, Rational(3)), Rational(3));
  EXPECT_EQ(mu_resolvent_bound(1, 1, 1, 2), Rational(7));
  std::mt19937_64 rng(4);
  Point shift = p2(0.3, -0.2);
  auto T = coordinatewise_cubic(shift, Rational(1));
  for (unsigned p : {2u, 4u}) {
    auto sp = LpSpace::make(2, p);
    for (int i = 0; i < 1000; ++i) {
      Point x = random_in_ball(rng, 2, sp.pd(), 2.0);
      Rational r = rat(1 + static_cast<std::int64_t>(rng() % 20), 10);
      Rational b = ceil_rat(rat_from_double(sp.norm(x)));
      Point z = resolvent(sp, T, r, x);
      EXPECT_LE(sp.norm(z), to_double(mu_resolvent_bound(T.C, T.D, r, b)));
    }
  }
}

TEST(KT, InequalityOnSamples) {
  std::mt19937_64 rng(5);
  for (unsigned p : {2u, 3u, 4u}) {
    auto sp = LpSpace::make(2, p);
    auto T = scaled_duality(2, Rational(1));
    std::vector<Point> ys;
    for (int i = 0; i < 1000; ++i) ys.push_back(random_in_ball(rng, 2, sp.pd(), 3));
    auto rep = kt_inequality_check(sp, T, T.zero, ys, rat(3, 2));
    EXPECT_TRUE(rep.rep.ok());
    EXPECT_GE(rep.min_gap, -1e-10);
    auto same = kt_inequality_check(sp, T, T.zero, {T.zero}, Rational(1));
    EXPECT_EQ(same.min_gap, 0.0);
  }
  auto sp = LpSpace::make(2, 4);
  Point shift = p2(0.3, -0.2);
  auto cubic = coordinatewise_cubic(shift, Rational(1));
  std::vector<Point> ys;
  for (int i = 0; i < 300; ++i) ys.push_back(random_in_ball(rng, 2, 4.0, 2));
  EXPECT_TRUE(kt_inequality_check(sp, cubic, cubic.zero, ys, Rational(1)).rep.ok());
}

TEST(KT, QuantitativeFormAtExactZero) {
  std::mt19937_64 rng(6);
  auto sp = LpSpace::make(2, 4);
  auto T = scaled_duality(2, Rational(1));
  auto om = OmegaJ::for_space(sp);
  for (int i = 0; i < 100; ++i) {
    Point y = random_in_ball(rng, 2, 4.0, 2);
    auto q = quant_kt_inequality(sp, T, T.zero, y, Rational(1), Rational(2), rat(1, 1000), om);
    EXPECT_TRUE(q.premise);
    EXPECT_EQ(q.residual, 0.0);
    EXPECT_TRUE(q.ok());
    EXPECT_GE(q.E, Rational(2));
  }
}

TEST(KT, QuantitativeFormNearZero) {
  std::mt19937_64 rng(7);
  auto sp = LpSpace::make(2, 3);
  auto T = scaled_duality(2, Rational(1));
  auto om = OmegaJ::for_space(sp);
  std::size_t premises = 0;
  for (int i = 0; i < 1000; ++i) {
    Point x = random_in_ball(rng, 2, 3.0, 1e-6);
    Point y = random_in_ball(rng, 2, 3.0, 1.5);
    auto q = quant_kt_inequality(sp, T, x, y, rat(3, 2), Rational(1), rat(1, 100), om);
    premises += q.premise;
    EXPECT_TRUE(q.ok()) << q.lhs << " > " << q.rhs;
  }
  EXPECT_GT(premises, 500u);
}

TEST(OmegaJ, LipschitzModuli) {
  auto om = OmegaJ::for_space(LpSpace::make(2, 4));
  EXPECT_EQ(om.L, Rational(3));
  EXPECT_EQ(om.real(rat(3, 10)), rat(1, 10));
  EXPECT_EQ(om.nat(Nat(9)), Nat(29));
  EXPECT_EQ(om.modulus()(Nat(0)), Nat(2));
  auto id = OmegaJ::for_space(LpSpace::make(2, 2));
  for (int k = 0; k < 10; ++k) EXPECT_EQ(id.nat(Nat(k)), Nat(k));
}

TEST(Mann, StepSpecExamples) {
  auto s2 = LpSpace::make(2, 2);
  auto T = scaled_duality(2, Rational(1));
  MannSchedule sched = simple_schedule();
  sched.alpha = {rat(1, 2)};
  Point x = mann_step(s2, T, sched, p2(1, 0), 0);
  EXPECT_NEAR(x[0], 0.75, 1e-15);
  EXPECT_EQ(x[1], 0.0);
  auto s4 = LpSpace::make(2, 4);
  Point y = p2(0.4, -1.1);
  sched.alpha = {Rational(1)};
  EXPECT_LT((mann_step(s4, T, sched, y, 0) - y).cwiseAbs().maxCoeff(), 1e-14);
  sched.alpha = {Rational(0)};
  EXPECT_LT((mann_step(s4, T, sched, y, 0) - resolvent(s4, T, Rational(1), y)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Mann, ScheduleValidation) {
  auto s = simple_schedule();
  EXPECT_NO_THROW(s.validate());
  auto bad = s;
  bad.alpha = {rat(1, 2)};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = s;
  bad.r = {rat(1, 2)};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = s;
  bad.alpha_bar = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  s.r = {Rational(1), Rational(3), Rational(2)};
  EXPECT_EQ(s.r_max_upto(Nat(0)), Rational(1));
  EXPECT_EQ(s.r_max_upto(Nat(1)), Rational(3));
  EXPECT_EQ(s.r_max_upto(Nat(100)), Rational(3));
  EXPECT_FALSE(s.constant_r());
}

TEST(Mann, RunInvariants) {
  Point shift = p2(0.3, -0.2);
  MannSchedule sched = simple_schedule();
  sched.alpha = {rat(1, 4), Rational(0)};
  sched.r = {Rational(1), Rational(2)};
  struct Case {
    LpSpace sp;
    MonotoneOperator T;
  };
  for (const auto& c : {Case{LpSpace::make(2, 4), scaled_duality(2, Rational(1))},
                        Case{LpSpace::make(2, 3), coordinatewise_cubic(shift, Rational(1))},
                        Case{LpSpace::make(2, 2), scaled_duality(2, rat(1, 2))}}) {
    auto run = run_mann(c.sp, c.T, sched, p2(1, 0.5), 500);
    ASSERT_EQ(run.points.size(), 501u);
    EXPECT_TRUE(phi_monotone_check(run, c.T.zero).ok());
    for (double r : run.resolvent_residuals) EXPECT_LE(r, 1e-10);
    for (std::size_t n = 0; n < run.points.size(); ++n) {
      Rational b = ceil_rat(rat_from_double(c.sp.norm(run.points[n])));
      EXPECT_LE(c.sp.norm(run.resolvents[n]),
                to_double(mu_resolvent_bound(c.T.C, c.T.D, sched.r_n(n), std::max(b, Rational(1)))));
    }
    auto again = run_mann(c.sp, c.T, sched, p2(1, 0.5), 500);
    EXPECT_EQ(again.points, run.points);
    Rational b0 = ceil_rat(rat_from_double(phi_eval(c.sp, c.T.zero, run.points[0])));
    for (auto eps : {rat(1, 10), rat(1, 100)}) {
      auto w = liminf_scan(run, b0, sched.alpha_bar, eps);
      EXPECT_TRUE(w.found);
      EXPECT_LE(Nat(w.n), w.bound);
    }
  }
}

TEST(Mann, HilbertCrossValidation) {
  MannSchedule sched = simple_schedule();
  sched.alpha = {rat(1, 4), rat(1, 3)};
  sched.r = {Rational(1), rat(5, 2)};
  Point x0(3);
  x0 << 1, -2, 0.5;
  EXPECT_LE(p2_crossval(sched, x0, 500), 1e-12);
}

TEST(Mann, AFFamilyUsesAllEarlierParameters) {
  auto sp = LpSpace::make(2, 2);
  auto T = scaled_duality(2, Rational(1));
  MannSchedule sched = simple_schedule();
  sched.r = {Rational(1), Rational(3)};
  auto fam = af_family(sp, T, sched);
  // |x - x/(1+r)| = |x| r/(1+r): 1/2 |x| for r = 1, 3/4 |x| for r = 3
  Point x = p2(0.9, 0);
  EXPECT_TRUE(fam.member(Nat(0), x));   // 0.45 <= 1
  EXPECT_FALSE(fam.member(Nat(1), x));  // 0.675 > 1/2
  EXPECT_TRUE(fam.member(Nat(1), p2(0.6, 0)));
}

TEST(Constants, EValuesForScaledDuality) {
  auto c = cj_constants(2);
  EXPECT_EQ(E0(c, Nat(0), Nat(0)), Nat(4));
  EXPECT_EQ(E0(c, Nat(3), Nat(5)), Nat(4));
  EXPECT_EQ(E1(c, Nat(0)), Nat(4));
  EXPECT_EQ(E_rate(c), Nat(4));
  c.M = 3;
  // mu = max(M, 1) = 3: E0 = max(2(3+3), 2(3+3)) = 12
  EXPECT_EQ(E0(c, Nat(0), Nat(1)), Nat(12));
}

TEST(Constants, ChiSubstitution) {
  auto c2 = cj_constants(2), c4 = cj_constants(4);
  // m <= 1: inner index 1, omega(2 * 4 + 1)
  EXPECT_EQ(chi_banach(c2, Nat(0), Nat(0), Nat(0)), Nat(9));
  EXPECT_EQ(chi_banach(c2, Nat(0), Nat(1), Nat(5)), Nat(9));
  EXPECT_EQ(chi_banach(c4, Nat(0), Nat(0), Nat(0)), Nat(29));
  // (r+1)(m-1) - 1 + 1 = 6 for m = 3, r = 2: omega(2*4*6 + 1) = 49
  EXPECT_EQ(chi_banach(c2, Nat(0), Nat(3), Nat(2)), Nat(49));
  EXPECT_EQ(chi_banach(c2, Nat(100), Nat(0), Nat(0)), Nat(100));
}

TEST(Constants, LambdaForP2) {
  auto c = cj_constants(2);
  auto pm = phi_moduli(c);
  for (int k = 0; k < 20; ++k) EXPECT_EQ(pm.lambda(Nat(k)), lambda_p2_B2(Nat(k))) << k;
  // Lambda(k) = ceil(32 (k+1)) - 1 on the ball of radius 2
  EXPECT_EQ(pm.Lambda(Nat(0)), Nat(31));
}

TEST(Constants, PhiBoundSubstitution) {
  auto c = cj_constants(2);
  auto pm = phi_moduli(c);
  // k = 0: lambda(0) = 407, w = omega(2*4*408 + 1) = 3265, Phi = 2 ceil((lambda(w)+1) / (1/2))
  EXPECT_EQ(pm.lambda(Nat(0)), Nat(407));
  Nat lw = lambda_p2_B2(Nat(3265));
  EXPECT_EQ(phi_bound_banach(c, pm.lambda, Nat(0)), 4 * (lw + 1));
  auto c0 = c;
  c0.sched.alpha = {Rational(0)};
  c0.sched.alpha_bar = rat(1, 1000000);
  Nat half = phi_bound_banach(c, pm.lambda, Nat(0));
  Nat small = phi_bound_banach(c0, pm.lambda, Nat(0));
  EXPECT_EQ(small, 2 * ceil_rat(Rational(lw + 1) / (1 - rat(1, 1000000))));
  EXPECT_LE(half, 2 * small);
}

TEST(Constants, GammaLp) {
  // p = 2, d = 2: ceil(2 (k+1) sqrt 2 M)^2, matching the Hilbert box modulus
  auto sp = LpSpace::make(2, 2);
  EXPECT_EQ(gamma_lp(sp, Rational(1), Nat(0)), Nat(9));
  // p = 4, d = 2: ceil(2 * 2^{3/4})^2 = ceil(3.36)^2 = 16
  EXPECT_EQ(gamma_lp(LpSpace::make(2, 4), Rational(1), Nat(0)), Nat(16));
  EXPECT_EQ(gamma_lp(LpSpace::make(1, 3), Rational(2), Nat(1)), Nat(8));
}

TEST(Metastability, K0AndBase) {
  auto c = cj_constants(2);
  BanachMetaDetail d;
  Budget b;
  b.steps = 50;
  auto r = metastability_banach(c, Nat(0), [](const Nat&) { return Nat(0); }, true, b, &d);
  EXPECT_EQ(d.k_prime, Nat(407));
  EXPECT_EQ(d.k0, std::max(Nat(407), lambda_p2_B2(Nat(4 * 407 + 3))));
  EXPECT_EQ(r.trace.at(0), Nat(0));
  EXPECT_EQ(d.level, 2 * d.theta0 + 1);
  EXPECT_GT(r.value, Nat(0));
  EXPECT_TRUE(r.certified_lower);
}

TEST(Rate, RegularityOfScaledDuality) {
  auto rho = rho_scaled_duality(Rational(1));
  EXPECT_EQ(rho(rat(1, 2)), rat(1, 4));
  auto sp = LpSpace::make(2, 4);
  auto T = scaled_duality(2, rat(3, 2));
  auto r3 = rho_scaled_duality(rat(3, 2));
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    Point x = random_in_ball(rng, 2, 4.0, 2.0);
    double res = sp.norm(x - resolvent(sp, T, Rational(1), x));
    EXPECT_NEAR(res, to_double(r3(Rational(1))) * sp.norm(x), 1e-12);
  }
  EXPECT_THROW(rho_scaled_duality(Rational(0)), std::invalid_argument);
}

TEST(Rate, EndToEndSubstitution) {
  // p = 2, c = 1, M = b = 1, alpha_bar = 1/2, delta = 1/2.
  // On the ball of radius B = 2: lt(e) = e^2 / 407.04, Lt(e) = e / 32, rho'(e) = e / 128, E = 4, omega = id.
  auto c = cj_constants(2);
  auto sq = [](const Rational& e) { return Rational(e * e * Rational(100, 40704)); };
  Rational delta = rat(1, 2);
  Rational arg = sq(sq(delta) / 2) / 2 / 128;       // rho'(theta(lt(delta)) / 2)
  Rational w = sq(arg) / 8;                           // omega(lt(e) / 2E)
  Nat tau = 2 * ceil_rat(Rational(1) / (sq(w) * rat(1, 2)));
  EXPECT_EQ(convergence_rate_banach(rho_scaled_duality(Rational(1)), c, delta), 2 * tau);
  EXPECT_GE(convergence_rate_banach(rho_scaled_duality(Rational(1)), c, Rational(1'000'000'000)), Nat(2));
  EXPECT_THROW(convergence_rate_banach(rho_scaled_duality(Rational(1)), c, Rational(0)), std::invalid_argument);
}
