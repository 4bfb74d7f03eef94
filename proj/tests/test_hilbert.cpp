#include "fejer/hilbert.hpp"

#include <gtest/gtest.h>

using namespace fejer;
using namespace fejer::hilbert;

namespace {

Point p2(double a, double b) {
  Point x(2);
  x << a, b;
  return x;
}

const double kPi = std::numbers::pi;

double euclid(const Point& a, const Point& b) { return (a - b).norm(); }

}  // namespace

TEST(Maps, RejectBadParameters) {
  EXPECT_THROW(rotation_average(1.0, Rational(0)), std::invalid_argument);
  EXPECT_THROW(rotation_average(1.0, Rational(1)), std::invalid_argument);
  EXPECT_THROW(projection_average(2, rat(3, 2)), std::invalid_argument);
  EXPECT_THROW(resolvent_identity(2, Rational(0)), std::invalid_argument);
  EXPECT_THROW(rotation_average(1.0)(Point::Zero(3)), std::invalid_argument);
}

TEST(Maps, AveragednessOnRandomPairs) {
  std::mt19937_64 rng(1);
  auto rot = rotation_average(kPi / 2);
  auto rot3 = rotation_average(2.0, rat(1, 3));
  auto proj = projection_average(3);
  auto res = resolvent_identity(3, rat(3, 2));
  EXPECT_TRUE(averagedness_check(rot, 2, 1000, 2.0, rng).ok());
  EXPECT_TRUE(averagedness_check(rot3, 2, 1000, 2.0, rng).ok());
  EXPECT_TRUE(averagedness_check(proj, 3, 1000, 3.0, rng).ok());
  EXPECT_TRUE(averagedness_check(res, 3, 1000, 2.0, rng).ok());
  // rotation itself is not averaged for any alpha < 1
  AveragedMap pure = rot;
  pure.eval = [](const Point& x) { return p2(-x[1], x[0]); };
  EXPECT_FALSE(averagedness_check(pure, 2, 100, 1.0, rng).ok());
}

TEST(Maps, RegularityScales) {
  auto rot = rotation_average(kPi / 2);
  EXPECT_NEAR(to_double(rot.rho_scale), std::sin(kPi / 4), 1e-10);
  EXPECT_LE(to_double(rot.rho_scale), std::sin(kPi / 4));
  // ||x - Tx|| = rho_scale ||x|| up to rounding for the rotation
  for (double t : {0.1, 1.0, 5.0})
    EXPECT_GE(af_residual_hilbert(rot, p2(t, -t)), to_double(rot.rho_scale) * p2(t, -t).norm());
  EXPECT_EQ(resolvent_identity(2, Rational(1)).rho_scale, rat(1, 2));
}

TEST(Iteration, SpecExample) {
  auto T = rotation_average(kPi / 2);
  auto run = iterate_alternating(T, InertiaSchedule::constant(Rational(1)), p2(1, 0), 2);
  ASSERT_EQ(run.points.size(), 3u);
  EXPECT_NEAR(run.points[1][0], 0.5, 1e-15);
  EXPECT_NEAR(run.points[1][1], 0.5, 1e-15);
  EXPECT_NEAR(run.bars[1][0], 0.0, 1e-15);
  EXPECT_NEAR(run.bars[1][1], 1.0, 1e-15);
  EXPECT_NEAR(run.points[2][0], -0.5, 1e-15);
  EXPECT_NEAR(run.points[2][1], 0.5, 1e-15);
  EXPECT_EQ(run.bars[0], run.points[0]);
  EXPECT_EQ(run.M, Rational(1));
  EXPECT_EQ(run.residuals.size(), 3u);
}

TEST(Iteration, IdentityMapIsStationaryAndZeroInertiaIsPicard) {
  AveragedMap id = resolvent_identity(2, Rational(1));
  id.eval = [](const Point& x) { return x; };
  auto r = iterate_alternating(id, InertiaSchedule::constant(Rational(1)), p2(0.3, -2), 10);
  for (const auto& x : r.points) EXPECT_EQ(x, p2(0.3, -2));

  auto T = rotation_average(0.7);
  auto run = iterate_alternating(T, InertiaSchedule::constant(Rational(0)), p2(1, 2), 20);
  Point x = p2(1, 2);
  for (std::size_t k = 0; k <= 20; ++k) {
    EXPECT_LT((run.points[k] - x).norm(), 1e-14);
    x = T(x);
  }
}

TEST(Iteration, InertiaRangeEnforced) {
  auto T = rotation_average(kPi / 2);  // alpha = 1/2: cap (1-a)/a = 1
  EXPECT_THROW(iterate_alternating(T, InertiaSchedule::constant(rat(11, 10)), p2(1, 0), 3), std::invalid_argument);
  EXPECT_THROW(iterate_alternating(T, InertiaSchedule::constant(rat(-1, 10)), p2(1, 0), 3), std::invalid_argument);
  EXPECT_NO_THROW(iterate_alternating(T, InertiaSchedule::periodic({Rational(1), rat(1, 2)}), p2(1, 0), 9));
  EXPECT_THROW(InertiaSchedule::periodic({}), std::invalid_argument);
}

TEST(Residual, SpecValues) {
  auto T = rotation_average(kPi / 2);
  EXPECT_EQ(af_residual_hilbert(T, p2(0, 0)), 0.0);
  EXPECT_NEAR(af_residual_hilbert(T, p2(1, 0)), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(af_residual_hilbert(T, p2(2, 0)), 2 * std::sqrt(0.5), 1e-15);
  auto P = projection_average(2);
  EXPECT_EQ(af_residual_hilbert(P, p2(0.3, 0.4)), 0.0);
  EXPECT_NEAR(af_residual_hilbert(P, p2(3, 4)), 2.0, 1e-15);  // (x - x/|x|)/2
}

TEST(PhiBound, SpecValues) {
  EXPECT_EQ(phi_bound_hilbert(rat(1, 2), Rational(1), Nat(0)), Nat(2));
  EXPECT_EQ(phi_bound_hilbert(rat(1, 2), Rational(1), Nat(9)), Nat(200));
  EXPECT_EQ(phi_bound_hilbert(rat(2, 3), Rational(1), Nat(0)), Nat(4));
  EXPECT_EQ(phi_bound_hilbert(rat(1, 10), Rational(1), Nat(0)), Nat(2));  // max with 1
  EXPECT_THROW(phi_bound_hilbert(Rational(1), Rational(1), Nat(0)), std::invalid_argument);
}

TEST(PhiBound, HoldsOnRotationRun) {
  auto T = rotation_average(kPi / 2);
  Rational b = 1;
  Nat top = phi_bound_hilbert(T.alpha, b, Nat(30));
  auto run = iterate_alternating(T, InertiaSchedule::constant(Rational(1)), p2(1, 0), to_u64(2 * top + 2));
  for (unsigned k = 0; k <= 30; ++k) {
    auto w = approx_fpoint_scan(run, T.alpha, b, Nat(k));
    EXPECT_TRUE(w.found) << k;
    EXPECT_LE(Nat(w.n), w.bound);
    EXPECT_LE(run.residuals[2 * w.n], 1.0 / (k + 1.0));
  }
  auto shortrun = iterate_alternating(T, InertiaSchedule::constant(Rational(1)), p2(1000, 0), 4);
  EXPECT_THROW(approx_fpoint_scan(shortrun, T.alpha, b, Nat(30)), RunTooShort);
}

TEST(ChiZeta, SpecValues) {
  auto [chi, zeta] = chi_zeta_hilbert(rat(1, 2), Rational(1), Nat(0), Nat(2), Nat(0));
  EXPECT_EQ(chi, Nat(95));
  EXPECT_EQ(zeta, Nat(111));
  auto [c0, z0] = chi_zeta_hilbert(rat(1, 2), Rational(1), Nat(5), Nat(0), Nat(3));
  EXPECT_EQ(c0, Nat(0));
  EXPECT_EQ(z0, Nat(0));
  EXPECT_EQ(chi_modulus(rat(1, 2), Rational(1))(Nat(7), Nat(2), Nat(0)), Nat(95));
  EXPECT_EQ(zeta_modulus(rat(1, 2), Rational(2))(Nat(7), Nat(1), Nat(1)), Nat(2 * 14 * 2 * 4 - 1));
}

TEST(ChiZeta, UniformModulusOnRotationRun) {
  std::mt19937_64 rng(4);
  auto T = rotation_average(kPi / 2);
  auto run = iterate_alternating(T, InertiaSchedule::constant(Rational(1)), p2(1, 0), 40);
  auto inst = FejerInstance::from_run(run.as_run(), metric_distance());
  inst.G = inst.H = [](double a) { return a * a; };
  inst.family = af_family(T);
  inst.chi = chi_modulus(T.alpha, run.M);
  inst.zeta = zeta_modulus(T.alpha, run.M);
  inst.zeta_shift = 3;
  std::vector<Point> samples{T.xhat};
  for (const auto& ap : sample_approx_fixed_points(T, 2, {1e-1, 1e-2, 1e-3, 1e-4}, 4, rng)) samples.push_back(ap.x);
  std::vector<GridPoint> grid;
  for (std::uint64_t n = 0; n <= 3; ++n)
    for (std::uint64_t m = 0; m <= 2; ++m)
      for (std::uint64_t r = 0; r <= 2; ++r) grid.push_back({n, m, r});
  auto chi = check_uniform_modulus(inst, "chi", grid, samples);
  auto zeta = check_uniform_modulus(inst, "zeta", grid, samples);
  EXPECT_TRUE(chi.ok());
  EXPECT_TRUE(zeta.ok());
  EXPECT_GT(chi.checked, 0u);
  EXPECT_GT(zeta.checked, 0u);
  // chi = 0 admits a far point as a member of AF_0 and breaks the clause
  inst.chi = NatModulus::constant(Nat(0), 3);
  std::vector<Point> far{p2(0.9, 0.9) * 0.7};
  EXPECT_LE(af_residual_hilbert(T, far[0]), 1.0);
  EXPECT_FALSE(check_uniform_modulus(inst, "chi", grid, far).ok());
}

TEST(GammaBox, SpecValues) {
  EXPECT_EQ(gamma_box(1, Rational(1), Nat(0)), Nat(2));
  EXPECT_EQ(gamma_box(2, Rational(1), Nat(0)), Nat(9));
  EXPECT_EQ(gamma_box(3, Rational(1), Nat(0)), Nat(64));  // ceil(2 sqrt 3) = 4
  EXPECT_EQ(gamma_box(2, rat(1, 2), Nat(1)), Nat(9));
  EXPECT_THROW(gamma_box(0, Rational(1), Nat(0)), std::invalid_argument);
  EXPECT_THROW(gamma_box(2, Rational(0), Nat(0)), std::invalid_argument);
}

TEST(GammaBox, PigeonholeOnRandomSequences) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t)
    for (unsigned k = 0; k <= 4; ++k) {
      Nat gk = gamma_box(2, Rational(1), Nat(k));
      std::vector<Point> seq;
      for (std::size_t i = 0; Nat(i) <= gk; ++i) seq.push_back(p2(2 * unit_real(rng) - 1, 2 * unit_real(rng) - 1));
      EXPECT_TRUE(pigeonhole_holds(seq, gk, Nat(k), euclid)) << t << " k=" << k;
    }
}

TEST(Closedness, SpecValuesAndImplication) {
  EXPECT_EQ(closedness_nonexpansive(Nat(0)), std::make_pair(Nat(3), Nat(1)));
  EXPECT_EQ(closedness_nonexpansive(Nat(10)), std::make_pair(Nat(43), Nat(21)));
  std::mt19937_64 rng(8);
  auto T = rotation_average(kPi / 2);
  std::vector<std::pair<Point, Point>> pairs;
  for (unsigned k = 0; k <= 10; ++k) {
    double e = 1.0 / (2.0 * k + 2.0), rad = 1.0 / (4.0 * k + 4.0);
    for (const auto& ap : sample_approx_fixed_points(T, 2, {e, 0.5 * e}, 5, rng))
      for (int i = 0; i < 4; ++i) {
        Point dir = random_in_ball(rng, 2, 2.0, 1.0).normalized();
        pairs.emplace_back(ap.x, ap.x + rad * (i == 0 ? 1.0 : unit_real(rng)) * dir);
      }
  }
  auto rep = check_uniform_closedness(af_family(T), NatModulus::affine(4, 3), NatModulus::affine(2, 1), euclid, pairs, 10);
  EXPECT_TRUE(rep.ok());
  EXPECT_GT(rep.checked, 100u);
}

TEST(Lemmas, HoldOnEveryShippedMap) {
  std::mt19937_64 rng(12);
  struct Case {
    AveragedMap T;
    unsigned dim;
    Point x0;
    InertiaSchedule sched;
  };
  Point x3(3);
  x3 << 2, 1, -1;
  std::vector<Case> cases{
      {rotation_average(kPi / 2), 2, p2(1, 0), InertiaSchedule::constant(Rational(1))},
      {rotation_average(1.0, rat(1, 3)), 2, p2(-2, 0.5), InertiaSchedule::periodic({Rational(2), rat(1, 2)})},
      {projection_average(3), 3, x3, InertiaSchedule::periodic({Rational(2), rat(1, 2)})},
      {resolvent_identity(2, Rational(1)), 2, p2(0.6, -0.8), InertiaSchedule::constant(Rational(1))},
  };
  for (const auto& c : cases) {
    auto run = iterate_alternating(c.T, c.sched, c.x0, 1003);
    auto approx = sample_approx_fixed_points(c.T, c.dim, {1e-2, 1e-3}, 5, rng);
    auto ls = lemma_suite(c.T, run, approx);
    EXPECT_TRUE(ls.summed_ok(1e-9)) << c.T.kind << " " << ls.summed_lhs << " > " << ls.summed_rhs;
    EXPECT_TRUE(ls.odd_step.ok()) << c.T.kind;
    EXPECT_TRUE(ls.fejer_exact.ok()) << c.T.kind;
    EXPECT_TRUE(ls.fejer_approx.ok()) << c.T.kind;
    EXPECT_GE(ls.odd_step.checked, 500u);
    EXPECT_GT(ls.fejer_approx.checked, 0u);
  }
}

TEST(Lemmas, ApproxFixedPointsHaveRequestedResidual) {
  std::mt19937_64 rng(14);
  auto T = rotation_average(kPi / 2);
  for (const auto& ap : sample_approx_fixed_points(T, 2, {1e-2, 1e-3}, 10, rng)) {
    EXPECT_LE(ap.eps, 1e-2 + 1e-12);
    EXPECT_NEAR(af_residual_hilbert(T, ap.x), ap.eps, 1e-15);
  }
}

namespace {
// 2 Psi_0 + 3 for a constant counterfunction g == c, written out directly:
// eta(n, r) = max(2K+1, 2 h^2 c4 M (2r+4)^2 - 1) with h = floor((c+3)/2) does not depend on n,
// so Psi_0 reaches its fixed point Phi(eta) after one step.
Nat hilbert_constant_g_oracle(const Rational& alpha, const Rational& M, std::uint64_t k, std::uint64_t c) {
  Nat K = 2 * k + 1;
  Nat r = 4 * K + 3;
  Nat c4 = ceil_rat((3 - alpha) / (alpha * alpha) + 4);
  Nat h = Nat(c + 3) / 2;
  Rational v = Rational(2 * h * h * c4) * M * Rational((2 * r + 4) * (2 * r + 4)) - 1;
  Nat eta = std::max(Nat(2 * K + 1), ceil_rat(v));
  Nat phi = 2 * std::max(Nat(1), ceil_rat(alpha / (1 - alpha) * M * M * Rational((eta + 1) * (eta + 1)))) + 1;
  return 2 * phi + 3;
}
}  // namespace

TEST(Metastability, SpecInstance) {
  MetastabilityParams prm{rat(1, 2), 2, Rational(1)};
  auto r = metastability_hilbert(prm, Nat(0), [](const Nat&) { return Nat(0); }, true);
  EXPECT_EQ(r.P, Nat(8281));
  EXPECT_EQ(r.trace.at(0), Nat(0));
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.value, hilbert_constant_g_oracle(prm.alpha, prm.M, 0, 0));
  EXPECT_EQ(r.value, Nat(329204741));
}

TEST(Metastability, ConstantCounterfunctionsMatchOracle) {
  for (auto alpha : {rat(1, 2), rat(1, 3), rat(3, 4)})
    for (auto M : {Rational(1), Rational(3)})
      for (std::uint64_t k : {0u, 1u, 4u})
        for (std::uint64_t c : {0u, 1u, 6u}) {
          MetastabilityParams prm{alpha, 2, M};
          auto r = metastability_hilbert(prm, Nat(k), [c](const Nat&) { return Nat(c); }, true);
          EXPECT_EQ(r.value, hilbert_constant_g_oracle(alpha, M, k, c)) << alpha << " " << M << " " << k << " " << c;
        }
}

TEST(Metastability, MonotoneInK) {
  MetastabilityParams prm{rat(1, 2), 2, Rational(1)};
  for (std::uint64_t c : {0u, 2u, 5u}) {
    auto g = [c](const Nat&) { return Nat(c); };
    EXPECT_LE(metastability_hilbert(prm, Nat(0), g, true).value, metastability_hilbert(prm, Nat(1), g, true).value);
  }
  // a growing g needs the prefix scan and hits the budget; the lower bound stays monotone in k
  Budget b;
  b.steps = 2000;
  auto lin = [](const Nat& n) { return Nat(n + 1); };
  auto r0 = metastability_hilbert(prm, Nat(0), lin, true, b);
  EXPECT_TRUE(r0.certified_lower);
  EXPECT_GT(r0.value, Nat(0));
}

TEST(Metastability, BruteForceWitnessBelowBound) {
  auto T = rotation_average(kPi / 2);
  auto run = iterate_alternating(T, InertiaSchedule::constant(Rational(1)), p2(1, 0), 2000);
  MetastabilityParams prm{T.alpha, 2, run.M};
  for (std::uint64_t k : {0u, 1u, 2u}) {
    auto g = [](const Nat& n) { return n; };
    auto w = brute_force_metastability(run.as_run(), euclid, af_family(T), Nat(k), g, true);
    auto psi = metastability_hilbert(prm, Nat(k), g, true);
    EXPECT_LE(Nat(w.N), psi.value);
  }
}

TEST(Rate, SpecValues) {
  auto id = RealModulus::identity();
  EXPECT_EQ(convergence_rate_hilbert(id, rat(1, 2), Rational(1), rat(4, 10)), Nat(242));
  auto rot = rotation_average(kPi / 2);
  auto rho = RealModulus::scale(rot.rho_scale);
  EXPECT_EQ(ceil_rat(1 / rho(rat(1, 40))), Nat(57));
  EXPECT_EQ(convergence_rate_hilbert(rho, rat(1, 2), Rational(1), rat(1, 10)), Nat(6728));
  EXPECT_EQ(convergence_rate_hilbert(rho, rat(1, 2), Rational(1), Rational(1'000'000)), Nat(8));
  EXPECT_THROW(convergence_rate_hilbert(rho, rat(1, 2), Rational(1), Rational(0)), std::invalid_argument);
}

TEST(Rate, TailOfRotationRunIsWithinDelta) {
  auto T = rotation_average(kPi / 2);
  auto rho = RealModulus::scale(T.rho_scale);
  Nat mu = convergence_rate_hilbert(rho, T.alpha, Rational(1), rat(1, 10));
  std::size_t m = static_cast<std::size_t>(mu);
  auto run = iterate_alternating(T, InertiaSchedule::constant(Rational(1)), p2(1, 0), m + 1000);
  double worst = 0;
  for (std::size_t n = m; n <= m + 1000; ++n) worst = std::max(worst, (run.points[n] - run.points.back()).norm());
  EXPECT_LT(worst, 0.1);
}
