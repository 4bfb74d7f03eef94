#pragma once

// Randomized audits of the moduli conversions: each builds an instance on
// which the premise holds by construction and tests the converted modulus
// against its defining implication.

#include "fejer/fejer.hpp"

#include <random>

namespace fejer::conversions {

struct AuditReport {
  std::size_t instances = 0;
  std::size_t checked = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
  void absorb(const std::string& where, const FejerReport& r) {
    checked += r.checked;
    if (!r.ok()) {
      const auto& v = r.violations.front();
      failures.push_back(where + ": n=" + std::to_string(v.n) + " m=" + std::to_string(v.m) + " r=" +
                         std::to_string(v.r) + " lhs=" + std::to_string(v.lhs) + " rhs=" + std::to_string(v.rhs));
    }
  }
  void absorb(const std::string& where, const ModulusReport& r) {
    checked += r.checked;
    if (!r.ok()) failures.push_back(where + ": " + r.violations.front().where);
  }
};

namespace detail {

inline Point pt(double v) {
  Point p(1);
  p << v;
  return p;
}

/// F = {0} on the line, AF_k = [-1/(k+1), 1/(k+1)].
inline ApproximationFamily interval_family() {
  return {[](const Point& x) { return std::abs(x[0]); }, {}};
}

/// Samples spread over [-1,1] plus points at every premise scale.
inline std::vector<Point> line_samples(std::mt19937_64& rng, std::size_t n) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(pt(2 * unit_real(rng) - 1));
  for (unsigned j = 0; j < 40; ++j) {
    double v = 1.0 / (j + 1.0);
    out.push_back(pt(v));
    out.push_back(pt(-v));
  }
  out.push_back(pt(0));
  return out;
}

/// Nonnegative sequence with a_{n+1} <= a_n + eps_n, eps_n = c 2^{-n} on random steps.
inline std::vector<double> quasi_decreasing(std::mt19937_64& rng, std::size_t len, double c,
                                            std::vector<double>& eps) {
  std::vector<double> a(len);
  eps.assign(len, 0.0);
  a[0] = unit_real(rng);
  for (std::size_t n = 0; n + 1 < len; ++n) {
    eps[n] = c * std::ldexp(1.0, -static_cast<int>(n));
    double next = std::max(0.0, a[n] * (0.5 + 0.5 * unit_real(rng)) - 0.02 * unit_real(rng));
    if (rng() % 2) next += eps[n] * unit_real(rng);
    a[n + 1] = std::min(next, a[n] + eps[n]);
  }
  return a;
}

inline ErrorSchedule table_errors(std::vector<double> eps) {
  ErrorSchedule e;
  auto shared = std::make_shared<std::vector<double>>(std::move(eps));
  e.eps = [shared](const Nat& n) {
    std::size_t i = static_cast<std::size_t>(to_u64(n));
    return i < shared->size() ? rat_from_double((*shared)[i]) : Rational(0);
  };
  e.xi = NatModulus::constant(0);
  return e;
}

inline std::vector<GridPoint> grid(std::size_t n_hi, std::size_t m_hi, std::size_t r_hi) {
  std::vector<GridPoint> g;
  for (std::uint64_t n = 0; n <= n_hi; ++n)
    for (std::uint64_t m = 0; m <= m_hi; ++m)
      for (std::uint64_t r = 0; r <= r_hi; ++r) g.push_back({n, m, r});
  return g;
}

inline FejerInstance line_instance(const std::vector<double>& seq) {
  FejerInstance inst;
  auto s = std::make_shared<std::vector<double>>(seq);
  inst.seq = [s](std::size_t n) { return pt(s->at(n)); };
  inst.phi_n = [](std::size_t, const Point& p, const Point& x) { return std::abs(p[0] - x[0]); };
  inst.family = interval_family();
  return inst;
}

/// chi(n,m,r) = 2r+1+extra: valid for any quasi-decreasing nonnegative sequence
/// since |x_{n+l}-p| <= |x_n-p| + sum eps + 2|p|.
inline NatModulus base_chi(unsigned extra) {
  return NatModulus::ternary([extra](const Nat&, const Nat&, const Nat& r) { return Nat(2 * r + 1 + extra); }, true,
                             "chi");
}

}  // namespace detail

/// Full-sequence modulus -> even-subsequence modulus chi', odd link eta, errors eps~.
inline AuditReport audit_derive_partial_from_full(std::size_t instances, std::mt19937_64& rng) {
  AuditReport rep;
  for (std::size_t t = 0; t < instances; ++t) {
    std::vector<double> eps;
    auto a = detail::quasi_decreasing(rng, 48, 0.05 * unit_real(rng), eps);
    auto chi = detail::base_chi(static_cast<unsigned>(rng() % 4));
    auto errs = detail::table_errors(eps);
    auto d = derive_partial_from_full(chi, errs);
    FejerInstance inst = detail::line_instance(a);
    inst.errors = d.errors;
    inst.chi = d.chi_even;
    inst.zeta = d.eta;
    inst.f = StepFunction::identity();
    auto samples = detail::line_samples(rng, 30);
    auto g = detail::grid(8, 6, 3);
    std::string w = "instance " + std::to_string(t);
    rep.absorb(w + " chi'", check_uniform_modulus(inst, "chi", g, samples, 1e-12));
    rep.absorb(w + " eta", check_uniform_modulus(inst, "zeta", g, samples, 1e-12));
    for (std::uint64_t n = 0; n < 20; ++n) {
      Rational lhs = d.errors.eps(Nat(n)), rhs = errs.eps(Nat(2 * n)) + errs.eps(Nat(2 * n + 1));
      ++rep.checked;
      if (lhs != rhs) rep.failures.push_back(w + ": eps~ mismatch at " + std::to_string(n));
    }
    ++rep.instances;
  }
  return rep;
}

/// Even-subsequence chi plus single-step odd modulus zeta(n,r) -> zeta^ for the f-clause.
inline AuditReport audit_mixed_gh_f(std::size_t instances, std::mt19937_64& rng) {
  AuditReport rep;
  for (std::size_t t = 0; t < instances; ++t) {
    std::vector<double> eps;
    auto even = detail::quasi_decreasing(rng, 24, 0.05 * unit_real(rng), eps);
    StepFunction f = StepFunction::lag(Nat(rng() % 3));
    if (rng() % 2) {
      f.f = [](const Nat& n) { return Nat(n / 2); };
      f.kappa = NatModulus::affine(2, 1);
    }
    // odd terms below x_{2f(n)} + sum_{i=f(n)}^{n} eps_i
    std::vector<double> seq(2 * even.size());
    for (std::size_t n = 0; n < even.size(); ++n) {
      std::size_t fn = static_cast<std::size_t>(to_u64(f(Nat(n))));
      double cap = even[fn];
      for (std::size_t i = fn; i <= n; ++i) cap += eps[i];
      seq[2 * n] = even[n];
      seq[2 * n + 1] = cap * unit_real(rng);
    }
    unsigned extra = static_cast<unsigned>(rng() % 3);
    auto chi = detail::base_chi(extra);
    auto zeta2 = NatModulus::binary([extra](const Nat&, const Nat& r) { return Nat(2 * r + 1 + extra); }, true);
    FejerInstance inst = detail::line_instance(seq);
    inst.errors = detail::table_errors(eps);
    inst.f = f;
    inst.zeta = mixed_gh_f_modulus(chi, zeta2, f);
    auto samples = detail::line_samples(rng, 30);
    rep.absorb("instance " + std::to_string(t), check_uniform_modulus(inst, "zeta", detail::grid(8, 6, 3), samples));
    ++rep.instances;
  }
  return rep;
}

/// Odd step s = 2s'+1: hat sequence, f(n) = n - s', zeta^ = max{zeta, chi(0,s',r)}, Phi' = Phi + s'.
inline AuditReport audit_affine_shift(std::size_t instances, std::mt19937_64& rng) {
  AuditReport rep;
  for (std::size_t t = 0; t < instances; ++t) {
    unsigned sp = static_cast<unsigned>(rng() % 3);
    unsigned s = 2 * sp + 1;
    std::vector<double> eps;
    auto even = detail::quasi_decreasing(rng, 24, 0.05 * unit_real(rng), eps);
    std::vector<double> seq(2 * even.size());
    for (std::size_t j = 0; j < even.size(); ++j) {
      seq[2 * j] = even[j];
      // x_{2j+1} for j >= s' sits below x_{2(j-s')}; earlier odd terms are arbitrary
      seq[2 * j + 1] = j >= sp ? even[j - sp] * unit_real(rng) : 5.0 * unit_real(rng);
    }
    unsigned extra = static_cast<unsigned>(rng() % 3);
    auto chi = detail::base_chi(extra);
    auto zeta = detail::base_chi(extra);
    auto Phi = NatModulus::unary(
        [even](const Nat& k) {
          double target = 1.0 / (to_double(k) + 1.0);
          for (std::size_t n = 0; n < even.size(); ++n)
            if (even[n] <= target) return Nat(n);
          return Nat(even.size());
        },
        false, "Phi");
    AffineShift sh = affine_shift(s, chi, zeta, Phi);
    auto hat = hat_sequence(seq, s);
    std::string w = "instance " + std::to_string(t) + " s=" + std::to_string(s);
    for (std::size_t n = 0; 2 * n < seq.size(); ++n) {
      ++rep.checked;
      if (hat[2 * n] != seq[2 * n]) rep.failures.push_back(w + ": even term changed at " + std::to_string(n));
    }
    FejerInstance inst = detail::line_instance(hat);
    inst.errors = detail::table_errors(eps);
    inst.f = sh.f;
    inst.zeta = sh.zeta;
    auto samples = detail::line_samples(rng, 30);
    rep.absorb(w, check_uniform_modulus(inst, "zeta", detail::grid(8, 6, 3), samples));
    // Phi' bound for (x_{2f(n)})
    for (unsigned k = 0; k <= 8; ++k) {
      Nat base = Phi(Nat(k));
      if (base >= Nat(even.size())) continue;
      Nat bound = sh.Phi(Nat(k));
      bool found = false;
      for (Nat n = 0; n <= bound && !found; ++n) {
        std::size_t fn = static_cast<std::size_t>(to_u64(sh.f(n)));
        if (fn < even.size() && hat[2 * fn] <= 1.0 / (k + 1.0)) found = true;
      }
      ++rep.checked;
      if (!found) rep.failures.push_back(w + ": Phi' fails at k=" + std::to_string(k));
    }
    ++rep.instances;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Total boundedness on X0 = [-1,1]^2 with the Euclidean metric.

namespace detail {

inline std::vector<Point> square_grid(int level) {
  int n = (1 << level);
  std::vector<Point> out;
  for (int i = 0; i <= 2 * n; ++i)
    for (int j = 0; j <= 2 * n; ++j) {
      Point p(2);
      p << -1.0 + static_cast<double>(i) / n, -1.0 + static_cast<double>(j) / n;
      out.push_back(p);
    }
  return out;
}

/// Greedy farthest-point spreading from a random start; `len` points.
inline std::vector<Point> spread(const std::vector<Point>& grid, std::size_t len, std::mt19937_64& rng) {
  std::vector<Point> out;
  std::vector<double> dmin(grid.size(), std::numeric_limits<double>::infinity());
  std::size_t cur = rng() % grid.size();
  for (std::size_t t = 0; t < len; ++t) {
    out.push_back(grid[cur]);
    std::size_t best = 0;
    double bd = -1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      dmin[i] = std::min(dmin[i], (grid[i] - grid[cur]).norm());
      // random tie-breaking keeps the adversaries distinct
      double key = dmin[i] + 1e-9 * unit_real(rng);
      if (key > bd) {
        bd = key;
        best = i;
      }
    }
    cur = best;
  }
  return out;
}

/// Cover modulus of [-1,1]^2: ceil(sqrt2 (k+1))^2 - 1 squares of half-diagonal 1/(k+1).
inline NatModulus square_cover() {
  return NatModulus::unary(
      [](const Nat& k) {
        Nat s = ceil_sqrt_rat(Rational(2 * (k + 1) * (k + 1)));
        return Nat(s * s - 1);
      },
      true, "alpha_cover");
}

}  // namespace detail

/// cover -> sequence via gamma(k) = alpha(theta(k)) + 1 (pigeonhole against spreading
/// adversaries), and sequence -> cover via alpha(k) = gamma(theta(k)) - 1 (a maximal
/// separated set must be small and cover at radius 1/(k+1)).
inline AuditReport audit_convert_tb(std::size_t instances, std::mt19937_64& rng) {
  AuditReport rep;
  auto grid = detail::square_grid(6);
  auto theta = NatModulus::affine(2, 1);
  auto alpha = detail::square_cover();
  auto gamma = convert_tb_modulus(alpha, theta, TbDirection::cover_to_sequence);
  auto alpha_back = convert_tb_modulus(gamma, theta, TbDirection::sequence_to_cover);
  auto d = [](const Point& a, const Point& b) { return (a - b).norm(); };
  for (std::size_t t = 0; t < instances; ++t) {
    unsigned k = static_cast<unsigned>(t % 3);
    Nat gk = gamma(Nat(k));
    std::size_t len = static_cast<std::size_t>(to_u64(gk)) + 1;
    std::vector<Point> seq;
    if (t % 2 == 0) {
      seq = detail::spread(grid, len, rng);
    } else {
      for (std::size_t i = 0; i < len; ++i) seq.push_back(grid[rng() % grid.size()]);
    }
    ++rep.checked;
    if (!pigeonhole_holds(seq, gk, Nat(k), d))
      rep.failures.push_back("gamma pigeonhole fails, instance " + std::to_string(t) + " k=" + std::to_string(k));

    // sequence -> cover: greedy maximal 1/(theta(k)+1)-separated set in random order
    unsigned kc = static_cast<unsigned>(rng() % 2);
    double sep = 1.0 / (to_double(theta(Nat(kc))) + 1.0);
    std::vector<std::size_t> order(grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Point> centres;
    for (std::size_t i : order) {
      bool far = std::all_of(centres.begin(), centres.end(), [&](const Point& c) { return d(c, grid[i]) > sep; });
      if (far) centres.push_back(grid[i]);
    }
    Nat ak = alpha_back(Nat(kc));
    ++rep.checked;
    if (Nat(centres.size()) > ak + 1)
      rep.failures.push_back("cover too large, instance " + std::to_string(t) + ": " +
                             std::to_string(centres.size()) + " > " + Nat(ak + 1).str());
    double rad = 1.0 / (kc + 1.0);
    for (const auto& g : grid) {
      bool covered = std::any_of(centres.begin(), centres.end(), [&](const Point& c) { return d(c, g) <= rad; });
      if (!covered) {
        rep.failures.push_back("point not covered, instance " + std::to_string(t));
        break;
      }
    }
    ++rep.instances;
  }
  return rep;
}

/// gamma' = gamma o Lambda (pigeonhole in phi) and omega' = lambda o omega, delta' = delta
/// (closedness in phi) for the Bregman-type distance on the unit ball of l_p^2.
inline AuditReport audit_convert_closedness_tb(std::size_t instances, std::mt19937_64& rng) {
  AuditReport rep;
  for (std::size_t t = 0; t < instances; ++t) {
    unsigned p = 2 + static_cast<unsigned>(rng() % 3);
    LpSpace space = LpSpace::make(2, p, 1);
    Rational B = 1;
    auto nm = phi_consistency_moduli_nat(space, B);
    // metric moduli on the l_p ball of radius 1: gamma from the enclosing square, AF_k = ball of radius 1/(k+1)
    auto gamma = NatModulus::unary(
        [](const Nat& k) {
          Nat s = ceil_sqrt_rat(Rational(2 * (k + 1) * (k + 1)));
          return Nat(4 * s * s);
        },
        true, "gamma_sq");
    auto omega = NatModulus::affine(2, 1);
    auto delta = NatModulus::affine(2, 1);
    auto conv = convert_closedness_and_tb(gamma, omega, delta, nm.lambda, nm.Lambda);
    auto phi = [space](const Point& x, const Point& y) { return phi_eval(space, x, y); };
    std::string w = "instance " + std::to_string(t) + " p=" + std::to_string(p);

    // pigeonhole in phi at k = 0
    Nat gk = conv.gamma(Nat(0));
    std::size_t len = static_cast<std::size_t>(to_u64(gk)) + 1;
    std::vector<Point> seq;
    for (std::size_t i = 0; i < len; ++i) seq.push_back(random_in_ball(rng, 2, space.pd(), 1.0));
    ++rep.checked;
    if (!pigeonhole_holds(seq, gk, Nat(0), phi)) rep.failures.push_back(w + ": gamma' pigeonhole fails");

    // closedness in phi
    ApproximationFamily fam{[space](const Point& x) { return space.norm(x); }, {}};
    std::vector<std::pair<Point, Point>> pairs;
    unsigned k = static_cast<unsigned>(rng() % 3);
    double rq = 1.0 / (to_double(conv.delta(Nat(k))) + 1.0);
    double thr = 1.0 / (to_double(conv.omega(Nat(k))) + 1.0);
    for (int i = 0; i < 50; ++i) {
      Point q = random_in_ball(rng, 2, space.pd(), rq);
      Point dir = random_in_ball(rng, 2, space.pd(), 1.0);
      // scale the step so phi(q, p) lands around the threshold
      double lo = 0, hi = 1;
      for (int it = 0; it < 60; ++it) {
        double mid = (lo + hi) / 2;
        (phi(q, Point(q + mid * dir)) <= thr ? lo : hi) = mid;
      }
      pairs.push_back({q, Point(q + lo * dir)});
      pairs.push_back({q, Point(q + 0.5 * lo * dir)});
    }
    rep.absorb(w, check_uniform_closedness(fam, conv.omega, conv.delta, phi, pairs, k));
    ++rep.instances;
  }
  return rep;
}

}  // namespace fejer::conversions
