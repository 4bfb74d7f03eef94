#pragma once

// Experiment runner: JSON configs, the per-application check pipelines and
// CSV output.

#include "fejer/banach.hpp"
#include "fejer/conversions.hpp"
#include "fejer/hilbert.hpp"
#include "fejer/replay.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace fejer::harness {

using json = nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& msg) : std::invalid_argument(path + ": " + msg) {}
};

struct Tolerances {
  double fejer = 1e-12;
  double lemma_summed = 1e-9;
  double approx = 1e-10;
  double averaged = 1e-10;
  double resolvent = 1e-10;
  double phi_monotone = 1e-10;
  double kt = 1e-10;
  double crossval = 1e-12;
  double consistency = 1e-12;
};

struct HilbertConfig {
  std::string map = "rotation-average";
  double angle_deg = 90;
  Rational weight = rat(1, 2);
  unsigned dim = 2;
  Rational lambda = 1;
  std::vector<Rational> inertia{Rational(1)};
  std::vector<double> x0{1.0, 0.0};
  std::optional<Rational> b;
  unsigned phi_k_max = 30;
};

struct BanachConfig {
  unsigned p = 4;
  unsigned dim = 2;
  std::string op = "scaled-duality";
  Rational c = 1;
  std::vector<double> shift;
  std::vector<Rational> alpha{rat(1, 4)};
  std::vector<Rational> r{Rational(1)};
  Rational alpha_bar = rat(1, 2);
  Rational r_bar = 1;
  std::vector<double> x0{1.0, 0.5};
  std::vector<Rational> liminf_eps{rat(1, 10), rat(1, 100)};
  Rational quant_kt_eps = rat(1, 1000);
  std::size_t samples = 1000;
};

struct SyntheticConfig {
  std::vector<unsigned> p_list{2, 3, 4};
  std::vector<unsigned> dims{2, 5};
  std::size_t points = 1000;
  std::size_t pairs = 10000;
  std::vector<Rational> eps_list{rat(1, 10), rat(1, 100), rat(1, 1000)};
  std::size_t instances = 100;
  std::size_t oracle_instances = 50;
};

struct Config {
  std::string name = "experiment";
  std::string app;
  std::uint64_t seed = 0;
  std::size_t n_max = 500;
  std::vector<std::string> checks;
  std::vector<std::uint64_t> k_list{0};
  std::vector<std::string> g_list{"const:0"};
  std::vector<Rational> delta_list{rat(1, 10)};
  std::size_t window = 1000;
  std::size_t max_run = 5'000'000;
  Budget budget;
  Tolerances tol;
  HilbertConfig hilbert;
  BanachConfig banach;
  SyntheticConfig synthetic;
};

inline const std::vector<std::string>& checks_for(const std::string& app) {
  static const std::vector<std::string> h{"averaged", "fejer",       "lemmas",        "phi_bound",
                                          "uniform_modulus", "closedness", "metastability", "rate"};
  static const std::vector<std::string> b{"resolvent", "fejer",     "kt",        "quant_kt",      "liminf",
                                          "mu_bound",  "phi_bound", "p2_crossval", "metastability", "rate"};
  static const std::vector<std::string> s{"duality", "consistency", "alber",      "catalog",
                                          "rate_oracle", "conversions", "adversarial"};
  static const std::vector<std::string> none;
  if (app == "hilbert") return h;
  if (app == "banach") return b;
  if (app == "synthetic") return s;
  return none;
}

// ---------------------------------------------------------------------------
// Counter functions g.

struct GDescriptor {
  std::string text;
  Nat a = 0, b = 0;  ///< g(n) = a n + b
};

inline GDescriptor parse_g(const std::string& text) {
  GDescriptor d;
  d.text = text;
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("g descriptor must be const:c or linear:a,b");
  std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
  auto whole = [&](const std::string& s) {
    Rational v = parse_rational(s);
    if (v < 0 || denominator(v) != 1) throw std::invalid_argument("g coefficients must be naturals: " + text);
    return numerator(v);
  };
  if (kind == "const") {
    d.b = whole(rest);
  } else if (kind == "linear") {
    auto comma = rest.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("linear g needs a,b: " + text);
    d.a = whole(rest.substr(0, comma));
    d.b = whole(rest.substr(comma + 1));
  } else {
    throw std::invalid_argument("unknown g family '" + kind + "'");
  }
  return d;
}

inline CounterFunction make_g(const GDescriptor& d) {
  Nat a = d.a, b = d.b;
  return [a, b](const Nat& n) { return Nat(a * n + b); };
}

// ---------------------------------------------------------------------------
// Config reading.

namespace detail {

class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }
  template <class F>
  void opt(const std::string& key, F&& read) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) read(*it, path_ + "." + key);
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path_ + "." + it.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::uint64_t read_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw ConfigError(path, "expected a natural number");
  return j.get<std::uint64_t>();
}
inline double read_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}
inline std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}
inline Rational read_rational(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number()) return parse_rational(j.dump());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected a rational (number or \"p/q\" string)");
}
template <class T, class F>
std::vector<T> read_list(const json& j, const std::string& path, F&& one) {
  if (!j.is_array()) throw ConfigError(path, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(one(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}
inline std::vector<Rational> read_rationals(const json& j, const std::string& path) {
  return read_list<Rational>(j, path, read_rational);
}
inline std::vector<double> read_doubles(const json& j, const std::string& path) {
  return read_list<double>(j, path, read_double);
}

}  // namespace detail

inline void validate(const Config& c) {
  const auto& known = checks_for(c.app);
  if (known.empty()) throw ConfigError("config.app", "unknown app '" + c.app + "' (hilbert, banach, synthetic)");
  if (c.checks.empty()) throw ConfigError("config.checks", "no checks requested");
  for (std::size_t i = 0; i < c.checks.size(); ++i)
    if (std::find(known.begin(), known.end(), c.checks[i]) == known.end())
      throw ConfigError("config.checks[" + std::to_string(i) + "]",
                        "unknown check '" + c.checks[i] + "' for app " + c.app);
  if (c.n_max < 1 || c.n_max > 10'000'000) throw ConfigError("config.n_max", "must lie in [1, 10^7]");
  if (c.max_run < c.n_max) throw ConfigError("config.max_run", "must be at least n_max");
  for (std::size_t i = 0; i < c.k_list.size(); ++i)
    if (c.k_list[i] > 1000) throw ConfigError("config.k_list[" + std::to_string(i) + "]", "k above 1000");
  for (std::size_t i = 0; i < c.g_list.size(); ++i) try {
      parse_g(c.g_list[i]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config.g[" + std::to_string(i) + "]", e.what());
    }
  for (std::size_t i = 0; i < c.delta_list.size(); ++i)
    if (c.delta_list[i] <= 0) throw ConfigError("config.delta_list[" + std::to_string(i) + "]", "delta must be positive");

  if (c.app == "hilbert") {
    const auto& h = c.hilbert;
    Rational alpha;
    if (h.map == "rotation-average") {
      if (h.dim != 2) throw ConfigError("config.hilbert.dim", "rotation-average acts on R^2");
      if (h.weight <= 0 || h.weight >= 1) throw ConfigError("config.hilbert.weight", "must lie in (0,1)");
      alpha = h.weight;
    } else if (h.map == "projection-average") {
      if (h.weight <= 0 || h.weight > 1) throw ConfigError("config.hilbert.weight", "must lie in (0,1]");
      alpha = h.weight / 2;
    } else if (h.map == "resolvent") {
      if (h.lambda <= 0) throw ConfigError("config.hilbert.lambda", "must be positive");
      alpha = rat(1, 2);
    } else {
      throw ConfigError("config.hilbert.map", "unknown map '" + h.map + "'");
    }
    if (h.dim == 0) throw ConfigError("config.hilbert.dim", "must be positive");
    if (h.x0.size() != h.dim) throw ConfigError("config.hilbert.x0", "length must equal dim");
    if (h.inertia.empty()) throw ConfigError("config.hilbert.inertia", "empty schedule");
    Rational cap = (1 - alpha) / alpha;
    for (std::size_t i = 0; i < h.inertia.size(); ++i)
      if (h.inertia[i] < 0 || h.inertia[i] > cap)
        throw ConfigError("config.hilbert.inertia[" + std::to_string(i) + "]",
                          "inertia out of range: " + h.inertia[i].str() + " not in [0, (1-alpha)/alpha] = [0, " +
                              cap.str() + "]");
    if (h.b && *h.b <= 0) throw ConfigError("config.hilbert.b", "must be positive");
  } else if (c.app == "banach") {
    const auto& b = c.banach;
    if (b.p < 2 || b.p > 16) throw ConfigError("config.banach.p", "integer exponent in [2,16] expected");
    if (b.dim == 0) throw ConfigError("config.banach.dim", "must be positive");
    if (b.x0.size() != b.dim) throw ConfigError("config.banach.x0", "length must equal dim");
    if (b.op == "scaled-duality") {
      if (b.c < 0) throw ConfigError("config.banach.c", "must be nonnegative");
    } else if (b.op == "coordinatewise-cubic") {
      if (b.shift.size() != b.dim) throw ConfigError("config.banach.shift", "length must equal dim");
    } else {
      throw ConfigError("config.banach.op", "unknown operator '" + b.op + "'");
    }
    if (b.alpha_bar < 0 || b.alpha_bar >= 1) throw ConfigError("config.banach.alpha_bar", "must lie in [0,1)");
    if (b.r_bar <= 0) throw ConfigError("config.banach.r_bar", "must be positive");
    if (b.alpha.empty()) throw ConfigError("config.banach.alpha", "empty schedule");
    if (b.r.empty()) throw ConfigError("config.banach.r", "empty schedule");
    for (std::size_t i = 0; i < b.alpha.size(); ++i)
      if (b.alpha[i] < 0 || b.alpha[i] >= b.alpha_bar)
        throw ConfigError("config.banach.alpha[" + std::to_string(i) + "]", "must lie in [0, alpha_bar)");
    for (std::size_t i = 0; i < b.r.size(); ++i)
      if (b.r[i] < b.r_bar) throw ConfigError("config.banach.r[" + std::to_string(i) + "]", "below r_bar");
    for (std::size_t i = 0; i < b.liminf_eps.size(); ++i)
      if (b.liminf_eps[i] <= 0) throw ConfigError("config.banach.liminf_eps[" + std::to_string(i) + "]", "must be positive");
    if (b.quant_kt_eps <= 0) throw ConfigError("config.banach.quant_kt_eps", "must be positive");
  } else {
    const auto& s = c.synthetic;
    for (std::size_t i = 0; i < s.p_list.size(); ++i)
      if (s.p_list[i] < 2 || s.p_list[i] > 16)
        throw ConfigError("config.synthetic.p_list[" + std::to_string(i) + "]", "integer exponent in [2,16] expected");
    for (std::size_t i = 0; i < s.dims.size(); ++i)
      if (s.dims[i] == 0) throw ConfigError("config.synthetic.dims[" + std::to_string(i) + "]", "must be positive");
  }
}

inline Config parse_config(const json& j) {
  using namespace detail;
  Config c;
  Fields top(j, "config");
  top.opt("name", [&](const json& v, const std::string& p) { c.name = read_string(v, p); });
  top.opt("app", [&](const json& v, const std::string& p) { c.app = read_string(v, p); });
  top.opt("seed", [&](const json& v, const std::string& p) { c.seed = read_u64(v, p); });
  top.opt("n_max", [&](const json& v, const std::string& p) { c.n_max = read_u64(v, p); });
  top.opt("checks", [&](const json& v, const std::string& p) { c.checks = read_list<std::string>(v, p, read_string); });
  top.opt("k_list", [&](const json& v, const std::string& p) { c.k_list = read_list<std::uint64_t>(v, p, read_u64); });
  top.opt("g", [&](const json& v, const std::string& p) {
    c.g_list = v.is_string() ? std::vector<std::string>{v.get<std::string>()} : read_list<std::string>(v, p, read_string);
  });
  top.opt("delta_list", [&](const json& v, const std::string& p) { c.delta_list = read_rationals(v, p); });
  top.opt("window", [&](const json& v, const std::string& p) { c.window = read_u64(v, p); });
  top.opt("max_run", [&](const json& v, const std::string& p) { c.max_run = read_u64(v, p); });
  top.opt("budget", [&](const json& v, const std::string& p) {
    Fields f(v, p);
    f.opt("steps", [&](const json& x, const std::string& q) { c.budget.steps = read_u64(x, q); });
    f.opt("max_bits", [&](const json& x, const std::string& q) { c.budget.max_bits = read_u64(x, q); });
    f.finish();
  });
  top.opt("tolerances", [&](const json& v, const std::string& p) {
    Fields f(v, p);
    auto& t = c.tol;
    for (auto [key, ptr] : std::initializer_list<std::pair<const char*, double*>>{
             {"fejer", &t.fejer},         {"lemma_summed", &t.lemma_summed}, {"approx", &t.approx},
             {"averaged", &t.averaged},   {"resolvent", &t.resolvent},       {"phi_monotone", &t.phi_monotone},
             {"kt", &t.kt},               {"crossval", &t.crossval},         {"consistency", &t.consistency}})
      f.opt(key, [ptr = ptr](const json& x, const std::string& q) { *ptr = read_double(x, q); });
    f.finish();
  });
  top.opt("hilbert", [&](const json& v, const std::string& p) {
    Fields f(v, p);
    auto& h = c.hilbert;
    f.opt("map", [&](const json& x, const std::string& q) { h.map = read_string(x, q); });
    f.opt("angle_deg", [&](const json& x, const std::string& q) { h.angle_deg = read_double(x, q); });
    f.opt("weight", [&](const json& x, const std::string& q) { h.weight = read_rational(x, q); });
    f.opt("dim", [&](const json& x, const std::string& q) { h.dim = static_cast<unsigned>(read_u64(x, q)); });
    f.opt("lambda", [&](const json& x, const std::string& q) { h.lambda = read_rational(x, q); });
    f.opt("inertia", [&](const json& x, const std::string& q) { h.inertia = read_rationals(x, q); });
    f.opt("x0", [&](const json& x, const std::string& q) { h.x0 = read_doubles(x, q); });
    f.opt("b", [&](const json& x, const std::string& q) { h.b = read_rational(x, q); });
    f.opt("phi_k_max", [&](const json& x, const std::string& q) { h.phi_k_max = static_cast<unsigned>(read_u64(x, q)); });
    f.finish();
  });
  top.opt("banach", [&](const json& v, const std::string& p) {
    Fields f(v, p);
    auto& b = c.banach;
    f.opt("p", [&](const json& x, const std::string& q) { b.p = static_cast<unsigned>(read_u64(x, q)); });
    f.opt("dim", [&](const json& x, const std::string& q) { b.dim = static_cast<unsigned>(read_u64(x, q)); });
    f.opt("op", [&](const json& x, const std::string& q) { b.op = read_string(x, q); });
    f.opt("c", [&](const json& x, const std::string& q) { b.c = read_rational(x, q); });
    f.opt("shift", [&](const json& x, const std::string& q) { b.shift = read_doubles(x, q); });
    f.opt("alpha", [&](const json& x, const std::string& q) { b.alpha = read_rationals(x, q); });
    f.opt("r", [&](const json& x, const std::string& q) { b.r = read_rationals(x, q); });
    f.opt("alpha_bar", [&](const json& x, const std::string& q) { b.alpha_bar = read_rational(x, q); });
    f.opt("r_bar", [&](const json& x, const std::string& q) { b.r_bar = read_rational(x, q); });
    f.opt("x0", [&](const json& x, const std::string& q) { b.x0 = read_doubles(x, q); });
    f.opt("liminf_eps", [&](const json& x, const std::string& q) { b.liminf_eps = read_rationals(x, q); });
    f.opt("quant_kt_eps", [&](const json& x, const std::string& q) { b.quant_kt_eps = read_rational(x, q); });
    f.opt("samples", [&](const json& x, const std::string& q) { b.samples = read_u64(x, q); });
    f.finish();
  });
  top.opt("synthetic", [&](const json& v, const std::string& p) {
    Fields f(v, p);
    auto& s = c.synthetic;
    auto u32 = [](const json& x, const std::string& q) { return static_cast<unsigned>(read_u64(x, q)); };
    f.opt("p_list", [&](const json& x, const std::string& q) { s.p_list = read_list<unsigned>(x, q, u32); });
    f.opt("dims", [&](const json& x, const std::string& q) { s.dims = read_list<unsigned>(x, q, u32); });
    f.opt("points", [&](const json& x, const std::string& q) { s.points = read_u64(x, q); });
    f.opt("pairs", [&](const json& x, const std::string& q) { s.pairs = read_u64(x, q); });
    f.opt("eps_list", [&](const json& x, const std::string& q) { s.eps_list = read_rationals(x, q); });
    f.opt("instances", [&](const json& x, const std::string& q) { s.instances = read_u64(x, q); });
    f.opt("oracle_instances", [&](const json& x, const std::string& q) { s.oracle_instances = read_u64(x, q); });
    f.finish();
  });
  top.finish();
  if (c.app.empty()) throw ConfigError("config.app", "missing");
  validate(c);
  return c;
}

inline Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string(), std::string("invalid JSON: ") + e.what());
  }
  Config c = parse_config(j);
  if (!j.contains("name")) c.name = file.stem().string();
  return c;
}

// ---------------------------------------------------------------------------
// Results.

struct ResultRow {
  std::string check, status, witness, bound, slack;
};

struct Outcome {
  IterationRun run;  ///< trajectory for the CSV (up to n_max)
  std::vector<double> dist_to_sol, phi_to_sol;
  std::vector<ResultRow> rows;

  bool any_fail() const {
    return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.status == "fail"; });
  }
};

/// Shortest round-trip decimal.
inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(const Nat& n) { return format_nat(n); }

namespace detail {

inline ResultRow from_report(const std::string& check, const ModulusReport& rep, const std::string& bound = {}) {
  if (!rep.ok()) {
    const auto& v = rep.violations.front();
    return {check, "fail", v.where + " lhs=" + fmt(v.lhs) + " rhs=" + fmt(v.rhs), bound, fmt(v.rhs - v.lhs)};
  }
  if (rep.checked == 0) return {check, "vacuous", "no premise held", bound, ""};
  return {check, "pass", std::to_string(rep.checked) + " checked", bound, ""};
}

inline ResultRow from_fejer(const std::string& check, const FejerReport& rep) {
  if (!rep.ok()) {
    const auto& v = rep.violations.front();
    return {check, "fail",
            "solution " + std::to_string(v.solution) + " n=" + std::to_string(v.n) + " m=" + std::to_string(v.m) +
                " r=" + std::to_string(v.r) + " lhs=" + fmt(v.lhs) + " rhs=" + fmt(v.rhs),
            "", fmt(v.rhs - v.lhs)};
  }
  if (rep.checked == 0) return {check, "vacuous", "no sample in the required family", "", ""};
  return {check, "pass", std::to_string(rep.checked) + " checked", "", fmt(rep.min_slack)};
}

inline std::uint64_t tag_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
  return h;
}

/// Per-check generator, so a check draws the same samples whether run alone or in a batch.
inline std::mt19937_64 rng_for(const Config& c, const std::string& check) {
  return std::mt19937_64(replay::mix(c.seed ^ tag_hash(check)));
}

inline Point to_point(const std::vector<double>& v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
  return p;
}

inline std::string mk(const std::string& check, const std::string& label) { return check + "[" + label + "]"; }

/// Metastability row from Psi and the brute-force N.
inline ResultRow metastability_row(const std::string& id, const RateResult& psi, std::size_t N) {
  std::string bound = (psi.exact ? "" : ">=") + fmt(psi.value);
  std::string wit = "N=" + std::to_string(N);
  if (psi.exact) {
    bool ok = Nat(N) <= psi.value;
    return {id, ok ? "pass" : "fail", wit, bound, ok ? fmt(psi.value - N) : "-" + fmt(Nat(N) - psi.value)};
  }
  if (!psi.certified_lower) return {id, "resource", wit + "; " + psi.note, bound, ""};
  if (Nat(N) <= psi.value) return {id, "pass", wit + "; bound >= budget value > N (" + psi.note + ")", bound, ""};
  return {id, "resource", wit + "; budget value below N (" + psi.note + ")", bound, ""};
}

/// max_{n in [from, to]} |x_n - x_to| over a window of points x_from..x_to.
struct WindowResult {
  double worst = 0;
  std::size_t arg = 0;
};
inline WindowResult window_max(const std::vector<Point>& pts, std::size_t from,
                               const std::function<double(const Point&, const Point&)>& dist) {
  WindowResult w;
  w.arg = from;
  const Point& end = pts.back();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = dist(pts[i], end);
    if (d > w.worst) {
      w.worst = d;
      w.arg = from + i;
    }
  }
  return w;
}

inline ResultRow window_row(const std::string& id, const Nat& mu, const WindowResult& w, std::size_t end,
                            double delta) {
  std::string wit = "pair (" + std::to_string(w.arg) + "," + std::to_string(end) + ") dist=" + fmt(w.worst);
  return {id, w.worst < delta ? "pass" : "fail", wit, fmt(mu), fmt(delta - w.worst)};
}

}  // namespace detail

/// Window check on an explicit sequence: the adversarial-run entry point.
inline ResultRow rate_window_check(const std::string& id, const std::vector<Point>& seq, const Nat& mu,
                                   std::size_t window, double delta) {
  if (mu + window >= Nat(seq.size()))
    return {id, "resource", "run too short: need " + fmt(Nat(mu + window + 1)) + " points", fmt(mu), ""};
  std::size_t m = static_cast<std::size_t>(mu);
  std::vector<Point> win(seq.begin() + static_cast<std::ptrdiff_t>(m),
                         seq.begin() + static_cast<std::ptrdiff_t>(m + window + 1));
  auto w = detail::window_max(win, m, [](const Point& a, const Point& b) { return (a - b).norm(); });
  return detail::window_row(id, mu, w, m + window, delta);
}

// ---------------------------------------------------------------------------
// Hilbert pipeline.

namespace detail {

inline hilbert::AveragedMap make_map(const HilbertConfig& h) {
  if (h.map == "rotation-average") return hilbert::rotation_average(h.angle_deg * std::numbers::pi / 180.0, h.weight);
  if (h.map == "projection-average") return hilbert::projection_average(h.dim, h.weight);
  return hilbert::resolvent_identity(h.dim, h.lambda);
}

/// Exact fixed points to test against: xhat, plus interior points when Fix T is a ball.
inline std::vector<Point> hilbert_solutions(const hilbert::AveragedMap& T, unsigned dim, std::mt19937_64& rng) {
  std::vector<Point> sols{T.xhat};
  if (T.kind == "projection-average")
    for (int i = 0; i < 4; ++i) sols.push_back(random_in_ball(rng, dim, 2.0, 1.0));
  return sols;
}

/// x_from..x_to of the alternating iteration without storing the prefix.
inline std::vector<Point> hilbert_window(const hilbert::AveragedMap& T, const hilbert::InertiaSchedule& sched,
                                         const Point& x0, std::size_t from, std::size_t to) {
  std::vector<Point> out;
  out.reserve(to - from + 1);
  Point prev = x0, cur = x0;
  for (std::size_t k = 0;; ++k) {
    if (k >= from) out.push_back(cur);
    if (k == to) break;
    Point bar = cur;
    if (k % 2 == 1) bar = cur + to_double(sched.alpha_k(k)) * (cur - prev);
    prev = cur;
    cur = T(bar);
  }
  return out;
}

}  // namespace detail

inline Outcome run_hilbert(const Config& cfg) {
  using namespace detail;
  const auto& h = cfg.hilbert;
  auto T = make_map(h);
  auto sched = hilbert::InertiaSchedule::periodic(h.inertia);
  Point x0 = to_point(h.x0);
  auto base = hilbert::iterate_alternating(T, sched, x0, cfg.n_max);
  Rational M = base.M;
  double tol = cfg.tol.fejer;

  Outcome out;
  out.run = base.as_run();
  for (const auto& x : base.points) {
    double d = (x - T.xhat).norm();
    out.dist_to_sol.push_back(d);
    out.phi_to_sol.push_back(d);
  }

  // a longer run for scans that need more than n_max steps
  hilbert::HilbertRun long_run = base;
  auto ensure = [&](std::size_t points) -> bool {
    if (points <= long_run.points.size()) return true;
    if (points > cfg.max_run + 1) return false;
    long_run = hilbert::iterate_alternating(T, sched, x0, points - 1);
    return true;
  };

  auto euclid = [](const Point& a, const Point& b) { return (a - b).norm(); };
  Rational b0 = h.b ? *h.b : Rational(std::max(Nat(1), ceil_rat(rat_from_double((x0 - T.xhat).norm()))));

  for (const auto& check : cfg.checks) {
    auto rng = rng_for(cfg, check);
    if (check == "averaged") {
      out.rows.push_back(from_report(check, hilbert::averagedness_check(T, h.dim, 1000, 2.0, rng, cfg.tol.averaged)));
    } else if (check == "fejer") {
      auto inst = FejerInstance::from_run(base.as_run(), metric_distance());
      auto sols = hilbert_solutions(T, h.dim, rng);
      out.rows.push_back(from_fejer(mk(check, "even"), check_quasi_fejer(inst, sols, cfg.n_max, tol)));
      inst.f = StepFunction::lag(1);
      out.rows.push_back(from_fejer(mk(check, "odd"), check_f_monotone(inst, sols, cfg.n_max, tol)));
    } else if (check == "lemmas") {
      auto approx = hilbert::sample_approx_fixed_points(T, h.dim, {1e-2, 1e-3}, 5, rng);
      auto ls = hilbert::lemma_suite(T, base, approx, tol, cfg.tol.approx);
      out.rows.push_back({mk(check, "summed"), ls.summed_ok(cfg.tol.lemma_summed) ? "pass" : "fail",
                          "lhs=" + fmt(ls.summed_lhs) + " rhs=" + fmt(ls.summed_rhs), fmt(ls.summed_rhs),
                          fmt(ls.summed_rhs - ls.summed_lhs)});
      out.rows.push_back(from_report(mk(check, "odd-step"), ls.odd_step));
      out.rows.push_back(from_report(mk(check, "fejer-exact"), ls.fejer_exact));
      out.rows.push_back(from_report(mk(check, "fejer-approx"), ls.fejer_approx));
    } else if (check == "phi_bound") {
      Nat top = hilbert::phi_bound_hilbert(T.alpha, b0, Nat(h.phi_k_max));
      if (!ensure(static_cast<std::size_t>(to_u64(2 * top + 2)))) {
        out.rows.push_back({check, "resource", "run too short: need " + fmt(Nat(2 * top + 2)) + " points", fmt(top), ""});
        continue;
      }
      ResultRow row{check, "pass", "", fmt(top), ""};
      double min_slack = std::numeric_limits<double>::infinity();
      for (unsigned k = 0; k <= h.phi_k_max; ++k) {
        auto w = hilbert::approx_fpoint_scan(long_run, T.alpha, b0, Nat(k));
        if (!w.found) {
          row = {check, "fail", "k=" + std::to_string(k) + " no even index within bound", fmt(w.bound), ""};
          break;
        }
        min_slack = std::min(min_slack, to_double(w.bound) - double(w.n));
        row.witness = "k<=" + std::to_string(h.phi_k_max) + " last n=" + std::to_string(w.n);
      }
      if (row.status == "pass") row.slack = fmt(min_slack);
      out.rows.push_back(row);
    } else if (check == "uniform_modulus") {
      auto inst = FejerInstance::from_run(base.as_run(), metric_distance());
      inst.G = inst.H = [](double a) { return a * a; };
      inst.family = hilbert::af_family(T);
      inst.chi = hilbert::chi_modulus(T.alpha, M);
      inst.zeta = hilbert::zeta_modulus(T.alpha, M);
      inst.zeta_shift = 3;
      std::vector<Point> samples = hilbert_solutions(T, h.dim, rng);
      for (const auto& ap : hilbert::sample_approx_fixed_points(T, h.dim, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}, 4, rng))
        samples.push_back(ap.x);
      std::vector<GridPoint> grid;
      for (std::uint64_t n = 0; n <= 3; ++n)
        for (std::uint64_t m = 0; m <= 2; ++m)
          for (std::uint64_t r = 0; r <= 2; ++r) grid.push_back({n, m, r});
      out.rows.push_back(from_fejer(mk(check, "chi"), check_uniform_modulus(inst, "chi", grid, samples, tol)));
      out.rows.push_back(from_fejer(mk(check, "zeta"), check_uniform_modulus(inst, "zeta", grid, samples, tol)));
    } else if (check == "closedness") {
      std::vector<std::pair<Point, Point>> pairs;
      for (unsigned k = 0; k <= 10; ++k) {
        double e = 1.0 / (2.0 * k + 2.0), rad = 1.0 / (4.0 * k + 4.0);
        for (const auto& ap : hilbert::sample_approx_fixed_points(T, h.dim, {e, 0.5 * e}, 3, rng))
          for (int i = 0; i < 3; ++i) {
            Point dir = random_in_ball(rng, h.dim, 2.0, 1.0);
            if (dir.norm() > 0) dir.normalize();
            pairs.emplace_back(ap.x, ap.x + rad * (i == 0 ? 1.0 : unit_real(rng)) * dir);
          }
      }
      auto rep = check_uniform_closedness(hilbert::af_family(T), NatModulus::affine(4, 3), NatModulus::affine(2, 1),
                                          euclid, pairs, 10);
      out.rows.push_back(from_report(check, rep));
    } else if (check == "metastability") {
      hilbert::MetastabilityParams prm{T.alpha, h.dim, M};
      auto fam = hilbert::af_family(T);
      for (auto k : cfg.k_list)
        for (const auto& gd : cfg.g_list) {
          std::string id = check + "[k=" + std::to_string(k) + ",g=" + gd + "]";
          auto g = make_g(parse_g(gd));
          RateResult psi = hilbert::metastability_hilbert(prm, Nat(k), g, true, cfg.budget);
          for (;;) {
            try {
              auto w = brute_force_metastability(long_run.as_run(), euclid, fam, Nat(k), g, true);
              out.rows.push_back(metastability_row(id, psi, w.N));
              break;
            } catch (const RunTooShort& e) {
              if (!ensure(std::max(e.required(), 2 * long_run.points.size()))) {
                out.rows.push_back({id, "resource", std::string(e.what()) + "; need " +
                                                        std::to_string(e.required()) + " points",
                                    fmt(psi.value), ""});
                break;
              }
            }
          }
        }
    } else if (check == "rate") {
      if (T.rho_scale <= 0) {
        out.rows.push_back({check, "vacuous", "no modulus of regularity for this map", "", ""});
        continue;
      }
      double r1 = (base.points[0] - T.xhat).norm();
      if (base.points.size() > 1) r1 = std::max(r1, (base.points[1] - T.xhat).norm());
      Rational b = h.b ? *h.b : Rational(std::max(Nat(1), ceil_rat(rat_from_double(r1))));
      for (const auto& delta : cfg.delta_list) {
        std::string id = check + "[delta=" + fmt(to_double(delta)) + "]";
        Nat mu = hilbert::convergence_rate_hilbert(RealModulus::scale(T.rho_scale), T.alpha, b, delta);
        if (mu + cfg.window > Nat(cfg.max_run)) {
          out.rows.push_back({id, "resource", "run too short: need " + fmt(Nat(mu + cfg.window + 1)) + " points",
                              fmt(mu), ""});
          continue;
        }
        std::size_t m = static_cast<std::size_t>(mu);
        auto win = hilbert_window(T, sched, x0, m, m + cfg.window);
        out.rows.push_back(window_row(id, mu, window_max(win, m, euclid), m + cfg.window, to_double(delta)));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Banach pipeline.

namespace detail {

inline banach::MonotoneOperator make_operator(const BanachConfig& b) {
  if (b.op == "scaled-duality") return banach::scaled_duality(b.dim, b.c);
  Point s = to_point(b.shift);
  LpSpace sp = LpSpace::make(b.dim, b.p);
  Rational C = ceil_rat(rat_from_double(sp.norm(s)));
  return banach::coordinatewise_cubic(s, C);
}

/// |x_mu| for T = cJ from the closed form x_n = prod_{i<n} q_i x_0, q_i = a_i + (1-a_i)/(1+r_i c);
/// an upper bound for |x_n - x_m| with n, m >= mu.
inline double closed_form_tail(const banach::MannSchedule& s, const Rational& c, double norm_x0, const Nat& mu) {
  std::size_t L = std::lcm(s.alpha.size(), s.r.size());
  double per = 0, part = 0;
  std::size_t rem = static_cast<std::size_t>(mu % L);
  for (std::size_t i = 0; i < L; ++i) {
    double a = to_double(s.alpha_n(i)), r = to_double(s.r_n(i));
    double lq = std::log(a + (1 - a) / (1 + r * to_double(c)));
    per += lq;
    if (i < rem) part += lq;
  }
  double periods = to_double(Nat(mu / L)) * (1 - 1e-12);
  double lg = std::log(norm_x0) + periods * per + part;
  return std::exp(lg);
}

}  // namespace detail

inline Outcome run_banach(const Config& cfg) {
  using namespace detail;
  const auto& bc = cfg.banach;
  LpSpace space = LpSpace::make(bc.dim, bc.p);
  auto op = make_operator(bc);
  banach::MannSchedule sched{bc.alpha, bc.r, bc.alpha_bar, bc.r_bar};
  Point x0 = to_point(bc.x0);
  Point z = op.zero;
  auto run = banach::run_mann(space, op, sched, x0, cfg.n_max);
  space.M = run.M;

  Outcome out;
  out.run = run.as_run(z);
  for (const auto& x : run.points) {
    out.dist_to_sol.push_back(space.dist(x, z));
    out.phi_to_sol.push_back(phi_eval(space, z, x));
  }
  Rational b = std::max(Nat(1), ceil_rat(rat_from_double(phi_eval(space, z, x0))));
  banach::Constants cst{space, op, sched, run.M, b, banach::OmegaJ::for_space(space)};
  auto dist = [space](const Point& a, const Point& c) { return space.dist(a, c); };

  for (const auto& check : cfg.checks) {
    auto rng = rng_for(cfg, check);
    if (check == "resolvent") {
      double worst = 0;
      std::size_t at = 0;
      for (std::size_t n = 0; n < run.resolvent_residuals.size(); ++n)
        if (run.resolvent_residuals[n] > worst) worst = run.resolvent_residuals[n], at = n;
      out.rows.push_back({mk(check, "run"), worst <= cfg.tol.resolvent ? "pass" : "fail",
                          "n=" + std::to_string(at) + " residual=" + fmt(worst), fmt(cfg.tol.resolvent),
                          fmt(cfg.tol.resolvent - worst)});
      banach::ResolventOptions newton;
      newton.closed_form = false;
      std::vector<banach::MonotoneOperator> ops{op};
      if (op.kind == banach::OperatorKind::scaled_duality)
        ops.push_back(banach::coordinatewise_cubic(Point::Zero(bc.dim), 0));
      else
        ops.push_back(banach::scaled_duality(bc.dim, 1));
      for (const auto& T : ops) {
        ModulusReport rep;
        for (std::size_t i = 0; i < bc.samples; ++i) {
          Point x = random_in_ball(rng, bc.dim, space.pd(), 2.0);
          Rational r = bc.r_bar + rat_from_double(2.0 * (unit_real(rng) + 1.0) / 2.0);
          Point y = banach::resolvent(space, T, r, x, newton);
          double res = banach::resolvent_residual(space, T, to_double(r), x, y);
          ++rep.checked;
          if (res > cfg.tol.resolvent) rep.violations.push_back({"sample " + std::to_string(i), res, cfg.tol.resolvent});
          if (T.kind == banach::OperatorKind::scaled_duality) {
            double gap = space.norm(y - banach::resolvent(space, T, r, x));
            if (gap > 1e-9) rep.violations.push_back({"closed form gap, sample " + std::to_string(i), gap, 1e-9});
          }
        }
        std::string label = T.kind == banach::OperatorKind::scaled_duality ? "scaled-duality" : "coordinatewise-cubic";
        out.rows.push_back(from_report(mk(check, label), rep));
      }
    } else if (check == "fejer") {
      out.rows.push_back(from_report(mk(check, "phi-monotone"), banach::phi_monotone_check(run, z, cfg.tol.phi_monotone)));
      GeneralizedDistance phi = bregman_distance(space);
      auto inst = FejerInstance::from_run(run.as_run(z), phi);
      out.rows.push_back(from_fejer(mk(check, "even"), check_quasi_fejer(inst, {z}, cfg.n_max, cfg.tol.phi_monotone)));
      out.rows.push_back(from_fejer(mk(check, "odd"), check_f_monotone(inst, {z}, cfg.n_max, cfg.tol.phi_monotone)));
    } else if (check == "kt") {
      std::vector<Point> ys;
      for (std::size_t i = 0; i < bc.samples; ++i) ys.push_back(random_in_ball(rng, bc.dim, space.pd(), 2.0));
      auto rep = banach::kt_inequality_check(space, op, z, ys, sched.r_n(0), cfg.tol.kt);
      auto row = from_report(check, rep.rep);
      if (row.status == "pass") row.slack = fmt(rep.min_gap);
      out.rows.push_back(row);
    } else if (check == "quant_kt") {
      ModulusReport rep;
      for (std::size_t n = 0; n < run.points.size(); ++n) {
        Point y = random_in_ball(rng, bc.dim, space.pd(), 2.0);
        auto q = banach::quant_kt_inequality(space, op, run.points[n], y, sched.r_n(0), sched.r_n(n),
                                             bc.quant_kt_eps, cst.omega, cfg.tol.kt);
        if (!q.premise) continue;
        ++rep.checked;
        if (!q.ok()) rep.violations.push_back({"n=" + std::to_string(n), q.lhs, q.rhs});
      }
      // points close to zer T, where the premise holds
      for (std::size_t i = 0; i < bc.samples; ++i) {
        Point x = z + random_in_ball(rng, bc.dim, space.pd(), 1e-7);
        Point y = random_in_ball(rng, bc.dim, space.pd(), 2.0);
        Rational s = bc.r_bar + rat_from_double(unit_real(rng) + 1.0);
        auto q = banach::quant_kt_inequality(space, op, x, y, sched.r_n(0), s, bc.quant_kt_eps, cst.omega, cfg.tol.kt);
        if (!q.premise) continue;
        ++rep.checked;
        if (!q.ok()) rep.violations.push_back({"sample " + std::to_string(i), q.lhs, q.rhs});
      }
      out.rows.push_back(from_report(check, rep));
    } else if (check == "liminf") {
      for (const auto& eps : bc.liminf_eps) {
        std::string id = check + "[eps=" + fmt(to_double(eps)) + "]";
        try {
          auto w = banach::liminf_scan(run, b, sched.alpha_bar, eps);
          if (w.found)
            out.rows.push_back({id, "pass", "n=" + std::to_string(w.n), fmt(w.bound), fmt(to_double(w.bound) - double(w.n))});
          else
            out.rows.push_back({id, "fail", "no even index up to the bound", fmt(w.bound), ""});
        } catch (const RunTooShort& e) {
          out.rows.push_back({id, "resource", std::string(e.what()) + "; need " + std::to_string(e.required()) + " points",
                              "", ""});
        }
      }
    } else if (check == "mu_bound") {
      ModulusReport rep;
      auto one = [&](const Point& x, const Rational& r, const Point& jx, const std::string& where) {
        Rational bx = rat_from_double(space.norm(x));
        double bound = to_double(banach::mu_resolvent_bound(op.C, op.D, r, bx));
        double v = space.norm(jx);
        ++rep.checked;
        if (v > bound + 1e-12) rep.violations.push_back({where, v, bound});
      };
      for (std::size_t n = 0; n < run.points.size(); ++n)
        one(run.points[n], sched.r_n(n), run.resolvents[n], "n=" + std::to_string(n));
      for (std::size_t i = 0; i < bc.samples; ++i) {
        Point x = random_in_ball(rng, bc.dim, space.pd(), 3.0);
        Rational r = bc.r_bar + rat_from_double(2.0 * (unit_real(rng) + 1.0) / 2.0);
        one(x, r, banach::resolvent(space, op, r, x), "sample " + std::to_string(i));
      }
      out.rows.push_back(from_report(check, rep));
    } else if (check == "phi_bound") {
      auto pm = banach::phi_moduli(cst);
      auto fam = banach::af_family(space, op, sched);
      for (auto k : cfg.k_list) {
        std::string id = check + "[k=" + std::to_string(k) + "]";
        Nat bound = banach::phi_bound_banach(cst, pm.lambda, Nat(k));
        bool found = false;
        std::size_t n = 0;
        for (; 2 * n < run.points.size() && Nat(n) <= bound; ++n)
          if (fam.member(Nat(k), run.points[2 * n])) {
            found = true;
            break;
          }
        if (found)
          out.rows.push_back({id, "pass", "n=" + std::to_string(n), fmt(bound), fmt(Nat(bound - n))});
        else if (Nat(2) * bound >= Nat(run.points.size()))
          out.rows.push_back({id, "resource", "run too short: need " + fmt(Nat(2 * bound + 1)) + " points", fmt(bound), ""});
        else
          out.rows.push_back({id, "fail", "no even index up to the bound", fmt(bound), ""});
      }
    } else if (check == "p2_crossval") {
      double gap = banach::p2_crossval(sched, x0, cfg.n_max);
      out.rows.push_back({check, gap <= cfg.tol.crossval ? "pass" : "fail", "max gap=" + fmt(gap), fmt(cfg.tol.crossval),
                          fmt(cfg.tol.crossval - gap)});
    } else if (check == "metastability") {
      auto fam = banach::af_family(space, op, sched);
      auto long_run = run;
      for (auto k : cfg.k_list)
        for (const auto& gd : cfg.g_list) {
          std::string id = check + "[k=" + std::to_string(k) + ",g=" + gd + "]";
          auto g = make_g(parse_g(gd));
          RateResult psi = banach::metastability_banach(cst, Nat(k), g, true, cfg.budget);
          for (;;) {
            try {
              auto w = brute_force_metastability(long_run.as_run(z), dist, fam, Nat(k), g, true);
              out.rows.push_back(metastability_row(id, psi, w.N));
              break;
            } catch (const RunTooShort& e) {
              std::size_t need = std::max(e.required(), 2 * long_run.points.size());
              if (need > cfg.max_run + 1) {
                out.rows.push_back({id, "resource", std::string(e.what()) + "; need " + std::to_string(e.required()) +
                                                        " points", fmt(psi.value), ""});
                break;
              }
              long_run = banach::run_mann(space, op, sched, x0, need - 1);
            }
          }
        }
    } else if (check == "rate") {
      if (op.kind != banach::OperatorKind::scaled_duality || op.c <= 0) {
        out.rows.push_back({check, "vacuous", "no modulus of regularity for this operator", "", ""});
        continue;
      }
      auto rho = banach::rho_scaled_duality(op.c);
      for (const auto& delta : cfg.delta_list) {
        std::string id = check + "[delta=" + fmt(to_double(delta)) + "]";
        Nat mu = banach::convergence_rate_banach(rho, cst, delta);
        double tail = closed_form_tail(sched, op.c, space.norm(x0), mu);
        double d = to_double(delta);
        out.rows.push_back({id, tail < d ? "pass" : "fail", "closed form |x_mu| <= " + fmt(tail), fmt(mu), fmt(d - tail)});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic checks.

inline Outcome run_synthetic(const Config& cfg) {
  using namespace detail;
  const auto& s = cfg.synthetic;
  Outcome out;
  for (const auto& check : cfg.checks) {
    auto rng = rng_for(cfg, check);
    if (check == "duality") {
      for (unsigned p : s.p_list)
        for (unsigned d : s.dims) {
          LpSpace sp = LpSpace::make(d, p);
          auto rep = duality_identity_check(sp, s.points, 3.0, rng);
          bool ok = rep.pairing_err <= 1e-10 && rep.norm_err <= 1e-9 && rep.roundtrip_err <= 1e-12;
          out.rows.push_back({check + "[p=" + std::to_string(p) + ",d=" + std::to_string(d) + "]", ok ? "pass" : "fail",
                              "pairing=" + fmt(rep.pairing_err) + " norm=" + fmt(rep.norm_err) +
                                  " roundtrip=" + fmt(rep.roundtrip_err),
                              "", ""});
        }
    } else if (check == "consistency") {
      LpSpace sp = LpSpace::make(2, 4);
      auto cm = phi_consistency_moduli(sp, 1);
      out.rows.push_back(from_report(check, check_consistency(sp, cm, 1, s.eps_list, rng, s.pairs, cfg.tol.consistency)));
    } else if (check == "alber") {
      for (unsigned p : s.p_list) {
        LpSpace sp = LpSpace::make(2, p);
        out.rows.push_back(from_report(check + "[p=" + std::to_string(p) + "]", alber_bounds_check(sp, 1, s.points, rng)));
      }
    } else if (check == "catalog") {
      CatalogParams prm;
      prm.c = 0.5;
      prm.in_set = [](const Point& x) { return x.norm() <= 1.0; };
      for (const char* kind : {"metric", "norm_sum", "norm_right", "constant", "set_restricted"}) {
        auto g = catalog_distance(kind, prm);
        out.rows.push_back(from_report(mk(check, kind), check_triangularity(g, rng, 2, 2.0, s.points)));
      }
      for (unsigned p : s.p_list) {
        LpSpace sp = LpSpace::make(2, p);
        auto g = bregman_distance(sp);
        out.rows.push_back(from_report(mk(check, "phi-p" + std::to_string(p)),
                                       check_triangularity(g, rng, 2, 1.0, s.points, 2, sp.pd())));
      }
    } else if (check == "rate_oracle") {
      auto rep = replay::oracle_equivalence(s.oracle_instances, rng);
      out.rows.push_back({check, rep.mismatches == 0 ? "pass" : "fail",
                          rep.mismatches == 0 ? std::to_string(rep.instances) + " instances x 4 variants"
                                              : rep.first_mismatch,
                          "", ""});
    } else if (check == "conversions") {
      using Audit = conversions::AuditReport (*)(std::size_t, std::mt19937_64&);
      for (auto [name, fn] : std::initializer_list<std::pair<const char*, Audit>>{
               {"derive_partial_from_full", conversions::audit_derive_partial_from_full},
               {"mixed_gh_f_modulus", conversions::audit_mixed_gh_f},
               {"affine_shift", conversions::audit_affine_shift},
               {"convert_tb_modulus", conversions::audit_convert_tb},
               {"convert_closedness_and_tb", conversions::audit_convert_closedness_tb}}) {
        auto rep = fn(s.instances, rng);
        out.rows.push_back({mk(check, name), rep.ok() ? "pass" : "fail",
                            rep.ok() ? std::to_string(rep.instances) + " instances, " + std::to_string(rep.checked) +
                                           " checked"
                                     : rep.failures.front(),
                            "", ""});
      }
    } else if (check == "adversarial") {
      auto euclid = [](const Point& a, const Point& b) { return (a - b).norm(); };
      ApproximationFamily zero_fam{[](const Point& x) { return x.norm(); }, {}};
      // constant run: every check passes with witness 0
      {
        IterationRun c;
        for (int i = 0; i < 50; ++i) c.points.push_back(conversions::detail::pt(0.0));
        auto w = brute_force_metastability(c, euclid, zero_fam, Nat(3), [](const Nat& n) { return Nat(2 * n + 10); }, true);
        out.rows.push_back({mk(check, "constant"), w.N == 0 ? "pass" : "fail", "N=" + std::to_string(w.N), "", ""});
      }
      // oscillating run: the metastability scan must refuse to certify
      {
        IterationRun c;
        for (int i = 0; i < 200; ++i) c.points.push_back(conversions::detail::pt(i % 2 ? 0.5 : -0.5));
        bool detected = false;
        try {
          brute_force_metastability(c, euclid, zero_fam, Nat(1), [](const Nat&) { return Nat(1); }, false);
        } catch (const RunTooShort&) {
          detected = true;
        }
        out.rows.push_back({mk(check, "oscillating"), detected ? "pass" : "fail",
                            detected ? "no window found, run too short reported" : "spurious witness", "", ""});
      }
      // non-convergent run: the rate window check fails with a witness pair
      {
        std::vector<Point> seq;
        for (int i = 0; i < 400; ++i) seq.push_back(conversions::detail::pt(i % 2 ? 0.5 : -0.5));
        auto row = rate_window_check("window", seq, Nat(10), 100, 0.1);
        out.rows.push_back({mk(check, "non-convergent"), row.status == "fail" ? "pass" : "fail",
                            "detector: " + row.witness, row.bound, ""});
      }
      // f = id fails on a sequence that is only monotone with lag 1
      {
        std::vector<double> v;
        for (int n = 0; n < 20; ++n) {
          v.push_back(std::ldexp(1.0, -n));                        // x_{2n}
          v.push_back(n == 0 ? 1.0 : std::ldexp(1.0, -(n - 1)));   // x_{2n+1} = x_{2(n-1)}
        }
        auto inst = conversions::detail::line_instance(v);
        std::vector<Point> zero{conversions::detail::pt(0.0)};
        auto with_id = check_f_monotone(inst, zero, v.size() - 1, 1e-12);
        inst.f = StepFunction::lag(1);
        auto with_lag = check_f_monotone(inst, zero, v.size() - 1, 1e-12);
        bool ok = !with_id.ok() && with_lag.ok();
        out.rows.push_back({mk(check, "f-identity"), ok ? "pass" : "fail",
                            "identity violations=" + std::to_string(with_id.violations.size()) +
                                " lag-1 violations=" + std::to_string(with_lag.violations.size()),
                            "", ""});
      }
      // an injected jump is reported at the jump
      {
        std::vector<double> v;
        for (int n = 0; n < 20; ++n) v.push_back(1.0 / (n + 1));
        v[8] = 2.0;
        auto inst = conversions::detail::line_instance(v);
        auto rep = check_quasi_fejer(inst, {conversions::detail::pt(0.0)}, v.size() - 1, 1e-12);
        bool ok = rep.has(3, 1);
        out.rows.push_back({mk(check, "jump"), ok ? "pass" : "fail",
                            "violations=" + std::to_string(rep.violations.size()), "", ""});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct RunOptions {
  std::optional<std::string> only;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget_steps;
  std::optional<Rational> delta;
  std::optional<std::uint64_t> k;
  std::optional<std::string> g;
};

inline Config apply_options(Config c, const RunOptions& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.budget_steps) c.budget.steps = *o.budget_steps;
  if (o.only) c.checks = {*o.only};
  if (o.delta) {
    c.delta_list = {*o.delta};
    c.checks = {"rate"};
  }
  if (o.k || o.g) {
    if (o.k) c.k_list = {*o.k};
    if (o.g) c.g_list = {*o.g};
    c.checks = {"metastability"};
  }
  validate(c);
  return c;
}

inline Outcome run_experiment(const Config& cfg) {
  validate(cfg);
  if (cfg.app == "hilbert") return run_hilbert(cfg);
  if (cfg.app == "banach") return run_banach(cfg);
  return run_synthetic(cfg);
}

// ---------------------------------------------------------------------------
// CSV output.

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string trajectory_csv(const Outcome& o) {
  std::size_t d = o.run.points.empty() ? 0 : static_cast<std::size_t>(o.run.points[0].size());
  std::ostringstream s;
  s << "n";
  for (std::size_t i = 0; i < d; ++i) s << ",coord_" << i;
  s << ",residual,dist_to_sol,phi_to_sol\n";
  for (std::size_t n = 0; n < o.run.points.size(); ++n) {
    s << n;
    for (Eigen::Index i = 0; i < o.run.points[n].size(); ++i) s << ',' << fmt(o.run.points[n][i]);
    s << ',' << (n < o.run.residuals.size() ? fmt(o.run.residuals[n]) : "");
    s << ',' << (n < o.dist_to_sol.size() ? fmt(o.dist_to_sol[n]) : "");
    s << ',' << (n < o.phi_to_sol.size() ? fmt(o.phi_to_sol[n]) : "") << '\n';
  }
  return s.str();
}

inline std::string results_csv(const Outcome& o) {
  std::ostringstream s;
  s << "check,status,witness,bound,slack\n";
  for (const auto& r : o.rows)
    s << csv_field(r.check) << ',' << r.status << ',' << csv_field(r.witness) << ',' << csv_field(r.bound) << ','
      << csv_field(r.slack) << '\n';
  return s.str();
}

/// Writes via a temporary file and rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct CsvPaths {
  std::filesystem::path trajectory, results;
};

inline CsvPaths emit_csv(const Outcome& o, const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  CsvPaths p{dir / (name + "_trajectory.csv"), dir / (name + "_results.csv")};
  write_atomic(p.trajectory, trajectory_csv(o));
  write_atomic(p.results, results_csv(o));
  return p;
}

}  // namespace fejer::harness
