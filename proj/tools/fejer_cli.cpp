// fejer: run experiment configs and verify the quantitative bounds.

#include "fejer/harness.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace fejer;
using namespace fejer::harness;

namespace {

struct Job {
  fs::path config;
  int status = 0;  // 0 ok, 1 fail rows, 2 error
  std::string report;
};

std::string summarize(const Config& cfg, const Outcome& o, const CsvPaths& paths) {
  std::map<std::string, int> count;
  for (const auto& r : o.rows) ++count[r.status];
  std::ostringstream s;
  s << cfg.name << ": " << o.rows.size() << " rows";
  for (const auto& [k, v] : count) s << ", " << v << ' ' << k;
  s << "  -> " << paths.results.string() << '\n';
  for (const auto& r : o.rows)
    if (r.status != "pass") s << "  " << r.status << "  " << r.check << "  " << r.witness << '\n';
  return s.str();
}

void run_one(Job& job, const RunOptions& opt, const fs::path& out_dir, bool verbose) {
  try {
    Config cfg = apply_options(load_config(job.config), opt);
    Outcome o = run_experiment(cfg);
    auto paths = emit_csv(o, out_dir, cfg.name);
    job.report = summarize(cfg, o, paths);
    if (verbose)
      for (const auto& r : o.rows)
        job.report += "  " + r.status + "  " + r.check + "  bound=" + r.bound + "  " + r.witness + '\n';
    job.status = o.any_fail() ? 1 : 0;
  } catch (const std::exception& e) {
    job.report = job.config.string() + ": error: " + e.what() + '\n';
    job.status = 2;
  }
}

int run_jobs(std::vector<Job>& jobs, const RunOptions& opt, const fs::path& out_dir, unsigned n_jobs, bool verbose) {
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      run_one(jobs[i], opt, out_dir, verbose);
      std::lock_guard lock(io);
      std::cout << jobs[i].report << std::flush;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, n_jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  int worst = 0;
  for (const auto& j : jobs) worst = std::max(worst, j.status);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantitative Fejer-monotonicity bound checker"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed, budget;
  unsigned n_jobs = 1;
  std::string only, delta, g;
  std::optional<std::uint64_t> k;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--jobs", n_jobs, "parallel experiments")->capture_default_str();
    sub->add_option("--budget", budget, "Psi recursion step budget");
  };

  auto* run = app.add_subcommand("run", "run every check of the given configs");
  run->add_option("config", configs, "config files")->required()->check(CLI::ExistingFile);
  common(run);

  auto* check = app.add_subcommand("check", "run one check of a config");
  check->add_option("config", configs, "config file")->required()->check(CLI::ExistingFile);
  check->add_option("--only", only, "check id")->required();
  common(check);

  auto* rate = app.add_subcommand("rate", "rate of convergence for one delta");
  rate->add_option("config", configs, "config file")->required()->check(CLI::ExistingFile);
  rate->add_option("--delta", delta, "delta (decimal or p/q)")->required();
  common(rate);

  auto* oracle = app.add_subcommand("oracle", "brute-force metastability against Psi for one (k, g)");
  oracle->add_option("config", configs, "config file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--k", k, "k")->required();
  oracle->add_option("--g", g, "g descriptor: const:c or linear:a,b")->required();
  common(oracle);

  CLI11_PARSE(app, argc, argv);

  RunOptions opt;
  opt.seed = seed;
  opt.budget_steps = budget;
  if (check->parsed()) opt.only = only;
  try {
    if (rate->parsed()) opt.delta = parse_rational(delta);
  } catch (const std::exception& e) {
    std::cerr << "--delta: " << e.what() << '\n';
    return 2;
  }
  if (oracle->parsed()) {
    opt.k = k;
    opt.g = g;
  }

  std::vector<Job> jobs;
  for (const auto& c : configs) jobs.push_back({c, 0, {}});
  bool verbose = !run->parsed();
  return run_jobs(jobs, opt, out_dir, n_jobs, verbose);
}
