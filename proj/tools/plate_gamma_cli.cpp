// plate-gamma: thickness-sweep studies of anisotropic plates.
//
//   plate-gamma run <config>     full study: limit solve, sweep, report
//   plate-gamma reduce <config>  write the reduced in-plane tensors only
//   plate-gamma check <config>   run the invariant self-checks
//
// Exit code 0 only when every enabled check passes.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "plategamma/harness.hpp"

namespace {

pg::ProblemConfig load_config(const std::string& path, std::uint64_t seed,
                              bool seed_set, int threads) {
  pg::ProblemConfig cfg = pg::parse_config_file(path);
  if (seed_set) cfg.seed = seed;
  cfg.threads = threads;
  return cfg;
}

int run_cmd(const pg::ProblemConfig& cfg, const std::string& out_dir) {
  pg::StudyResult res = pg::run_study(cfg);
  pg::emit_report(res, cfg, out_dir);
  pg::emit_reduced_model(cfg, out_dir);
  std::printf("wrote %s/report.csv, summary.txt, reduced_model.csv\n",
              out_dir.c_str());
  for (const pg::EpsRow& r : res.rows)
    std::printf(
        "eps %-7.4g  stress_err %-10.5g rate %-6.3f energy_gap %-9.4g "
        "duality %-9.3g\n",
        r.eps, r.stress_err, r.stress_rate, r.energy_gap_rel,
        r.duality_gap_rel);
  std::printf("limit energy %.10g, checks %s\n", res.limit_energy,
              res.checks.all() ? "PASS" : "FAIL");
  return res.checks.all() ? 0 : 1;
}

int reduce_cmd(const pg::ProblemConfig& cfg, const std::string& out_dir) {
  pg::emit_reduced_model(cfg, out_dir);
  std::printf("wrote %s/reduced_model.csv\n", out_dir.c_str());
  return 0;
}

int check_cmd(const pg::ProblemConfig& cfg) {
  auto results = pg::check_suite(cfg);
  bool all = true;
  for (const auto& r : results) {
    std::printf("%-34s %s  (value %.3g, threshold %.3g)\n", r.name.c_str(),
                r.pass ? "pass" : "FAIL", r.value, r.threshold);
    all &= r.pass;
  }
  std::printf("check suite: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"complementary-energy plate reduction and thickness sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("config", config_path, "study description (TOML)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_out) cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option_function<std::uint64_t>(
           "--seed",
           [&](const std::uint64_t& s) {
             seed = s;
             seed_set = true;
           },
           "override the seed of the randomized checks");
    cmd->add_option("--threads", threads,
                    "independent sweep solves to run concurrently")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "full convergence study");
  add_common(run, true);
  CLI::App* reduce =
      app.add_subcommand("reduce", "write the reduced model tables");
  add_common(reduce, true);
  CLI::App* check = app.add_subcommand("check", "invariant self-checks");
  add_common(check, false);

  CLI11_PARSE(app, argc, argv);

  try {
    pg::ProblemConfig cfg = load_config(config_path, seed, seed_set, threads);
    if (run->parsed()) return run_cmd(cfg, out_dir);
    if (reduce->parsed()) return reduce_cmd(cfg, out_dir);
    return check_cmd(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
