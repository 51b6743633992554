#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "qvote/config_io.hpp"
#include "qvote/params.hpp"

namespace {

using namespace qvote;

void print_tally(const Tally& tally) {
  std::cout << "decoded votes by slot:";
  for (int v : tally.election_vector) std::cout << " " << v;
  std::cout << "\ncounts:";
  for (std::size_t v = 0; v < tally.counts.size(); ++v) {
    if (tally.counts[v] > 0) std::cout << " " << v << ":" << tally.counts[v];
  }
  if (tally.invalid > 0) std::cout << " invalid:" << tally.invalid;
  std::cout << "\n";
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
  std::vector<ElectionConfig> pools = load_config(config_path);
  if (seed) {
    for (std::size_t i = 0; i < pools.size(); ++i) pools[i].seed = *seed + i;
  }
  std::filesystem::create_directories(out_dir);

  try {
    const PoolsResult result = run_pools(pools);
    write_bulletin_json(out_dir + "/bulletin.json", result);
    write_tally_json(out_dir + "/tally.json", result);
    std::vector<const RunStats*> stats;
    for (const auto& p : result.pools) stats.push_back(&p.stats);
    emit_stats(stats, out_dir);
    for (std::size_t i = 0; i < result.pools.size(); ++i) {
      std::cout << "pool " << i << ": " << result.pools[i].stats.verifications
                << " verifications, " << result.pools[i].stats.threshold_restarts
                << " threshold restarts, " << result.pools[i].stats.abort_or_fires
                << " abort-OR fires\n";
    }
    std::cout << "merged tally\n";
    print_tally(result.merged);
    return kExitOk;
  } catch (const ElectionAbort& abort) {
    // Emit whatever trace the run produced before stopping.
    if (abort.partial_stats) {
      emit_stats(*abort.partial_stats, out_dir);
    } else {
      emit_stats(RunStats{}, out_dir);
    }
    std::cerr << "aborted: " << abort.what() << "\n";
    return exit_code_for(abort);
  }
}

int cmd_replay(const std::string& fixture_path, const std::string& out_dir) {
  const Fixture fixture = load_fixture(fixture_path);
  const ReplayResult result = replay_fixture(fixture);

  std::filesystem::create_directories(out_dir);
  const std::string report = replay_report_json(fixture, result);
  std::ofstream(out_dir + "/replay.json", std::ios::binary) << report;

  for (std::size_t pi = 0; pi < result.pools.size(); ++pi) {
    std::cout << "pool " << pi << "\n";
    print_tally(result.pools[pi].tally);
  }
  if (result.pools.size() > 1) {
    std::cout << "merged\n";
    print_tally(result.merged);
  }
  if (result.discrepancies.empty()) {
    std::cout << "no discrepancies against the published record\n";
  } else {
    std::cout << result.discrepancies.size() << " discrepancies:\n";
    for (const auto& d : result.discrepancies) {
      std::cout << "  " << d.kind << " pool=" << d.pool;
      if (d.digit >= 0) std::cout << " k=" << d.digit << " p=" << d.pe;
      if (d.slot >= 0) std::cout << " slot=" << d.slot;
      std::cout << " computed=" << d.computed << " published=" << d.published << "\n";
    }
  }
  return kExitOk;
}

int cmd_plan(double delta, int agents, double confidence, double zeta,
             std::optional<double> epsilon, const std::string& out_dir) {
  PlanRequest req{delta, agents, confidence, zeta, epsilon};
  const SecurityPlan p = plan(req);

  std::printf("chosen: epsilon=%.4f  M=%d  Pi=%lld\n", p.epsilon, p.coin_count, p.pe_rounds);
  std::printf("  samples required   %.1f (2^M = %.0f)\n", p.samples_required,
              std::ldexp(1.0, p.coin_count));
  std::printf("  confidence         %.6f (soundness bound %.3g)\n", p.confidence, p.soundness);
  std::printf("  success prob       %.6f\n", p.success_probability);
  std::printf("  zeta per round     %.6f (eta %.6f)\n", p.zeta_round, p.eta);
  std::printf("  zeta composed      %.6g (target %.6g)\n", p.zeta_composed, zeta);
  std::printf("  cost (2^M * Pi)    %.0f\n\n", p.cost);
  std::printf("%10s %6s %6s %12s %14s\n", "epsilon", "M", "Pi", "zeta_round", "cost");
  for (const auto& row : p.table) {
    if (!row.feasible) {
      std::printf("%10.4f %6s %6s %12s %14s\n", row.epsilon, "-", "-", "-", "infeasible");
      continue;
    }
    std::printf("%10.4f %6d %6lld %12.6f %14.0f\n", row.epsilon, row.coin_count, row.pe_rounds,
                row.zeta_round, row.cost);
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_plan_json(out_dir + "/plan.json", p);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for an anonymous entanglement-based voting protocol"};
  app.require_subcommand(1);

  std::string config_path, fixture_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  double delta = 0.0, confidence = 0.99, zeta = 0.01;
  int agents = 4;

  auto* run = app.add_subcommand("run", "Run the election in a config file");
  run->add_option("config", config_path, "election config JSON")->required();
  run->add_option("--seed", seed, "override the per-pool seeds");
  run->add_option("--out", out_dir, "output directory");

  auto* replay = app.add_subcommand("replay", "Recompute the tally of a published bulletin");
  replay->add_option("fixture", fixture_path, "fixture JSON")->required();
  replay->add_option("--out", out_dir, "output directory");

  auto* planner = app.add_subcommand("plan", "Derive security parameters from targets");
  planner->add_option("--delta", delta, "measured failure-rate threshold")->required();
  planner->add_option("--agents", agents, "number of agents");
  planner->add_option("--confidence", confidence, "target confidence level");
  planner->add_option("--zeta", zeta, "target composed privacy");
  planner->add_option("--epsilon", epsilon, "fix epsilon instead of searching");
  planner->add_option("--out", out_dir, "directory for plan.json (optional)");
  planner->get_option("--out")->default_val("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out_dir);
    if (replay->parsed()) return cmd_replay(fixture_path, out_dir);
    return cmd_plan(delta, agents, confidence, zeta, epsilon, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qvote::exit_code_for(e);
  }
}
