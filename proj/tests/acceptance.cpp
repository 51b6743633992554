// Acceptance suite: one criterion per section, one pass/fail line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qvote/config_io.hpp"
#include "qvote/params.hpp"
#include "test_helpers.hpp"

using namespace qvote;
using qvote::testing::chi_square_uniform;
using qvote::testing::total_variation;
using qvote::testing::within_binomial_band;

namespace {

const std::string kDataDir = QVOTE_DATA_DIR;

struct Criterion {
  int number;
  std::string name;
  std::function<bool(std::string&)> run;
};

bool check(bool ok, const std::string& what, std::string& detail) {
  if (!ok && detail.empty()) detail = what;
  return ok;
}

// ---- 1. Fixture reproduction (exact) ---------------------------------------

bool criterion_fixtures_scenario1(std::string& detail) {
  bool ok = true;
  const ReplayResult t1 = replay_fixture(kDataDir + "/fixtures/tally1.json");
  ok &= check(t1.pools.size() == 1, "tally1 pool count", detail);
  ok &= check(t1.pools[0].tally.election_vector == std::vector<int>{1, 1, 0, 0},
              "tally1 final bits", detail);
  ok &= check(t1.pools[0].tally.counts == std::vector<int>{2, 2}, "tally1 counts", detail);
  ok &= check(t1.discrepancies.empty(), "tally1 discrepancies", detail);

  const ReplayResult f1 = replay_fixture(kDataDir + "/fixtures/fig1.json");
  ok &= check(f1.pools[0].tally.election_vector == std::vector<int>{1, 1, 0, 0}, "fig1 E", detail);
  ok &= check(f1.pools[0].tally.counts == std::vector<int>{2, 2}, "fig1 T", detail);
  return ok;
}

// ---- 2. Fixture reproduction (scenario 2) ----------------------------------

bool criterion_fixtures_scenario2(std::string& detail) {
  bool ok = true;
  const ReplayResult r = replay_fixture(kDataDir + "/fixtures/tally2.json");
  ok &= check(r.pools.size() == 2, "pool count", detail);
  ok &= check(r.pools[0].tally.election_vector == std::vector<int>{3, 9, 10, 1}, "pool 1 decode",
              detail);
  ok &= check(r.pools[1].tally.election_vector == std::vector<int>{0, 13, 11, 9}, "pool 2 decode",
              detail);
  bool caption_reported = false;
  for (const auto& d : r.discrepancies) {
    caption_reported |= d.kind == "caption_vote_mismatch" && d.pool == 1 && d.computed == 11 &&
                        d.published == 16;
  }
  ok &= check(caption_reported, "caption discrepancy report", detail);
  return ok;
}

// ---- 3. Verification certainty ----------------------------------------------

bool criterion_verification_certainty(std::string& detail) {
  const DensityState ghz = make_ghz(4);
  LocalTransport transport;
  AnonLayer anon({4, 2}, transport);
  VerifierCounters counters(4);
  StdRng rng(301);
  for (int i = 0; i < 10000; ++i) {
    run_verification_subround(ghz, counters, static_cast<int>(rng.below(4)), anon, rng);
  }
  std::uint64_t rejections = 0;
  for (auto r : counters.rejections) rejections += r;
  return check(rejections == 0, "rejections=" + std::to_string(rejections), detail);
}

// ---- 4. Noise-rejection law --------------------------------------------------

bool criterion_noise_rejection_law(std::string& detail) {
  bool ok = true;
  LocalTransport transport;
  AnonLayer anon({4, 2}, transport);
  StdRng rng(302);
  for (const double p : {0.05, 0.1, 0.2}) {
    const DensityState rho = apply_noise(make_ghz(4), {NoiseKind::White, p});
    VerifierCounters counters(4);
    const std::uint64_t rounds = 100000;
    for (std::uint64_t i = 0; i < rounds; ++i) {
      run_verification_subround(rho, counters, static_cast<int>(rng.below(4)), anon, rng);
    }
    std::uint64_t rejections = 0;
    for (auto r : counters.rejections) rejections += r;
    const bool in_band = within_binomial_band(rejections, rounds, p / 2);
    if (!in_band) {
      detail = "p=" + std::to_string(p) +
               " rate=" + std::to_string(static_cast<double>(rejections) / rounds);
    }
    ok &= in_band;
  }
  return ok;
}

// ---- 5. Sampler-oracle agreement ---------------------------------------------

bool criterion_sampler_oracle(std::string& detail) {
  StdRng rng(303);
  constexpr double kPi = std::numbers::pi;
  for (int pair = 0; pair < 20; ++pair) {
    const int n = 2 + static_cast<int>(rng.below(3));  // N in {2,3,4}
    const DensityState rho = apply_noise(make_ghz(n), {NoiseKind::White, rng.uniform()});
    AngleVector angles;
    for (int j = 0; j < n; ++j) angles.values.push_back(rng.uniform() * kPi);

    const std::vector<double> probs = outcome_distribution(rho, angles);
    const std::uint64_t trials = 100000;
    std::vector<std::uint64_t> counts(probs.size(), 0);
    for (std::uint64_t i = 0; i < trials; ++i) {
      const OutcomeVector y = sample_measurement(rho, angles, rng);
      std::size_t idx = 0;
      for (int j = 0; j < n; ++j) idx |= static_cast<std::size_t>(y[static_cast<std::size_t>(j)]) << j;
      counts[idx] += 1;
    }
    const double tv = total_variation(counts, probs, trials);
    if (!check(tv < 0.01, "pair " + std::to_string(pair) + " tv=" + std::to_string(tv), detail)) {
      return false;
    }
  }
  return true;
}

// ---- 6. End-to-end correctness -----------------------------------------------

bool criterion_end_to_end(std::string& detail) {
  StdRng vote_rng(304);
  std::uint64_t runs = 0, completed = 0, correct = 0;
  for (const int candidates : {2, 4}) {
    for (const int pe : {1, 3}) {
      for (const int coins : {2, 4}) {
        for (int i = 0; i < 125; ++i) {
          ElectionConfig cfg;
          cfg.n_agents = 4;
          cfg.n_candidates = candidates;
          cfg.pe_rounds = pe;
          cfg.coin_count = coins;
          cfg.failure_threshold = 0.05;
          cfg.anon_security = 4;
          cfg.noise = {NoiseKind::Ideal, 0.0};
          cfg.seed = 60000 + runs;
          for (int a = 0; a < 4; ++a) {
            cfg.votes.push_back(static_cast<int>(vote_rng.below(candidates)));
          }
          ++runs;
          try {
            const ElectionResult res = run_election(cfg);
            ++completed;
            bool match = true;
            for (int slot = 0; slot < 4; ++slot) {
              const int voter = res.voting_order[static_cast<std::size_t>(slot)];
              match &= res.tally.election_vector[static_cast<std::size_t>(slot)] ==
                       cfg.votes[static_cast<std::size_t>(voter)];
            }
            if (!match) {
              detail = "decode mismatch at run " + std::to_string(runs);
              return false;
            }
            ++correct;
          } catch (const ElectionAbort&) {
            // counted below against the completion ratio
          }
        }
      }
    }
  }
  bool ok = check(runs == 1000, "run count", detail);
  ok &= check(correct == completed, "all completed runs decode exactly", detail);
  const double completion = static_cast<double>(completed) / static_cast<double>(runs);
  ok &= check(completion >= 0.99,
              "completion=" + std::to_string(completion), detail);
  return ok;
}

// ---- 7. Scaled scenario-1 run --------------------------------------------------

bool criterion_scaled_scenario1(std::string& detail) {
  std::uint64_t completed = 0, correct = 0, clean_gates = 0, gates = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    ElectionConfig cfg;
    cfg.n_agents = 4;
    cfg.n_candidates = 2;
    cfg.pe_rounds = 3;
    cfg.coin_count = 6;
    cfg.failure_threshold = 0.0376;
    cfg.anon_security = 4;
    cfg.votes = {1, 1, 0, 0};
    cfg.noise = {NoiseKind::White, 0.075};
    cfg.seed = 70000 + static_cast<std::uint64_t>(s);
    try {
      const ElectionResult res = run_election(cfg);
      ++completed;
      if (res.tally.counts == std::vector<int>{2, 2}) ++correct;
      for (const auto& ev : res.stats.events) {
        if (ev.type != SubroundType::Vote) continue;
        ++gates;
        bool clean = true;
        for (double d : ev.deltas) clean &= d <= cfg.failure_threshold;
        clean_gates += clean ? 1 : 0;
      }
    } catch (const ElectionAbort&) {
    }
  }
  bool ok = check(completed >= 16, "completed=" + std::to_string(completed), detail);
  ok &= check(correct == completed, "tally correctness in completed runs", detail);
  ok &= check(gates > 0 && clean_gates == gates, "thresholds at voting gates", detail);
  return ok;
}

// ---- 8. LogicalOR statistics ----------------------------------------------------

bool criterion_logical_or_stats(std::string& detail) {
  LocalTransport transport;
  AnonLayer anon({4, 2}, transport);
  StdRng rng(305);
  const std::uint64_t trials = 1000000;

  for (std::uint64_t t = 0; t < trials; ++t) {
    if (anon.logical_or({0, 0, 0, 0}, rng) != 0) {
      detail = "false positive at trial " + std::to_string(t);
      return false;
    }
  }
  std::uint64_t ones = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    ones += static_cast<std::uint64_t>(anon.logical_or({0, 1, 0, 0}, rng));
  }
  const double expect = 1.0 - 0x1.0p-8;
  return check(within_binomial_band(ones, trials, expect),
               "single-one frequency=" + std::to_string(static_cast<double>(ones) / trials),
               detail);
}

// ---- 9. UniqueIndex uniformity ---------------------------------------------------

bool criterion_unique_index(std::string& detail) {
  LocalTransport transport;
  AnonLayer anon({4, 2}, transport);
  StdRng rng(306);
  const std::uint64_t runs = 100000;
  std::map<std::vector<int>, std::uint64_t> hist;
  for (std::uint64_t t = 0; t < runs; ++t) {
    const std::vector<int> omega = anon.unique_index(rng);
    std::vector<int> sorted = omega;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::vector<int>{0, 1, 2, 3}) {
      detail = "non-permutation at run " + std::to_string(t);
      return false;
    }
    hist[omega] += 1;
  }
  bool ok = check(hist.size() == 24, "all permutations reached", detail);
  std::vector<std::uint64_t> counts;
  for (const auto& [perm, c] : hist) counts.push_back(c);
  const double stat = chi_square_uniform(counts, runs);
  ok &= check(stat < qvote::testing::kChiSq99Df23, "chi-square=" + std::to_string(stat), detail);
  return ok;
}

// ---- 10. Planner bracketing --------------------------------------------------------

bool criterion_planner(std::string& detail) {
  const SecurityPlan a = plan({0.0376, 4, 0.99, 0.01, std::nullopt});
  const SecurityPlan b = plan({0.0376, 4, 0.99, 0.01, std::nullopt});
  bool ok = check(a.coin_count >= 12 && a.coin_count <= 14,
                  "M=" + std::to_string(a.coin_count), detail);
  ok &= check(a.pe_rounds >= 8 && a.pe_rounds <= 10, "Pi=" + std::to_string(a.pe_rounds), detail);
  ok &= check(a.epsilon == b.epsilon && a.coin_count == b.coin_count &&
                  a.pe_rounds == b.pe_rounds && a.zeta_round == b.zeta_round && a.cost == b.cost,
              "determinism", detail);
  return ok;
}

// ---- 11. Closed-form arithmetic -----------------------------------------------------

bool criterion_formula_arithmetic(std::string& detail) {
  StdRng rng(307);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const double delta = rng.uniform() * 0.2;
    const double eps = 2.0 * delta + 0.01 + rng.uniform() * (1.0 - 2.0 * delta - 0.01);
    const double target = 0.001 + rng.uniform() * 0.5;
    const int m = 1 + static_cast<int>(rng.below(20));
    const int pi = 1 + static_cast<int>(rng.below(12));
    const double eta = rng.uniform() * 0.9;

    const long double gap = static_cast<long double>(eps) * eps - 4.0L * delta * delta;
    const long double bound_oracle =
        expl(-ldexpl(1.0L, m) * gap / (16.0L * n * static_cast<long double>(eps) * eps));
    if (std::abs(soundness_bound(eps, delta, m, n).value - static_cast<double>(bound_oracle)) >
        1e-12) {
      detail = "soundness mismatch at trial " + std::to_string(t);
      return false;
    }

    const long double intact = expl(static_cast<long double>(n) * log1pl(-eta));
    const long double zeta_oracle =
        intact * eps * sqrtl(1.0L + static_cast<long double>(eps) * eps) + (1.0L - intact);
    const Clamped z = privacy_zeta(eta, eps, n);
    if (!z.clamped && std::abs(z.value - static_cast<double>(zeta_oracle)) > 1e-12) {
      detail = "zeta mismatch at trial " + std::to_string(t);
      return false;
    }

    const long double success_oracle = expl(static_cast<long double>(n) * pi * log1pl(-delta));
    if (std::abs(success_prob(delta, pi, n) - static_cast<double>(success_oracle)) > 1e-12) {
      detail = "success mismatch at trial " + std::to_string(t);
      return false;
    }

    // Round trip through min_samples.
    const double samples = min_samples(target, eps, delta, n);
    const int coins = min_coin_count(target, eps, delta, n);
    if (soundness_bound(eps, delta, coins, n).value > target * (1.0 + 1e-12)) {
      detail = "round-trip exceeded target at trial " + std::to_string(t);
      return false;
    }
    if (soundness_bound_at(eps, delta, samples * (1.0 + 1e-9), n).value >
        target * (1.0 + 1e-6)) {
      detail = "real-valued round-trip failed at trial " + std::to_string(t);
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "fixture reproduction: published two-candidate bulletins", criterion_fixtures_scenario1},
      {2, "fixture reproduction: multi-candidate pools with discrepancy report",
       criterion_fixtures_scenario2},
      {3, "verification certainty on the ideal resource", criterion_verification_certainty},
      {4, "white-noise rejection rate p/2", criterion_noise_rejection_law},
      {5, "sampler agrees with the enumeration oracle", criterion_sampler_oracle},
      {6, "end-to-end correctness on the ideal source", criterion_end_to_end},
      {7, "scaled noisy run near the operating threshold", criterion_scaled_scenario1},
      {8, "logical OR soundness and completeness statistics", criterion_logical_or_stats},
      {9, "unique index uniformity over permutations", criterion_unique_index},
      {10, "planner brackets the published operating point", criterion_planner},
      {11, "closed-form arithmetic against high-precision oracles", criterion_formula_arithmetic},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", c.number,
                c.name.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
