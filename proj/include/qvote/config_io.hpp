#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qvote/engine.hpp"

namespace qvote {

inline constexpr int kSchemaVersion = 1;

/// Exit codes shared between the CLI and its tests.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitThresholdAbort = 3,
  kExitAnonAbort = 4,
  kExitRetryAbort = 5,
};

/// Maps a thrown error to the CLI exit code.
int exit_code_for(const std::exception& error);

/// Parses and fully validates an election config file (one or more pools).
/// Schema violations raise ConfigError with a field-precise message.
std::vector<ElectionConfig> load_config(const std::string& path);

/// Writes configs in the same schema load_config reads.
void save_config(const std::string& path, const std::vector<ElectionConfig>& pools);

/// One pool of a published-bulletin fixture.
struct FixturePool {
  int n_agents = 0;
  int n_candidates = 0;
  int digit_rounds = 0;
  int pe_rounds = 0;
  std::vector<int> voting_order;  // metadata only; not used in computation
  BulletinBoard board;
  /// Published row parities, when the source printed them; indexed like
  /// ElectionVectors::e. Empty when absent.
  std::vector<std::optional<std::uint8_t>> published_e;
  std::vector<int> published_tally;  // empty when absent
  std::vector<int> caption_votes;    // empty when absent
};

struct Fixture {
  std::string name;
  std::vector<FixturePool> pools;
  std::vector<int> published_merged_tally;  // empty when absent
};

Fixture load_fixture(const std::string& path);

/// One disagreement between recomputation and the published record.
struct Discrepancy {
  std::string kind;  // election_vector_mismatch | caption_vote_mismatch | tally_mismatch
  int pool = 0;
  int digit = -1;
  int pe = -1;
  int slot = -1;
  long long computed = 0;
  long long published = 0;
};

struct ReplayPoolResult {
  ElectionVectors recomputed;
  /// Effective election vectors: published values where present, recomputed
  /// parities otherwise. Decoding runs on these.
  ElectionVectors effective;
  Tally tally;
};

struct ReplayResult {
  std::vector<ReplayPoolResult> pools;
  Tally merged;
  std::vector<Discrepancy> discrepancies;
};

/// Re-runs the tally pipeline on a published bulletin and cross-checks every
/// printed quantity.
ReplayResult replay_fixture(const Fixture& fixture);
ReplayResult replay_fixture(const std::string& path);

std::string replay_report_json(const Fixture& fixture, const ReplayResult& result);

void write_bulletin_json(const std::string& path, const PoolsResult& result);
void write_tally_json(const std::string& path, const PoolsResult& result);
void write_plan_json(const std::string& path, const struct SecurityPlan& plan);

/// stats.csv: one row per verification or vote event.
/// stats_summary.csv: one row per (pool, digit, pe) block with running rates.
/// Header-only files when there are no events.
void emit_stats(const std::vector<const RunStats*>& pools, const std::string& dir);
void emit_stats(const RunStats& stats, const std::string& dir);

}  // namespace qvote
