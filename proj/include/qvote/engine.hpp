#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qvote/verification.hpp"

namespace qvote {

/// Engine-level retry bounds; the protocol text leaves its restart loops
/// unbounded.
struct RetryCaps {
  int subround_attempts = 1000;  // abort-OR repeats per (k,p,n)
  int threshold_restarts = 100;  // failure-threshold restarts per (k,p,n)

  bool operator==(const RetryCaps&) const = default;
};

/// Every parameter of one voting pool.
struct ElectionConfig {
  int n_agents = 0;
  int n_candidates = 0;
  int pe_rounds = 1;              // privacy-enhancement repetitions per digit
  int coin_count = 0;             // M: vote gate fires with probability 2^-M
  double failure_threshold = 0.0; // delta
  int anon_security = 2;          // S for the classical subroutines
  std::vector<int> votes;         // votes[agent] in [0, n_candidates)
  NoiseModel noise;
  std::uint64_t seed = 0;
  RetryCaps retry;
  AnonRetryCaps anon_retry;

  /// K = ceil(log2 C): binary digits per vote.
  int digit_rounds() const;
  void validate() const;  // throws ConfigError

  bool operator==(const ElectionConfig&) const = default;
};

/// Position of one subround: digit k, privacy-enhancement round p, slot n.
/// All zero-based.
struct SubroundLabel {
  int digit = 0;
  int pe = 0;
  int slot = 0;
};

/// The N broadcast vectors of one (k,p) subround; row n belongs to slot n.
struct SubBulletin {
  BitMatrix rows;
  std::vector<std::uint8_t> row_filled;

  explicit SubBulletin(int n_agents = 0)
      : rows(n_agents), row_filled(static_cast<std::size_t>(n_agents), 0) {}
  bool complete() const;
};

/// K x Pi grid of sub-bulletins.
struct BulletinBoard {
  int digit_rounds = 0;
  int pe_rounds = 0;
  int n_agents = 0;
  std::vector<SubBulletin> grid;  // index digit * pe_rounds + pe

  BulletinBoard() = default;
  BulletinBoard(int digits, int pe, int agents);
  SubBulletin& at(int digit, int pe);
  const SubBulletin& at(int digit, int pe) const;
  bool complete() const;
};

/// Row parities E_{k,p}[n] and the per-slot vote bits F[n][k].
struct ElectionVectors {
  int digit_rounds = 0;
  int pe_rounds = 0;
  int n_agents = 0;
  std::vector<std::uint8_t> e;          // e[(digit * pe_rounds + pe) * N + slot]
  std::vector<std::uint8_t> final_bits; // final_bits[slot * digit_rounds + digit]

  std::uint8_t row_parity(int digit, int pe, int slot) const;
  std::uint8_t final_bit(int slot, int digit) const;
};

/// E from the complete board, F as the XOR over privacy-enhancement rounds.
ElectionVectors compute_election_vectors(const BulletinBoard& board);

struct Tally {
  std::vector<int> counts;          // per candidate value 0..C-1
  int invalid = 0;                  // decoded values >= C (C not a power of two)
  std::vector<int> election_vector; // decoded value per slot

  bool operator==(const Tally&) const = default;
};

/// Decode each slot's digits (digit 0 = least significant bit) and count.
Tally compute_tally(const ElectionVectors& vectors, int n_candidates);

enum class SubroundType : std::uint8_t { Verification, Vote };

/// One row of the run trace: a verification trial or a voting attempt,
/// with the failure rates right after the event.
struct StatsEvent {
  int pool = 0;
  int digit = 0;
  int pe = 0;
  int slot = 0;
  SubroundType type = SubroundType::Verification;
  int verifier = -1;  // -1 on vote rows
  Verdict verdict = Verdict::Accept;
  std::vector<double> deltas;
};

/// Aggregate verification counts over one (pool, digit, pe) block.
struct PeRoundSummary {
  int pool = 0;
  int digit = 0;
  int pe = 0;
  std::vector<std::uint64_t> trials;
  std::vector<std::uint64_t> rejections;
  std::vector<double> deltas;
  double pooled_delta = 0.0;
};

struct RunStats {
  std::vector<StatsEvent> events;
  std::vector<PeRoundSummary> summaries;
  std::uint64_t verifications = 0;
  std::uint64_t vote_attempts = 0;
  std::uint64_t abort_or_fires = 0;
  std::uint64_t threshold_restarts = 0;
  std::uint64_t subround_retries = 0;
  std::uint64_t total_rounds = 0;  // simulated subround attempts of any kind
  double wall_seconds = 0.0;       // measured, not part of determinism
};

/// Everything one pool produces.
struct ElectionResult {
  BulletinBoard board;
  ElectionVectors vectors;
  Tally tally;
  RunStats stats;
  std::vector<int> voting_order;    // slot -> agent, as published on the board
  std::vector<int> secret_indices;  // agent -> slot (simulator audit view)
};

/// Produces one fresh resource state per subround attempt.
class StateSource {
 public:
  virtual ~StateSource() = default;
  virtual const DensityState& next() = 0;
};

/// The honest source: a GHZ state through the configured noise channel.
class NoisyGhzSource final : public StateSource {
 public:
  NoisyGhzSource(int n_qubits, const NoiseModel& model)
      : state_(apply_noise(make_ghz(n_qubits), model)) {}
  const DensityState& next() override { return state_; }

 private:
  DensityState state_;
};

/// Test seam: mutates a row between broadcast and publication.
using BroadcastHook = std::function<void(const SubroundLabel&, std::vector<std::uint8_t>&)>;

enum class GateDecision : std::uint8_t { Verify, Vote };

/// The slot's voter samples Bernoulli(2^-M) and announces it anonymously;
/// heads means the subround votes, tails means it verifies.
GateDecision gate_subround(int voting_agent, int coin_count, AnonLayer& anon, Rng& rng);

/// Voter-side digit state: XOR of the toggles already cast this digit.
struct VoterPrivateState {
  int secret_index = -1;
  std::uint8_t accumulated = 0;
};

/// One voting subround (measure, encode, broadcast, abort-OR), repeated with a
/// fresh state until the abort-OR stays silent. Returns the committed row.
/// Throws RetryAbort past caps.subround_attempts.
std::vector<std::uint8_t> voting_subround(const SubroundLabel& label, int pe_round_total,
                                          StateSource& source, int voter_agent, int vote_bit,
                                          VoterPrivateState& voter_state, AnonLayer& anon,
                                          Rng& rng, const RetryCaps& caps,
                                          const BroadcastHook& hook = {},
                                          RunStats* stats = nullptr);

/// Runs the three protocol phases for one pool. Deterministic given
/// (config, seed). Throws ThresholdAbort / AnonAbort / RetryAbort with partial
/// statistics attached.
ElectionResult run_election(const ElectionConfig& config, StateSource& source,
                            PairwiseTransport& transport, const BroadcastHook& hook = {});

/// Convenience path: honest source over local transport.
ElectionResult run_election(const ElectionConfig& config);

struct PoolsResult {
  std::vector<ElectionResult> pools;
  Tally merged;
};

/// Independent pools over a common candidate space; tallies add elementwise.
/// Throws ConfigError when candidate counts differ.
PoolsResult run_pools(const std::vector<ElectionConfig>& configs);

}  // namespace qvote
