#pragma once

#include <cstdint>
#include <vector>

#include "qvote/rng.hpp"
#include "qvote/transport.hpp"

namespace qvote {

struct AnonConfig {
  int n_agents = 0;
  int security = 1;  // S: parity repetitions per ordering

  void validate() const;  // n_agents >= 2, security >= 1
};

/// N announcement orders, one per parity block, with pairwise-distinct last
/// announcers.
struct OrderingSet {
  std::vector<std::vector<int>> orders;

  bool valid(int n_agents) const;
};

OrderingSet make_orderings(int n_agents, Rng& rng);

/// One collaborative parity evaluation: shares(i, j) = r_i^j, announced z_j,
/// result z = xor_j z_j = xor_i p_i.
struct ParityRoundTranscript {
  BitMatrix shares;
  std::vector<std::uint8_t> announced;  // z_j, indexed by agent
  std::vector<int> order;               // announcement order used
  std::uint8_t result = 0;

  /// Share splitting, announcements and result are mutually consistent with
  /// the given private bits.
  bool consistent(const std::vector<std::uint8_t>& private_bits) const;
};

/// Retry bounds for the anonymous subroutines.
struct AnonRetryCaps {
  int round_retries = 10000;    // claimless rounds per index assignment
  int collision_retries = 1000; // collided rounds per index assignment
  int redraw_retries = 10000;   // out-of-range redraws in random_agent

  bool operator==(const AnonRetryCaps&) const = default;
};

/// Classical anonymity layer: parity rounds over private pairwise channels and
/// the subroutines derived from the logical OR. One instance per election;
/// not safe for concurrent use (methods reuse internal buffers).
class AnonLayer {
 public:
  AnonLayer(AnonConfig cfg, PairwiseTransport& transport);

  const AnonConfig& config() const { return cfg_; }
  PairwiseTransport& transport() { return *transport_; }

  /// One parity round over the given private bits. Result is exactly
  /// xor_i p_i for honest agents.
  ParityRoundTranscript parity_round(const std::vector<std::uint8_t>& private_bits,
                                     const std::vector<int>& order, Rng& rng);

  /// Anonymous OR of the agents' bits: 1 iff any of the N*S parity rounds
  /// (fresh uniform p_i for 1-inputs, forced 0 otherwise) came out 1.
  int logical_or(const std::vector<std::uint8_t>& inputs, Rng& rng);

  struct OrResult {
    int output = 0;
    /// Per agent: some round's parity disagreed with the agent's own bit,
    /// i.e. evidence that another agent held a 1.
    std::vector<std::uint8_t> saw_external_one;
  };
  OrResult logical_or_detailed(const std::vector<std::uint8_t>& inputs, Rng& rng);

  /// The designated agent anonymously announces a Bernoulli(q) sample;
  /// everyone else inputs 0.
  int random_bit(int secret_agent, double q, Rng& rng);

  /// The designated agent anonymously announces a uniform agent index,
  /// one OR per binary digit. Out-of-range compositions are redrawn.
  int random_agent(int secret_agent, Rng& rng);

  struct UniqueIndexStats {
    int empty_rounds = 0;
    int collisions = 0;
  };

  /// Assigns every agent a secret index; the result is a permutation of
  /// 0..N-1 (index = voting slot). Throws AnonAbort past the retry caps.
  std::vector<int> unique_index(Rng& rng, UniqueIndexStats* stats = nullptr);

  AnonRetryCaps caps;

 private:
  std::uint8_t run_parity(const std::vector<std::uint8_t>& private_bits, Rng& rng);

  AnonConfig cfg_;
  PairwiseTransport* transport_;
  // reusable workspaces, to keep the N*S inner loop allocation-free
  BitMatrix out_, in_;
  std::vector<std::uint8_t> p_, claim_, collide_;
  OrResult or_result_;
  OrderingSet orderings_;
};

}  // namespace qvote
