#include "qvote/engine.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <string>

namespace qvote {

int ElectionConfig::digit_rounds() const {
  int k = 0;
  while ((1 << k) < n_candidates) ++k;
  return std::max(k, 1);
}

void ElectionConfig::validate() const {
  if (n_agents < 2 || n_agents > kMaxQubits) {
    throw ConfigError("n_agents out of range [2," + std::to_string(kMaxQubits) +
                      "]: " + std::to_string(n_agents));
  }
  if (n_candidates < 2) throw ConfigError("n_candidates must be >= 2");
  if (pe_rounds < 1) throw ConfigError("pe_rounds must be >= 1");
  if (coin_count < 0) throw ConfigError("coin_count must be >= 0");
  if (!(failure_threshold > 0.0 && failure_threshold < 1.0)) {
    throw ConfigError("failure_threshold must lie in (0,1)");
  }
  if (anon_security < 1) throw ConfigError("anon_security must be >= 1");
  if (votes.size() != static_cast<std::size_t>(n_agents)) {
    throw ConfigError("votes must list one value per agent");
  }
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] < 0 || votes[i] >= n_candidates) {
      throw ConfigError("votes[" + std::to_string(i) + "] out of range [0," +
                        std::to_string(n_candidates - 1) + "]: " + std::to_string(votes[i]));
    }
  }
  noise.validate();
  if (retry.subround_attempts < 1 || retry.threshold_restarts < 1) {
    throw ConfigError("retry caps must be >= 1");
  }
}

bool SubBulletin::complete() const {
  for (auto f : row_filled) {
    if (!f) return false;
  }
  return rows.size() > 0;
}

BulletinBoard::BulletinBoard(int digits, int pe, int agents)
    : digit_rounds(digits), pe_rounds(pe), n_agents(agents) {
  grid.assign(static_cast<std::size_t>(digits) * pe, SubBulletin(agents));
}

SubBulletin& BulletinBoard::at(int digit, int pe) {
  return grid[static_cast<std::size_t>(digit) * pe_rounds + pe];
}

const SubBulletin& BulletinBoard::at(int digit, int pe) const {
  return grid[static_cast<std::size_t>(digit) * pe_rounds + pe];
}

bool BulletinBoard::complete() const {
  if (grid.empty()) return false;
  for (const auto& sb : grid) {
    if (!sb.complete()) return false;
  }
  return true;
}

std::uint8_t ElectionVectors::row_parity(int digit, int pe, int slot) const {
  return e[(static_cast<std::size_t>(digit) * pe_rounds + pe) * n_agents + slot];
}

std::uint8_t ElectionVectors::final_bit(int slot, int digit) const {
  return final_bits[static_cast<std::size_t>(slot) * digit_rounds + digit];
}

ElectionVectors compute_election_vectors(const BulletinBoard& board) {
  if (!board.complete()) {
    throw ContractError("compute_election_vectors: bulletin board is incomplete");
  }
  ElectionVectors v;
  v.digit_rounds = board.digit_rounds;
  v.pe_rounds = board.pe_rounds;
  v.n_agents = board.n_agents;
  v.e.assign(board.grid.size() * board.n_agents, 0);
  v.final_bits.assign(static_cast<std::size_t>(board.n_agents) * board.digit_rounds, 0);
  for (int k = 0; k < board.digit_rounds; ++k) {
    for (int p = 0; p < board.pe_rounds; ++p) {
      const SubBulletin& sb = board.at(k, p);
      for (int n = 0; n < board.n_agents; ++n) {
        std::uint8_t bit = 0;
        for (int j = 0; j < board.n_agents; ++j) bit ^= sb.rows.at(n, j);
        v.e[(static_cast<std::size_t>(k) * board.pe_rounds + p) * board.n_agents + n] = bit;
        v.final_bits[static_cast<std::size_t>(n) * board.digit_rounds + k] ^= bit;
      }
    }
  }
  return v;
}

Tally compute_tally(const ElectionVectors& vectors, int n_candidates) {
  Tally t;
  t.counts.assign(static_cast<std::size_t>(n_candidates), 0);
  t.election_vector.resize(static_cast<std::size_t>(vectors.n_agents));
  for (int n = 0; n < vectors.n_agents; ++n) {
    int value = 0;
    for (int k = 0; k < vectors.digit_rounds; ++k) {
      value |= static_cast<int>(vectors.final_bit(n, k)) << k;
    }
    t.election_vector[static_cast<std::size_t>(n)] = value;
    if (value < n_candidates) {
      t.counts[static_cast<std::size_t>(value)] += 1;
    } else {
      t.invalid += 1;
    }
  }
  return t;
}

GateDecision gate_subround(int voting_agent, int coin_count, AnonLayer& anon, Rng& rng) {
  const double q = std::ldexp(1.0, -coin_count);  // 2^-M
  return anon.random_bit(voting_agent, q, rng) ? GateDecision::Vote : GateDecision::Verify;
}

std::vector<std::uint8_t> voting_subround(const SubroundLabel& label, int pe_round_total,
                                          StateSource& source, int voter_agent, int vote_bit,
                                          VoterPrivateState& voter_state, AnonLayer& anon,
                                          Rng& rng, const RetryCaps& caps,
                                          const BroadcastHook& hook, RunStats* stats) {
  const int n = anon.config().n_agents;
  const bool last_pe = label.pe + 1 >= pe_round_total;
  std::vector<std::uint8_t> abort_flags(static_cast<std::size_t>(n), 0);

  for (int attempt = 0; attempt < caps.subround_attempts; ++attempt) {
    if (stats) ++stats->vote_attempts;
    const DensityState& state = source.next();
    AngleVector hadamard;
    hadamard.values.assign(static_cast<std::size_t>(n), 0.0);
    OutcomeVector sent = sample_measurement(state, hadamard, rng);

    // First Pi-1 rounds carry fresh randomness; the last one fixes the XOR
    // chain to the vote bit.
    const std::uint8_t toggle =
        last_pe ? static_cast<std::uint8_t>((vote_bit ^ voter_state.accumulated) & 1)
                : static_cast<std::uint8_t>(rng.bit());
    sent[static_cast<std::size_t>(voter_agent)] ^= toggle;

    std::vector<std::uint8_t> published = sent;
    if (hook) hook(label, published);

    // Each agent checks its own entry; the voter also audits the row parity
    // against the encoded bit.
    for (int j = 0; j < n; ++j) {
      abort_flags[static_cast<std::size_t>(j)] =
          published[static_cast<std::size_t>(j)] != sent[static_cast<std::size_t>(j)] ? 1 : 0;
    }
    if (parity(published) != toggle) abort_flags[static_cast<std::size_t>(voter_agent)] = 1;

    if (anon.logical_or(abort_flags, rng)) {
      if (stats) {
        ++stats->abort_or_fires;
        ++stats->subround_retries;
      }
      continue;  // discard the row, fresh state
    }
    if (!last_pe) voter_state.accumulated ^= toggle;
    return published;
  }
  throw RetryAbort("voting subround retries exhausted at digit " + std::to_string(label.digit) +
                   ", pe " + std::to_string(label.pe) + ", slot " + std::to_string(label.slot));
}

namespace {

class ElectionDriver {
 public:
  ElectionDriver(const ElectionConfig& config, StateSource& source, PairwiseTransport& transport,
                 const BroadcastHook& hook)
      : cfg_(config),
        source_(source),
        hook_(hook),
        rng_(config.seed),
        anon_({config.n_agents, config.anon_security}, transport),
        counters_(config.n_agents) {
    anon_.caps = config.anon_retry;
  }

  ElectionResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    ElectionResult res;
    const int n = cfg_.n_agents;
    const int digits = cfg_.digit_rounds();

    // Phase 1: secret orderings.
    res.secret_indices = anon_.unique_index(rng_);
    res.voting_order.assign(static_cast<std::size_t>(n), -1);
    for (int agent = 0; agent < n; ++agent) {
      res.voting_order[static_cast<std::size_t>(res.secret_indices[static_cast<std::size_t>(agent)])] =
          agent;
    }

    // Phase 2: cast the votes.
    res.board = BulletinBoard(digits, cfg_.pe_rounds, n);
    std::vector<VoterPrivateState> voter_state(static_cast<std::size_t>(n));
    for (int agent = 0; agent < n; ++agent) {
      voter_state[static_cast<std::size_t>(agent)].secret_index =
          res.secret_indices[static_cast<std::size_t>(agent)];
    }

    for (int k = 0; k < digits; ++k) {
      for (auto& vs : voter_state) vs.accumulated = 0;
      for (int p = 0; p < cfg_.pe_rounds; ++p) {
        PeRoundSummary summary;
        summary.digit = k;
        summary.pe = p;
        summary.trials.assign(static_cast<std::size_t>(n), 0);
        summary.rejections.assign(static_cast<std::size_t>(n), 0);

        // Rows stay buffered until the whole privacy-enhancement round is done.
        std::vector<std::vector<std::uint8_t>> pending(static_cast<std::size_t>(n));
        for (int slot = 0; slot < n; ++slot) {
          pending[static_cast<std::size_t>(slot)] = run_subround({k, p, slot}, voter_state, summary);
        }
        SubBulletin& sb = res.board.at(k, p);
        for (int slot = 0; slot < n; ++slot) {
          for (int j = 0; j < n; ++j) {
            sb.rows.at(slot, j) = pending[static_cast<std::size_t>(slot)][static_cast<std::size_t>(j)];
          }
          sb.row_filled[static_cast<std::size_t>(slot)] = 1;
        }

        summary.deltas.assign(static_cast<std::size_t>(n), 0.0);
        std::uint64_t tt = 0, rr = 0;
        for (int j = 0; j < n; ++j) {
          const auto t = summary.trials[static_cast<std::size_t>(j)];
          const auto r = summary.rejections[static_cast<std::size_t>(j)];
          summary.deltas[static_cast<std::size_t>(j)] =
              t ? static_cast<double>(r) / static_cast<double>(t) : 0.0;
          tt += t;
          rr += r;
        }
        summary.pooled_delta = tt ? static_cast<double>(rr) / static_cast<double>(tt) : 0.0;
        stats_.summaries.push_back(std::move(summary));
      }
    }

    // Phase 3: tally.
    res.vectors = compute_election_vectors(res.board);
    res.tally = compute_tally(res.vectors, cfg_.n_candidates);
    stats_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.stats = std::move(stats_);
    return res;
  }

  RunStats take_stats() { return std::move(stats_); }

 private:
  std::vector<std::uint8_t> run_subround(const SubroundLabel& label,
                                         std::vector<VoterPrivateState>& voter_state,
                                         PeRoundSummary& summary) {
    const int voter = voter_of_slot(label.slot, voter_state);
    const int vote_bit = (cfg_.votes[static_cast<std::size_t>(voter)] >> label.digit) & 1;

    int restarts = 0;
    for (;;) {
      counters_.reset();
      for (;;) {
        ++stats_.total_rounds;
        const GateDecision gate = gate_subround(voter, cfg_.coin_count, anon_, rng_);
        if (gate == GateDecision::Verify) {
          const VerificationResult vres =
              run_verification_subround(source_.next(), counters_, voter, anon_, rng_);
          ++stats_.verifications;
          summary.trials[static_cast<std::size_t>(vres.verifier)] += 1;
          if (vres.verdict == Verdict::Reject) {
            summary.rejections[static_cast<std::size_t>(vres.verifier)] += 1;
          }
          record_event(label, SubroundType::Verification, vres.verifier, vres.verdict);
          continue;
        }
        // Vote gate: the threshold check runs first.
        const std::vector<double> deltas = failure_rates(counters_);
        bool tripped = false;
        for (double d : deltas) tripped |= d > cfg_.failure_threshold;
        if (tripped) {
          ++stats_.threshold_restarts;
          if (++restarts > cfg_.retry.threshold_restarts) {
            throw ThresholdAbort("failure threshold restarts exhausted at digit " +
                                 std::to_string(label.digit) + ", pe " + std::to_string(label.pe) +
                                 ", slot " + std::to_string(label.slot));
          }
          break;  // back to the counter reset
        }
        std::vector<std::uint8_t> row = voting_subround(
            label, cfg_.pe_rounds, source_, voter, vote_bit,
            voter_state[static_cast<std::size_t>(voter)], anon_, rng_, cfg_.retry, hook_, &stats_);
        record_event(label, SubroundType::Vote, -1, Verdict::Accept);
        return row;
      }
    }
  }

  int voter_of_slot(int slot, const std::vector<VoterPrivateState>& voter_state) const {
    for (int agent = 0; agent < cfg_.n_agents; ++agent) {
      if (voter_state[static_cast<std::size_t>(agent)].secret_index == slot) return agent;
    }
    throw ContractError("no voter assigned to slot " + std::to_string(slot));
  }

  void record_event(const SubroundLabel& label, SubroundType type, int verifier, Verdict verdict) {
    StatsEvent ev;
    ev.digit = label.digit;
    ev.pe = label.pe;
    ev.slot = label.slot;
    ev.type = type;
    ev.verifier = verifier;
    ev.verdict = verdict;
    ev.deltas = failure_rates(counters_);
    stats_.events.push_back(std::move(ev));
  }

  ElectionConfig cfg_;
  StateSource& source_;
  BroadcastHook hook_;
  StdRng rng_;
  AnonLayer anon_;
  VerifierCounters counters_;
  RunStats stats_;
};

}  // namespace

ElectionResult run_election(const ElectionConfig& config, StateSource& source,
                            PairwiseTransport& transport, const BroadcastHook& hook) {
  config.validate();
  ElectionDriver driver(config, source, transport, hook);
  try {
    return driver.run();
  } catch (ElectionAbort& abort) {
    abort.partial_stats = std::make_shared<RunStats>(driver.take_stats());
    throw;
  }
}

ElectionResult run_election(const ElectionConfig& config) {
  config.validate();
  NoisyGhzSource source(config.n_agents, config.noise);
  LocalTransport transport;
  return run_election(config, source, transport);
}

PoolsResult run_pools(const std::vector<ElectionConfig>& configs) {
  if (configs.empty()) throw ConfigError("run_pools: no pools configured");
  const int candidates = configs.front().n_candidates;
  for (const auto& cfg : configs) {
    if (cfg.n_candidates != candidates) {
      throw ConfigError("run_pools: pools disagree on the candidate count");
    }
  }

  PoolsResult res;
  res.merged.counts.assign(static_cast<std::size_t>(candidates), 0);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    ElectionResult pool = run_election(configs[i]);
    for (auto& ev : pool.stats.events) ev.pool = static_cast<int>(i);
    for (auto& s : pool.stats.summaries) s.pool = static_cast<int>(i);
    for (int v = 0; v < candidates; ++v) {
      res.merged.counts[static_cast<std::size_t>(v)] += pool.tally.counts[static_cast<std::size_t>(v)];
    }
    res.merged.invalid += pool.tally.invalid;
    res.merged.election_vector.insert(res.merged.election_vector.end(),
                                      pool.tally.election_vector.begin(),
                                      pool.tally.election_vector.end());
    res.pools.push_back(std::move(pool));
  }
  return res;
}

}  // namespace qvote
