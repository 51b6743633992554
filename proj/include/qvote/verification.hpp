#pragma once

#include <cstdint>
#include <vector>

#include "qvote/anon.hpp"
#include "qvote/quantum.hpp"

namespace qvote {

enum class Verdict : std::uint8_t { Accept, Reject };

/// Per-agent verification bookkeeping: trials t_j and rejections r_j seen
/// while agent j acted as verifier.
struct VerifierCounters {
  std::vector<std::uint64_t> trials;
  std::vector<std::uint64_t> rejections;

  explicit VerifierCounters(int n_agents)
      : trials(static_cast<std::size_t>(n_agents), 0),
        rejections(static_cast<std::size_t>(n_agents), 0) {}

  int n_agents() const { return static_cast<int>(trials.size()); }
  void reset();
  void check() const;  // r_j <= t_j
};

/// delta_j = r_j / t_j, defined as 0 while t_j == 0 so fresh agents never trip
/// the threshold.
std::vector<double> failure_rates(const VerifierCounters& counters);

struct VerificationResult {
  Verdict verdict = Verdict::Accept;
  int verifier = -1;
  AngleVector angles;
  OutcomeVector outcomes;
};

/// Random rotation angles theta_j in [0, pi), constructed so the sum is a
/// multiple of pi: the last angle is the mod-pi complement of the rest.
AngleVector gen_angles(int n_agents, Rng& rng);

/// Accept iff xor_j Y_j == m (mod 2) where sum theta = m * pi.
/// Throws ContractError when the angle sum is not a multiple of pi.
Verdict verify(const OutcomeVector& outcomes, const AngleVector& angles);

/// One verification subround: the voting agent anonymously selects a verifier,
/// the verifier distributes angles, everyone measures, the verdict updates the
/// verifier's counters.
VerificationResult run_verification_subround(const DensityState& state,
                                             VerifierCounters& counters, int voting_agent,
                                             AnonLayer& anon, Rng& rng);

}  // namespace qvote
