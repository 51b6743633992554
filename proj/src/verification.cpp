#include "qvote/verification.hpp"

#include <cmath>
#include <numbers>

namespace qvote {

namespace {
constexpr double kPi = std::numbers::pi;
}

void VerifierCounters::reset() {
  std::fill(trials.begin(), trials.end(), 0);
  std::fill(rejections.begin(), rejections.end(), 0);
}

void VerifierCounters::check() const {
  for (std::size_t j = 0; j < trials.size(); ++j) {
    if (rejections[j] > trials[j]) {
      throw ContractError("verifier counters violated r <= t at agent " + std::to_string(j));
    }
  }
}

std::vector<double> failure_rates(const VerifierCounters& counters) {
  counters.check();
  std::vector<double> rates(counters.trials.size(), 0.0);
  for (std::size_t j = 0; j < rates.size(); ++j) {
    if (counters.trials[j] > 0) {
      rates[j] = static_cast<double>(counters.rejections[j]) /
                 static_cast<double>(counters.trials[j]);
    }
  }
  return rates;
}

AngleVector gen_angles(int n_agents, Rng& rng) {
  AngleVector angles;
  angles.values.resize(static_cast<std::size_t>(n_agents));
  double partial = 0.0;
  for (int j = 0; j + 1 < n_agents; ++j) {
    const double theta = rng.uniform() * kPi;
    angles.values[static_cast<std::size_t>(j)] = theta;
    partial += theta;
  }
  double last = std::fmod(-partial, kPi);
  if (last < 0.0) last += kPi;
  angles.values[static_cast<std::size_t>(n_agents - 1)] = last;
  return angles;
}

Verdict verify(const OutcomeVector& outcomes, const AngleVector& angles) {
  if (outcomes.size() != angles.values.size()) {
    throw ContractError("verify: outcome and angle lengths differ");
  }
  if (!angles.sum_is_pi_multiple()) {
    throw ContractError("verify: angle sum is not a multiple of pi");
  }
  const int m = angles.pi_multiple() & 1;
  return parity(outcomes) == m ? Verdict::Accept : Verdict::Reject;
}

VerificationResult run_verification_subround(const DensityState& state,
                                             VerifierCounters& counters, int voting_agent,
                                             AnonLayer& anon, Rng& rng) {
  VerificationResult res;
  res.verifier = anon.random_agent(voting_agent, rng);
  counters.trials[static_cast<std::size_t>(res.verifier)] += 1;

  res.angles = gen_angles(counters.n_agents(), rng);
  // The verifier keeps the angles private until measurement.
  for (int j = 0; j < counters.n_agents(); ++j) {
    res.angles.values[static_cast<std::size_t>(j)] = anon.transport().unicast(
        res.verifier, j, res.angles.values[static_cast<std::size_t>(j)]);
  }

  res.outcomes = sample_measurement(state, res.angles, rng);
  res.verdict = verify(res.outcomes, res.angles);
  if (res.verdict == Verdict::Reject) {
    counters.rejections[static_cast<std::size_t>(res.verifier)] += 1;
  }
  return res;
}

}  // namespace qvote
