#pragma once

#include <optional>
#include <vector>

#include "qvote/errors.hpp"

namespace qvote {

struct SoundnessBound {
  double value = 1.0;
  bool vacuous = false;  // epsilon <= 2*delta: the bound carries no information
};

/// Probability bound that a bad resource state survives the verification
/// gate: exp(-2^M (eps^2 - 4 delta^2) / (16 N eps^2)), clamped to [0,1].
SoundnessBound soundness_bound(double epsilon, double delta, int coin_count, int n_agents);

/// Same bound at a real-valued sample count instead of 2^M.
SoundnessBound soundness_bound_at(double epsilon, double delta, double samples, int n_agents);

/// Smallest real sample count with soundness <= target_p:
/// 16 N eps^2 ln(1/target_p) / (eps^2 - 4 delta^2).
/// Throws ConfigError when epsilon <= 2*delta (infeasible regime).
double min_samples(double target_p, double epsilon, double delta, int n_agents);

/// ceil(log2(min_samples)), at least 0.
int min_coin_count(double target_p, double epsilon, double delta, int n_agents);

/// Lower bound on the probability that no failure-rate check trips across the
/// whole run: [(1 - delta)^N]^Pi. literal_four pins the per-round exponent to
/// 4 for cross-checking against fixed-size tabulations.
double success_prob(double delta, int pe_rounds_total, int n_agents, bool literal_four = false);

struct Clamped {
  double value = 0.0;
  bool clamped = false;
};

/// Per-round privacy leakage bound:
/// (1-eta)^N eps sqrt(1+eps^2) + (1 - (1-eta)^N), clamped to [0,1].
Clamped privacy_zeta(double eta, double epsilon, int n_agents);

/// Privacy-enhancement rounds needed to compose per-round leakage zeta down
/// to zeta_wanted: ceil(log(zeta_wanted) / log(zeta)).
/// Throws ConfigError when zeta >= 1 (no finite composition reaches the target).
long long pe_rounds(double zeta, double zeta_wanted);

struct PlanRequest {
  double delta = 0.0;
  int n_agents = 0;
  double confidence = 0.0;   // target 1 - P(C_eps)
  double zeta_wanted = 0.0;  // composed privacy target
  std::optional<double> epsilon;  // override for reproduction runs
};

struct PlanRow {
  double epsilon = 0.0;
  int coin_count = 0;
  long long pe_rounds = 0;
  double zeta_round = 0.0;
  double cost = 0.0;
  bool feasible = false;
};

struct SecurityPlan {
  double epsilon = 0.0;
  int coin_count = 0;            // M
  long long pe_rounds = 0;       // Pi
  double samples_required = 0.0; // real-valued lower bound on 2^M
  double soundness = 0.0;        // delivered P(C_eps) at the chosen M
  double confidence = 0.0;       // 1 - soundness
  double success_probability = 0.0;
  double eta = 0.0;              // privacy evaluation point
  double zeta_round = 0.0;
  double zeta_composed = 0.0;
  double cost = 0.0;             // 2^M * Pi per digit round
  bool zeta_clamped = false;
  std::vector<PlanRow> table;    // epsilon sweep for display
};

/// Derives (epsilon, M, Pi) from the measured threshold and the confidence and
/// privacy targets. Deterministic; throws ConfigError naming the binding
/// constraint when the targets are infeasible.
SecurityPlan plan(const PlanRequest& request);

}  // namespace qvote
