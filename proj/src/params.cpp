#include "qvote/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qvote {

namespace {

// Grid resolution for the epsilon search.
constexpr double kEpsilonStep = 1e-3;
// Operating margin above the vacuous boundary eps = 2*delta, where the sample
// requirement diverges and is maximally sensitive to threshold mis-estimation.
constexpr double kEpsilonMargin = 0.025;

void check_soundness_domain(double epsilon, int n_agents) {
  if (!(epsilon > 0.0)) throw ContractError("epsilon must be positive");
  if (n_agents < 1) throw ContractError("n_agents must be >= 1");
}

}  // namespace

SoundnessBound soundness_bound_at(double epsilon, double delta, double samples, int n_agents) {
  check_soundness_domain(epsilon, n_agents);
  if (samples < 0.0) throw ContractError("sample count must be >= 0");
  const double gap = epsilon * epsilon - 4.0 * delta * delta;
  if (gap <= 0.0) return {1.0, true};
  const double exponent = samples * gap / (16.0 * n_agents * epsilon * epsilon);
  return {std::clamp(std::exp(-exponent), 0.0, 1.0), false};
}

SoundnessBound soundness_bound(double epsilon, double delta, int coin_count, int n_agents) {
  if (coin_count < 0) throw ContractError("coin_count must be >= 0");
  return soundness_bound_at(epsilon, delta, std::ldexp(1.0, coin_count), n_agents);
}

double min_samples(double target_p, double epsilon, double delta, int n_agents) {
  check_soundness_domain(epsilon, n_agents);
  if (!(target_p > 0.0 && target_p <= 1.0)) {
    throw ContractError("target probability must lie in (0,1]");
  }
  const double gap = epsilon * epsilon - 4.0 * delta * delta;
  if (gap <= 0.0) {
    throw ConfigError("infeasible soundness target: epsilon <= 2*delta leaves the bound vacuous");
  }
  return 16.0 * n_agents * epsilon * epsilon * std::log(1.0 / target_p) / gap;
}

int min_coin_count(double target_p, double epsilon, double delta, int n_agents) {
  const double samples = min_samples(target_p, epsilon, delta, n_agents);
  int m = 0;
  while (std::ldexp(1.0, m) < samples) ++m;
  return m;
}

double success_prob(double delta, int pe_rounds_total, int n_agents, bool literal_four) {
  if (!(delta >= 0.0 && delta < 1.0)) throw ContractError("delta must lie in [0,1)");
  if (pe_rounds_total < 1) throw ContractError("pe_rounds_total must be >= 1");
  const int per_round = literal_four ? 4 : n_agents;
  return std::pow(1.0 - delta, static_cast<double>(per_round) * pe_rounds_total);
}

Clamped privacy_zeta(double eta, double epsilon, int n_agents) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ContractError("eta must lie in [0,1]");
  if (epsilon < 0.0) throw ContractError("epsilon must be >= 0");
  if (n_agents < 1) throw ContractError("n_agents must be >= 1");
  const double intact = std::pow(1.0 - eta, n_agents);
  const double raw = intact * epsilon * std::sqrt(1.0 + epsilon * epsilon) + (1.0 - intact);
  return {std::clamp(raw, 0.0, 1.0), raw > 1.0 || raw < 0.0};
}

long long pe_rounds(double zeta, double zeta_wanted) {
  if (!(zeta_wanted > 0.0 && zeta_wanted < 1.0)) {
    throw ContractError("zeta_wanted must lie in (0,1)");
  }
  if (!(zeta > 0.0)) throw ContractError("zeta must be positive");
  if (zeta >= 1.0) {
    throw ConfigError("infeasible privacy target: per-round zeta >= 1 never composes down");
  }
  const double ratio = std::log(zeta_wanted) / std::log(zeta);
  return std::max(1LL, static_cast<long long>(std::ceil(ratio)));
}

namespace {

struct PlanPoint {
  double epsilon = 0.0;
  double samples = 0.0;
  int coin_count = 0;
  SoundnessBound delivered;
  double eta = 0.0;
  Clamped zeta;
  long long rounds = 0;
  bool feasible = false;
};

PlanPoint evaluate_point(const PlanRequest& req, double epsilon, double target_p) {
  PlanPoint pt;
  pt.epsilon = epsilon;
  if (epsilon <= 2.0 * req.delta || epsilon > 1.0) return pt;
  pt.samples = min_samples(target_p, epsilon, req.delta, req.n_agents);
  pt.coin_count = min_coin_count(target_p, epsilon, req.delta, req.n_agents);
  pt.delivered = soundness_bound(epsilon, req.delta, pt.coin_count, req.n_agents);

  // Privacy is evaluated at the failure-allowance regime, not at the delivered
  // soundness bound: one delta-rate allowance per agent plus one for the
  // voting round's own state.
  pt.eta = std::max({1.0 - std::pow(1.0 - req.delta, req.n_agents + 1), pt.delivered.value,
                     target_p < 1.0 ? target_p : 0.0});
  pt.zeta = privacy_zeta(pt.eta, epsilon, req.n_agents);
  if (pt.zeta.value >= 1.0) return pt;  // never composes down to the target
  pt.rounds = pe_rounds(pt.zeta.value, req.zeta_wanted);
  pt.feasible = true;
  return pt;
}

}  // namespace

SecurityPlan plan(const PlanRequest& req) {
  if (!(req.delta >= 0.0 && req.delta < 0.5)) {
    throw ConfigError("plan: measured delta must lie in [0,0.5) so that some epsilon > 2*delta exists");
  }
  if (req.n_agents < 1) throw ConfigError("plan: n_agents must be >= 1");
  if (!(req.confidence >= 0.0 && req.confidence < 1.0)) {
    throw ConfigError("plan: confidence target must lie in [0,1)");
  }
  if (!(req.zeta_wanted > 0.0 && req.zeta_wanted < 1.0)) {
    throw ConfigError("plan: zeta_wanted must lie in (0,1)");
  }
  const double target_p = 1.0 - req.confidence;

  double chosen_eps = 0.0;
  if (req.epsilon) {
    chosen_eps = *req.epsilon;
    if (chosen_eps <= 2.0 * req.delta || chosen_eps > 1.0) {
      throw ConfigError("plan: epsilon override must lie in (2*delta, 1]");
    }
  } else {
    // Smallest grid point above the margin; small epsilon favours per-round
    // privacy at the price of a larger sample budget.
    const double floor_eps = 2.0 * req.delta * (1.0 + kEpsilonMargin);
    long long k = static_cast<long long>(std::floor(floor_eps / kEpsilonStep)) + 1;
    chosen_eps = static_cast<double>(k) * kEpsilonStep;
    while (chosen_eps <= 2.0 * req.delta) {
      ++k;
      chosen_eps = static_cast<double>(k) * kEpsilonStep;
    }
    if (chosen_eps > 1.0) {
      throw ConfigError("plan: no epsilon grid point available in (2*delta, 1]");
    }
  }

  const PlanPoint chosen = evaluate_point(req, chosen_eps, target_p);
  if (!chosen.feasible) {
    throw ConfigError(
        "plan: privacy constraint infeasible at epsilon " + std::to_string(chosen_eps) +
        " (per-round zeta >= 1)");
  }

  SecurityPlan out;
  out.epsilon = chosen.epsilon;
  out.coin_count = chosen.coin_count;
  out.pe_rounds = chosen.rounds;
  out.samples_required = chosen.samples;
  out.soundness = chosen.delivered.value;
  out.confidence = 1.0 - chosen.delivered.value;
  out.success_probability =
      success_prob(req.delta, static_cast<int>(chosen.rounds), req.n_agents);
  out.eta = chosen.eta;
  out.zeta_round = chosen.zeta.value;
  out.zeta_composed = std::pow(chosen.zeta.value, static_cast<double>(chosen.rounds));
  out.zeta_clamped = chosen.zeta.clamped;
  out.cost = std::ldexp(1.0, chosen.coin_count) * static_cast<double>(chosen.rounds);

  // Sweep for the trade-off table: the chosen point plus coarser steps up to
  // the privacy-feasibility edge.
  for (double eps = chosen_eps; eps <= 1.0 + 1e-12; eps += 0.05) {
    const PlanPoint pt = evaluate_point(req, eps, target_p);
    PlanRow row;
    row.epsilon = pt.epsilon;
    row.coin_count = pt.coin_count;
    row.pe_rounds = pt.rounds;
    row.zeta_round = pt.zeta.value;
    row.feasible = pt.feasible;
    row.cost = pt.feasible ? std::ldexp(1.0, pt.coin_count) * static_cast<double>(pt.rounds) : 0.0;
    out.table.push_back(row);
  }
  return out;
}

}  // namespace qvote
