#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qvote/params.hpp"
#include "qvote/rng.hpp"

using namespace qvote;

namespace {

// Independent long-double evaluations of the closed forms.
long double soundness_oracle(long double eps, long double delta, long double samples,
                             long double n) {
  const long double gap = eps * eps - 4.0L * delta * delta;
  return expl(-samples * gap / (16.0L * n * eps * eps));
}

long double zeta_oracle(long double eta, long double eps, int n) {
  const long double intact = expl(static_cast<long double>(n) * log1pl(-eta));
  return intact * eps * sqrtl(1.0L + eps * eps) + (1.0L - intact);
}

long double success_oracle(long double delta, int pi, int n) {
  return expl(static_cast<long double>(n) * pi * log1pl(-delta));
}

struct FeasibleInput {
  double epsilon, delta, target;
  int n_agents;
};

FeasibleInput random_feasible(Rng& rng) {
  FeasibleInput in;
  in.n_agents = 1 + static_cast<int>(rng.below(8));
  in.delta = rng.uniform() * 0.2;
  in.epsilon = 2.0 * in.delta + 0.01 + rng.uniform() * (1.0 - 2.0 * in.delta - 0.01);
  in.target = 0.001 + rng.uniform() * 0.5;
  return in;
}

}  // namespace

TEST_CASE("soundness_bound closed-form values") {
  SUBCASE("delta 0, eps 1, N 1, M 4 gives exp(-1)") {
    const auto b = soundness_bound(1.0, 0.0, 4, 1);
    CHECK_FALSE(b.vacuous);
    CHECK(b.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  }
  SUBCASE("eps = 2*delta is vacuous") {
    const auto b = soundness_bound(0.2, 0.1, 10, 4);
    CHECK(b.vacuous);
    CHECK(b.value == 1.0);
  }
  SUBCASE("strictly decreasing in M on the feasible side") {
    double prev = 1.0;
    for (int m = 1; m <= 20; ++m) {
      const auto b = soundness_bound(0.3, 0.05, m, 4);
      if (prev > 0.0) {
        CHECK(b.value < prev);  // strict until the bound underflows to 0
      } else {
        CHECK(b.value == 0.0);
      }
      prev = b.value;
    }
  }
  SUBCASE("increasing in delta at fixed eps and M") {
    double prev = -1.0;
    for (double d = 0.0; d < 0.14; d += 0.01) {
      const auto b = soundness_bound(0.3, d, 8, 4);
      CHECK(b.value > prev);
      prev = b.value;
    }
  }
}

TEST_CASE("min_samples inverts the bound") {
  SUBCASE("target 1/e, delta 0, eps 1, N 1 needs 16 samples") {
    CHECK(min_samples(1.0 / std::numbers::e, 1.0, 0.0, 1) == doctest::Approx(16.0).epsilon(1e-12));
  }
  SUBCASE("infeasible regime throws") {
    CHECK_THROWS_AS(min_samples(0.01, 0.1, 0.06, 4), ConfigError);
  }
  SUBCASE("round trip: the bound at the ceiled M never exceeds the target") {
    StdRng rng(61);
    for (int t = 0; t < 100; ++t) {
      const FeasibleInput in = random_feasible(rng);
      const double samples = min_samples(in.target, in.epsilon, in.delta, in.n_agents);
      const int m = min_coin_count(in.target, in.epsilon, in.delta, in.n_agents);
      CHECK(std::ldexp(1.0, m) >= samples);
      const auto b = soundness_bound(in.epsilon, in.delta, m, in.n_agents);
      CHECK(b.value <= in.target * (1.0 + 1e-12));
      const auto exact = soundness_bound_at(in.epsilon, in.delta, samples, in.n_agents);
      CHECK(exact.value == doctest::Approx(in.target).epsilon(1e-9));
    }
  }
  SUBCASE("finite for every eps above 2*delta at the published operating point") {
    for (double eps = 2 * 0.0376 + 1e-4; eps <= 1.0; eps += 0.01) {
      CHECK(std::isfinite(min_samples(0.01, eps, 0.0376, 4)));
    }
  }
}

TEST_CASE("success_prob closed-form values") {
  CHECK(success_prob(0.0, 7, 4) == 1.0);
  // (1 - 0.0376)^36
  CHECK(success_prob(0.0376, 9, 4) ==
        doctest::Approx(static_cast<double>(success_oracle(0.0376L, 9, 4))).epsilon(1e-12));
  CHECK(success_prob(0.0376, 9, 4) == doctest::Approx(0.2517).epsilon(1e-3));
  // literal fixed-size exponent matches when N = 4
  CHECK(success_prob(0.0376, 9, 4, true) == success_prob(0.0376, 9, 4));
  CHECK(success_prob(0.0376, 9, 5, true) == success_prob(0.0376, 9, 4));

  SUBCASE("monotone decreasing in each argument") {
    CHECK(success_prob(0.05, 3, 4) < success_prob(0.04, 3, 4));
    CHECK(success_prob(0.05, 4, 4) < success_prob(0.05, 3, 4));
    CHECK(success_prob(0.05, 3, 5) < success_prob(0.05, 3, 4));
  }
}

TEST_CASE("privacy_zeta closed-form values") {
  CHECK(privacy_zeta(0.0, 0.0, 4).value == 0.0);
  CHECK(privacy_zeta(1.0, 0.7, 4).value == 1.0);
  const auto z = privacy_zeta(0.01, 0.1, 4);
  CHECK_FALSE(z.clamped);
  CHECK(z.value == doctest::Approx(0.13594269422645).epsilon(1e-12));
  // clamping is flagged, never silent
  const auto big = privacy_zeta(0.0, 1.0, 4);
  CHECK(big.clamped);
  CHECK(big.value == 1.0);
}

TEST_CASE("pe_rounds composes the per-round leakage") {
  CHECK(pe_rounds(0.25, 0.25) == 1);
  CHECK(pe_rounds(0.6, 0.01) == 10);
  CHECK(pe_rounds(0.599, 0.01) == 9);
  CHECK_THROWS_AS(pe_rounds(1.0, 0.01), ConfigError);
  CHECK_THROWS_AS(pe_rounds(0.5, 1.5), ContractError);

  SUBCASE("non-increasing in zeta for a fixed target") {
    long long prev = 1LL << 40;
    for (double z = 0.9; z > 0.05; z -= 0.05) {
      const long long pi = pe_rounds(z, 0.01);
      CHECK(pi <= prev);
      prev = pi;
    }
  }
}

TEST_CASE("high-precision agreement on random feasible inputs") {
  StdRng rng(62);
  for (int t = 0; t < 100; ++t) {
    const FeasibleInput in = random_feasible(rng);
    const int m = 1 + static_cast<int>(rng.below(20));
    const auto b = soundness_bound(in.epsilon, in.delta, m, in.n_agents);
    const long double oracle =
        soundness_oracle(in.epsilon, in.delta, ldexpl(1.0L, m), in.n_agents);
    CHECK(std::abs(b.value - static_cast<double>(oracle)) <= 1e-12);

    const double eta = rng.uniform() * 0.9;
    const auto z = privacy_zeta(eta, in.epsilon, in.n_agents);
    const long double zo = zeta_oracle(eta, in.epsilon, in.n_agents);
    if (!z.clamped) CHECK(std::abs(z.value - static_cast<double>(zo)) <= 1e-12);

    const int pi = 1 + static_cast<int>(rng.below(12));
    const double s = success_prob(in.delta, pi, in.n_agents);
    CHECK(std::abs(s - static_cast<double>(success_oracle(in.delta, pi, in.n_agents))) <= 1e-12);
  }
}

TEST_CASE("plan brackets the published operating point") {
  const SecurityPlan p = plan({0.0376, 4, 0.99, 0.01, std::nullopt});
  CHECK(p.coin_count >= 12);
  CHECK(p.coin_count <= 14);
  CHECK(p.pe_rounds >= 8);
  CHECK(p.pe_rounds <= 10);
  CHECK(p.confidence >= 0.99);
  CHECK(p.zeta_composed <= 0.01);
  CHECK(p.epsilon > 2 * 0.0376);

  SUBCASE("deterministic output") {
    const SecurityPlan q = plan({0.0376, 4, 0.99, 0.01, std::nullopt});
    CHECK(p.epsilon == q.epsilon);
    CHECK(p.coin_count == q.coin_count);
    CHECK(p.pe_rounds == q.pe_rounds);
    CHECK(p.zeta_round == q.zeta_round);
    CHECK(p.cost == q.cost);
  }
}

TEST_CASE("plan edge cases") {
  SUBCASE("a perfect source needs strictly fewer coins") {
    const SecurityPlan perfect = plan({0.0, 4, 0.99, 0.01, std::nullopt});
    const SecurityPlan noisy = plan({0.0376, 4, 0.99, 0.01, std::nullopt});
    CHECK(perfect.coin_count < noisy.coin_count);
  }
  SUBCASE("zero confidence target allows M = 0") {
    const SecurityPlan p = plan({0.0376, 4, 0.0, 0.01, std::nullopt});
    CHECK(p.coin_count == 0);
  }
  SUBCASE("epsilon override is honored") {
    const SecurityPlan p = plan({0.0376, 4, 0.99, 0.01, 0.5});
    CHECK(p.epsilon == 0.5);
    CHECK_THROWS_AS(plan({0.0376, 4, 0.99, 0.01, 0.07}), ConfigError);
  }
  SUBCASE("infeasible targets name the constraint") {
    CHECK_THROWS_AS(plan({0.49, 4, 0.99, 0.01, std::nullopt}), ConfigError);
    CHECK_THROWS_AS(plan({0.0376, 4, 1.0, 0.01, std::nullopt}), ConfigError);
    CHECK_THROWS_AS(plan({0.0376, 4, 0.99, 0.0, std::nullopt}), ConfigError);
  }
}
