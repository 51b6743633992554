#include "qvote/anon.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qvote {

void AnonConfig::validate() const {
  if (n_agents < 2) throw ConfigError("anon layer needs at least 2 agents");
  if (security < 1) throw ConfigError("anon security parameter must be >= 1");
}

bool OrderingSet::valid(int n_agents) const {
  if (orders.size() != static_cast<std::size_t>(n_agents)) return false;
  std::vector<std::uint8_t> last_seen(static_cast<std::size_t>(n_agents), 0);
  for (const auto& ord : orders) {
    if (ord.size() != static_cast<std::size_t>(n_agents)) return false;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_agents), 0);
    for (int a : ord) {
      if (a < 0 || a >= n_agents || seen[static_cast<std::size_t>(a)]) return false;
      seen[static_cast<std::size_t>(a)] = 1;
    }
    const int last = ord.back();
    if (last_seen[static_cast<std::size_t>(last)]) return false;
    last_seen[static_cast<std::size_t>(last)] = 1;
  }
  return true;
}

namespace {

void shuffle_tail(std::vector<int>& v, std::size_t keep_prefix, Rng& rng) {
  for (std::size_t i = v.size(); i > keep_prefix + 1; --i) {
    const std::size_t j = keep_prefix + static_cast<std::size_t>(rng.below(i - keep_prefix));
    std::swap(v[i - 1], v[j]);
  }
}

void shuffle(std::vector<int>& v, Rng& rng) { shuffle_tail(v, 0, rng); }

}  // namespace

OrderingSet make_orderings(int n_agents, Rng& rng) {
  // Uniform subject to the constraint: draw the distinct last announcers as a
  // permutation, then a uniform order of the rest for each.
  const std::size_t n = static_cast<std::size_t>(n_agents);
  std::vector<int> lasts(n);
  std::iota(lasts.begin(), lasts.end(), 0);
  shuffle(lasts, rng);

  OrderingSet set;
  set.orders.assign(n, {});
  for (std::size_t k = 0; k < n; ++k) {
    auto& ord = set.orders[k];
    ord.reserve(n);
    for (int a = 0; a < n_agents; ++a) {
      if (a != lasts[k]) ord.push_back(a);
    }
    shuffle(ord, rng);
    ord.push_back(lasts[k]);
  }
  return set;
}

bool ParityRoundTranscript::consistent(const std::vector<std::uint8_t>& private_bits) const {
  const int n = shares.size();
  if (private_bits.size() != static_cast<std::size_t>(n)) return false;
  if (announced.size() != static_cast<std::size_t>(n)) return false;
  std::uint8_t z = 0;
  for (int i = 0; i < n; ++i) {
    std::uint8_t row = 0;
    for (int j = 0; j < n; ++j) row ^= shares.at(i, j);
    if (row != (private_bits[static_cast<std::size_t>(i)] & 1u)) return false;
  }
  for (int j = 0; j < n; ++j) {
    std::uint8_t col = 0;
    for (int i = 0; i < n; ++i) col ^= shares.at(i, j);
    if (col != announced[static_cast<std::size_t>(j)]) return false;
    z ^= col;
  }
  return z == result;
}

AnonLayer::AnonLayer(AnonConfig cfg, PairwiseTransport& transport)
    : cfg_(cfg), transport_(&transport) {
  cfg_.validate();
  const int n = cfg_.n_agents;
  out_.resize(n);
  in_.resize(n);
  p_.assign(static_cast<std::size_t>(n), 0);
  claim_.assign(static_cast<std::size_t>(n), 0);
  collide_.assign(static_cast<std::size_t>(n), 0);
  or_result_.saw_external_one.assign(static_cast<std::size_t>(n), 0);
}

std::uint8_t AnonLayer::run_parity(const std::vector<std::uint8_t>& private_bits, Rng& rng) {
  const int n = cfg_.n_agents;
  // Each agent splits p_i into N shares with matching parity.
  for (int i = 0; i < n; ++i) {
    std::uint8_t acc = 0;
    for (int j = 0; j + 1 < n; ++j) {
      const std::uint8_t b = static_cast<std::uint8_t>(rng.bit());
      out_.at(i, j) = b;
      acc ^= b;
    }
    out_.at(i, n - 1) = static_cast<std::uint8_t>(acc ^ (private_bits[static_cast<std::size_t>(i)] & 1u));
  }
  transport_->exchange(out_, in_);
  std::uint8_t z = 0;
  for (int j = 0; j < n; ++j) {
    std::uint8_t zj = 0;
    for (int i = 0; i < n; ++i) zj ^= in_.at(i, j);
    z ^= zj;
  }
  return z;
}

ParityRoundTranscript AnonLayer::parity_round(const std::vector<std::uint8_t>& private_bits,
                                              const std::vector<int>& order, Rng& rng) {
  const int n = cfg_.n_agents;
  if (private_bits.size() != static_cast<std::size_t>(n)) {
    throw ContractError("parity_round: expected " + std::to_string(n) + " private bits");
  }
  ParityRoundTranscript t;
  t.order = order;
  t.result = run_parity(private_bits, rng);
  t.shares = in_;
  t.announced.assign(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    std::uint8_t zj = 0;
    for (int i = 0; i < n; ++i) zj ^= in_.at(i, j);
    t.announced[static_cast<std::size_t>(j)] = zj;
  }
  return t;
}

AnonLayer::OrResult AnonLayer::logical_or_detailed(const std::vector<std::uint8_t>& inputs,
                                                   Rng& rng) {
  const int n = cfg_.n_agents;
  if (inputs.size() != static_cast<std::size_t>(n)) {
    throw ContractError("logical_or: expected " + std::to_string(n) + " inputs");
  }
  orderings_ = make_orderings(n, rng);

  or_result_.output = 0;
  std::fill(or_result_.saw_external_one.begin(), or_result_.saw_external_one.end(), 0);

  // All N*S rounds run even once the OR is decided.
  for (int block = 0; block < n; ++block) {
    for (int rep = 0; rep < cfg_.security; ++rep) {
      for (int i = 0; i < n; ++i) {
        p_[static_cast<std::size_t>(i)] =
            inputs[static_cast<std::size_t>(i)] ? static_cast<std::uint8_t>(rng.bit()) : 0;
      }
      const std::uint8_t z = run_parity(p_, rng);
      or_result_.output |= z;
      for (int i = 0; i < n; ++i) {
        or_result_.saw_external_one[static_cast<std::size_t>(i)] |=
            static_cast<std::uint8_t>(z ^ p_[static_cast<std::size_t>(i)]);
      }
    }
  }
  return or_result_;
}

int AnonLayer::logical_or(const std::vector<std::uint8_t>& inputs, Rng& rng) {
  return logical_or_detailed(inputs, rng).output;
}

int AnonLayer::random_bit(int secret_agent, double q, Rng& rng) {
  const int n = cfg_.n_agents;
  std::vector<std::uint8_t> x(static_cast<std::size_t>(n), 0);
  x[static_cast<std::size_t>(secret_agent)] = rng.bernoulli(q) ? 1 : 0;
  return logical_or(x, rng);
}

int AnonLayer::random_agent(int secret_agent, Rng& rng) {
  const int n = cfg_.n_agents;
  int k_bits = 0;
  while ((1 << k_bits) < n) ++k_bits;
  if (k_bits == 0) k_bits = 1;

  std::vector<std::uint8_t> x(static_cast<std::size_t>(n), 0);
  for (int attempt = 0; attempt < caps.redraw_retries; ++attempt) {
    const int sampled = static_cast<int>(rng.below(std::uint64_t{1} << k_bits));
    int announced = 0;
    for (int k = 0; k < k_bits; ++k) {
      std::fill(x.begin(), x.end(), 0);
      x[static_cast<std::size_t>(secret_agent)] = static_cast<std::uint8_t>((sampled >> k) & 1);
      announced |= logical_or(x, rng) << k;
    }
    if (announced < n) return announced;  // >= n: redraw, keeps the index uniform
  }
  throw AnonAbort("random_agent: redraw retries exhausted");
}

std::vector<int> AnonLayer::unique_index(Rng& rng, UniqueIndexStats* stats) {
  const int n = cfg_.n_agents;
  std::vector<int> omega(static_cast<std::size_t>(n), -1);

  for (int index = 0; index < n - 1; ++index) {
    const int unassigned = n - index;
    int empty_rounds = 0;
    int collisions = 0;
    for (;;) {
      for (int i = 0; i < n; ++i) {
        claim_[static_cast<std::size_t>(i)] =
            (omega[static_cast<std::size_t>(i)] < 0 && rng.bernoulli(1.0 / unassigned)) ? 1 : 0;
      }
      const OrResult res = logical_or_detailed(claim_, rng);
      if (res.output == 0) {
        if (++empty_rounds > caps.round_retries) {
          throw AnonAbort("unique_index: claimless round retries exhausted");
        }
        if (stats) ++stats->empty_rounds;
        continue;
      }
      // Claimants test whether some other agent also held a 1 this round.
      for (int i = 0; i < n; ++i) {
        collide_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
            claim_[static_cast<std::size_t>(i)] & res.saw_external_one[static_cast<std::size_t>(i)]);
      }
      const int collided = logical_or(collide_, rng);
      int winner = -1;
      int winners = 0;
      if (!collided) {
        for (int i = 0; i < n; ++i) {
          if (claim_[static_cast<std::size_t>(i)] && !collide_[static_cast<std::size_t>(i)]) {
            winner = i;
            ++winners;
          }
        }
      }
      // The 2^-(N*S) missed-collision path would assign a duplicate index;
      // the scheduler treats it as a collision and repeats the round.
      if (collided || winners != 1) {
        if (++collisions > caps.collision_retries) {
          throw AnonAbort("unique_index: collision retries exhausted");
        }
        if (stats) ++stats->collisions;
        continue;
      }
      omega[static_cast<std::size_t>(winner)] = index;
      break;
    }
  }
  for (auto& w : omega) {
    if (w < 0) w = n - 1;
  }
  return omega;
}

}  // namespace qvote
