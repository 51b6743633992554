#pragma once

#include <cstdint>
#include <random>

namespace qvote {

/// Seeded random stream. Every protocol operation draws from an explicit
/// stream, so identical seeds reproduce identical runs. The interface is
/// virtual so tests can script individual draws.
class Rng {
 public:
  virtual ~Rng() = default;

  virtual std::uint64_t next_u64() = 0;

  /// One fair bit.
  virtual int bit() { return static_cast<int>(next_u64() & 1u); }

  /// Uniform double in [0, 1).
  virtual double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  virtual bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). Rejection sampling keeps it exactly uniform.
  virtual std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    for (;;) {
      const std::uint64_t v = next_u64();
      if (v < limit) return v % n;
    }
  }
};

/// mt19937_64-backed stream with a bit buffer for the share-heavy hot paths.
class StdRng final : public Rng {
 public:
  explicit StdRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() override { return gen_(); }

  int bit() override {
    if (nbits_ == 0) {
      buf_ = gen_();
      nbits_ = 64;
    }
    const int b = static_cast<int>(buf_ & 1u);
    buf_ >>= 1;
    --nbits_;
    return b;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t buf_ = 0;
  int nbits_ = 0;
};

}  // namespace qvote
