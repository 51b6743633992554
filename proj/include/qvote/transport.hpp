#pragma once

#include <cstdint>
#include <vector>

#include "qvote/errors.hpp"

namespace qvote {

/// Row-major n x n bit matrix; entry (i, j) is the bit agent i sends to agent j.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(int n) : n_(n), v_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const { return n_; }
  std::uint8_t& at(int i, int j) { return v_[static_cast<std::size_t>(i) * n_ + j]; }
  std::uint8_t at(int i, int j) const { return v_[static_cast<std::size_t>(i) * n_ + j]; }

  void resize(int n) {
    n_ = n;
    v_.assign(static_cast<std::size_t>(n) * n, 0);
  }
  void clear() { std::fill(v_.begin(), v_.end(), 0); }

  bool operator==(const BitMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> v_;
};

/// Synchronous all-to-all exchange over private, authenticated pairwise
/// channels. The channels themselves are assumed honest; fault injection for
/// tests goes through this interface.
class PairwiseTransport {
 public:
  virtual ~PairwiseTransport() = default;

  /// Delivers outgoing(i, j) to agent j; throws AnonAbort on channel failure.
  virtual void exchange(const BitMatrix& outgoing, BitMatrix& delivered) = 0;

  /// Private unicast of a real value (verification angles travel this way).
  virtual double unicast(int /*from*/, int /*to*/, double value) { return value; }
};

/// In-process transport: every bit arrives unchanged.
class LocalTransport final : public PairwiseTransport {
 public:
  void exchange(const BitMatrix& outgoing, BitMatrix& delivered) override { delivered = outgoing; }
};

}  // namespace qvote
