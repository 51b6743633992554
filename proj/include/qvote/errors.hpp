#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace qvote {

struct RunStats;

/// Invalid static configuration: out-of-range parameter, bad schema, infeasible target.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation contract (mismatched lengths, invalid angle set, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A protocol run stopped before producing a tally.
/// Carries whatever statistics were gathered up to the abort, so callers can
/// still emit traces for a failed election.
class ElectionAbort : public std::runtime_error {
 public:
  explicit ElectionAbort(const std::string& what) : std::runtime_error(what) {}
  std::shared_ptr<RunStats> partial_stats;
};

/// Some agent's failure rate stayed above the threshold past the restart cap.
class ThresholdAbort : public ElectionAbort {
 public:
  using ElectionAbort::ElectionAbort;
};

/// The classical anonymity layer failed: channel fault or retry caps exhausted.
class AnonAbort : public ElectionAbort {
 public:
  using ElectionAbort::ElectionAbort;
};

/// An engine-level retry cap (voting subround repeats) was exhausted.
class RetryAbort : public ElectionAbort {
 public:
  using ElectionAbort::ElectionAbort;
};

}  // namespace qvote
