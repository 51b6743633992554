#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qvote/errors.hpp"
#include "qvote/rng.hpp"

namespace qvote {

using cd = std::complex<double>;

/// Dimension cap for the exact density-matrix path (2^10 = 1024).
inline constexpr int kMaxQubits = 10;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;    // smallest eigenvalue >= -kPsdTol
inline constexpr double kProbSumTol = 1e-10;
inline constexpr double kAngleSumTol = 1e-9;

enum class NoiseKind { Ideal, White };

/// Mixes the resource state with the maximally mixed state:
/// rho -> (1 - weight) * rho + weight * I / 2^N.
struct NoiseModel {
  NoiseKind kind = NoiseKind::Ideal;
  double weight = 0.0;

  void validate() const;  // weight in [0,1]; Ideal forces weight == 0
  bool operator==(const NoiseModel&) const = default;
};

/// Exact 2^N x 2^N density matrix, row-major. Basis index bit j is qubit j
/// (agent j), least significant bit first.
class DensityState {
 public:
  explicit DensityState(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return std::size_t{1} << n_qubits_; }

  cd& at(std::size_t row, std::size_t col) { return m_[row * dim() + col]; }
  const cd& at(std::size_t row, std::size_t col) const { return m_[row * dim() + col]; }

  const std::vector<cd>& data() const { return m_; }

  double trace_real() const;
  bool is_hermitian(double tol = kHermitianTol) const;
  double min_eigenvalue() const;

  /// Checks the three density-matrix invariants; throws ContractError.
  void validate() const;

 private:
  int n_qubits_;
  std::vector<cd> m_;
};

/// Per-agent rotation angles in [0, pi). A protocol-valid set sums to a
/// multiple of pi.
struct AngleVector {
  std::vector<double> values;

  double sum() const;
  bool sum_is_pi_multiple(double tol = kAngleSumTol) const;
  /// Nearest integer m with sum ~ m * pi.
  int pi_multiple() const;
};

using OutcomeVector = std::vector<std::uint8_t>;

int parity(const OutcomeVector& bits);

/// Rank-1 projector onto (|0...0> + |1...1>)/sqrt(2).
/// Throws ConfigError outside 2 <= n_qubits <= kMaxQubits.
DensityState make_ghz(int n_qubits);

DensityState apply_noise(const DensityState& state, const NoiseModel& model);

/// Overlap <GHZ| state |GHZ> with the ideal GHZ state of the same size.
double ghz_fidelity(const DensityState& state);

/// Born-rule probability of every outcome vector in the rotated product basis
/// |+_theta> = (|0> + e^{i theta}|1>)/sqrt(2), outcome bit 0 -> "+".
/// Outcome index bit j is agent j's bit. Brute-force contraction over all
/// matrix elements; this is the reference oracle for the sampler.
std::vector<double> outcome_distribution(const DensityState& state, const AngleVector& angles);

/// Projective measurement of all qubits in the rotated product basis.
/// Implemented by rotating the state qubit-by-qubit and sampling the diagonal,
/// an independent route from outcome_distribution's contraction.
OutcomeVector sample_measurement(const DensityState& state, const AngleVector& angles, Rng& rng);

}  // namespace qvote
