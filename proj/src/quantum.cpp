#include "qvote/quantum.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qvote {

namespace {
constexpr double kPi = std::numbers::pi;
}

void NoiseModel::validate() const {
  if (weight < 0.0 || weight > 1.0) {
    throw ConfigError("noise.weight out of range [0,1]: " + std::to_string(weight));
  }
  if (kind == NoiseKind::Ideal && weight != 0.0) {
    throw ConfigError("ideal noise model requires weight == 0");
  }
}

DensityState::DensityState(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ConfigError("qubit count out of range [1," + std::to_string(kMaxQubits) +
                      "]: " + std::to_string(n_qubits));
  }
  m_.assign(dim() * dim(), cd{0.0, 0.0});
}

double DensityState::trace_real() const {
  double tr = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) tr += at(i, i).real();
  return tr;
}

bool DensityState::is_hermitian(double tol) const {
  for (std::size_t r = 0; r < dim(); ++r) {
    for (std::size_t c = r; c < dim(); ++c) {
      if (std::abs(at(r, c) - std::conj(at(c, r))) > tol) return false;
    }
  }
  return true;
}

double DensityState::min_eigenvalue() const {
  using Mat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> m(m_.data(), static_cast<Eigen::Index>(dim()),
                          static_cast<Eigen::Index>(dim()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityState::validate() const {
  if (!is_hermitian()) throw ContractError("density matrix is not Hermitian");
  if (std::abs(trace_real() - 1.0) > kTraceTol) {
    throw ContractError("density matrix trace differs from 1: " + std::to_string(trace_real()));
  }
  const double lo = min_eigenvalue();
  if (lo < -kPsdTol) {
    throw ContractError("density matrix is not positive semidefinite, min eigenvalue " +
                        std::to_string(lo));
  }
}

double AngleVector::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

bool AngleVector::sum_is_pi_multiple(double tol) const {
  const double r = std::fmod(sum(), kPi);
  return r <= tol || r >= kPi - tol;
}

int AngleVector::pi_multiple() const {
  return static_cast<int>(std::lround(sum() / kPi));
}

int parity(const OutcomeVector& bits) {
  int p = 0;
  for (auto b : bits) p ^= static_cast<int>(b & 1u);
  return p;
}

DensityState make_ghz(int n_qubits) {
  if (n_qubits < 2 || n_qubits > kMaxQubits) {
    throw ConfigError("GHZ size out of range [2," + std::to_string(kMaxQubits) +
                      "]: " + std::to_string(n_qubits));
  }
  DensityState rho(n_qubits);
  const std::size_t last = rho.dim() - 1;
  rho.at(0, 0) = rho.at(0, last) = rho.at(last, 0) = rho.at(last, last) = cd{0.5, 0.0};
  return rho;
}

DensityState apply_noise(const DensityState& state, const NoiseModel& model) {
  model.validate();
  if (model.kind == NoiseKind::Ideal) return state;
  DensityState out = state;
  const double keep = 1.0 - model.weight;
  const double mix = model.weight / static_cast<double>(state.dim());
  for (std::size_t r = 0; r < out.dim(); ++r) {
    for (std::size_t c = 0; c < out.dim(); ++c) {
      out.at(r, c) *= keep;
      if (r == c) out.at(r, c) += mix;
    }
  }
  return out;
}

double ghz_fidelity(const DensityState& state) {
  const std::size_t last = state.dim() - 1;
  const cd overlap =
      state.at(0, 0) + state.at(0, last) + state.at(last, 0) + state.at(last, last);
  return 0.5 * overlap.real();
}

namespace {

// <z_j | y_j at angle theta_j>, with |+_t> = (|0> + e^{it}|1>)/sqrt(2).
// z = 0 contributes 1/sqrt(2); z = 1 contributes +/- e^{i t}/sqrt(2).
cd basis_factor(int z, int y, double theta) {
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  if (z == 0) return cd{inv_sqrt2, 0.0};
  const cd phase = std::polar(inv_sqrt2, theta);
  return y == 0 ? phase : -phase;
}

void check_angles(const DensityState& state, const AngleVector& angles) {
  if (angles.values.size() != static_cast<std::size_t>(state.n_qubits())) {
    throw ContractError("angle vector length " + std::to_string(angles.values.size()) +
                        " does not match qubit count " + std::to_string(state.n_qubits()));
  }
}

// rho -> U rho U^dagger for a single-qubit unitary given by rows u0*, u1*.
void apply_single_qubit(std::vector<cd>& m, std::size_t d, int qubit, const cd u[2][2]) {
  const std::size_t mask = std::size_t{1} << qubit;
  std::vector<cd> tmp(m.size());
  // rows
  for (std::size_t r = 0; r < d; ++r) {
    const std::size_t r0 = r & ~mask;
    const std::size_t r1 = r0 | mask;
    const int rb = (r & mask) ? 1 : 0;
    for (std::size_t c = 0; c < d; ++c) {
      tmp[r * d + c] = u[rb][0] * m[r0 * d + c] + u[rb][1] * m[r1 * d + c];
    }
  }
  // columns, with U^dagger
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t c0 = c & ~mask;
    const std::size_t c1 = c0 | mask;
    const int cb = (c & mask) ? 1 : 0;
    for (std::size_t r = 0; r < d; ++r) {
      m[r * d + c] =
          tmp[r * d + c0] * std::conj(u[cb][0]) + tmp[r * d + c1] * std::conj(u[cb][1]);
    }
  }
}

}  // namespace

std::vector<double> outcome_distribution(const DensityState& state, const AngleVector& angles) {
  check_angles(state, angles);
  const std::size_t d = state.dim();
  const int n = state.n_qubits();
  std::vector<double> probs(d, 0.0);
  std::vector<cd> v(d);
  for (std::size_t y = 0; y < d; ++y) {
    for (std::size_t z = 0; z < d; ++z) {
      cd f{1.0, 0.0};
      for (int j = 0; j < n; ++j) {
        f *= basis_factor(static_cast<int>((z >> j) & 1u), static_cast<int>((y >> j) & 1u),
                          angles.values[static_cast<std::size_t>(j)]);
      }
      v[z] = f;
    }
    cd acc{0.0, 0.0};
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        acc += std::conj(v[r]) * state.at(r, c) * v[c];
      }
    }
    probs[y] = std::max(0.0, acc.real());
  }
  return probs;
}

OutcomeVector sample_measurement(const DensityState& state, const AngleVector& angles, Rng& rng) {
  check_angles(state, angles);
  const std::size_t d = state.dim();
  const int n = state.n_qubits();

  // Rotate into the measurement basis: row y of U_j is <y_theta|.
  std::vector<cd> m(state.data());
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  for (int j = 0; j < n; ++j) {
    const cd e = std::polar(inv_sqrt2, -angles.values[static_cast<std::size_t>(j)]);
    const cd u[2][2] = {{cd{inv_sqrt2, 0.0}, e}, {cd{inv_sqrt2, 0.0}, -e}};
    apply_single_qubit(m, d, j, u);
  }

  const double r = rng.uniform();
  double acc = 0.0;
  std::size_t pick = d - 1;
  for (std::size_t y = 0; y < d; ++y) {
    acc += std::max(0.0, m[y * d + y].real());
    if (r < acc) {
      pick = y;
      break;
    }
  }

  OutcomeVector bits(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) bits[static_cast<std::size_t>(j)] = (pick >> j) & 1u;
  return bits;
}

}  // namespace qvote
