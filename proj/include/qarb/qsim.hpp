#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qarb/errors.hpp"

namespace qarb::qsim {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Dense statevector memory puts a hard lid on register width.
constexpr int kMaxQubits = 20;

constexpr double kNormTol = 1e-10;
constexpr double kUnitaryTol = 1e-8;

// Normalized amplitude vector over n qubits. Qubit 0 is the least
// significant bit of the basis index.
class StateVector {
 public:
  StateVector(CVector amplitudes, int n_qubits);

  static StateVector basis(int n_qubits, std::uint64_t index);

  const CVector& amplitudes() const { return amps_; }
  int n_qubits() const { return n_; }
  Eigen::Index dim() const { return amps_.size(); }
  double norm() const { return amps_.norm(); }

  Complex amplitude(std::uint64_t index) const {
    return amps_(static_cast<Eigen::Index>(index));
  }

 private:
  CVector amps_;
  int n_;
};

// Scales the vector to unit L2 norm.  Length must be a power of two.
StateVector make_state(const CVector& amplitudes);
StateVector make_state(const Eigen::VectorXd& amplitudes);

// Dense unitary; construction verifies U*U^dagger = I entrywise.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(CMatrix entries);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int n_qubits() const { return n_; }

 private:
  CMatrix m_;
  int n_;
};

// exp(i*A*t) for Hermitian A, computed exactly through the eigendecomposition.
UnitaryMatrix hamiltonian_unitary(const CMatrix& hermitian, double t);
UnitaryMatrix hamiltonian_unitary(const Eigen::MatrixXd& symmetric, double t);

// Exact outcome distribution of textbook phase estimation with `phase_bits`
// precision bits: Hadamards on the phase register, controlled powers
// U^{2^j}, inverse QFT, measurement.  Entry k is the probability of reading
// the b-bit pattern k (phase estimate k / 2^b).
std::vector<double> phase_estimation(const UnitaryMatrix& u,
                                     const StateVector& input, int phase_bits);

// One control qubit with required polarity (true = |1>, false = |0>).
struct QubitControl {
  int qubit;
  bool value;
};

// U applied on the contiguous target range [target_start, target_start + m)
// on the subspace where every control matches its polarity; identity
// elsewhere.  m = U.n_qubits().
StateVector apply_controlled(const UnitaryMatrix& u,
                             const std::vector<QubitControl>& controls,
                             int target_start, const StateVector& state);

// Same action with an explicit (possibly non-contiguous) target qubit list;
// qubit_list[0] is the least significant bit of U's index space.
StateVector apply_on_qubits(const UnitaryMatrix& u,
                            const std::vector<int>& target_qubits,
                            const std::vector<QubitControl>& controls,
                            const StateVector& state);

// |p>|c> -> |p>|c XOR f(p)> over the source qubits, optionally controlled.
// f sees the bits of `source_qubits` packed with source_qubits[0] as bit 0.
StateVector apply_bit_oracle(const StateVector& state,
                             const std::vector<int>& source_qubits,
                             const std::vector<QubitControl>& controls,
                             int target_qubit,
                             const std::function<bool(std::uint64_t)>& f);

struct MeasureResult {
  int bit;
  StateVector post;    // collapsed and renormalized
  double probability;  // Born probability of the sampled bit
};

MeasureResult measure_qubit(const StateVector& state, int qubit,
                            std::mt19937_64& rng);

// Full phase-estimation block as one dense unitary on [system, phase] with
// the system register in the low bits.  Dimension 2^phase_bits * U.dim().
UnitaryMatrix qpe_unitary(const UnitaryMatrix& u, int phase_bits);

// Draw an index from a (non-negative, ~normalized) distribution.
int sample_outcome(const std::vector<double>& distribution,
                   std::mt19937_64& rng);

// Contiguous qubit index range [begin, end).
struct QubitRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
  bool contains(int q) const { return q >= begin && q < end; }
};

// Register bookkeeping for composite circuits (VTPA cascade).
struct RegisterLayout {
  QubitRange system;
  QubitRange phase;                            // scratch QPE precision bits
  QubitRange clock;                            // C_1..C_M
  int flag_qubit = -1;                         // F
  std::map<std::string, QubitRange> ancillas;  // per-subroutine ranges P_j
  int total_qubits = 0;

  int clock_qubit(int stage_1based) const { return clock.begin + stage_1based - 1; }

  // Ranges must be pairwise disjoint and cover exactly [0, total_qubits).
  void validate() const;

  // Layout for a VTPA run: system, then P_1..P_M ancilla blocks sized
  // per stage_phase_bits, then M clock qubits, then the flag.
  // M must equal ceil(log2(kappa0)).
  static RegisterLayout for_vtpa(int system_qubits, double kappa0,
                                 const std::vector<int>& stage_phase_bits);
};

}  // namespace qarb::qsim
