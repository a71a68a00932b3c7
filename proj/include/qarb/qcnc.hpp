#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "qarb/embedding.hpp"
#include "qarb/qsim.hpp"

namespace qarb::qcnc {

// Process-wide monotonic oracle-call counter; comparator runs add their
// query cost with atomic increments so concurrent screens stay safe.
// Diagnostic only: reports derive totals from their own outcomes.
std::atomic<std::int64_t>& global_query_counter();

// Evolution time for U = exp(i*A*t): eigenvalues in (0, 1] map to phases
// lambda/2 in (0, 1/2], keeping the +/- branches of the block spectrum
// distinguishable after folding.
constexpr double kEvolutionTime = 3.14159265358979323846;

struct CncConfig {
  double kappa0 = 2.0;    // threshold, > 1
  double epsilon = 0.05;  // precision / failure budget, in (0,1)
  int repetitions = 0;    // 0 -> default ceil(2*kappa0)
  int phase_bits = 0;     // 0 -> default ceil(log2 kappa0) + 2

  int effective_repetitions() const;
  int effective_phase_bits() const;
  void validate() const;
};

struct CncOutcome {
  bool flag = false;              // true: eigenvalue below 1/kappa0 found
  double sampled_eigenvalue = 0;  // |lambda| of the last readout
  int repetitions_used = 0;
  std::int64_t queries = 0;            // per-round cost model, rounds used
  std::int64_t worst_case_queries = 0; // same model at full repetitions
};

// Readout k of a b-bit phase register -> |lambda| under t = pi.
double readout_to_eigenvalue(int readout, int phase_bits);

// Per-round oracle-call cost: kappa0 * log2(1/eps) Hamiltonian applications,
// each charged the simulation factor sqrt(d) * (1 + log2(kappa0/eps)).
double round_cost(double kappa0, double epsilon, Eigen::Index d);

// Decide kappa(A) >= kappa0 by repeated truncated phase estimation of
// exp(i*pi*A) on `input`: stops on the first readout whose folded magnitude
// falls below 1/kappa0.
//
// Zero readouts: on an input certified free of null-space overlap they can
// only come from true eigenvalues below the readout resolution and count as
// detections; on an input with real padding overlap they are discarded as
// padding artifacts, and if every round reads zero (or the input lies
// entirely in the null space) NullSpectrumAnomaly is thrown.
CncOutcome qcnc(const embed::HermitianEmbedding& a,
                const qsim::StateVector& input, const CncConfig& cfg,
                std::uint64_t rng_seed);

// Exact single-round detection probability under Born sampling: total
// eigen-overlap weight on |lambda| < 1/kappa0 (excluding the null space).
double qcnc_success_probability(const embed::HermitianEmbedding& a,
                                const qsim::StateVector& input, double kappa0);

}  // namespace qarb::qcnc
