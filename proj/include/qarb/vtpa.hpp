#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qarb/embedding.hpp"
#include "qarb/qcnc.hpp"
#include "qarb/qsim.hpp"

namespace qarb::vtpa {

struct VtpaConfig {
  double kappa0 = 16.0;   // final threshold; M = ceil(log2 kappa0)
  double epsilon = 0.05;  // per-stage precision
  // Multiplier on the per-stage repetition count ceil(2 * kappa_j).
  // 1.0 reproduces the comparator's default; screens raise it to push the
  // per-stage miss probability under their budget.
  double repetition_scale = 1.0;

  int stages() const;  // M
  void validate() const;
};

struct VtpaOutcome {
  bool stopped = false;             // flag register read 1
  std::vector<int> clock_pattern;   // length M, prefix-of-ones shape
  double kappa_low = 0.0;           // inferred interval [low, high)
  double kappa_high = 0.0;          // +inf encoded as infinity()
  std::int64_t total_queries = 0;   // cumulative stage ledger T_j
  int stages_executed = 0;
  int rounds_sampled = 0;           // comparator rounds actually drawn

  int ones() const;
};

// Stage ledger cost for QCNC(kappa_k = 2^k, eps): 4^k * k * sqrt(d) * log2(1/eps)^2.
double stage_cost(int stage, double epsilon, Eigen::Index d);

// Cumulative cost T_j = sum_{k<=j} stage_cost(k).
double cumulative_cost(int stage, double epsilon, Eigen::Index d);

// Measured cascade: stages j = 1..M run QCNC(2^j, eps); the first stage
// whose comparator finds no small eigenvalue leaves its clock at 0, flips
// the stop flag and ends the run.  Stage j consumes the sub-seed
// sub_seed(rng_seed, j), which progressive screening reuses round-for-round.
VtpaOutcome vtpa(const embed::HermitianEmbedding& a,
                 const qsim::StateVector& input, const VtpaConfig& cfg,
                 std::uint64_t rng_seed);

// ---------------------------------------------------------------------------
// Coherent mode: the full clock/flag register trace on tiny instances.

struct CascadeState {
  qsim::StateVector psi;
  qsim::RegisterLayout layout;
  std::vector<int> stage_phase_bits;
  double epsilon = 0.0;
  int next_stage = 1;        // 1-based; stages must run in order
  bool zero_detects = true;  // zero readouts count as detections (null-free input)
};

CascadeState init_cascade(const embed::HermitianEmbedding& a,
                          const qsim::StateVector& input,
                          const VtpaConfig& cfg);

// Applies algorithm stage j: conditional on clocks C_1..C_{j-1} = 1, one
// phase-estimation pass of QCNC(2^j) writes its verdict into C_j (ancilla
// P_j keeps the phase readout), then the flag is flipped on the branch
// where the prefix holds and C_j = 0.
void stage(const embed::HermitianEmbedding& a, int j, CascadeState& state);

// Support of the final state over (clock pattern, flag) pairs with weights.
struct ClockBranch {
  std::vector<int> pattern;
  int flag = 0;
  double weight = 0.0;
};
std::vector<ClockBranch> clock_flag_support(const CascadeState& state,
                                            double weight_tol = 1e-12);

// ---------------------------------------------------------------------------
// Query ledger / scaling report.

struct LedgerEntry {
  double kappa0 = 0.0;
  double true_kappa = 0.0;   // oracle value recorded with the ensemble
  double queries = 0.0;
  double epsilon = 0.0;
  Eigen::Index d = 0;
};

struct BandStat {
  int band = 0;  // j: true kappa in [2^(j-1), 2^j), floored at band 1
  double mean_queries = 0.0;   // empirical, includes stage-decision noise
  double model_queries = 0.0;  // cumulative cost T_j of an ideal band-j run
  double envelope = 0.0;       // (4^{j+1} j / 3) sqrt(d) log2(1/eps)^2
  bool envelope_ok = false;    // T_j <= envelope (the closed-form bound)
  int count = 0;
};

struct ScalingReport {
  struct PerKappa0 {
    double kappa0 = 0.0;
    double t_avg = 0.0;
    int count = 0;
  };
  std::vector<PerKappa0> per_kappa0;
  std::vector<BandStat> bands;  // pooled across entries
  double slope = 0.0;           // d log2(T_avg) / d log2(kappa0)
  bool slope_valid = false;     // needs >= 2 distinct kappa0
};

ScalingReport query_ledger(const std::vector<LedgerEntry>& outcomes);

}  // namespace qarb::vtpa
