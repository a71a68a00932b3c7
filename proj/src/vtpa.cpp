#include "qarb/vtpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "qarb/rng.hpp"

namespace qarb::vtpa {

int VtpaConfig::stages() const {
  return static_cast<int>(std::ceil(std::log2(kappa0)));
}

void VtpaConfig::validate() const {
  if (!(kappa0 > 1.0)) {
    throw ConfigError("kappa0 must exceed 1");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
  if (!(repetition_scale >= 1.0)) {
    throw ConfigError("repetition_scale must be at least 1");
  }
  const int m = stages();
  const double two_m = std::pow(2.0, m);
  if (!(two_m >= kappa0 && kappa0 > two_m / 2.0)) {
    throw ConfigError("stage count does not bracket kappa0");
  }
}

int VtpaOutcome::ones() const {
  int n = 0;
  for (int b : clock_pattern) {
    if (b != 1) break;
    ++n;
  }
  return n;
}

double stage_cost(int stage, double epsilon, Eigen::Index d) {
  const double log_eps = std::log2(1.0 / epsilon);
  return std::pow(4.0, stage) * stage * std::sqrt(static_cast<double>(d)) *
         log_eps * log_eps;
}

double cumulative_cost(int stage, double epsilon, Eigen::Index d) {
  double total = 0.0;
  for (int k = 1; k <= stage; ++k) total += stage_cost(k, epsilon, d);
  return total;
}

namespace {

qcnc::CncConfig stage_comparator_config(int j, const VtpaConfig& cfg) {
  qcnc::CncConfig c;
  c.kappa0 = std::pow(2.0, j);
  c.epsilon = cfg.epsilon;
  c.repetitions = static_cast<int>(
      std::ceil(2.0 * c.kappa0 * cfg.repetition_scale));
  c.phase_bits = j + 2;
  return c;
}

}  // namespace

VtpaOutcome vtpa(const embed::HermitianEmbedding& a,
                 const qsim::StateVector& input, const VtpaConfig& cfg,
                 std::uint64_t rng_seed) {
  cfg.validate();
  const int m = cfg.stages();

  VtpaOutcome out;
  out.clock_pattern.assign(static_cast<std::size_t>(m), 0);
  double ledger = 0.0;

  int stopped_at = 0;  // 0: ran all stages without stopping
  for (int j = 1; j <= m; ++j) {
    const qcnc::CncConfig stage_cfg = stage_comparator_config(j, cfg);
    const qcnc::CncOutcome verdict =
        qcnc::qcnc(a, input, stage_cfg, sub_seed(rng_seed, static_cast<std::uint64_t>(j)));
    ledger += stage_cost(j, cfg.epsilon, a.original_cols);
    out.stages_executed = j;
    out.rounds_sampled += verdict.repetitions_used;
    if (verdict.flag) {
      out.clock_pattern[static_cast<std::size_t>(j - 1)] = 1;
    } else {
      // C_j left |0>: the flag register flips and later stages are skipped.
      stopped_at = j;
      break;
    }
  }

  out.stopped = stopped_at != 0;
  out.total_queries = std::llround(ledger);
  if (out.stopped) {
    const int ones = stopped_at - 1;
    out.kappa_low = std::pow(2.0, ones);
    out.kappa_high = std::pow(2.0, ones + 1);
  } else {
    out.kappa_low = cfg.kappa0;
    out.kappa_high = std::numeric_limits<double>::infinity();
  }
  return out;
}

CascadeState init_cascade(const embed::HermitianEmbedding& a,
                          const qsim::StateVector& input,
                          const VtpaConfig& cfg) {
  cfg.validate();
  if (input.dim() != a.dim()) {
    throw ShapeError("input state does not match the embedding dimension");
  }
  const int m = cfg.stages();
  std::vector<int> bits(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) bits[static_cast<std::size_t>(j - 1)] = j + 2;

  qsim::RegisterLayout layout =
      qsim::RegisterLayout::for_vtpa(input.n_qubits(), cfg.kappa0, bits);

  // Everything above the system register starts at |0>.
  qsim::CVector amps =
      qsim::CVector::Zero(Eigen::Index{1} << layout.total_qubits);
  amps.head(input.dim()) = input.amplitudes();

  // Zero readouts are detections only for inputs without null-space overlap.
  double null_mass = 1.0;
  for (const auto& [lam, w] : embed::eigen_overlaps(a, input)) {
    if (std::abs(lam) > 1e-9) null_mass -= w;
  }

  CascadeState st{qsim::StateVector(std::move(amps), layout.total_qubits),
                  std::move(layout),
                  std::move(bits),
                  cfg.epsilon,
                  1,
                  null_mass < 1e-9};
  return st;
}

void stage(const embed::HermitianEmbedding& a, int j, CascadeState& state) {
  if (j != state.next_stage) {
    throw ProtocolViolation("stage " + std::to_string(j) +
                            " invoked while stage " +
                            std::to_string(state.next_stage) + " is due");
  }
  const int m = state.layout.clock.size();
  if (j < 1 || j > m) {
    throw ProtocolViolation("stage index outside 1..M");
  }
  const int b = state.stage_phase_bits[static_cast<std::size_t>(j - 1)];
  const double kappa_j = std::pow(2.0, j);

  const auto p_range = state.layout.ancillas.at("P" + std::to_string(j));

  std::vector<qsim::QubitControl> prefix;
  for (int i = 1; i < j; ++i) {
    prefix.push_back({state.layout.clock_qubit(i), true});
  }

  // One coherent QCNC pass: QPE of exp(i*pi*A) into P_j, controlled on the
  // clock prefix being all ones.
  const qsim::UnitaryMatrix u =
      qsim::hamiltonian_unitary(a.matrix, qcnc::kEvolutionTime);
  const qsim::UnitaryMatrix qpe = qsim::qpe_unitary(u, b);

  std::vector<int> targets;
  for (int q = state.layout.system.begin; q < state.layout.system.end; ++q) {
    targets.push_back(q);
  }
  for (int q = p_range.begin; q < p_range.end; ++q) targets.push_back(q);

  state.psi = qsim::apply_on_qubits(qpe, targets, prefix, state.psi);

  // C_j <- 1 on readouts that certify an eigenvalue below 1/kappa_j; a zero
  // readout counts only when the input was certified null-free.
  std::vector<int> p_qubits;
  for (int q = p_range.begin; q < p_range.end; ++q) p_qubits.push_back(q);
  const double threshold = 1.0 / kappa_j;
  const bool zero_detects = state.zero_detects;
  state.psi = qsim::apply_bit_oracle(
      state.psi, p_qubits, prefix, state.layout.clock_qubit(j),
      [b, threshold, zero_detects](std::uint64_t readout) {
        if (readout == 0) return zero_detects;
        return qcnc::readout_to_eigenvalue(static_cast<int>(readout), b) <
               threshold;
      });

  // Flag flip on the branch where the prefix holds and C_j stayed |0>.
  std::vector<qsim::QubitControl> flip = prefix;
  flip.push_back({state.layout.clock_qubit(j), false});
  qsim::CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  state.psi = qsim::apply_controlled(qsim::UnitaryMatrix(x), flip,
                                     state.layout.flag_qubit, state.psi);

  state.next_stage = j + 1;
}

std::vector<ClockBranch> clock_flag_support(const CascadeState& state,
                                            double weight_tol) {
  const int m = state.layout.clock.size();
  std::map<std::pair<std::uint64_t, int>, double> mass;
  const auto dim = static_cast<std::uint64_t>(state.psi.dim());
  for (std::uint64_t i = 0; i < dim; ++i) {
    const double w = std::norm(state.psi.amplitudes()(
        static_cast<Eigen::Index>(i)));
    if (w == 0.0) continue;
    std::uint64_t pattern = 0;
    for (int jj = 1; jj <= m; ++jj) {
      pattern |= ((i >> state.layout.clock_qubit(jj)) & 1ull) << (jj - 1);
    }
    const int flag = static_cast<int>((i >> state.layout.flag_qubit) & 1ull);
    mass[{pattern, flag}] += w;
  }
  std::vector<ClockBranch> out;
  for (const auto& [key, w] : mass) {
    if (w < weight_tol) continue;
    ClockBranch br;
    br.pattern.resize(static_cast<std::size_t>(m));
    for (int jj = 0; jj < m; ++jj) {
      br.pattern[static_cast<std::size_t>(jj)] =
          static_cast<int>((key.first >> jj) & 1ull);
    }
    br.flag = key.second;
    br.weight = w;
    out.push_back(std::move(br));
  }
  return out;
}

ScalingReport query_ledger(const std::vector<LedgerEntry>& outcomes) {
  if (outcomes.empty()) {
    throw DegenerateInput("query ledger needs at least one outcome");
  }
  ScalingReport report;

  std::map<double, std::pair<double, int>> by_kappa0;
  std::map<int, std::pair<double, int>> by_band;
  for (const auto& e : outcomes) {
    auto& [sum, n] = by_kappa0[e.kappa0];
    sum += e.queries;
    n += 1;
    // Band j: true kappa in [2^(j-1), 2^j); kappa below 2 lands in band 1.
    int band = 1;
    if (e.true_kappa >= 2.0) {
      band = static_cast<int>(std::floor(std::log2(e.true_kappa))) + 1;
    }
    auto& [bsum, bn] = by_band[band];
    bsum += e.queries;
    bn += 1;
  }

  for (const auto& [k0, agg] : by_kappa0) {
    report.per_kappa0.push_back(
        {k0, agg.first / static_cast<double>(agg.second), agg.second});
  }

  const double eps = outcomes.front().epsilon;
  const Eigen::Index d = outcomes.front().d;
  const double log_eps = std::log2(1.0 / eps);
  for (const auto& [band, agg] : by_band) {
    BandStat bs;
    bs.band = band;
    bs.count = agg.second;
    bs.mean_queries = agg.first / static_cast<double>(agg.second);
    bs.model_queries = cumulative_cost(band, eps, d);
    bs.envelope = std::pow(4.0, band + 1) * band / 3.0 *
                  std::sqrt(static_cast<double>(d)) * log_eps * log_eps;
    bs.envelope_ok = bs.model_queries <= bs.envelope * (1.0 + 1e-9);
    report.bands.push_back(bs);
  }

  if (report.per_kappa0.size() >= 2) {
    // Least-squares slope of log2(T_avg) on log2(kappa0).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(report.per_kappa0.size());
    for (const auto& pk : report.per_kappa0) {
      const double x = std::log2(pk.kappa0);
      const double y = std::log2(pk.t_avg);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report.slope_valid = true;
  }
  return report;
}

}  // namespace qarb::vtpa
