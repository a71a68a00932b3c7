#include "qarb/qcnc.hpp"

#include <cmath>

#include "qarb/rng.hpp"

namespace qarb::qcnc {

std::atomic<std::int64_t>& global_query_counter() {
  static std::atomic<std::int64_t> counter{0};
  return counter;
}

int CncConfig::effective_repetitions() const {
  if (repetitions > 0) return repetitions;
  return static_cast<int>(std::ceil(2.0 * kappa0));
}

int CncConfig::effective_phase_bits() const {
  if (phase_bits > 0) return phase_bits;
  return static_cast<int>(std::ceil(std::log2(kappa0))) + 2;
}

void CncConfig::validate() const {
  if (!(kappa0 > 1.0)) {
    throw ConfigError("kappa0 must exceed 1");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
  if (effective_repetitions() < 1) {
    throw ConfigError("repetitions must be positive");
  }
  const int need = static_cast<int>(std::ceil(std::log2(kappa0))) + 1;
  if (effective_phase_bits() < need) {
    throw ConfigError("phase_bits must be at least ceil(log2 kappa0) + 1 to "
                      "resolve 1/kappa0");
  }
}

double readout_to_eigenvalue(int readout, int phase_bits) {
  const double denom = static_cast<double>(1 << phase_bits);
  const double phi = static_cast<double>(readout) / denom;
  // Phase phi = lambda/2 mod 1; fold the +/- branches by magnitude.
  return 2.0 * std::min(phi, 1.0 - phi);
}

double round_cost(double kappa0, double epsilon, Eigen::Index d) {
  const double log_eps = std::log2(1.0 / epsilon);
  const double ham = std::sqrt(static_cast<double>(d)) *
                     (1.0 + std::log2(kappa0 / epsilon));
  return kappa0 * log_eps * ham;
}

namespace {

// Born weight of the input outside the nonzero spectrum.  Decides how a
// zero readout is interpreted: on a null-free input it can only come from
// an eigenvalue below the readout resolution (a detection); with real
// null-space overlap it is a padding artifact and is discarded.
struct SpectralView {
  qsim::UnitaryMatrix u;
  double null_mass;
};

SpectralView analyze(const embed::HermitianEmbedding& a,
                     const qsim::StateVector& input) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix);
  const Eigen::VectorXd lambda = es.eigenvalues();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  if (lmax > 1.0 + 1e-9) {
    // Eigenvalues past 1 wrap around the phase circle at t = pi and fold
    // onto small readouts; only spectrally normalized embeddings qualify.
    throw ShapeError("embedding spectrum exceeds 1; comparator runs need "
                     "spectral normalization");
  }
  const double zero_tol = lmax * 1e-9;

  qsim::CVector phases(lambda.size());
  double off_null = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    phases(k) = std::polar(1.0, lambda(k) * kEvolutionTime);
    const qsim::Complex amp =
        es.eigenvectors().col(k).cast<qsim::Complex>().dot(input.amplitudes());
    if (std::abs(lambda(k)) > zero_tol) off_null += std::norm(amp);
  }
  qsim::CMatrix u = es.eigenvectors().cast<qsim::Complex>() *
                    phases.asDiagonal() *
                    es.eigenvectors().transpose().cast<qsim::Complex>();
  return SpectralView{qsim::UnitaryMatrix(std::move(u)),
                      std::max(0.0, 1.0 - off_null)};
}

}  // namespace

CncOutcome qcnc(const embed::HermitianEmbedding& a,
                const qsim::StateVector& input, const CncConfig& cfg,
                std::uint64_t rng_seed) {
  cfg.validate();
  if (input.dim() != a.dim()) {
    throw ShapeError("input state does not match the embedding dimension");
  }
  const int bits = cfg.effective_phase_bits();
  const int reps = cfg.effective_repetitions();

  const SpectralView view = analyze(a, input);
  if (view.null_mass > 1.0 - 1e-12) {
    throw NullSpectrumAnomaly(
        "input state lies entirely in the null space of the embedding");
  }
  const bool zero_is_detection = view.null_mass < 1e-9;

  // Rounds are i.i.d. on fresh copies of the input, so one exact outcome
  // distribution serves every round.
  const std::vector<double> dist = qsim::phase_estimation(view.u, input, bits);

  const double per_round = round_cost(cfg.kappa0, cfg.epsilon, a.original_cols);
  const double threshold = 1.0 / cfg.kappa0;

  auto rng = make_rng(rng_seed);
  CncOutcome out;
  out.worst_case_queries = std::llround(per_round * reps);
  int zero_readouts = 0;
  for (int r = 1; r <= reps; ++r) {
    const int k = qsim::sample_outcome(dist, rng);
    out.repetitions_used = r;
    if (k == 0 && !zero_is_detection) {
      ++zero_readouts;  // padding artifact, not a comparison result
      continue;
    }
    const double lam = readout_to_eigenvalue(k, bits);
    out.sampled_eigenvalue = lam;
    if (lam < threshold) {
      out.flag = true;
      break;
    }
  }
  out.queries = std::llround(per_round * out.repetitions_used);
  global_query_counter().fetch_add(out.queries, std::memory_order_relaxed);
  if (zero_readouts == out.repetitions_used) {
    throw NullSpectrumAnomaly(
        "every phase readout was exactly zero: input state has no usable "
        "overlap with the nonzero spectrum");
  }
  return out;
}

double qcnc_success_probability(const embed::HermitianEmbedding& a,
                                const qsim::StateVector& input,
                                double kappa0) {
  if (!(kappa0 > 1.0)) {
    throw ConfigError("kappa0 must exceed 1");
  }
  const auto overlaps = embed::eigen_overlaps(a, input);
  const double threshold = 1.0 / kappa0;
  // Null-space tolerance consistent with the embedding's normalized spectrum.
  double lmax = 0.0;
  for (const auto& [lam, w] : overlaps) lmax = std::max(lmax, std::abs(lam));
  const double zero_tol = lmax * 1e-9;
  double p = 0.0;
  for (const auto& [lam, w] : overlaps) {
    const double mag = std::abs(lam);
    if (mag > zero_tol && mag < threshold) p += w;
  }
  return p;
}

}  // namespace qarb::qcnc
