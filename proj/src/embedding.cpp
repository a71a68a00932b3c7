#include "qarb/embedding.hpp"

#include <algorithm>
#include <cmath>

namespace qarb::embed {

namespace {

// Relative threshold below which a singular value counts as exactly zero.
double zero_threshold(const Eigen::VectorXd& singular_values,
                      Eigen::Index rows, Eigen::Index cols) {
  const double smax = singular_values.size() ? singular_values(0) : 0.0;
  return smax * static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * 16.0;
}

}  // namespace

Eigen::Index next_power_of_two(Eigen::Index v) {
  Eigen::Index p = 1;
  while (p < v) p <<= 1;
  return p;
}

int HermitianEmbedding::n_qubits() const {
  int n = 0;
  Eigen::Index d = dim();
  while (d > 1) {
    d >>= 1;
    ++n;
  }
  return n;
}

SpectralReport exact_condition_number(const Eigen::MatrixXd& x) {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) {
    throw DegenerateInput("condition number of the zero matrix is undefined");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const Eigen::VectorXd sv = svd.singularValues();  // descending
  const double tol = zero_threshold(sv, x.rows(), x.cols());

  SpectralReport report;
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  std::sort(report.singular_values.begin(), report.singular_values.end());

  double smin_nonzero = 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) {
      ++rank;
      smin_nonzero = sv(i);
    }
  }
  report.rank = rank;
  report.kappa = sv(0) / smin_nonzero;

  // Embedding spectrum: +/- each singular value plus padding zeros.
  const Eigen::Index dim = next_power_of_two(x.rows() + x.cols());
  report.eigenvalues.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    report.eigenvalues.push_back(-sv(i));
    report.eigenvalues.push_back(sv(i));
  }
  report.eigenvalues.resize(static_cast<std::size_t>(dim), 0.0);
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end());
  return report;
}

HermitianEmbedding build_embedding(const Eigen::MatrixXd& x,
                                   NormalizationMode mode) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (d < 1 || n < d) {
    throw ShapeError("embedding requires N >= d >= 1");
  }
  const SpectralReport oracle = exact_condition_number(x);
  if (oracle.rank < d) {
    throw RankDeficient("X has an exactly zero singular value (rank " +
                        std::to_string(oracle.rank) + " < " +
                        std::to_string(d) + ")");
  }

  double scale = 1.0;
  if (mode == NormalizationMode::kSpectral) {
    // Block spectrum is +/- sigma_i, so max |eigenvalue| = sigma_max.
    scale = oracle.singular_values.back();
  } else {
    // ||A||_F^2 = 2 ||X||_F^2 for the block matrix.
    scale = std::sqrt(2.0) * x.norm() / std::sqrt(static_cast<double>(d));
  }

  const Eigen::Index dim = next_power_of_two(n + d);
  HermitianEmbedding emb;
  emb.matrix = Eigen::MatrixXd::Zero(dim, dim);
  emb.matrix.block(0, n, n, d) = x / scale;
  emb.matrix.block(n, 0, d, n) = x.transpose() / scale;
  emb.original_rows = n;
  emb.original_cols = d;
  emb.mode = mode;
  emb.scale_factor = scale;
  return emb;
}

qsim::StateVector encode_data_state(const Eigen::MatrixXd& x) {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) {
    throw DegenerateInput("cannot encode the zero matrix");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index dim = next_power_of_two(n + d);
  const Eigen::Index entries = n * d;
  if (entries > dim) {
    throw ShapeError("matrix has more entries than the embedding space");
  }
  Eigen::VectorXd amps = Eigen::VectorXd::Zero(dim);
  const Eigen::Index offset = dim - entries;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      amps(offset + i * d + j) = x(i, j);
    }
  }
  return qsim::make_state(amps);
}

qsim::StateVector uniform_eigen_state(const HermitianEmbedding& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix);
  const Eigen::VectorXd lambda = es.eigenvalues();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  if (lmax == 0.0) {
    throw DegenerateInput("embedding has an all-zero spectrum");
  }
  const double tol = lmax * 1e-9;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(a.dim());
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (std::abs(lambda(k)) > tol) {
      Eigen::VectorXd v = es.eigenvectors().col(k);
      // Canonical sign for determinism.
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12) {
          if (v(i) < 0) v = -v;
          break;
        }
      }
      psi += v;
      ++count;
    }
  }
  psi /= std::sqrt(static_cast<double>(count));
  // Orthonormal summands give unit norm up to roundoff.
  return qsim::make_state(psi);
}

qsim::StateVector small_pair_state(const HermitianEmbedding& a,
                                   double small_mass) {
  if (!(small_mass > 0.0 && small_mass <= 1.0)) {
    throw ConfigError("small_mass must lie in (0, 1]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix);
  const Eigen::VectorXd lambda = es.eigenvalues();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  if (lmax == 0.0) {
    throw DegenerateInput("embedding has an all-zero spectrum");
  }
  const double tol = lmax * 1e-9;

  double min_mag = lmax;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const double mag = std::abs(lambda(k));
    if (mag > tol && mag < min_mag) min_mag = mag;
  }
  std::vector<Eigen::Index> small, rest;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const double mag = std::abs(lambda(k));
    if (mag <= tol) continue;
    if (mag < min_mag * (1.0 + 1e-9)) {
      small.push_back(k);
    } else {
      rest.push_back(k);
    }
  }
  const double mass = rest.empty() ? 1.0 : small_mass;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(a.dim());
  for (Eigen::Index k : small) {
    Eigen::VectorXd v = es.eigenvectors().col(k);
    psi += v * std::sqrt(mass / static_cast<double>(small.size()));
  }
  for (Eigen::Index k : rest) {
    Eigen::VectorXd v = es.eigenvectors().col(k);
    psi += v * std::sqrt((1.0 - mass) / static_cast<double>(rest.size()));
  }
  return qsim::make_state(psi);
}

std::vector<std::pair<double, double>> eigen_overlaps(
    const HermitianEmbedding& a, const qsim::StateVector& input) {
  if (input.dim() != a.dim()) {
    throw ShapeError("input state does not match the embedding dimension");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(a.dim()));
  for (Eigen::Index k = 0; k < a.dim(); ++k) {
    const qsim::Complex amp =
        es.eigenvectors().col(k).cast<qsim::Complex>().dot(input.amplitudes());
    out.emplace_back(es.eigenvalues()(k), std::norm(amp));
  }
  return out;
}

}  // namespace qarb::embed
