#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qarb/errors.hpp"
#include "qarb/qsim.hpp"

namespace qarb::embed {

enum class NormalizationMode {
  kSpectral,   // max |eigenvalue| scaled to 1
  kFrobenius,  // ||A||_F scaled to sqrt(d)
};

// Zero-padded Hermitian block matrix [[0, X], [X^T, 0]] over the next
// power-of-two dimension.  Row block occupies indices [0, N), column block
// [N, N+d), padding the rest.  Eigenvalues are +/- the singular values of X
// plus padding zeros.
struct HermitianEmbedding {
  Eigen::MatrixXd matrix;  // 2^n x 2^n, symmetric
  Eigen::Index original_rows = 0;   // N
  Eigen::Index original_cols = 0;   // d
  NormalizationMode mode = NormalizationMode::kSpectral;
  double scale_factor = 1.0;  // divisor applied to X before embedding

  Eigen::Index dim() const { return matrix.rows(); }
  int n_qubits() const;
};

// Exact classical spectral oracle output.
struct SpectralReport {
  std::vector<double> eigenvalues;      // embedding spectrum, ascending
  std::vector<double> singular_values;  // of X, ascending
  double kappa = 0.0;                   // sigma_max / sigma_min (nonzero part)
  Eigen::Index rank = 0;
};

// Build the normalized block embedding.  X must be N x d with N >= d >= 1
// and full column rank.
HermitianEmbedding build_embedding(const Eigen::MatrixXd& x,
                                   NormalizationMode mode);

// Dense-SVD ground truth every quantum estimate is judged against.
SpectralReport exact_condition_number(const Eigen::MatrixXd& x);

// Amplitude-encodes the raw entries of X (row-major, Frobenius-normalized)
// into the trailing N*d amplitudes of the padded embedding space.
qsim::StateVector encode_data_state(const Eigen::MatrixXd& x);

// Unit state with equal overlap on every nonzero-eigenvalue eigenvector of
// the embedding (zero on the null space).  This realizes the uniform
// eigenvalue-sampling assumption the comparator analysis relies on.
qsim::StateVector uniform_eigen_state(const HermitianEmbedding& a);

// Unit state with Born mass `small_mass` on the smallest-|eigenvalue| pair
// and the remainder spread uniformly over the other nonzero eigenvectors.
// Pins the comparator's detection statistics independently of d.
qsim::StateVector small_pair_state(const HermitianEmbedding& a,
                                   double small_mass);

// Exact Born weight of `input` on each eigenpair of the embedding;
// returns (eigenvalue, weight) sorted by eigenvalue.
std::vector<std::pair<double, double>> eigen_overlaps(
    const HermitianEmbedding& a, const qsim::StateVector& input);

Eigen::Index next_power_of_two(Eigen::Index v);

}  // namespace qarb::embed
