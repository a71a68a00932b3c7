// Test-only oracles, kept independent of the library code paths they check.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracles {

// Textbook phase-estimation kernel: probability that a b-bit register reads
// k for a single eigenphase phi, |(1/2^b) sum_j exp(2 pi i j (phi - k/2^b))|^2.
inline double qpe_kernel(double phi, int k, int bits) {
  const auto n = static_cast<double>(1 << bits);
  const double delta = phi - static_cast<double>(k) / n;
  const double x = std::numbers::pi * delta;
  const double sin_den = std::sin(x);
  if (std::abs(sin_den) < 1e-15) return 1.0;  // exact bin
  const double sin_num = std::sin(n * x);
  const double amp = sin_num / (n * sin_den);
  return amp * amp;
}

// Outcome distribution for a mixture of eigenphases with given weights.
inline std::vector<double> qpe_distribution(
    const std::vector<std::pair<double, double>>& phase_weights, int bits) {
  std::vector<double> dist(static_cast<std::size_t>(1) << bits, 0.0);
  for (const auto& [phi, w] : phase_weights) {
    for (std::size_t k = 0; k < dist.size(); ++k) {
      dist[k] += w * qpe_kernel(phi, static_cast<int>(k), bits);
    }
  }
  return dist;
}

// Plain normal-equations least squares (Gaussian elimination), the
// hand-rolled check for the SVD-based solver.
inline Eigen::VectorXd normal_equations_fit(const Eigen::MatrixXd& x,
                                            const Eigen::VectorXd& y) {
  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::VectorXd xty = x.transpose() * y;
  const Eigen::Index d = xtx.rows();
  Eigen::MatrixXd a = xtx;
  Eigen::VectorXd b = xty;
  for (Eigen::Index col = 0; col < d; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < d; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    a.row(col).swap(a.row(piv));
    std::swap(b(col), b(piv));
    for (Eigen::Index r = col + 1; r < d; ++r) {
      const double f = a(r, col) / a(col, col);
      a.row(r) -= f * a.row(col);
      b(r) -= f * b(col);
    }
  }
  Eigen::VectorXd beta(d);
  for (Eigen::Index r = d - 1; r >= 0; --r) {
    double acc = b(r);
    for (Eigen::Index c = r + 1; c < d; ++c) acc -= a(r, c) * beta(c);
    beta(r) = acc / a(r, r);
  }
  return beta;
}

}  // namespace oracles
