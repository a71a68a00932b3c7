#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qarb/embedding.hpp"
#include "qarb/rng.hpp"

using namespace qarb;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

Eigen::MatrixXd hilbert(Eigen::Index n) {
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      h(i, j) = 1.0 / static_cast<double>(i + j + 1);
    }
  }
  return h;
}

}  // namespace

TEST_CASE("1x1 block embeds to the Pauli-X structure") {
  Eigen::MatrixXd x(1, 1);
  x << 1.0;
  const auto emb = embed::build_embedding(x, embed::NormalizationMode::kSpectral);
  CHECK(emb.dim() == 2);
  CHECK(emb.matrix(0, 1) == doctest::Approx(1.0));
  CHECK(emb.matrix(1, 0) == doctest::Approx(1.0));
  CHECK(emb.matrix(0, 0) == 0.0);
  const auto report = embed::exact_condition_number(x);
  CHECK(report.kappa == doctest::Approx(1.0));
  CHECK(report.eigenvalues.front() == doctest::Approx(-1.0));
  CHECK(report.eigenvalues.back() == doctest::Approx(1.0));
}

TEST_CASE("diagonal singular values carry through the embedding") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 0.5;
  const auto emb = embed::build_embedding(x, embed::NormalizationMode::kSpectral);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(emb.matrix);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(1) == doctest::Approx(-0.5));
  CHECK(es.eigenvalues()(2) == doctest::Approx(0.5));
  CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));
  CHECK(embed::exact_condition_number(x).kappa == doctest::Approx(2.0));
}

TEST_CASE("embedding eigenvalues pair with the SVD oracle") {
  auto rng = make_rng(42);
  const Eigen::MatrixXd x = random_matrix(4, 2, rng);
  const auto emb = embed::build_embedding(x, embed::NormalizationMode::kSpectral);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(emb.matrix);
  // Positive embedding eigenvalues equal the scaled singular values.
  const Eigen::VectorXd sv = svd.singularValues() / emb.scale_factor;
  const auto& ev = es.eigenvalues();
  CHECK(ev(ev.size() - 1) == doctest::Approx(sv(0)).epsilon(1e-8));
  CHECK(ev(ev.size() - 2) == doctest::Approx(sv(1)).epsilon(1e-8));
}

TEST_CASE("pairing property over 200 random shapes") {
  auto rng = make_rng(7);
  std::uniform_int_distribution<int> rows_dist(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index rows = rows_dist(rng);
    std::uniform_int_distribution<int> cols_dist(
        1, static_cast<int>(std::min<Eigen::Index>(rows, 4)));
    const Eigen::Index cols = cols_dist(rng);
    Eigen::MatrixXd x = random_matrix(rows, cols, rng);
    embed::HermitianEmbedding emb;
    try {
      emb = embed::build_embedding(x, embed::NormalizationMode::kSpectral);
    } catch (const RankDeficient&) {
      continue;  // random degenerate draw
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    std::vector<double> expect;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      const double s = svd.singularValues()(i) / emb.scale_factor;
      expect.push_back(s);
      expect.push_back(-s);
    }
    expect.resize(static_cast<std::size_t>(emb.dim()), 0.0);
    std::sort(expect.begin(), expect.end());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(emb.matrix);
    for (Eigen::Index i = 0; i < emb.dim(); ++i) {
      CHECK(es.eigenvalues()(i) ==
            doctest::Approx(expect[static_cast<std::size_t>(i)])
                .epsilon(1e-8)
                .scale(1.0));
    }
  }
}

TEST_CASE("normalization modes satisfy their invariants and are idempotent") {
  auto rng = make_rng(99);
  const Eigen::MatrixXd x = random_matrix(6, 3, rng);

  const auto spec = embed::build_embedding(x, embed::NormalizationMode::kSpectral);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.matrix);
  CHECK(es.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-9));

  const auto frob = embed::build_embedding(x, embed::NormalizationMode::kFrobenius);
  CHECK(frob.matrix.norm() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));

  // Rebuilding from the already-normalized block reproduces the matrix.
  const Eigen::MatrixXd x_scaled = x / spec.scale_factor;
  const auto again =
      embed::build_embedding(x_scaled, embed::NormalizationMode::kSpectral);
  CHECK((again.matrix - spec.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embedding is symmetric with zero diagonal blocks") {
  auto rng = make_rng(5);
  const Eigen::MatrixXd x = random_matrix(5, 2, rng);
  const auto emb = embed::build_embedding(x, embed::NormalizationMode::kSpectral);
  CHECK((emb.matrix - emb.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(emb.matrix.topLeftCorner(5, 5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(emb.matrix.block(5, 5, 2, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity condition number is one") {
  CHECK(embed::exact_condition_number(Eigen::MatrixXd::Identity(4, 4)).kappa ==
        doctest::Approx(1.0));
}

TEST_CASE("diagonal condition number is the ratio of extremes") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 0.25;
  CHECK(embed::exact_condition_number(x).kappa == doctest::Approx(4.0));
}

TEST_CASE("Hilbert 4x4 conditioning matches the published value") {
  const auto report = embed::exact_condition_number(hilbert(4));
  CHECK(report.kappa == doctest::Approx(1.5514e4).epsilon(1e-3));
}

TEST_CASE("kappa is scale invariant") {
  auto rng = make_rng(21);
  const Eigen::MatrixXd x = random_matrix(5, 3, rng);
  const double base = embed::exact_condition_number(x).kappa;
  for (double c : {2.0, -0.5, 1e-3, 1e4}) {
    CHECK(embed::exact_condition_number(c * x).kappa ==
          doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("zero matrix is degenerate, zero singular value is rank deficient") {
  CHECK_THROWS_AS(embed::exact_condition_number(Eigen::MatrixXd::Zero(3, 2)),
                  DegenerateInput);
  Eigen::MatrixXd x(2, 2);
  x << 1, 1, 1, 1;  // rank one
  CHECK_THROWS_AS(embed::build_embedding(x, embed::NormalizationMode::kSpectral),
                  RankDeficient);
}

TEST_CASE("encode_data_state reproduces the worked examples") {
  Eigen::MatrixXd x1(1, 1);
  x1 << 1.0;
  const auto s1 = embed::encode_data_state(x1);
  CHECK(s1.dim() == 2);
  CHECK(std::abs(s1.amplitude(0)) == 0.0);
  CHECK(std::abs(s1.amplitude(1) - qsim::Complex{1, 0}) < 1e-12);

  Eigen::MatrixXd x2(2, 1);
  x2 << 1.0, 1.0;
  const auto s2 = embed::encode_data_state(x2);
  CHECK(s2.dim() == 4);
  CHECK(std::abs(s2.amplitude(0)) == 0.0);
  CHECK(std::abs(s2.amplitude(1)) == 0.0);
  CHECK(s2.amplitude(2).real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(s2.amplitude(3).real() == doctest::Approx(1 / std::sqrt(2.0)));

  Eigen::MatrixXd x3(2, 2);
  x3 << 1, 2, 3, 4;
  const auto s3 = embed::encode_data_state(x3);
  const double norm = std::sqrt(30.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(s3.amplitude(static_cast<std::uint64_t>(i)).real() ==
          doctest::Approx((i + 1) / norm).epsilon(1e-12));
  }
}

TEST_CASE("encode_data_state rejects degenerate input and keeps the norm") {
  CHECK_THROWS_AS(embed::encode_data_state(Eigen::MatrixXd::Zero(2, 1)),
                  DegenerateInput);
  // More entries than embedding amplitudes cannot be placed.
  auto rng0 = make_rng(30);
  CHECK_THROWS_AS(embed::encode_data_state(random_matrix(8, 4, rng0)),
                  ShapeError);
  auto rng = make_rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = random_matrix(3, 1, rng);
    const auto s = embed::encode_data_state(x);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    // Zero outside the trailing X block.
    const Eigen::Index offset = s.dim() - 3;
    for (Eigen::Index i = 0; i < offset; ++i) {
      CHECK(std::abs(s.amplitude(static_cast<std::uint64_t>(i))) == 0.0);
    }
  }
}

TEST_CASE("uniform_eigen_state weights every eigenpair equally") {
  auto rng = make_rng(13);
  const Eigen::MatrixXd x = random_matrix(4, 2, rng);
  const auto emb = embed::build_embedding(x, embed::NormalizationMode::kSpectral);
  const auto psi = embed::uniform_eigen_state(emb);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
  const auto overlaps = embed::eigen_overlaps(emb, psi);
  int nonzero = 0;
  for (const auto& [lam, w] : overlaps) {
    if (std::abs(lam) > 1e-9) {
      ++nonzero;
      CHECK(w == doctest::Approx(0.25).epsilon(1e-8));
    } else {
      CHECK(w < 1e-12);
    }
  }
  CHECK(nonzero == 4);
}
