#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qarb/errors.hpp"

namespace qarb::data {

// T x J panel of strictly positive prices with strictly increasing
// ISO-8601 timestamps.
struct PricePanel {
  Eigen::MatrixXd prices;  // rows = time, cols = stocks
  std::vector<std::string> tickers;
  std::vector<std::string> timestamps;

  Eigen::Index T() const { return prices.rows(); }
  Eigen::Index J() const { return prices.cols(); }

  void validate() const;
};

enum class SynthKind { kRandomWalk, kPlantedCointegration, kControlledKappa };

struct SynthSpec {
  SynthKind kind = SynthKind::kRandomWalk;
  Eigen::Index T = 500;
  Eigen::Index J = 2;       // total stocks in the panel
  double phi = 0.5;         // AR(1) coefficient of the planted spread
  double sigma_noise = 0.05;
  double sigma_walk = 0.01;
  Eigen::VectorXd beta_star;          // planted combination coefficients
  std::vector<double> singular_values;  // controlled-kappa targets
  std::uint64_t seed = 1;

  void validate() const;
};

// Generation metadata carried alongside synthetic panels.
struct SynthMeta {
  SynthKind kind;
  Eigen::VectorXd beta_star;
  double phi = 0.0;
  double sigma_noise = 0.0;
  std::vector<double> singular_values;
};

struct SynthResult {
  PricePanel panel;
  SynthMeta meta;
};

SynthResult synth(const SynthSpec& spec);

// T x d matrix with the requested singular values (ascending or any order),
// zero column means so that mean-centering preserves the spectrum exactly.
Eigen::MatrixXd controlled_matrix(const std::vector<double>& singular_values,
                                  Eigen::Index rows, std::uint64_t seed);

PricePanel load_csv(const std::string& path);
void save_csv(const PricePanel& panel, const std::string& path);

// Current JSON report schema version.
inline constexpr int kSchemaVersion = 1;

}  // namespace qarb::data
