#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qarb/errors.hpp"

namespace qarb::econ {

struct RegressionFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;        // y - X beta, exactly as stored
  Eigen::VectorXd se;               // homoskedastic standard errors
  double design_kappa = 0.0;        // sigma_max / sigma_min of X
  double balance_scale = 1.0;       // sigma_max recorded by the solver
};

// Output contract of the quantum regression subroutine: exact least squares
// plus an injectable perturbation drawn uniformly from the L2 ball of
// radius epsilon (which also bounds every component by epsilon).
struct QlrContract {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

struct AdfReport {
  double gamma_hat = 0.0;
  double se_gamma = 0.0;
  double df_tau = 0.0;
  int lag = 0;                      // number of lagged-difference regressors
  bool trend = false;
  double alpha_hat = 0.0;           // intercept
  double beta_trend_hat = 0.0;      // time-trend coefficient (0 if absent)
  int effective_n = 0;              // rows in the ADF regression
  std::map<double, double> critical_values;  // level -> critical value
  std::map<double, bool> reject_unit_root;   // left-tailed verdicts
};

struct CointegrationResult {
  bool flag = false;                // cointegrated at the configured level
  Eigen::VectorXd beta;             // first-stage coefficients
  AdfReport adf;
  RegressionFit first_stage;
  double level = 0.05;
};

// Exact ordinary least squares with standard errors; N > d, full rank.
RegressionFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Exact solve plus the contract perturbation; epsilon = 0 reproduces
// ols_fit bit for bit.  Residuals are recomputed from the perturbed beta.
RegressionFit qlr_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const QlrContract& contract);

// First-order difference, length N-1.
Eigen::VectorXd difference(const Eigen::VectorXd& u);

// Augmented Dickey-Fuller regression of du_t on
// [const, (trend), u_{t-1}, du_{t-1..t-L}], left-tailed test of gamma = 0.
AdfReport adf_test(const Eigen::VectorXd& u, int lag, bool include_trend);

inline const std::vector<double> kDefaultLevels{0.01, 0.05, 0.10};

// Critical values from the embedded Monte-Carlo table (interpolated in 1/n
// between grid points).
std::map<double, double> df_critical_values(
    int effective_n, bool include_trend,
    const std::vector<double>& levels = kDefaultLevels);

// Monte-Carlo oracle behind the table: simulates `trials` driftless random
// walks of length n, computes DF_tau on each (lag 0) and returns the
// requested empirical quantiles.  Doubles as the calibration entry point.
std::map<double, double> simulate_df_critical_values(
    int n, bool include_trend, long trials, std::uint64_t seed,
    const std::vector<double>& levels = kDefaultLevels);

// DF_tau of one series with lag 0; fast path used by the simulator and
// cross-checked against adf_test.
double df_tau_statistic(const Eigen::VectorXd& u, bool include_trend);

// Embedded-table metadata (grid, trials, seed) for cache provenance.
struct DfTableInfo {
  std::vector<int> grid_n;
  long trials = 0;
  std::uint64_t seed = 0;
};
DfTableInfo df_table_info();

struct EngleGrangerConfig {
  int lag = 1;
  double level = 0.05;
  bool include_trend = true;
  QlrContract contract;
};

// Two-step test: first-stage regression of y on X (no intercept), then the
// ADF on its residuals.
CointegrationResult engle_granger(const Eigen::MatrixXd& x,
                                  const Eigen::VectorXd& y,
                                  const EngleGrangerConfig& cfg);

// Error-propagation probe over an epsilon grid: verifies the residual
// chain |u-u'| <= eps and |du-du'| <= 2 eps on every run, fits the
// log-log exponent of the gamma error and bootstraps its CI.
struct ProbeReport {
  std::vector<double> epsilons;
  std::vector<double> gamma_errors;  // mean |gamma' - gamma| per epsilon
  bool residual_bound_ok = false;
  bool difference_bound_ok = false;
  double fitted_exponent = 0.0;
  double ci_low = 0.0;   // 95% bootstrap interval
  double ci_high = 0.0;
  bool consistent_with_quadratic = false;  // paper's sqrt(L+2) eps^2 claim
  bool consistent_with_linear = false;
  int replicates_per_epsilon = 0;
};

ProbeReport error_propagation_probe(const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& y, int lag,
                                    const std::vector<double>& epsilon_grid,
                                    int replicates = 16,
                                    std::uint64_t seed = 1);

}  // namespace qarb::econ
