#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qarb/data.hpp"
#include "qarb/econometrics.hpp"
#include "qarb/vtpa.hpp"

namespace qarb::arb {

struct Portfolio {
  int id = 0;
  std::vector<Eigen::Index> stocks;  // first entry is the regression target
  Eigen::Index window_begin = 0;     // [begin, end) into the panel rows
  Eigen::Index window_end = 0;
};

struct PortfolioPool {
  std::vector<Portfolio> portfolios;
  Eigen::Index d = 0;  // stocks per portfolio

  void validate(const data::PricePanel& panel) const;
};

// Exhaustive d-subsets of [0, J) over one window, capped at `max_portfolios`.
PortfolioPool enumerate_portfolios(Eigen::Index j_total, Eigen::Index d,
                                   Eigen::Index window_begin,
                                   Eigen::Index window_end,
                                   std::size_t max_portfolios);

enum class SeriesTransform { kLevels, kReturns, kLogLevels };

struct ScreenConfig {
  double kappa0 = 16.0;
  double epsilon = 0.05;
  // Screens boost the per-stage comparator repetitions (see vtpa).
  double repetition_scale = 3.0;
  econ::EngleGrangerConfig eg;
  SeriesTransform transform = SeriesTransform::kLevels;
  int threads = 1;
};

struct RejectionReason {
  bool at_cointegration = false;
  int preselect_stage = 0;  // 1-based stage when rejected by preselection

  std::string label() const;
};

struct SurvivorEntry {
  Portfolio portfolio;
  econ::CointegrationResult cointegration;
};

// Deterministic operation counters (no wall-clock content so reports stay
// byte-reproducible).
struct ScreenCounters {
  std::int64_t portfolios = 0;
  std::int64_t vtpa_runs = 0;
  std::int64_t comparator_rounds = 0;
  std::int64_t cointegration_tests = 0;
  std::int64_t progressive_rounds = 0;
  bool budget_unmet = false;
};

struct ScreeningReport {
  std::vector<SurvivorEntry> survivors;
  std::map<int, RejectionReason> rejected_at;  // portfolio id -> reason
  std::int64_t total_queries = 0;
  ScreenCounters wall_stats;
  std::uint64_t seed = 0;
};

// Fixed-threshold screen: VTPA(kappa0) per portfolio, survivors go to the
// cointegration test.
ScreeningReport screen_fixed(const data::PricePanel& panel,
                             const PortfolioPool& pool,
                             const ScreenConfig& cfg, std::uint64_t rng_seed);

// Progressive screen: rounds j = 1, 2, ... drop portfolios whose comparator
// rejects kappa >= 2^j until at most `survivor_budget` remain (or j hits
// max_stage, which sets budget_unmet); the rest go to the cointegration test.
ScreeningReport screen_progressive(const data::PricePanel& panel,
                                   const PortfolioPool& pool,
                                   std::size_t survivor_budget, int max_stage,
                                   const ScreenConfig& cfg,
                                   std::uint64_t rng_seed);

// Window slice -> transformed, mean-centered, QR-compressed d x d factor
// whose singular values equal the window matrix's.
Eigen::MatrixXd preselection_factor(const data::PricePanel& panel,
                                    const Portfolio& p, SeriesTransform tr);

struct EnsembleSpec {
  Eigen::Index d = 2;
  int trials_per_kappa0 = 200;
  double epsilon = 0.05;
  std::uint64_t seed = 1;
};

struct ComplexityReport {
  vtpa::ScalingReport scaling;
  std::vector<double> kappa0_grid;
  // Mean queries per regressor count at the largest kappa0, against sqrt(d).
  std::vector<std::pair<Eigen::Index, double>> d_sweep;
  double d_exponent = 0.0;
};

ComplexityReport complexity_experiment(const EnsembleSpec& ensemble,
                                       const std::vector<double>& kappa0_grid);

}  // namespace qarb::arb
