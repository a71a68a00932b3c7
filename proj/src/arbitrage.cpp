#include "qarb/arbitrage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "qarb/embedding.hpp"
#include "qarb/qcnc.hpp"
#include "qarb/rng.hpp"

namespace qarb::arb {

namespace {

constexpr std::uint64_t kEgSeedTag = 0xe6;

// Per-portfolio verdict captured by the parallel map; reduced in id order.
struct Verdict {
  bool survivor = false;
  RejectionReason rejection;
  std::optional<econ::CointegrationResult> coint;
  std::int64_t queries = 0;
  std::int64_t rounds = 0;
  int stages = 0;
};

Eigen::MatrixXd window_matrix(const data::PricePanel& panel,
                              const Portfolio& p, SeriesTransform tr) {
  const Eigen::Index rows = p.window_end - p.window_begin;
  const auto cols = static_cast<Eigen::Index>(p.stocks.size());
  Eigen::MatrixXd x(tr == SeriesTransform::kReturns ? rows - 1 : rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const Eigen::Index j = p.stocks[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double v = panel.prices(p.window_begin + r, j);
      switch (tr) {
        case SeriesTransform::kLevels:
          x(r, c) = v;
          break;
        case SeriesTransform::kLogLevels:
          x(r, c) = std::log(v);
          break;
        case SeriesTransform::kReturns:
          if (r > 0) {
            const double prev = panel.prices(p.window_begin + r - 1, j);
            x(r - 1, c) = v / prev - 1.0;
          }
          break;
      }
    }
  }
  return x;
}

// Parallel map over portfolios with deterministic slot assignment; the
// first worker exception (by portfolio order) is rethrown after the join.
template <typename Fn>
std::vector<Verdict> parallel_map(const std::vector<Portfolio>& items,
                                  int threads, Fn&& fn) {
  std::vector<Verdict> out(items.size());
  if (items.empty()) return out;
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(items.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(items.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= items.size()) break;
        try {
          out[i] = fn(items[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

econ::CointegrationResult run_cointegration(const data::PricePanel& panel,
                                            const Portfolio& p,
                                            const ScreenConfig& cfg,
                                            std::uint64_t portfolio_seed) {
  const Eigen::Index rows = p.window_end - p.window_begin;
  const auto d = static_cast<Eigen::Index>(p.stocks.size());
  Eigen::VectorXd y(rows);
  Eigen::MatrixXd x(rows, d - 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    y(r) = panel.prices(p.window_begin + r, p.stocks[0]);
    for (Eigen::Index c = 1; c < d; ++c) {
      x(r, c - 1) =
          panel.prices(p.window_begin + r, p.stocks[static_cast<std::size_t>(c)]);
    }
  }
  econ::EngleGrangerConfig eg = cfg.eg;
  eg.contract.seed = sub_seed(portfolio_seed, kEgSeedTag);
  return econ::engle_granger(x, y, eg);
}

}  // namespace

std::string RejectionReason::label() const {
  if (at_cointegration) return "cointegration";
  return "preselect_stage_" + std::to_string(preselect_stage);
}

void PortfolioPool::validate(const data::PricePanel& panel) const {
  if (portfolios.empty()) {
    throw DegenerateInput("portfolio pool is empty");
  }
  std::set<std::pair<std::vector<Eigen::Index>, std::pair<Eigen::Index, Eigen::Index>>>
      seen;
  std::set<int> ids;
  for (const auto& p : portfolios) {
    if (static_cast<Eigen::Index>(p.stocks.size()) != d || d < 2) {
      throw ShapeError("portfolio must hold exactly d >= 2 stocks");
    }
    std::set<Eigen::Index> uniq(p.stocks.begin(), p.stocks.end());
    if (uniq.size() != p.stocks.size()) {
      throw ShapeError("portfolio repeats a stock index");
    }
    for (Eigen::Index s : p.stocks) {
      if (s < 0 || s >= panel.J()) {
        throw ShapeError("portfolio stock index out of range");
      }
    }
    if (p.window_begin < 0 || p.window_end > panel.T() ||
        p.window_end - p.window_begin < 50) {
      throw ShapeError("portfolio window invalid or shorter than 50 rows");
    }
    if (!ids.insert(p.id).second) {
      throw ShapeError("duplicate portfolio id " + std::to_string(p.id));
    }
    std::vector<Eigen::Index> key(uniq.begin(), uniq.end());
    if (!seen.insert({key, {p.window_begin, p.window_end}}).second) {
      throw ShapeError("duplicate portfolio (same stocks and window)");
    }
  }
}

PortfolioPool enumerate_portfolios(Eigen::Index j_total, Eigen::Index d,
                                   Eigen::Index window_begin,
                                   Eigen::Index window_end,
                                   std::size_t max_portfolios) {
  if (d < 2 || j_total < d) {
    throw ConfigError("need at least d >= 2 stocks to enumerate");
  }
  PortfolioPool pool;
  pool.d = d;
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) pick[static_cast<std::size_t>(i)] = i;
  int id = 0;
  while (pool.portfolios.size() < max_portfolios) {
    pool.portfolios.push_back(
        Portfolio{id++, pick, window_begin, window_end});
    // next combination
    Eigen::Index i = d - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == j_total - d + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (Eigen::Index k = i + 1; k < d; ++k) {
      pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
    }
  }
  return pool;
}

Eigen::MatrixXd preselection_factor(const data::PricePanel& panel,
                                    const Portfolio& p, SeriesTransform tr) {
  Eigen::MatrixXd x = window_matrix(panel, p, tr);
  // Mean-center per stock: raw levels hide collinearity behind the mean.
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    x.col(c).array() -= x.col(c).mean();
  }
  // d x d QR factor shares the singular values of the window matrix and
  // keeps the phase-estimation register small.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::MatrixXd r = qr.matrixQR()
                          .topRows(x.cols())
                          .triangularView<Eigen::Upper>();
  return r;
}

ScreeningReport screen_fixed(const data::PricePanel& panel,
                             const PortfolioPool& pool,
                             const ScreenConfig& cfg, std::uint64_t rng_seed) {
  panel.validate();
  pool.validate(panel);
  if (!(cfg.kappa0 > 1.0)) {
    throw ConfigError("kappa0 must exceed 1");
  }

  vtpa::VtpaConfig vcfg;
  vcfg.kappa0 = cfg.kappa0;
  vcfg.epsilon = cfg.epsilon;
  vcfg.repetition_scale = cfg.repetition_scale;
  vcfg.validate();

  auto verdicts = parallel_map(
      pool.portfolios, cfg.threads, [&](const Portfolio& p) -> Verdict {
        Verdict v;
        const std::uint64_t pseed =
            sub_seed(rng_seed, static_cast<std::uint64_t>(p.id));
        const Eigen::MatrixXd factor =
            preselection_factor(panel, p, cfg.transform);
        const embed::HermitianEmbedding a =
            embed::build_embedding(factor, embed::NormalizationMode::kSpectral);
        const qsim::StateVector input = embed::uniform_eigen_state(a);
        const vtpa::VtpaOutcome out = vtpa::vtpa(a, input, vcfg, pseed);
        v.queries = out.total_queries;
        v.rounds = out.rounds_sampled;
        v.stages = out.stages_executed;
        if (out.stopped) {
          v.rejection.preselect_stage = out.stages_executed;
          return v;
        }
        const econ::CointegrationResult coint =
            run_cointegration(panel, p, cfg, pseed);
        if (coint.flag) {
          v.survivor = true;
          v.coint = coint;
        } else {
          v.rejection.at_cointegration = true;
          v.coint = coint;
        }
        return v;
      });

  ScreeningReport report;
  report.seed = rng_seed;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const auto& p = pool.portfolios[i];
    const auto& v = verdicts[i];
    report.total_queries += v.queries;
    report.wall_stats.portfolios += 1;
    report.wall_stats.vtpa_runs += 1;
    report.wall_stats.comparator_rounds += v.rounds;
    if (v.survivor) {
      report.survivors.push_back({p, *v.coint});
    } else {
      if (v.rejection.at_cointegration) {
        report.wall_stats.cointegration_tests += 1;
      }
      report.rejected_at[p.id] = v.rejection;
    }
  }
  report.wall_stats.cointegration_tests +=
      static_cast<std::int64_t>(report.survivors.size());
  return report;
}

ScreeningReport screen_progressive(const data::PricePanel& panel,
                                   const PortfolioPool& pool,
                                   std::size_t survivor_budget, int max_stage,
                                   const ScreenConfig& cfg,
                                   std::uint64_t rng_seed) {
  panel.validate();
  pool.validate(panel);
  if (max_stage < 1) {
    throw ConfigError("max_stage must be positive");
  }

  ScreeningReport report;
  report.seed = rng_seed;
  report.wall_stats.portfolios =
      static_cast<std::int64_t>(pool.portfolios.size());

  // Precompute embeddings and input states once per portfolio.
  struct Prepared {
    Portfolio p;
    embed::HermitianEmbedding a;
    qsim::StateVector input;
  };
  std::vector<Prepared> remaining;
  remaining.reserve(pool.portfolios.size());
  for (const auto& p : pool.portfolios) {
    const Eigen::MatrixXd factor = preselection_factor(panel, p, cfg.transform);
    embed::HermitianEmbedding a =
        embed::build_embedding(factor, embed::NormalizationMode::kSpectral);
    qsim::StateVector input = embed::uniform_eigen_state(a);
    remaining.push_back(Prepared{p, std::move(a), std::move(input)});
  }

  int round = 0;
  while (remaining.size() > survivor_budget) {
    ++round;
    if (round > max_stage) {
      report.wall_stats.budget_unmet = true;
      break;
    }
    report.wall_stats.progressive_rounds = round;
    const double kappa_j = std::pow(2.0, round);

    qcnc::CncConfig ccfg;
    ccfg.kappa0 = kappa_j;
    ccfg.epsilon = cfg.epsilon;
    ccfg.repetitions = static_cast<int>(
        std::ceil(2.0 * kappa_j * cfg.repetition_scale));
    ccfg.phase_bits = round + 2;

    std::vector<Prepared> kept;
    kept.reserve(remaining.size());
    for (auto& item : remaining) {
      const std::uint64_t pseed =
          sub_seed(rng_seed, static_cast<std::uint64_t>(item.p.id));
      const qcnc::CncOutcome out = qcnc::qcnc(
          item.a, item.input, ccfg,
          sub_seed(pseed, static_cast<std::uint64_t>(round)));
      report.wall_stats.comparator_rounds += out.repetitions_used;
      report.total_queries +=
          std::llround(vtpa::stage_cost(round, cfg.epsilon,
                                        item.a.original_cols));
      if (out.flag) {
        kept.push_back(std::move(item));
      } else {
        RejectionReason r;
        r.preselect_stage = round;
        report.rejected_at[item.p.id] = r;
      }
    }
    remaining = std::move(kept);
    if (remaining.empty()) break;
  }

  for (const auto& item : remaining) {
    const std::uint64_t pseed =
        sub_seed(rng_seed, static_cast<std::uint64_t>(item.p.id));
    report.wall_stats.cointegration_tests += 1;
    const econ::CointegrationResult coint =
        run_cointegration(panel, item.p, cfg, pseed);
    if (coint.flag) {
      report.survivors.push_back({item.p, coint});
    } else {
      RejectionReason r;
      r.at_cointegration = true;
      report.rejected_at[item.p.id] = r;
    }
  }
  return report;
}

ComplexityReport complexity_experiment(const EnsembleSpec& ensemble,
                                       const std::vector<double>& kappa0_grid) {
  if (kappa0_grid.empty()) {
    throw ConfigError("kappa0 grid is empty");
  }
  if (ensemble.trials_per_kappa0 < 1) {
    throw ConfigError("trial count must be positive");
  }

  ComplexityReport report;
  report.kappa0_grid = kappa0_grid;

  auto run_band = [&](double kappa0, Eigen::Index d, std::uint64_t tag,
                      std::vector<vtpa::LedgerEntry>& sink) {
    vtpa::VtpaConfig vcfg;
    vcfg.kappa0 = kappa0;
    vcfg.epsilon = ensemble.epsilon;
    vcfg.validate();
    const int m = vcfg.stages();
    const int bits = m + 2;  // widest stage grid
    for (int t = 0; t < ensemble.trials_per_kappa0; ++t) {
      const std::uint64_t seed =
          sub_seed(ensemble.seed, tag, static_cast<std::uint64_t>(t));
      auto rng = make_rng(seed);
      // Log-uniform condition number over [1, kappa0], snapped onto the
      // finest readout grid so phase readouts are exact.
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double kappa = std::pow(2.0, unif(rng) * m);
      const double grid = std::pow(2.0, -bits + 1);
      double lam_min = std::max(grid, std::round((1.0 / kappa) / grid) * grid);
      if (lam_min >= 1.0) lam_min = 1.0 - grid;
      std::vector<double> sv;
      sv.push_back(1.0);
      sv.push_back(lam_min);
      for (Eigen::Index extra = 2; extra < d; ++extra) {
        // Interior spectrum on the same dyadic grid, never below lam_min so
        // the recorded condition number stays exact.
        const double mid =
            grid * std::floor(unif(rng) * (1.0 / grid - 2.0) + 1.5);
        sv.push_back(std::min(1.0, std::max(lam_min, mid)));
      }
      const Eigen::MatrixXd x =
          data::controlled_matrix(sv, 4 * d, sub_seed(seed, 0xa));
      const embed::HermitianEmbedding a =
          embed::build_embedding(x, embed::NormalizationMode::kSpectral);
      // Half the Born mass on the smallest pair regardless of d, so the
      // stop-stage statistics stay fixed and the counters' sqrt(d) factor
      // is what the sweep measures.
      const qsim::StateVector input = embed::small_pair_state(a, 0.5);
      const vtpa::VtpaOutcome out = vtpa::vtpa(a, input, vcfg, seed);
      sink.push_back(vtpa::LedgerEntry{kappa0, 1.0 / lam_min,
                                       static_cast<double>(out.total_queries),
                                       ensemble.epsilon, d});
    }
  };

  std::vector<vtpa::LedgerEntry> entries;
  for (std::size_t g = 0; g < kappa0_grid.size(); ++g) {
    run_band(kappa0_grid[g], ensemble.d, static_cast<std::uint64_t>(g),
             entries);
  }
  report.scaling = vtpa::query_ledger(entries);

  // Cost against the regressor count at the largest threshold; common
  // random numbers across d keep the stop-stage draws aligned.
  const double k0 = *std::max_element(kappa0_grid.begin(), kappa0_grid.end());
  const std::vector<Eigen::Index> d_grid{2, 4, 8};
  for (std::size_t i = 0; i < d_grid.size(); ++i) {
    std::vector<vtpa::LedgerEntry> local;
    run_band(k0, d_grid[i], 0x100, local);
    double mean = 0.0;
    for (const auto& e : local) mean += e.queries;
    mean /= static_cast<double>(local.size());
    report.d_sweep.emplace_back(d_grid[i], mean);
  }
  if (report.d_sweep.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(report.d_sweep.size());
    for (const auto& [d, q] : report.d_sweep) {
      const double x = std::log2(static_cast<double>(d));
      const double y = std::log2(q);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    report.d_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return report;
}

}  // namespace qarb::arb
