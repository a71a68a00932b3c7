#include <algorithm>
#include <cmath>

#include "qarb/econometrics.hpp"

namespace qarb::econ {

namespace {

// Dickey-Fuller tau critical values generated by this project's own
// Monte-Carlo calibrator (see tools/dfcv_gen.cpp): 200000 driftless
// Gaussian random walks per grid point, lag-0 regression, master seed
// 20240901.  Layout: values[form][level] with form 0 = constant,
// form 1 = constant + trend and levels {1%, 5%, 10%}.
constexpr long kTrials = 200000;
constexpr std::uint64_t kSeed = 20240901;

struct GridRow {
  int n;
  double values[2][3];
};

constexpr GridRow kTable[] = {
    {20, {{-3.8344, -3.0289, -2.6572}, {-4.5111, -3.6732, -3.2754}}},
    {25, {{-3.7384, -2.9885, -2.6339}, {-4.3808, -3.6189, -3.2413}}},
    {50, {{-3.5747, -2.9179, -2.5975}, {-4.1550, -3.5006, -3.1792}}},
    {100, {{-3.4963, -2.8856, -2.5751}, {-4.0470, -3.4498, -3.1482}}},
    {250, {{-3.4599, -2.8709, -2.5734}, {-4.0015, -3.4226, -3.1355}}},
    {500, {{-3.4459, -2.8661, -2.5701}, {-3.9731, -3.4175, -3.1327}}},
    {1000, {{-3.4282, -2.8603, -2.5652}, {-3.9672, -3.4125, -3.1299}}},
    {2000, {{-3.4305, -2.8662, -2.5722}, {-3.9643, -3.4113, -3.1282}}},
};

constexpr int kGridSize = static_cast<int>(sizeof(kTable) / sizeof(kTable[0]));

int level_index(double level) {
  if (std::abs(level - 0.01) < 1e-9) return 0;
  if (std::abs(level - 0.05) < 1e-9) return 1;
  if (std::abs(level - 0.10) < 1e-9) return 2;
  return -1;
}

}  // namespace

DfTableInfo df_table_info() {
  DfTableInfo info;
  for (const auto& row : kTable) info.grid_n.push_back(row.n);
  info.trials = kTrials;
  info.seed = kSeed;
  return info;
}

std::map<double, double> df_critical_values(
    int effective_n, bool include_trend, const std::vector<double>& levels) {
  if (effective_n < 20) {
    throw ConfigError("critical values need an effective sample of >= 20");
  }
  const int form = include_trend ? 1 : 0;

  std::map<double, double> out;
  for (double level : levels) {
    const int li = level_index(level);
    if (li < 0) {
      throw ConfigError("unsupported significance level (use 1%, 5% or 10%)");
    }
    // Clamp outside the grid, interpolate linearly in 1/n inside it.
    if (effective_n <= kTable[0].n) {
      out[level] = kTable[0].values[form][li];
      continue;
    }
    if (effective_n >= kTable[kGridSize - 1].n) {
      out[level] = kTable[kGridSize - 1].values[form][li];
      continue;
    }
    int hi = 1;
    while (kTable[hi].n < effective_n) ++hi;
    const auto& a = kTable[hi - 1];
    const auto& b = kTable[hi];
    const double xa = 1.0 / static_cast<double>(a.n);
    const double xb = 1.0 / static_cast<double>(b.n);
    const double x = 1.0 / static_cast<double>(effective_n);
    const double w = (x - xa) / (xb - xa);
    out[level] = a.values[form][li] * (1.0 - w) + b.values[form][li] * w;
  }
  return out;
}

}  // namespace qarb::econ
