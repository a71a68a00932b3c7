// Regenerates the embedded Dickey-Fuller critical-value table
// (src/dfcv_table.cpp).  Prints the C++ initializer rows to stdout.
#include <cstdio>

#include "qarb/econometrics.hpp"

int main(int argc, char** argv) {
  long trials = 200000;
  std::uint64_t seed = 20240901;
  if (argc > 1) trials = std::atol(argv[1]);
  if (argc > 2) seed = std::strtoull(argv[2], nullptr, 10);

  const int grid[] = {20, 25, 50, 100, 250, 500, 1000, 2000};
  std::printf("// trials=%ld seed=%llu\n", trials,
              static_cast<unsigned long long>(seed));
  for (int n : grid) {
    const auto c = qarb::econ::simulate_df_critical_values(
        n, /*include_trend=*/false, trials, seed + static_cast<std::uint64_t>(n));
    const auto t = qarb::econ::simulate_df_critical_values(
        n, /*include_trend=*/true, trials,
        seed + static_cast<std::uint64_t>(n) + 1000000);
    std::printf(
        "    {%d, {{%.4f, %.4f, %.4f}, {%.4f, %.4f, %.4f}}},\n", n,
        c.at(0.01), c.at(0.05), c.at(0.10), t.at(0.01), t.at(0.05), t.at(0.10));
    std::fflush(stdout);
  }
  return 0;
}
