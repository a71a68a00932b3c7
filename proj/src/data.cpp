#include "qarb/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "qarb/rng.hpp"

namespace qarb::data {

namespace {

// Day offsets from a fixed origin rendered as ISO-8601 dates; good for a
// few centuries of synthetic daily stamps.
std::string iso_date(long day_offset) {
  // Civil-from-days algorithm, origin 2020-01-01.
  long z = day_offset + 737730;  // era day number of 2020-01-01
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned long doe = static_cast<unsigned long>(z - era * 146097);
  const unsigned long yoe =
      (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned long mp = (5 * doy + 2) / 153;
  const unsigned long d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned long m = mp < 10 ? mp + 3 : mp - 9;
  const long year = y + (m <= 2);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04ld-%02lu-%02lu", year, m, d);
  return buf;
}

void fill_timestamps(PricePanel& panel) {
  panel.timestamps.resize(static_cast<std::size_t>(panel.T()));
  for (Eigen::Index t = 0; t < panel.T(); ++t) {
    panel.timestamps[static_cast<std::size_t>(t)] = iso_date(t);
  }
}

void default_tickers(PricePanel& panel) {
  panel.tickers.resize(static_cast<std::size_t>(panel.J()));
  for (Eigen::Index j = 0; j < panel.J(); ++j) {
    panel.tickers[static_cast<std::size_t>(j)] = "S" + std::to_string(j);
  }
}

// Geometric random walk around level 100 so prices stay positive.
Eigen::VectorXd geometric_walk(Eigen::Index t_len, double sigma,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd out(t_len);
  double log_level = 0.0;
  for (Eigen::Index t = 0; t < t_len; ++t) {
    log_level += sigma * gauss(rng);
    out(t) = 100.0 * std::exp(log_level);
  }
  return out;
}

}  // namespace

void PricePanel::validate() const {
  if (T() < 1 || J() < 1) {
    throw DegenerateInput("panel is empty");
  }
  if (tickers.size() != static_cast<std::size_t>(J())) {
    throw ShapeError("ticker count does not match the price columns");
  }
  if (timestamps.size() != static_cast<std::size_t>(T())) {
    throw ShapeError("timestamp count does not match the price rows");
  }
  for (Eigen::Index t = 0; t < T(); ++t) {
    for (Eigen::Index j = 0; j < J(); ++j) {
      if (!(prices(t, j) > 0.0) || !std::isfinite(prices(t, j))) {
        throw DegenerateInput("panel holds a non-positive or missing price");
      }
    }
  }
  for (std::size_t t = 1; t < timestamps.size(); ++t) {
    if (!(timestamps[t - 1] < timestamps[t])) {
      throw OrderError("timestamps are not strictly increasing at row " +
                       std::to_string(t + 1));
    }
  }
}

void SynthSpec::validate() const {
  if (T < 50) throw ConfigError("synthetic panels need T >= 50");
  if (seed == 0) throw ConfigError("seed must be nonzero");
  switch (kind) {
    case SynthKind::kRandomWalk:
      if (J < 1) throw ConfigError("random walk panel needs J >= 1");
      if (!(sigma_walk > 0)) throw ConfigError("sigma_walk must be positive");
      break;
    case SynthKind::kPlantedCointegration: {
      if (beta_star.size() < 1) {
        throw ConfigError("planted cointegration needs beta_star");
      }
      if (J < beta_star.size() + 1) {
        throw ConfigError("panel too narrow for the planted combination");
      }
      if (!(std::abs(phi) < 1.0)) {
        throw ConfigError("spread AR(1) coefficient must satisfy |phi| < 1");
      }
      if (!(sigma_noise > 0) || !(sigma_walk > 0)) {
        throw ConfigError("noise scales must be positive");
      }
      break;
    }
    case SynthKind::kControlledKappa: {
      if (singular_values.empty()) {
        throw ConfigError("controlled-kappa spec needs singular values");
      }
      for (double s : singular_values) {
        if (!(s > 0)) throw ConfigError("singular values must be positive");
      }
      if (J < static_cast<Eigen::Index>(singular_values.size())) {
        throw ConfigError("panel too narrow for the requested spectrum");
      }
      break;
    }
  }
}

Eigen::MatrixXd controlled_matrix(const std::vector<double>& singular_values,
                                  Eigen::Index rows, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(singular_values.size());
  if (rows < d + 1) {
    throw ShapeError("controlled matrix needs rows > singular value count");
  }
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Left factor orthonormal and orthogonal to the all-ones vector so that
  // column mean-centering leaves the matrix (and spectrum) untouched.
  Eigen::MatrixXd raw(rows, d);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) raw(i, j) = gauss(rng);
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(rows);
  for (Eigen::Index j = 0; j < d; ++j) {
    raw.col(j) -= ones * (ones.dot(raw.col(j)) / static_cast<double>(rows));
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd u = qr.householderQ() * Eigen::MatrixXd::Identity(rows, d);
  // Fold the R diagonal signs back for determinism across math libraries.
  for (Eigen::Index j = 0; j < d; ++j) {
    if (qr.matrixQR()(j, j) < 0) u.col(j) = -u.col(j);
  }
  // Re-project: Q of a centered basis need not stay centered.
  for (Eigen::Index j = 0; j < d; ++j) {
    u.col(j) -= ones * (ones.dot(u.col(j)) / static_cast<double>(rows));
    for (Eigen::Index k = 0; k < j; ++k) {
      u.col(j) -= u.col(k) * u.col(k).dot(u.col(j));
    }
    u.col(j) /= u.col(j).norm();
  }

  Eigen::MatrixXd v(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) v(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qrv(v);
  Eigen::MatrixXd vq = qrv.householderQ();

  Eigen::VectorXd sigma(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    sigma(i) = singular_values[static_cast<std::size_t>(i)];
  }
  return u * sigma.asDiagonal() * vq.transpose();
}

SynthResult synth(const SynthSpec& spec) {
  spec.validate();
  SynthResult out;
  out.meta.kind = spec.kind;

  Eigen::MatrixXd prices(spec.T, spec.J);

  switch (spec.kind) {
    case SynthKind::kRandomWalk: {
      for (Eigen::Index j = 0; j < spec.J; ++j) {
        auto col_rng = make_rng(sub_seed(spec.seed, static_cast<std::uint64_t>(j)));
        prices.col(j) = geometric_walk(spec.T, spec.sigma_walk, col_rng);
      }
      break;
    }
    case SynthKind::kPlantedCointegration: {
      const Eigen::Index d_in = spec.beta_star.size();
      // Columns 1..d_in are independent walks; column 0 is their planted
      // combination plus a stationary AR(1) spread.
      for (Eigen::Index j = 1; j < spec.J; ++j) {
        auto col_rng = make_rng(sub_seed(spec.seed, static_cast<std::uint64_t>(j)));
        prices.col(j) = geometric_walk(spec.T, spec.sigma_walk, col_rng);
      }
      std::normal_distribution<double> gauss(0.0, 1.0);
      auto spread_rng = make_rng(sub_seed(spec.seed, 0x5eedu));
      double s = 0.0;
      for (Eigen::Index t = 0; t < spec.T; ++t) {
        s = spec.phi * s + spec.sigma_noise * gauss(spread_rng);
        double combo = 0.0;
        for (Eigen::Index j = 0; j < d_in; ++j) {
          combo += spec.beta_star(j) * prices(t, j + 1);
        }
        prices(t, 0) = combo + s;
        if (!(prices(t, 0) > 0.0)) {
          throw DegenerateInput("planted combination produced a non-positive "
                                "price; shrink the spread scale");
        }
      }
      out.meta.beta_star = spec.beta_star;
      out.meta.phi = spec.phi;
      out.meta.sigma_noise = spec.sigma_noise;
      break;
    }
    case SynthKind::kControlledKappa: {
      const auto d = static_cast<Eigen::Index>(spec.singular_values.size());
      const Eigen::MatrixXd m =
          controlled_matrix(spec.singular_values, spec.T,
                            sub_seed(spec.seed, 0xc0ull));
      // Offset keeps prices positive; the zero-column-mean construction
      // makes centering recover m exactly.
      const double offset = 10.0 + 2.0 * m.cwiseAbs().maxCoeff();
      for (Eigen::Index j = 0; j < spec.J; ++j) {
        if (j < d) {
          prices.col(j) = m.col(j).array() + offset;
        } else {
          auto col_rng = make_rng(sub_seed(spec.seed, static_cast<std::uint64_t>(j)));
          prices.col(j) = geometric_walk(spec.T, spec.sigma_walk, col_rng);
        }
      }
      out.meta.singular_values = spec.singular_values;
      break;
    }
  }

  out.panel.prices = std::move(prices);
  default_tickers(out.panel);
  fill_timestamps(out.panel);
  out.panel.validate();
  return out;
}

PricePanel load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(0, "cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DegenerateInput("empty file: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  PricePanel panel;
  {
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ',') || cell != "timestamp") {
      throw ParseError(1, "header must start with 'timestamp'");
    }
    while (std::getline(ss, cell, ',')) {
      if (cell.empty()) throw ParseError(1, "empty ticker in header");
      panel.tickers.push_back(cell);
    }
    if (panel.tickers.empty()) {
      throw ParseError(1, "header lists no tickers");
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ',') || cell.empty()) {
      throw ParseError(line_no, "missing timestamp");
    }
    panel.timestamps.push_back(cell);
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) {
          throw ParseError(line_no, "malformed price '" + cell + "'");
        }
        row.push_back(v);
      } catch (const std::invalid_argument&) {
        throw ParseError(line_no, "malformed price '" + cell + "'");
      } catch (const std::out_of_range&) {
        throw ParseError(line_no, "price out of range '" + cell + "'");
      }
    }
    if (row.size() != panel.tickers.size()) {
      throw ParseError(line_no, "expected " +
                                    std::to_string(panel.tickers.size()) +
                                    " prices, found " +
                                    std::to_string(row.size()));
    }
    for (double v : row) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParseError(line_no, "non-positive or missing price");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw DegenerateInput("file holds a header but no data rows: " + path);
  }

  panel.prices.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(panel.tickers.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t j = 0; j < rows[t].size(); ++j) {
      panel.prices(static_cast<Eigen::Index>(t),
                   static_cast<Eigen::Index>(j)) = rows[t][j];
    }
  }
  panel.validate();
  return panel;
}

void save_csv(const PricePanel& panel, const std::string& path) {
  panel.validate();
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write " + path);
  }
  out << "timestamp";
  for (const auto& t : panel.tickers) out << ',' << t;
  out << '\n';
  char buf[64];
  for (Eigen::Index t = 0; t < panel.T(); ++t) {
    out << panel.timestamps[static_cast<std::size_t>(t)];
    for (Eigen::Index j = 0; j < panel.J(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.10g", panel.prices(t, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace qarb::data
