#include "qarb/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numbers>

namespace qarb::qsim {

namespace {

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(std::uint64_t v) {
  int n = 0;
  while (v > 1) {
    v >>= 1;
    ++n;
  }
  return n;
}

void check_qubit_budget(int n) {
  if (n > kMaxQubits) {
    throw ShapeError("register of " + std::to_string(n) +
                     " qubits exceeds the simulator cap of " +
                     std::to_string(kMaxQubits));
  }
}

}  // namespace

StateVector::StateVector(CVector amplitudes, int n_qubits)
    : amps_(std::move(amplitudes)), n_(n_qubits) {
  check_qubit_budget(n_);
  if (amps_.size() != (Eigen::Index{1} << n_)) {
    throw ShapeError("amplitude vector length does not match 2^n_qubits");
  }
  if (std::abs(amps_.norm() - 1.0) > kNormTol) {
    throw ShapeError("state vector is not normalized");
  }
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  check_qubit_budget(n_qubits);
  CVector v = CVector::Zero(Eigen::Index{1} << n_qubits);
  if (index >= static_cast<std::uint64_t>(v.size())) {
    throw ShapeError("basis index out of range");
  }
  v(static_cast<Eigen::Index>(index)) = Complex{1.0, 0.0};
  return StateVector(std::move(v), n_qubits);
}

StateVector make_state(const CVector& amplitudes) {
  const auto len = static_cast<std::uint64_t>(amplitudes.size());
  if (!is_power_of_two(len)) {
    throw ShapeError("amplitude vector length must be a power of two");
  }
  const double norm = amplitudes.norm();
  if (norm == 0.0) {
    throw DegenerateInput("cannot normalize the zero vector");
  }
  return StateVector(amplitudes / norm, log2_exact(len));
}

StateVector make_state(const Eigen::VectorXd& amplitudes) {
  return make_state(CVector(amplitudes.cast<Complex>()));
}

UnitaryMatrix::UnitaryMatrix(CMatrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() ||
      !is_power_of_two(static_cast<std::uint64_t>(m_.rows()))) {
    throw ShapeError("unitary must be square with power-of-two dimension");
  }
  n_ = log2_exact(static_cast<std::uint64_t>(m_.rows()));
  check_qubit_budget(n_);
  const CMatrix gram = m_.adjoint() * m_;
  const double dev =
      (gram - CMatrix::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff();
  if (dev > kUnitaryTol) {
    throw ShapeError("matrix fails the unitarity check (max deviation " +
                     std::to_string(dev) + ")");
  }
}

UnitaryMatrix hamiltonian_unitary(const CMatrix& hermitian, double t) {
  if (hermitian.rows() != hermitian.cols()) {
    throw ShapeError("Hamiltonian must be square");
  }
  const double herm_dev =
      (hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-10) {
    throw ShapeError("matrix is not Hermitian (max deviation " +
                     std::to_string(herm_dev) + ")");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success) {
    throw ShapeError("eigendecomposition failed");
  }
  const Eigen::VectorXd lambda = es.eigenvalues();
  CVector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    phases(k) = std::polar(1.0, lambda(k) * t);
  }
  CMatrix u = es.eigenvectors() * phases.asDiagonal() *
              es.eigenvectors().adjoint();
  return UnitaryMatrix(std::move(u));
}

UnitaryMatrix hamiltonian_unitary(const Eigen::MatrixXd& symmetric, double t) {
  return hamiltonian_unitary(CMatrix(symmetric.cast<Complex>()), t);
}

std::vector<double> phase_estimation(const UnitaryMatrix& u,
                                     const StateVector& input,
                                     int phase_bits) {
  if (phase_bits < 1) {
    throw ShapeError("phase estimation needs at least one precision bit");
  }
  if (u.dim() != input.dim()) {
    throw ShapeError("unitary dimension does not match the input register");
  }
  check_qubit_budget(phase_bits + input.n_qubits());

  const Eigen::Index dim = input.dim();
  const Eigen::Index branches = Eigen::Index{1} << phase_bits;

  // Joint state as one system-vector per phase-register branch k.
  // After the Hadamard wall every branch holds input / sqrt(2^b); the
  // controlled powers then leave branch k carrying U^k * input.
  std::vector<CVector> branch(branches);
  const double h = 1.0 / std::sqrt(static_cast<double>(branches));
  for (Eigen::Index k = 0; k < branches; ++k) {
    branch[k] = input.amplitudes() * h;
  }
  CMatrix power = u.matrix();  // U^(2^j) by repeated squaring
  for (int j = 0; j < phase_bits; ++j) {
    const Eigen::Index bit = Eigen::Index{1} << j;
    for (Eigen::Index k = 0; k < branches; ++k) {
      if (k & bit) {
        branch[k] = power * branch[k];
      }
    }
    if (j + 1 < phase_bits) {
      power = power * power;
    }
  }

  // Inverse QFT across the branch axis, then marginalize the system.
  const double w = -2.0 * std::numbers::pi / static_cast<double>(branches);
  std::vector<double> dist(static_cast<std::size_t>(branches), 0.0);
  CVector acc(dim);
  for (Eigen::Index k_out = 0; k_out < branches; ++k_out) {
    acc.setZero();
    for (Eigen::Index k = 0; k < branches; ++k) {
      // exp(-2*pi*i*k*k_out / 2^b), accumulated with the k*k_out product
      // reduced mod 2^b to keep the angle small.
      const auto prod = static_cast<double>((k * k_out) & (branches - 1));
      acc += std::polar(h, w * prod) * branch[k];
    }
    dist[static_cast<std::size_t>(k_out)] = acc.squaredNorm();
  }
  return dist;
}

namespace {

bool controls_satisfied(std::uint64_t index,
                        const std::vector<QubitControl>& controls) {
  for (const auto& c : controls) {
    const bool bit = (index >> c.qubit) & 1ull;
    if (bit != c.value) return false;
  }
  return true;
}

}  // namespace

StateVector apply_on_qubits(const UnitaryMatrix& u,
                            const std::vector<int>& target_qubits,
                            const std::vector<QubitControl>& controls,
                            const StateVector& state) {
  const int m = u.n_qubits();
  if (static_cast<int>(target_qubits.size()) != m) {
    throw ShapeError("unitary dimension does not match the target qubit list");
  }
  std::uint64_t target_mask = 0;
  for (int q : target_qubits) {
    if (q < 0 || q >= state.n_qubits()) {
      throw ShapeError("target qubit out of range");
    }
    const std::uint64_t bit = 1ull << q;
    if (target_mask & bit) {
      throw ShapeError("duplicate target qubit");
    }
    target_mask |= bit;
  }
  for (const auto& c : controls) {
    if (c.qubit < 0 || c.qubit >= state.n_qubits()) {
      throw ShapeError("control qubit out of range");
    }
    if (target_mask & (1ull << c.qubit)) {
      throw ShapeError("control and target qubit sets overlap");
    }
  }

  const Eigen::Index dim = state.dim();
  const Eigen::Index block = Eigen::Index{1} << m;
  CVector out = state.amplitudes();
  CVector in_col(block), out_col(block);

  for (std::uint64_t base = 0; base < static_cast<std::uint64_t>(dim); ++base) {
    if (base & target_mask) continue;  // visit each coset once
    if (!controls_satisfied(base, controls)) continue;
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(block); ++k) {
      std::uint64_t idx = base;
      for (int b = 0; b < m; ++b) {
        if ((k >> b) & 1ull) idx |= 1ull << target_qubits[b];
      }
      in_col(static_cast<Eigen::Index>(k)) =
          state.amplitudes()(static_cast<Eigen::Index>(idx));
    }
    out_col.noalias() = u.matrix() * in_col;
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(block); ++k) {
      std::uint64_t idx = base;
      for (int b = 0; b < m; ++b) {
        if ((k >> b) & 1ull) idx |= 1ull << target_qubits[b];
      }
      out(static_cast<Eigen::Index>(idx)) =
          out_col(static_cast<Eigen::Index>(k));
    }
  }
  return StateVector(std::move(out), state.n_qubits());
}

StateVector apply_controlled(const UnitaryMatrix& u,
                             const std::vector<QubitControl>& controls,
                             int target_start, const StateVector& state) {
  std::vector<int> targets(static_cast<std::size_t>(u.n_qubits()));
  for (int b = 0; b < u.n_qubits(); ++b) targets[static_cast<std::size_t>(b)] = target_start + b;
  return apply_on_qubits(u, targets, controls, state);
}

StateVector apply_bit_oracle(const StateVector& state,
                             const std::vector<int>& source_qubits,
                             const std::vector<QubitControl>& controls,
                             int target_qubit,
                             const std::function<bool(std::uint64_t)>& f) {
  if (target_qubit < 0 || target_qubit >= state.n_qubits()) {
    throw ShapeError("oracle target qubit out of range");
  }
  for (int q : source_qubits) {
    if (q < 0 || q >= state.n_qubits() || q == target_qubit) {
      throw ShapeError("oracle source qubit invalid");
    }
  }
  const std::uint64_t tbit = 1ull << target_qubit;
  const auto dim = static_cast<std::uint64_t>(state.dim());
  CVector out = state.amplitudes();
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & tbit) continue;  // handle each target pair once
    if (!controls_satisfied(i, controls)) continue;
    std::uint64_t packed = 0;
    for (std::size_t b = 0; b < source_qubits.size(); ++b) {
      packed |= ((i >> source_qubits[b]) & 1ull) << b;
    }
    if (f(packed)) {
      std::swap(out(static_cast<Eigen::Index>(i)),
                out(static_cast<Eigen::Index>(i | tbit)));
    }
  }
  return StateVector(std::move(out), state.n_qubits());
}

MeasureResult measure_qubit(const StateVector& state, int qubit,
                            std::mt19937_64& rng) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw ShapeError("measured qubit out of range");
  }
  const std::uint64_t bit = 1ull << qubit;
  const auto dim = static_cast<std::uint64_t>(state.dim());
  double p1 = 0.0;
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & bit) p1 += std::norm(state.amplitudes()(static_cast<Eigen::Index>(i)));
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int outcome = unif(rng) < p1 ? 1 : 0;
  const double p = outcome == 1 ? p1 : 1.0 - p1;

  CVector post = state.amplitudes();
  for (std::uint64_t i = 0; i < dim; ++i) {
    const bool keep = (((i & bit) != 0) == (outcome == 1));
    if (!keep) post(static_cast<Eigen::Index>(i)) = Complex{0.0, 0.0};
  }
  post /= std::sqrt(p);
  return MeasureResult{outcome, StateVector(std::move(post), state.n_qubits()),
                       p};
}

UnitaryMatrix qpe_unitary(const UnitaryMatrix& u, int phase_bits) {
  if (phase_bits < 1) {
    throw ShapeError("phase estimation needs at least one precision bit");
  }
  const Eigen::Index d = u.dim();
  const Eigen::Index branches = Eigen::Index{1} << phase_bits;
  const Eigen::Index dim = branches * d;
  check_qubit_budget(phase_bits + u.n_qubits());

  // Controlled-powers block: |k>|s> -> |k> U^k |s>.
  CMatrix cpow = CMatrix::Zero(dim, dim);
  CMatrix power = CMatrix::Identity(d, d);
  for (Eigen::Index k = 0; k < branches; ++k) {
    cpow.block(k * d, k * d, d, d) = power;
    power = u.matrix() * power;
  }

  // Hadamard wall and inverse QFT on the phase register (high bits).
  const double h = 1.0 / std::sqrt(static_cast<double>(branches));
  CMatrix had = CMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < branches; ++k) {
    for (Eigen::Index s = 0; s < d; ++s) {
      // H^b maps |0> to the uniform register state; general entry is
      // h * (-1)^{popcount(k & k')}.
      for (Eigen::Index k2 = 0; k2 < branches; ++k2) {
        const int pop = std::popcount(static_cast<std::uint64_t>(k & k2));
        had(k * d + s, k2 * d + s) = h * ((pop & 1) ? -1.0 : 1.0);
      }
    }
  }

  const double w = -2.0 * std::numbers::pi / static_cast<double>(branches);
  CMatrix iqft = CMatrix::Zero(dim, dim);
  for (Eigen::Index k_out = 0; k_out < branches; ++k_out) {
    for (Eigen::Index k = 0; k < branches; ++k) {
      const auto prod = static_cast<double>((k * k_out) & (branches - 1));
      const Complex c = std::polar(h, w * prod);
      for (Eigen::Index s = 0; s < d; ++s) {
        iqft(k_out * d + s, k * d + s) = c;
      }
    }
  }

  return UnitaryMatrix(iqft * cpow * had);
}

int sample_outcome(const std::vector<double>& distribution,
                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < distribution.size(); ++k) {
    acc += distribution[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(distribution.size()) - 1;
}

void RegisterLayout::validate() const {
  std::vector<int> owner(static_cast<std::size_t>(total_qubits), 0);
  auto claim = [&](const QubitRange& r) {
    for (int q = r.begin; q < r.end; ++q) {
      if (q < 0 || q >= total_qubits) {
        throw ShapeError("register range outside the allocated qubits");
      }
      if (owner[static_cast<std::size_t>(q)]++) {
        throw ShapeError("register ranges overlap at qubit " + std::to_string(q));
      }
    }
  };
  claim(system);
  claim(phase);
  claim(clock);
  for (const auto& [name, r] : ancillas) claim(r);
  if (flag_qubit >= 0) claim(QubitRange{flag_qubit, flag_qubit + 1});
  for (int q = 0; q < total_qubits; ++q) {
    if (!owner[static_cast<std::size_t>(q)]) {
      throw ShapeError("qubit " + std::to_string(q) +
                       " not covered by any register");
    }
  }
}

RegisterLayout RegisterLayout::for_vtpa(int system_qubits, double kappa0,
                                        const std::vector<int>& stage_phase_bits) {
  if (kappa0 <= 1.0) {
    throw ConfigError("kappa0 must exceed 1");
  }
  const int m = static_cast<int>(std::ceil(std::log2(kappa0)));
  if (static_cast<int>(stage_phase_bits.size()) != m) {
    throw ShapeError("expected ceil(log2 kappa0) = " + std::to_string(m) +
                     " stage ancilla blocks");
  }
  RegisterLayout lay;
  lay.system = QubitRange{0, system_qubits};
  int cursor = system_qubits;
  for (int j = 1; j <= m; ++j) {
    const int b = stage_phase_bits[static_cast<std::size_t>(j - 1)];
    lay.ancillas["P" + std::to_string(j)] = QubitRange{cursor, cursor + b};
    cursor += b;
  }
  lay.clock = QubitRange{cursor, cursor + m};
  cursor += m;
  lay.flag_qubit = cursor++;
  lay.total_qubits = cursor;
  check_qubit_budget(lay.total_qubits);
  lay.validate();
  return lay;
}

}  // namespace qarb::qsim
