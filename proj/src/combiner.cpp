#include "qswitch/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qswitch/errors.hpp"

namespace qswitch {

namespace {

std::size_t common_target_dim(const QuantumChannel& c0, const QuantumChannel& c1, const char* what) {
  if (c0.dim_in() != c0.dim_out() || c1.dim_in() != c1.dim_out() || c0.dim_in() != c1.dim_in()) {
    throw ContractViolation(std::string(what) + ": channels must be square on a common target");
  }
  return c0.dim_in();
}

ComplexMatrix projector(std::size_t dim, std::size_t k) { return ComplexMatrix::unit(dim, k, k); }

}  // namespace

ControlState::ControlState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty()) throw ContractViolation("ControlState: no amplitudes");
  double norm = 0.0;
  for (const Complex& a : amplitudes_) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-12) throw ContractViolation("ControlState: amplitudes not unit norm");
}

ControlState ControlState::plus() { return uniform(2); }

ControlState ControlState::zero() { return ControlState({1.0, 0.0}); }

ControlState ControlState::uniform(std::size_t n) {
  if (n == 0) throw ContractViolation("ControlState::uniform: n must be positive");
  return ControlState(std::vector<Complex>(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0)));
}

QuantumChannel quantum_switch(const QuantumChannel& c0, const QuantumChannel& c1) {
  common_target_dim(c0, c1, "quantum_switch");
  const ComplexMatrix p0 = projector(2, 0);
  const ComplexMatrix p1 = projector(2, 1);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(c0.kraus_count() * c1.kraus_count());
  for (const ComplexMatrix& k1 : c1.kraus()) {
    for (const ComplexMatrix& k0 : c0.kraus()) {
      kraus.push_back(kron(p0, k1 * k0) + kron(p1, k0 * k1));
    }
  }
  return QuantumChannel(std::move(kraus));
}

QuantumChannel superpose(const QuantumChannel& c0, const QuantumChannel& c1) {
  common_target_dim(c0, c1, "superpose");
  const double w0 = 1.0 / std::sqrt(static_cast<double>(c1.kraus_count()));
  const double w1 = 1.0 / std::sqrt(static_cast<double>(c0.kraus_count()));
  const ComplexMatrix p0 = projector(2, 0);
  const ComplexMatrix p1 = projector(2, 1);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(c0.kraus_count() * c1.kraus_count());
  for (const ComplexMatrix& k0 : c0.kraus()) {
    for (const ComplexMatrix& k1 : c1.kraus()) {
      kraus.push_back(w0 * kron(p0, k0) + w1 * kron(p1, k1));
    }
  }
  return QuantumChannel(std::move(kraus));
}

std::vector<Ordering> all_orderings(std::size_t m) {
  Ordering order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Ordering> out;
  do {
    out.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

QuantumChannel n_switch(std::span<const QuantumChannel> channels,
                        std::span<const Ordering> orderings) {
  if (channels.empty()) throw ContractViolation("n_switch: no channels");
  if (orderings.empty()) throw ContractViolation("n_switch: no orderings");
  const std::size_t m = channels.size();
  const std::size_t d = channels.front().dim_in();
  for (const QuantumChannel& ch : channels) common_target_dim(channels.front(), ch, "n_switch");
  for (const Ordering& order : orderings) {
    Ordering sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() != m) throw ContractViolation("n_switch: ordering length differs from channel count");
    for (std::size_t i = 0; i < m; ++i) {
      if (sorted[i] != i) throw ContractViolation("n_switch: ordering is not a permutation");
    }
  }

  const std::size_t dim_c = orderings.size();
  std::size_t total = 1;
  for (const QuantumChannel& ch : channels) total *= ch.kraus_count();

  std::vector<std::size_t> index(m, 0);  // mixed-radix Kraus index, channel 0 most significant
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t c = m; c-- > 0;) {
      index[c] = rem % channels[c].kraus_count();
      rem /= channels[c].kraus_count();
    }
    ComplexMatrix v(dim_c * d, dim_c * d);
    for (std::size_t k = 0; k < dim_c; ++k) {
      ComplexMatrix product = ComplexMatrix::identity(d);
      for (std::size_t channel : orderings[k]) product = channels[channel].kraus(index[channel]) * product;
      v += kron(projector(dim_c, k), product);
    }
    kraus.push_back(std::move(v));
  }
  return QuantumChannel(std::move(kraus));
}

QuantumChannel dephase_control(std::size_t dim_c, std::size_t dim_t) {
  if (dim_c == 0 || dim_t == 0) throw ContractViolation("dephase_control: dimensions must be positive");
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(dim_c);
  for (std::size_t m = 0; m < dim_c; ++m) {
    kraus.push_back(kron(projector(dim_c, m), ComplexMatrix::identity(dim_t)));
  }
  return QuantumChannel(std::move(kraus));
}

QuantumChannel restrict_control(const QuantumChannel& combined, const ControlState& ctrl) {
  const std::size_t dim_c = ctrl.dim();
  if (combined.dim_in() % dim_c != 0) {
    throw ContractViolation("restrict_control: input dimension is not a multiple of the control dimension");
  }
  const std::size_t dim_t = combined.dim_in() / dim_c;
  const ComplexMatrix embed = kron(ComplexMatrix::column(ctrl.amplitudes()), ComplexMatrix::identity(dim_t));
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(combined.kraus_count());
  for (const ComplexMatrix& v : combined.kraus()) kraus.push_back(v * embed);
  return QuantumChannel(std::move(kraus));
}

}  // namespace qswitch
