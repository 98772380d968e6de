#include "qswitch/channel.hpp"

#include <cmath>
#include <string>

#include "qswitch/errors.hpp"

namespace qswitch {

namespace {

constexpr double kCompletenessTol = 1e-8;
constexpr double kGaugeUnitarityTol = 1e-10;
constexpr double kChoiTol = 1e-8;
constexpr double kKrausKeep = 1e-10;

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

}  // namespace

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw ContractViolation("QuantumChannel: empty Kraus list");
  dim_out_ = kraus_.front().rows();
  dim_in_ = kraus_.front().cols();
  if (dim_in_ == 0 || dim_out_ == 0) throw ContractViolation("QuantumChannel: zero dimension");
  for (const ComplexMatrix& k : kraus_) {
    if (k.rows() != dim_out_ || k.cols() != dim_in_) {
      throw ContractViolation("QuantumChannel: Kraus operators have differing shapes");
    }
  }
}

ValidationReport validate_channel(const QuantumChannel& ch) {
  ValidationReport report;
  report.dimensions_consistent = true;
  ComplexMatrix sum(ch.dim_in(), ch.dim_in());
  for (const ComplexMatrix& k : ch.kraus()) {
    if (k.rows() != ch.dim_out() || k.cols() != ch.dim_in()) {
      report.dimensions_consistent = false;
      continue;
    }
    sum += k.adjoint() * k;
  }
  report.completeness_residual = frobenius_distance(sum, ComplexMatrix::identity(ch.dim_in()));
  return report;
}

void require_valid(const QuantumChannel& ch, const char* what) {
  const ValidationReport report = validate_channel(ch);
  if (!report.passed()) {
    throw ContractViolation(std::string(what) + ": channel is not trace preserving (residual " +
                            std::to_string(report.completeness_residual) + ")");
  }
}

ComplexMatrix apply(const QuantumChannel& ch, const ComplexMatrix& rho) {
  if (rho.rows() != ch.dim_in() || rho.cols() != ch.dim_in()) {
    throw ContractViolation("apply: input operator does not match channel input dimension");
  }
  ComplexMatrix out(ch.dim_out(), ch.dim_out());
  for (const ComplexMatrix& k : ch.kraus()) out += multiply_adjoint(k * rho, k);
  return out;
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
  if (first.dim_out() != second.dim_in()) {
    throw ContractViolation("compose: first.dim_out != second.dim_in");
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(second.kraus_count() * first.kraus_count());
  for (const ComplexMatrix& ks : second.kraus()) {
    for (const ComplexMatrix& kf : first.kraus()) kraus.push_back(ks * kf);
  }
  return QuantumChannel(std::move(kraus));
}

QuantumChannel gauge_transform(const QuantumChannel& ch, const ComplexMatrix& u) {
  const std::size_t n = ch.kraus_count();
  if (u.rows() != n || u.cols() != n) {
    throw ContractViolation("gauge_transform: gauge size differs from Kraus count");
  }
  if (unitarity_error(u) > kGaugeUnitarityTol) {
    throw ContractViolation("gauge_transform: gauge matrix is not unitary");
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ComplexMatrix k(ch.dim_out(), ch.dim_in());
    for (std::size_t j = 0; j < n; ++j) k += u(i, j) * ch.kraus(j);
    kraus.push_back(std::move(k));
  }
  return QuantumChannel(std::move(kraus));
}

ChoiMatrix choi_from_kraus(const QuantumChannel& ch) {
  const std::size_t din = ch.dim_in();
  const std::size_t dout = ch.dim_out();
  // Choi[(a*din + i), (b*din + j)] = sum_k K_k[a][i] conj(K_k[b][j])
  ComplexMatrix m(dout * din, dout * din);
  for (const ComplexMatrix& k : ch.kraus()) {
    const auto vec = k.data();  // row-major: index a*din + i
    for (std::size_t r = 0; r < vec.size(); ++r) {
      if (vec[r] == Complex(0.0, 0.0)) continue;
      for (std::size_t c = 0; c < vec.size(); ++c) m(r, c) += vec[r] * std::conj(vec[c]);
    }
  }
  return {din, dout, std::move(m)};
}

void validate_choi(const ChoiMatrix& cm) {
  const std::size_t n = cm.dim_in * cm.dim_out;
  if (n == 0 || cm.matrix.rows() != n || cm.matrix.cols() != n) {
    throw ContractViolation("Choi matrix: size does not match dim_out*dim_in");
  }
  if (hermiticity_error(cm.matrix) > kChoiTol) {
    throw ContractViolation("Choi matrix: not Hermitian");
  }
  // Symmetrize before the eigensolver, which insists on 1e-10.
  const ComplexMatrix sym = 0.5 * (cm.matrix + cm.matrix.adjoint());
  const std::vector<double> values = hermitian_eigenvalues(sym);
  if (values.back() < -kChoiTol) throw ContractViolation("Choi matrix: not positive semidefinite");
  const ComplexMatrix reduced = partial_trace(cm.matrix, cm.dim_out, cm.dim_in, TraceOut::A);
  if (max_abs_diff(reduced, ComplexMatrix::identity(cm.dim_in)) > kChoiTol) {
    throw ContractViolation("Choi matrix: partial trace over output is not the identity");
  }
}

QuantumChannel kraus_from_choi(const ChoiMatrix& cm) {
  validate_choi(cm);
  const ComplexMatrix sym = 0.5 * (cm.matrix + cm.matrix.adjoint());
  const EigenDecomposition eig = hermitian_eig(sym);
  std::vector<ComplexMatrix> kraus;
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] <= kKrausKeep) continue;
    const double w = std::sqrt(eig.values[k]);
    ComplexMatrix op(cm.dim_out, cm.dim_in);
    for (std::size_t a = 0; a < cm.dim_out; ++a) {
      for (std::size_t i = 0; i < cm.dim_in; ++i) op(a, i) = w * eig.vectors(a * cm.dim_in + i, k);
    }
    kraus.push_back(std::move(op));
  }
  return QuantumChannel(std::move(kraus));
}

double q_commutativity(const QuantumChannel& ch) {
  if (ch.dim_in() != ch.dim_out()) throw ContractViolation("q_commutativity: channel is not square");
  double q = 0.0;
  for (const ComplexMatrix& ki : ch.kraus()) {
    for (const ComplexMatrix& kj : ch.kraus()) {
      const ComplexMatrix c = commutator(ki, kj);
      q += multiply_adjoint(c, c).trace().real();
    }
  }
  return q;
}

double q_commutativity_trace_form(const QuantumChannel& ch) {
  if (ch.dim_in() != ch.dim_out()) {
    throw ContractViolation("q_commutativity_trace_form: channel is not square");
  }
  Complex sum = 0.0;
  for (const ComplexMatrix& ki : ch.kraus()) {
    for (const ComplexMatrix& kj : ch.kraus()) {
      sum += multiply_adjoint(multiply_adjoint(ki * kj, ki), kj).trace();
    }
  }
  return 2.0 * static_cast<double>(ch.dim_in()) - 2.0 * sum.real();
}

namespace named {

QuantumChannel identity(std::size_t dim) { return QuantumChannel({ComplexMatrix::identity(dim)}); }

QuantumChannel depolarizing() {
  return QuantumChannel({0.5 * ComplexMatrix::identity(2), 0.5 * sigma_x(), 0.5 * sigma_y(),
                         0.5 * sigma_z()});
}

QuantumChannel pauli_x() { return QuantumChannel({sigma_x()}); }
QuantumChannel pauli_y() { return QuantumChannel({sigma_y()}); }
QuantumChannel pauli_z() { return QuantumChannel({sigma_z()}); }

}  // namespace named

std::vector<NamedChannel> named_channels() {
  return {{"identity", named::identity()},
          {"depolarizing", named::depolarizing()},
          {"pauli-x", named::pauli_x()},
          {"pauli-y", named::pauli_y()},
          {"pauli-z", named::pauli_z()}};
}

QuantumChannel named_channel(const std::string& name) {
  for (NamedChannel& entry : named_channels()) {
    if (entry.name == name) return std::move(entry.channel);
  }
  throw ContractViolation("unknown named channel '" + name + "'");
}

}  // namespace qswitch
