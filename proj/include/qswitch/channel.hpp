#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qswitch/matrix.hpp"

namespace qswitch {

/// A completely positive map given by Kraus operators K_i (each dim_out x dim_in),
/// rho -> sum_i K_i rho K_i^dagger.
///
/// Construction checks only shape consistency; trace preservation is
/// reported by validate_channel().
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<ComplexMatrix> kraus);

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  std::size_t kraus_count() const { return kraus_.size(); }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  const ComplexMatrix& kraus(std::size_t i) const { return kraus_[i]; }

 private:
  std::size_t dim_in_ = 0;
  std::size_t dim_out_ = 0;
  std::vector<ComplexMatrix> kraus_;
};

/// Choi matrix with output (x) input ordering:
/// matrix = sum_ij C(|i><j|) (x) |i><j|, so Tr_out(matrix) = I_in for a
/// trace-preserving C.
struct ChoiMatrix {
  std::size_t dim_in = 0;
  std::size_t dim_out = 0;
  ComplexMatrix matrix;
};

struct ValidationReport {
  bool dimensions_consistent = false;
  double completeness_residual = 0.0;  // ||sum K^dagger K - I||_F
  bool passed() const { return dimensions_consistent && completeness_residual <= 1e-8; }
};

ValidationReport validate_channel(const QuantumChannel& ch);

/// Throws ContractViolation when validate_channel fails.
void require_valid(const QuantumChannel& ch, const char* what);

/// sum_i K_i rho K_i^dagger. Only the shape of rho is checked, so this also
/// evaluates the linear extension on arbitrary operators.
ComplexMatrix apply(const QuantumChannel& ch, const ComplexMatrix& rho);

/// second o first, Kraus set {K_i^second K_j^first}.
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);

/// K'_i = sum_j u[i][j] K_j for unitary u (1e-10).
QuantumChannel gauge_transform(const QuantumChannel& ch, const ComplexMatrix& u);

ChoiMatrix choi_from_kraus(const QuantumChannel& ch);

/// Eigen-decomposes the Choi matrix and keeps eigenvalues above 1e-10.
QuantumChannel kraus_from_choi(const ChoiMatrix& cm);

/// Throws ContractViolation unless cm is Hermitian PSD and Tr_out cm = I
/// (all within 1e-8).
void validate_choi(const ChoiMatrix& cm);

/// sum_ij Tr([K_i, K_j][K_i, K_j]^dagger), evaluated commutator by commutator.
double q_commutativity(const QuantumChannel& ch);

/// 2d - 2 Re Tr sum_ij K_i K_j K_i^dagger K_j^dagger; agrees with
/// q_commutativity for trace-preserving channels.
double q_commutativity_trace_form(const QuantumChannel& ch);

namespace named {

QuantumChannel identity(std::size_t dim = 2);
/// {I/2, sigma_x/2, sigma_y/2, sigma_z/2}
QuantumChannel depolarizing();
QuantumChannel pauli_x();
QuantumChannel pauli_y();
QuantumChannel pauli_z();

}  // namespace named

struct NamedChannel {
  std::string name;
  QuantumChannel channel;
};

/// identity, depolarizing, pauli-x, pauli-y, pauli-z.
std::vector<NamedChannel> named_channels();

/// Throws ContractViolation for unknown names.
QuantumChannel named_channel(const std::string& name);

}  // namespace qswitch
