#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qswitch/channel.hpp"
#include "qswitch/matrix.hpp"

namespace qswitch {

/// Pure state of the control system. Amplitudes must have unit norm (1e-12).
class ControlState {
 public:
  explicit ControlState(std::vector<Complex> amplitudes);

  /// (|0> + |1>)/sqrt(2)
  static ControlState plus();
  static ControlState zero();
  /// Balanced superposition over n basis states.
  static ControlState uniform(std::size_t n);

  std::size_t dim() const { return amplitudes_.size(); }
  const std::vector<Complex>& amplitudes() const { return amplitudes_; }

 private:
  std::vector<Complex> amplitudes_;
};

/// Quantum switch on control (x) target with Kraus operators
///   V_ij = |0><0| (x) K1_i K0_j + |1><1| (x) K0_j K1_i.
/// Control |0> runs c0 first and c1 second.
QuantumChannel quantum_switch(const QuantumChannel& c0, const QuantumChannel& c1);

/// One-pass superposition with Kraus operators
///   W_ij = n1^{-1/2} |0><0| (x) K0_i + n0^{-1/2} |1><1| (x) K1_j,
/// n0, n1 being the Kraus counts. Equal counts of four give the 1/2 weights.
QuantumChannel superpose(const QuantumChannel& c0, const QuantumChannel& c1);

/// Order in which channels act; order[0] is applied first.
using Ordering = std::vector<std::size_t>;

/// All m! orderings, lexicographic.
std::vector<Ordering> all_orderings(std::size_t m);

/// Generalized switch: control basis state k selects orderings[k].
/// Kraus operators V_{i1..im} = sum_k |k><k| (x) K^{o_m}_{i_{o_m}} ... K^{o_1}_{i_{o_1}}.
QuantumChannel n_switch(std::span<const QuantumChannel> channels,
                        std::span<const Ordering> orderings);

/// Kraus {|m><m| (x) I_t}: removes coherence between control branches.
QuantumChannel dephase_control(std::size_t dim_c, std::size_t dim_t);

/// Fixes the control input: target -> control (x) target with Kraus
/// V_k (|ctrl> (x) I_t).
QuantumChannel restrict_control(const QuantumChannel& combined, const ControlState& ctrl);

}  // namespace qswitch
