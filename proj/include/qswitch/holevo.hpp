#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qswitch/channel.hpp"
#include "qswitch/matrix.hpp"
#include "qswitch/optimize.hpp"
#include "qswitch/random.hpp"

namespace qswitch {

/// -sum eta log2 eta over the spectrum. Eigenvalues in [-1e-8, 0] count as
/// zero; anything more negative raises NonPsdError.
double entropy_from_eigenvalues(std::span<const double> eigenvalues);

/// Von Neumann entropy in bits of a Hermitian density operator.
double von_neumann_entropy(const ComplexMatrix& rho);

struct StateAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Ensemble of pure qubit states |a> = (cos theta_a, sin theta_a e^{i phi_a})
/// with probabilities softmax(logits).
class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::vector<double> logits, std::vector<StateAngles> angles);

  /// Layout: [logit_0 .. logit_{n-1}, theta_0, phi_0, theta_1, phi_1, ...].
  static Ensemble from_parameters(std::span<const double> params, std::size_t n_states);
  std::vector<double> parameters() const;

  std::size_t size() const { return logits_.size(); }
  const std::vector<double>& logits() const { return logits_; }
  const std::vector<StateAngles>& angles() const { return angles_; }

  std::vector<double> probabilities() const;
  std::array<Complex, 2> state(std::size_t a) const;
  ComplexMatrix density(std::size_t a) const;
  /// sum_a p_a |a><a|
  ComplexMatrix average_density() const;

 private:
  std::vector<double> logits_;
  std::vector<StateAngles> angles_;
};

/// H(C(sum p_a rho_a)) - sum p_a H(C(rho_a)) for a qubit-input channel.
double holevo_objective(const QuantumChannel& ch, const Ensemble& ensemble);

/// Negated Holevo objective over the Ensemble parameter layout, for the
/// minimizers. Channel images of the four qubit matrix units are cached, and
/// the central-difference gradient only recomputes the outputs a coordinate
/// touches.
class HolevoObjective final : public Objective {
 public:
  HolevoObjective(const QuantumChannel& ch, std::size_t n_states);

  std::size_t dimension() const override { return 3 * n_states_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> grad, double h) const override;

 private:
  struct Workspace {
    std::vector<Complex> outputs;  // n_states blocks of dim_out^2
    std::vector<double> entropies;
    std::vector<Complex> scratch;
    std::vector<double> eigenvalues;
  };

  Workspace make_workspace() const;
  void fill_output(double theta, double phi, std::span<Complex> dst) const;
  double entropy_of(std::span<const Complex> m, Workspace& ws) const;
  /// Outputs and entropies for every state at x.
  void prepare(std::span<const double> x, Workspace& ws) const;
  double negated(std::span<const double> probs, Workspace& ws) const;

  std::size_t n_states_;
  std::size_t dim_out_;
  std::array<ComplexMatrix, 4> images_;  // C(|0><0|), C(|0><1|), C(|1><0|), C(|1><1|)
};

struct OptimizerConfig {
  std::size_t n_states = 4;
  std::size_t restarts = 20;
  std::size_t hops = 100;
  double step_size = 0.5;
  double temperature = 1.0;
  double gradient_step = 1e-6;
  double convergence_tol = 1e-9;

  /// Reduced settings for large sweeps (8 restarts, 40 hops).
  static OptimizerConfig sweep();

  /// Throws ContractViolation when any field is not positive.
  void validate() const;
};

/// Parses `key = value` lines (blank lines and `#` comments ignored) on top
/// of the defaults. Unknown keys and malformed values throw ContractViolation.
OptimizerConfig parse_optimizer_config(std::istream& in);
OptimizerConfig load_optimizer_config(const std::string& path);

struct CapacityEstimate {
  double chi = 0.0;  // bits, best over restarts
  Ensemble best_ensemble;
  std::vector<double> restart_values;
  double sigma = 0.0;  // population standard deviation of restart_values
  std::size_t failed_restarts = 0;
};

/// Holevo capacity by basin-hopping over input ensembles, restarted
/// cfg.restarts times from random parameters. Restart r draws from
/// rng.derive({r}), so the result does not depend on execution order.
CapacityEstimate estimate_capacity(const QuantumChannel& ch, const OptimizerConfig& cfg,
                                   const SeededRng& rng);

/// Cross-check: Nelder-Mead on the same objective from `starts` random
/// points, each polished by repeated simplex restarts. Returns chi in bits.
double estimate_capacity_nelder_mead(const QuantumChannel& ch, std::size_t n_states, std::size_t starts,
                                     const SeededRng& rng, double tol = 1e-12);

}  // namespace qswitch
