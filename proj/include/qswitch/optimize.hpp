#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qswitch/random.hpp"

namespace qswitch {

/// Scalar field to be minimized.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> x) const = 0;

  /// Central differences with step h. Subclasses may override with a cheaper
  /// evaluation of the same difference quotients.
  virtual void gradient(std::span<const double> x, std::span<double> grad, double h) const;
};

/// Adapts a callable to Objective.
class FunctionObjective final : public Objective {
 public:
  using Function = std::function<double(std::span<const double>)>;

  FunctionObjective(std::size_t dimension, Function f) : dimension_(dimension), f_(std::move(f)) {}

  std::size_t dimension() const override { return dimension_; }
  double value(std::span<const double> x) const override { return f_(x); }

 private:
  std::size_t dimension_;
  Function f_;
};

struct LocalMinimum {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct BfgsOptions {
  double gradient_step = 1e-6;
  double tolerance = 1e-9;  // stop when an iteration improves f by less than this
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
};

/// Quasi-Newton minimization with an inverse-Hessian BFGS update and
/// Armijo backtracking.
LocalMinimum bfgs_minimize(const Objective& objective, std::vector<double> start,
                           const BfgsOptions& options = {});

struct BasinHoppingOptions {
  int hops = 100;
  double step_size = 0.5;
  double temperature = 1.0;
  BfgsOptions local;
};

struct BasinHoppingResult {
  LocalMinimum best;
  int accepted = 0;
  int local_failures = 0;  // local searches that hit max_iterations
};

/// Global minimization: perturb every coordinate by U(-step, step), minimize
/// locally, accept by the Metropolis rule exp(-(f_new - f_cur)/T).
BasinHoppingResult basin_hopping(const Objective& objective, std::vector<double> start,
                                 const BasinHoppingOptions& options, SeededRng& rng);

struct NelderMeadOptions {
  double tolerance = 1e-10;  // on max f - min f over the simplex
  int max_iterations = 10000;
  double initial_step = 0.5;
};

/// Downhill simplex with reflection 1, expansion 2, contraction 1/2, shrink 1/2.
LocalMinimum nelder_mead_minimize(const std::function<double(std::span<const double>)>& objective,
                                  std::vector<double> start, const NelderMeadOptions& options = {});

inline LocalMinimum nelder_mead_minimize(const std::function<double(std::span<const double>)>& objective,
                                         std::vector<double> start, double tolerance) {
  NelderMeadOptions options;
  options.tolerance = tolerance;
  return nelder_mead_minimize(objective, std::move(start), options);
}

}  // namespace qswitch
