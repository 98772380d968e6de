#include "qswitch/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qswitch/errors.hpp"

namespace qswitch {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 50;

}  // namespace

void Objective::gradient(std::span<const double> x, std::span<double> grad, double h) const {
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double fp = value(probe);
    probe[i] = xi - h;
    const double fm = value(probe);
    probe[i] = xi;
    grad[i] = (fp - fm) / (2.0 * h);
  }
}

LocalMinimum bfgs_minimize(const Objective& objective, std::vector<double> start,
                           const BfgsOptions& options) {
  const std::size_t n = start.size();
  if (n != objective.dimension()) throw ContractViolation("bfgs_minimize: start has wrong dimension");

  LocalMinimum result;
  result.x = std::move(start);
  result.value = objective.value(result.x);

  std::vector<double> grad(n), next_grad(n), direction(n), trial(n), s(n), y(n), hy(n);
  objective.gradient(result.x, grad, options.gradient_step);

  // Inverse Hessian approximation, row-major.
  std::vector<double> inv_hessian(n * n, 0.0);
  auto reset_hessian = [&](double scale) {
    std::fill(inv_hessian.begin(), inv_hessian.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) inv_hessian[i * n + i] = scale;
  };
  reset_hessian(1.0);
  bool first_update = true;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    if (max_abs(grad) < options.gradient_tolerance) {
      result.converged = true;
      return result;
    }

    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum -= inv_hessian[i * n + j] * grad[j];
      direction[i] = sum;
    }
    double slope = dot(grad, direction);
    if (!(slope < 0.0)) {
      reset_hessian(1.0);
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      slope = dot(grad, direction);
    }

    double step = 1.0;
    double trial_value = 0.0;
    bool found = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = result.x[i] + step * direction[i];
      trial_value = objective.value(trial);
      if (std::isfinite(trial_value) && trial_value <= result.value + kArmijo * step * slope) {
        found = true;
        break;
      }
      step *= 0.5;
    }
    if (!found) {
      // No descent along a descent direction: we are at the noise floor of
      // the finite-difference gradient.
      result.converged = true;
      return result;
    }

    objective.gradient(trial, next_grad, options.gradient_step);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - result.x[i];
      y[i] = next_grad[i] - grad[i];
    }
    const double improvement = result.value - trial_value;
    result.x = trial;
    result.value = trial_value;
    std::swap(grad, next_grad);

    if (improvement < options.tolerance) {
      result.converged = true;
      return result;
    }

    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (first_update) {
        reset_hessian(sy / dot(y, y));
        first_update = false;
      }
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += inv_hessian[i * n + j] * y[j];
        hy[i] = sum;
      }
      const double yhy = dot(y, hy);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          inv_hessian[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
      }
    }
  }
  return result;
}

BasinHoppingResult basin_hopping(const Objective& objective, std::vector<double> start,
                                 const BasinHoppingOptions& options, SeededRng& rng) {
  BasinHoppingResult result;
  LocalMinimum current = bfgs_minimize(objective, std::move(start), options.local);
  if (!current.converged) ++result.local_failures;
  result.best = current;

  std::vector<double> trial(current.x.size());
  for (int hop = 0; hop < options.hops; ++hop) {
    for (std::size_t i = 0; i < trial.size(); ++i) {
      trial[i] = current.x[i] + rng.uniform(-options.step_size, options.step_size);
    }
    LocalMinimum candidate = bfgs_minimize(objective, trial, options.local);
    if (!candidate.converged) ++result.local_failures;
    // The acceptance draw is consumed on every hop so the stream does not
    // depend on the comparison outcome.
    const double u = rng.uniform();
    const double delta = candidate.value - current.value;
    const bool accept = delta <= 0.0 || u < std::exp(-delta / options.temperature);
    if (candidate.value < result.best.value) result.best = candidate;
    if (accept) {
      current = std::move(candidate);
      ++result.accepted;
    }
  }
  return result;
}

LocalMinimum nelder_mead_minimize(const std::function<double(std::span<const double>)>& objective,
                                  std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw ContractViolation("nelder_mead_minimize: empty start");

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = objective(simplex[i]);
  if (!std::isfinite(values[0])) throw ContractViolation("nelder_mead_minimize: objective not finite at start");

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), reflected(n), expanded(n), contracted(n);
  LocalMinimum result;

  auto blend = [&](const std::vector<double>& from, double t, std::vector<double>& out) {
    // out = centroid + t * (from - centroid)
    for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + t * (from[i] - centroid[i]);
  };

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];
    if (values[worst] - values[best] < options.tolerance) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[order[k]][i];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    blend(simplex[worst], -1.0, reflected);
    const double f_reflected = objective(reflected);
    if (f_reflected < values[best]) {
      blend(simplex[worst], -2.0, expanded);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }

    // Outside contraction when the reflection beat the worst point, inside otherwise.
    const bool outside = f_reflected < values[worst];
    if (outside) {
      blend(reflected, 0.5, contracted);
    } else {
      blend(simplex[worst], 0.5, contracted);
    }
    const double f_contracted = objective(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }

    for (std::size_t k = 1; k <= n; ++k) {
      std::vector<double>& vertex = simplex[order[k]];
      for (std::size_t i = 0; i < n; ++i) vertex[i] = simplex[best][i] + 0.5 * (vertex[i] - simplex[best][i]);
      values[order[k]] = objective(vertex);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.value = *best_it;
  result.iterations = iter;
  return result;
}

}  // namespace qswitch
