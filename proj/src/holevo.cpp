#include "qswitch/holevo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qswitch/errors.hpp"

namespace qswitch {

namespace {

constexpr double kPsdTol = 1e-8;

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> random_start(std::size_t n_states, SeededRng& rng) {
  std::vector<double> x(3 * n_states);
  for (std::size_t a = 0; a < n_states; ++a) x[a] = rng.uniform(-1.0, 1.0);
  for (std::size_t a = 0; a < n_states; ++a) {
    x[n_states + 2 * a] = rng.uniform(0.0, std::numbers::pi);
    x[n_states + 2 * a + 1] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return x;
}

void require_qubit_input(const QuantumChannel& ch, const char* what) {
  if (ch.dim_in() != 2) throw ContractViolation(std::string(what) + ": channel input must be a qubit");
}

// Forwards to the wrapped objective and remembers the lowest value seen, so
// the reported capacity is never below a point the optimizer evaluated.
class BestTracker final : public Objective {
 public:
  explicit BestTracker(const Objective& inner) : inner_(inner) {}

  std::size_t dimension() const override { return inner_.dimension(); }
  double value(std::span<const double> x) const override {
    const double v = inner_.value(x);
    if (v < best_value_) {
      best_value_ = v;
      best_x_.assign(x.begin(), x.end());
    }
    return v;
  }
  void gradient(std::span<const double> x, std::span<double> grad, double h) const override {
    inner_.gradient(x, grad, h);
  }

  double best_value() const { return best_value_; }
  const std::vector<double>& best_x() const { return best_x_; }

 private:
  const Objective& inner_;
  mutable double best_value_ = std::numeric_limits<double>::infinity();
  mutable std::vector<double> best_x_;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

double entropy_from_eigenvalues(std::span<const double> eigenvalues) {
  double h = 0.0;
  for (double eta : eigenvalues) {
    if (eta < -kPsdTol) throw NonPsdError("entropy: eigenvalue " + std::to_string(eta) + " below -1e-8");
    if (eta > 0.0) h -= eta * std::log2(eta);
  }
  return h;
}

double von_neumann_entropy(const ComplexMatrix& rho) {
  if (!rho.is_square()) throw ContractViolation("von_neumann_entropy: matrix is not square");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-8) {
    throw ContractViolation("von_neumann_entropy: trace is not 1");
  }
  const std::vector<double> values = hermitian_eigenvalues(rho);
  return std::max(0.0, entropy_from_eigenvalues(values));
}

Ensemble::Ensemble(std::vector<double> logits, std::vector<StateAngles> angles)
    : logits_(std::move(logits)), angles_(std::move(angles)) {
  if (logits_.empty() || logits_.size() != angles_.size()) {
    throw ContractViolation("Ensemble: need one logit and one angle pair per state");
  }
}

Ensemble Ensemble::from_parameters(std::span<const double> params, std::size_t n_states) {
  if (n_states == 0 || params.size() != 3 * n_states) {
    throw ContractViolation("Ensemble::from_parameters: expected 3*n_states parameters");
  }
  std::vector<double> logits(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(n_states));
  std::vector<StateAngles> angles(n_states);
  for (std::size_t a = 0; a < n_states; ++a) {
    angles[a] = {params[n_states + 2 * a], params[n_states + 2 * a + 1]};
  }
  return {std::move(logits), std::move(angles)};
}

std::vector<double> Ensemble::parameters() const {
  std::vector<double> x(logits_);
  for (const StateAngles& ang : angles_) {
    x.push_back(ang.theta);
    x.push_back(ang.phi);
  }
  return x;
}

std::vector<double> Ensemble::probabilities() const { return softmax(logits_); }

std::array<Complex, 2> Ensemble::state(std::size_t a) const {
  const StateAngles& ang = angles_.at(a);
  return {Complex(std::cos(ang.theta), 0.0), std::sin(ang.theta) * std::polar(1.0, ang.phi)};
}

ComplexMatrix Ensemble::density(std::size_t a) const {
  const std::array<Complex, 2> v = state(a);
  const ComplexMatrix ket = ComplexMatrix::column(v);
  return multiply_adjoint(ket, ket);
}

ComplexMatrix Ensemble::average_density() const {
  const std::vector<double> p = probabilities();
  ComplexMatrix avg(2, 2);
  for (std::size_t a = 0; a < size(); ++a) avg += p[a] * density(a);
  return avg;
}

double holevo_objective(const QuantumChannel& ch, const Ensemble& ensemble) {
  require_qubit_input(ch, "holevo_objective");
  const std::vector<double> p = ensemble.probabilities();
  ComplexMatrix avg_out(ch.dim_out(), ch.dim_out());
  double conditional = 0.0;
  for (std::size_t a = 0; a < ensemble.size(); ++a) {
    const ComplexMatrix out = apply(ch, ensemble.density(a));
    conditional += p[a] * entropy_from_eigenvalues(hermitian_eigenvalues(0.5 * (out + out.adjoint())));
    avg_out += p[a] * out;
  }
  const double total = entropy_from_eigenvalues(hermitian_eigenvalues(0.5 * (avg_out + avg_out.adjoint())));
  return total - conditional;
}

HolevoObjective::HolevoObjective(const QuantumChannel& ch, std::size_t n_states)
    : n_states_(n_states), dim_out_(ch.dim_out()) {
  require_qubit_input(ch, "HolevoObjective");
  if (n_states == 0) throw ContractViolation("HolevoObjective: n_states must be positive");
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) images_[2 * i + j] = apply(ch, ComplexMatrix::unit(2, i, j));
  }
}

HolevoObjective::Workspace HolevoObjective::make_workspace() const {
  const std::size_t block = dim_out_ * dim_out_;
  Workspace ws;
  ws.outputs.resize(n_states_ * block);
  ws.entropies.resize(n_states_);
  ws.scratch.resize(block);
  ws.eigenvalues.resize(dim_out_);
  return ws;
}

void HolevoObjective::fill_output(double theta, double phi, std::span<Complex> dst) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex off = c * s * std::polar(1.0, -phi);  // rho_01
  const double cc = c * c;
  const double ss = s * s;
  const auto m00 = images_[0].data();
  const auto m01 = images_[1].data();
  const auto m11 = images_[3].data();
  // C(rho) = cc M00 + off M01 + conj(off) M01^dagger + ss M11; fill the upper
  // triangle and mirror it so the result is exactly Hermitian.
  const std::size_t d = dim_out_;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const std::size_t e = i * d + j;
      const Complex z = cc * m00[e] + ss * m11[e] + off * m01[e] + std::conj(off * m01[j * d + i]);
      if (i == j) {
        dst[e] = Complex(z.real(), 0.0);
      } else {
        dst[e] = z;
        dst[j * d + i] = std::conj(z);
      }
    }
  }
}

double HolevoObjective::entropy_of(std::span<const Complex> m, Workspace& ws) const {
  std::copy(m.begin(), m.end(), ws.scratch.begin());
  hermitian_eigenvalues_inplace(ws.scratch, dim_out_, ws.eigenvalues);
  return entropy_from_eigenvalues(ws.eigenvalues);
}

void HolevoObjective::prepare(std::span<const double> x, Workspace& ws) const {
  const std::size_t block = dim_out_ * dim_out_;
  for (std::size_t a = 0; a < n_states_; ++a) {
    const std::span<Complex> out(ws.outputs.data() + a * block, block);
    fill_output(x[n_states_ + 2 * a], x[n_states_ + 2 * a + 1], out);
    ws.entropies[a] = entropy_of(out, ws);
  }
}

double HolevoObjective::negated(std::span<const double> probs, Workspace& ws) const {
  const std::size_t block = dim_out_ * dim_out_;
  std::fill(ws.scratch.begin(), ws.scratch.end(), Complex(0.0, 0.0));
  double conditional = 0.0;
  for (std::size_t a = 0; a < n_states_; ++a) {
    const Complex* src = ws.outputs.data() + a * block;
    for (std::size_t e = 0; e < block; ++e) ws.scratch[e] += probs[a] * src[e];
    conditional += probs[a] * ws.entropies[a];
  }
  hermitian_eigenvalues_inplace(ws.scratch, dim_out_, ws.eigenvalues);
  return conditional - entropy_from_eigenvalues(ws.eigenvalues);
}

double HolevoObjective::value(std::span<const double> x) const {
  Workspace ws = make_workspace();
  prepare(x, ws);
  const std::vector<double> probs = softmax(x.first(n_states_));
  return negated(probs, ws);
}

void HolevoObjective::gradient(std::span<const double> x, std::span<double> grad, double h) const {
  Workspace ws = make_workspace();
  prepare(x, ws);
  std::vector<double> probe(x.begin(), x.end());
  const std::vector<double> probs = softmax(x.first(n_states_));

  // Logits move only the probabilities.
  for (std::size_t i = 0; i < n_states_; ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double fp = negated(softmax(std::span<const double>(probe).first(n_states_)), ws);
    probe[i] = xi - h;
    const double fm = negated(softmax(std::span<const double>(probe).first(n_states_)), ws);
    probe[i] = xi;
    grad[i] = (fp - fm) / (2.0 * h);
  }

  // An angle moves one state's output.
  const std::size_t block = dim_out_ * dim_out_;
  std::vector<Complex> saved(block);
  for (std::size_t a = 0; a < n_states_; ++a) {
    const std::span<Complex> out(ws.outputs.data() + a * block, block);
    std::copy(out.begin(), out.end(), saved.begin());
    const double saved_entropy = ws.entropies[a];
    for (std::size_t which = 0; which < 2; ++which) {
      const std::size_t idx = n_states_ + 2 * a + which;
      double f[2];
      for (int side = 0; side < 2; ++side) {
        probe[idx] = x[idx] + (side == 0 ? h : -h);
        fill_output(probe[n_states_ + 2 * a], probe[n_states_ + 2 * a + 1], out);
        ws.entropies[a] = entropy_of(out, ws);
        f[side] = negated(probs, ws);
      }
      probe[idx] = x[idx];
      grad[idx] = (f[0] - f[1]) / (2.0 * h);
    }
    std::copy(saved.begin(), saved.end(), out.begin());
    ws.entropies[a] = saved_entropy;
  }
}

OptimizerConfig OptimizerConfig::sweep() {
  OptimizerConfig cfg;
  cfg.restarts = 8;
  cfg.hops = 40;
  return cfg;
}

void OptimizerConfig::validate() const {
  if (n_states == 0 || restarts == 0 || hops == 0 || !(step_size > 0.0) || !(temperature > 0.0) ||
      !(gradient_step > 0.0) || !(convergence_tol > 0.0)) {
    throw ContractViolation("OptimizerConfig: all settings must be positive");
  }
}

OptimizerConfig parse_optimizer_config(std::istream& in) {
  OptimizerConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ContractViolation("optimizer config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string text = trim(line.substr(eq + 1));
    std::istringstream value(text);
    auto read = [&](auto& field) {
      value >> field;
      if (value.fail() || !value.eof()) {
        throw ContractViolation("optimizer config line " + std::to_string(lineno) + ": bad value '" + text + "'");
      }
    };
    if (key == "n_states") read(cfg.n_states);
    else if (key == "restarts") read(cfg.restarts);
    else if (key == "hops") read(cfg.hops);
    else if (key == "step_size") read(cfg.step_size);
    else if (key == "temperature") read(cfg.temperature);
    else if (key == "gradient_step") read(cfg.gradient_step);
    else if (key == "convergence_tol") read(cfg.convergence_tol);
    else throw ContractViolation("optimizer config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

OptimizerConfig load_optimizer_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open optimizer config '" + path + "'");
  return parse_optimizer_config(in);
}

CapacityEstimate estimate_capacity(const QuantumChannel& ch, const OptimizerConfig& cfg,
                                   const SeededRng& rng) {
  cfg.validate();
  require_valid(ch, "estimate_capacity");
  const HolevoObjective objective(ch, cfg.n_states);

  BasinHoppingOptions options;
  options.hops = static_cast<int>(cfg.hops);
  options.step_size = cfg.step_size;
  options.temperature = cfg.temperature;
  options.local.gradient_step = cfg.gradient_step;
  options.local.tolerance = cfg.convergence_tol;

  CapacityEstimate estimate;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    SeededRng stream = rng.derive({r});
    try {
      std::vector<double> start = random_start(cfg.n_states, stream);
      const BestTracker tracker(objective);
      basin_hopping(tracker, std::move(start), options, stream);
      estimate.restart_values.push_back(std::max(0.0, -tracker.best_value()));
      if (tracker.best_value() < best_value) {
        best_value = tracker.best_value();
        best_x = tracker.best_x();
      }
    } catch (const std::exception&) {
      ++estimate.failed_restarts;
    }
  }
  if (estimate.restart_values.empty()) {
    throw std::runtime_error("estimate_capacity: every restart failed");
  }

  estimate.chi = *std::max_element(estimate.restart_values.begin(), estimate.restart_values.end());
  estimate.best_ensemble = Ensemble::from_parameters(best_x, cfg.n_states);
  double mean = 0.0;
  for (double v : estimate.restart_values) mean += v;
  mean /= static_cast<double>(estimate.restart_values.size());
  double var = 0.0;
  for (double v : estimate.restart_values) var += (v - mean) * (v - mean);
  estimate.sigma = std::sqrt(var / static_cast<double>(estimate.restart_values.size()));
  return estimate;
}

double estimate_capacity_nelder_mead(const QuantumChannel& ch, std::size_t n_states, std::size_t starts,
                                     const SeededRng& rng, double tol) {
  require_valid(ch, "estimate_capacity_nelder_mead");
  const HolevoObjective objective(ch, n_states);
  const auto f = [&](std::span<const double> x) { return objective.value(x); };

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < starts; ++s) {
    SeededRng stream = rng.derive({s});
    LocalMinimum run = nelder_mead_minimize(f, random_start(n_states, stream), tol);
    // A collapsed simplex can stall away from the minimum; restart it in place.
    for (int round = 0; round < 20; ++round) {
      LocalMinimum again = nelder_mead_minimize(f, run.x, tol);
      const bool improved = again.value < run.value - tol;
      if (again.value < run.value) run = std::move(again);
      if (!improved) break;
    }
    best = std::min(best, run.value);
  }
  return std::max(0.0, -best);
}

}  // namespace qswitch
