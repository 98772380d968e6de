#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "qswitch/channel.hpp"
#include "qswitch/combiner.hpp"
#include "qswitch/errors.hpp"
#include "qswitch/holevo.hpp"
#include "qswitch/random.hpp"
#include "test_util.hpp"

using namespace qswitch;

namespace {

const double kSwitchTarget =
    testutil::spectrum_entropy({5.0 / 16, 5.0 / 16, 3.0 / 16, 3.0 / 16}) -
    testutil::spectrum_entropy({3.0 / 8, 1.0 / 4, 1.0 / 4, 1.0 / 8});

// {|0>, |1>} with equal weights.
Ensemble basis_ensemble() { return Ensemble({0.0, 0.0}, {{0.0, 0.0}, {std::numbers::pi / 2, 0.0}}); }

QuantumChannel switched_depolarizing() {
  return restrict_control(quantum_switch(named::depolarizing(), named::depolarizing()), ControlState::plus());
}

OptimizerConfig quick() {
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.hops = 20;
  return cfg;
}

}  // namespace

TEST_SUITE("holevo") {

TEST_CASE("entropy of simple states") {
  CHECK(von_neumann_entropy(0.5 * ComplexMatrix::identity(2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(von_neumann_entropy(ComplexMatrix::unit(2, 0, 0)) == 0.0);
  const double d[] = {3.0 / 8, 1.0 / 4, 1.0 / 4, 1.0 / 8};
  CHECK(von_neumann_entropy(ComplexMatrix::diagonal(d)) == doctest::Approx(1.90564).epsilon(1e-5));
  CHECK(von_neumann_entropy(0.25 * ComplexMatrix::identity(4)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("entropy clamps rounding noise and rejects negative spectra") {
  const double tiny[] = {1.0 + 5e-9, -5e-9};
  CHECK(entropy_from_eigenvalues(tiny) == doctest::Approx(0.0).epsilon(1e-7));
  const double bad[] = {1.1, -0.1};
  CHECK_THROWS_AS(entropy_from_eigenvalues(bad), NonPsdError);
  CHECK_THROWS_AS(von_neumann_entropy(ComplexMatrix::diagonal(bad)), NonPsdError);
  CHECK_THROWS_AS(von_neumann_entropy(ComplexMatrix::identity(2)), ContractViolation);  // trace 2
  CHECK_THROWS_AS(von_neumann_entropy(ComplexMatrix{{0.5, 1.0}, {0.0, 0.5}}), ContractViolation);
}

TEST_CASE("ensembles: probabilities, normalized states, parameter round trip") {
  SeededRng rng(81);
  std::vector<double> params(12);
  for (double& p : params) p = rng.uniform(-3.0, 3.0);
  const auto e = Ensemble::from_parameters(params, 4);
  double sum = 0.0;
  for (double p : e.probabilities()) {
    CHECK(p >= 0.0);
    sum += p;
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
  for (std::size_t a = 0; a < 4; ++a) {
    const auto s = e.state(a);
    CHECK(std::abs(std::norm(s[0]) + std::norm(s[1]) - 1.0) < 1e-12);
    CHECK(std::abs(e.density(a).trace() - 1.0) < 1e-12);
  }
  CHECK(e.parameters() == params);
  CHECK(std::abs(e.average_density().trace() - 1.0) < 1e-12);
  CHECK_THROWS_AS(Ensemble::from_parameters(params, 5), ContractViolation);
}

TEST_CASE("Holevo objective: identity, depolarizing, switched depolarizing") {
  CHECK(holevo_objective(named::identity(2), basis_ensemble()) == doctest::Approx(1.0).epsilon(1e-12));
  SeededRng rng(82);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> params(12);
    for (double& p : params) p = rng.uniform(-3.0, 3.0);
    CHECK(std::abs(holevo_objective(named::depolarizing(), Ensemble::from_parameters(params, 4))) < 1e-12);
  }
  CHECK(kSwitchTarget == doctest::Approx(0.04878).epsilon(1e-4));
  CHECK(std::abs(holevo_objective(switched_depolarizing(), basis_ensemble()) - kSwitchTarget) < 1e-12);
  CHECK_THROWS_AS(holevo_objective(named::identity(3), basis_ensemble()), ContractViolation);
}

TEST_CASE("fast objective agrees with the general one") {
  SeededRng rng(83);
  for (int t = 0; t < 10; ++t) {
    const auto c = restrict_control(superpose(random_choi_channel(rng, 2), random_choi_channel(rng, 2)),
                                    ControlState::plus());
    const HolevoObjective obj(c, 4);
    std::vector<double> params(12);
    for (double& p : params) p = rng.uniform(-3.0, 3.0);
    CHECK(std::abs(obj.value(params) + holevo_objective(c, Ensemble::from_parameters(params, 4))) < 1e-12);
  }
}

TEST_CASE("structured gradient equals plain central differences") {
  SeededRng rng(84);
  const auto c = restrict_control(quantum_switch(random_choi_channel(rng, 2), random_choi_channel(rng, 2)),
                                  ControlState::plus());
  const HolevoObjective obj(c, 4);
  std::vector<double> x(12);
  for (double& p : x) p = rng.uniform(-2.0, 2.0);
  std::vector<double> fast(12), plain(12);
  obj.gradient(x, fast, 1e-6);
  obj.Objective::gradient(x, plain, 1e-6);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fast[i] - plain[i]) < 1e-8);
}

TEST_CASE("capacity anchors: depolarizing, identity, switched depolarizing") {
  const auto n = estimate_capacity(named::depolarizing(), quick(), SeededRng(1));
  CHECK(n.chi <= 1e-6);
  const auto id = estimate_capacity(named::identity(2), quick(), SeededRng(1));
  CHECK(std::abs(id.chi - 1.0) <= 1e-5);
  const auto sw = estimate_capacity(switched_depolarizing(), quick(), SeededRng(1));
  CHECK(sw.chi >= 0.0488 - 1e-4);
  CHECK(sw.chi <= 0.0488 + 3e-3);
}

TEST_CASE("capacity estimate invariants") {
  SeededRng rng(85);
  const auto c = random_choi_channel(rng, 2);
  const auto est = estimate_capacity(c, quick(), SeededRng(9));
  REQUIRE(est.restart_values.size() == 4);
  CHECK(est.failed_restarts == 0);
  for (double v : est.restart_values) CHECK(v <= est.chi);
  CHECK(est.chi == *std::max_element(est.restart_values.begin(), est.restart_values.end()));
  CHECK(est.sigma >= 0.0);
  CHECK(est.chi <= 1.0 + 1e-6);
  // The best ensemble attains the reported value.
  CHECK(std::abs(holevo_objective(c, est.best_ensemble) - est.chi) < 1e-12);

  const auto again = estimate_capacity(c, quick(), SeededRng(9));
  CHECK(again.chi == est.chi);
  CHECK(again.restart_values == est.restart_values);
}

TEST_CASE("capacity never exceeds log2 of the output dimension") {
  SeededRng rng(86);
  const auto c = restrict_control(superpose(named::identity(2), named::identity(2)), ControlState::plus());
  CHECK(estimate_capacity(c, quick(), rng).chi <= 2.0 + 1e-6);
}

TEST_CASE("capacity rejects invalid channels and configs") {
  CHECK_THROWS_AS(estimate_capacity(QuantumChannel({2.0 * ComplexMatrix::identity(2)}), quick(), SeededRng(1)),
                  ContractViolation);
  OptimizerConfig bad = quick();
  bad.restarts = 0;
  CHECK_THROWS_AS(estimate_capacity(named::identity(2), bad, SeededRng(1)), ContractViolation);
  CHECK_THROWS_AS(estimate_capacity(named::identity(3), quick(), SeededRng(1)), ContractViolation);
}

TEST_CASE("Nelder-Mead agrees with basin hopping on unitary mixtures") {
  SeededRng rng(87);
  for (int t = 0; t < 3; ++t) {
    const auto c = random_unitary_mixture(rng, 2, 3);
    const double bh = estimate_capacity(c, OptimizerConfig{}, rng.derive({1, std::uint64_t(t)})).chi;
    const double nm = estimate_capacity_nelder_mead(c, 4, 4, rng.derive({2, std::uint64_t(t)}));
    CHECK(std::abs(bh - nm) <= 2e-3);
  }
}

TEST_CASE("dephased self-superposition has the capacity of the channel") {
  SeededRng rng(88);
  const auto p = dephase_control(2, 2);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_choi_channel(rng, 2);
    const auto dephased = compose(p, restrict_control(superpose(c, c), ControlState::plus()));
    const double a = estimate_capacity(dephased, OptimizerConfig::sweep(), rng.derive({1})).chi;
    const double b = estimate_capacity(c, OptimizerConfig::sweep(), rng.derive({2})).chi;
    CHECK(std::abs(a - b) <= 2e-3);
  }
}

TEST_CASE("four ensemble states suffice") {
  SeededRng rng(89);
  for (int t = 0; t < 20; ++t) {
    const auto c0 = random_choi_channel(rng, 2), c1 = random_choi_channel(rng, 2);
    const auto combined = restrict_control(t % 2 == 0 ? quantum_switch(c0, c1) : superpose(c0, c1),
                                           ControlState::plus());
    OptimizerConfig four = OptimizerConfig::sweep();
    OptimizerConfig six = four;
    six.n_states = 6;
    const double a = estimate_capacity(combined, four, rng.derive({1})).chi;
    const double b = estimate_capacity(combined, six, rng.derive({2})).chi;
    CHECK(std::abs(a - b) <= 2e-3);
  }
}

TEST_CASE("optimizer config parsing") {
  std::istringstream ok("# sweep settings\nrestarts = 8\nhops=40  # fewer hops\n\nstep_size = 0.25\n");
  const auto cfg = parse_optimizer_config(ok);
  CHECK(cfg.restarts == 8);
  CHECK(cfg.hops == 40);
  CHECK(cfg.step_size == 0.25);
  CHECK(cfg.n_states == 4);

  std::istringstream unknown("restart = 3\n");
  CHECK_THROWS_AS(parse_optimizer_config(unknown), ContractViolation);
  std::istringstream malformed("hops = many\n");
  CHECK_THROWS_AS(parse_optimizer_config(malformed), ContractViolation);
  std::istringstream no_equals("hops 4\n");
  CHECK_THROWS_AS(parse_optimizer_config(no_equals), ContractViolation);
  std::istringstream zero("temperature = 0\n");
  CHECK_THROWS_AS(parse_optimizer_config(zero), ContractViolation);
  CHECK_THROWS_AS(load_optimizer_config("/nonexistent/optimizer.cfg"), IoError);
}

TEST_CASE("sweep settings") {
  const auto s = OptimizerConfig::sweep();
  CHECK(s.restarts == 8);
  CHECK(s.hops == 40);
  const OptimizerConfig d;
  CHECK(d.restarts == 20);
  CHECK(d.hops == 100);
  CHECK(d.gradient_step == 1e-6);
}

}  // TEST_SUITE
