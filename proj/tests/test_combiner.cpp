#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qswitch/channel.hpp"
#include "qswitch/combiner.hpp"
#include "qswitch/errors.hpp"
#include "qswitch/holevo.hpp"
#include "qswitch/random.hpp"
#include "test_util.hpp"

using namespace qswitch;

namespace {

// 2x2 block operator [[a, b], [c, d]] on control (x) target.
ComplexMatrix blocks(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c, const ComplexMatrix& d) {
  return kron(ComplexMatrix::unit(2, 0, 0), a) + kron(ComplexMatrix::unit(2, 0, 1), b) +
         kron(ComplexMatrix::unit(2, 1, 0), c) + kron(ComplexMatrix::unit(2, 1, 1), d);
}

ComplexMatrix plus_projector() { return 0.5 * ComplexMatrix{{1.0, 1.0}, {1.0, 1.0}}; }

double purity(const ComplexMatrix& rho) { return (rho * rho).trace().real(); }

ComplexMatrix kraus_sum(const QuantumChannel& ch) {
  ComplexMatrix t(ch.dim_out(), ch.dim_in());
  for (const auto& k : ch.kraus()) t += k;
  return t;
}

}  // namespace

TEST_SUITE("combiner") {

TEST_CASE("control states") {
  CHECK_THROWS_AS(ControlState({1.0, 1.0}), ContractViolation);
  CHECK(ControlState::plus().amplitudes()[1] == Complex(1.0 / std::sqrt(2.0)));
  CHECK(ControlState::uniform(6).dim() == 6);
  CHECK(ControlState::zero().amplitudes()[1] == Complex(0.0));
}

TEST_CASE("switch of unitaries: control |0> applies c0 first") {
  SeededRng rng(51);
  const auto u0 = haar_unitary(rng, 2), u1 = haar_unitary(rng, 2);
  const auto sw = quantum_switch(QuantumChannel({u0}), QuantumChannel({u1}));
  const auto psi = testutil::random_pure(rng, 2);
  const auto out0 = apply(restrict_control(sw, ControlState::zero()), psi);
  CHECK(max_abs_diff(out0, kron(ComplexMatrix::unit(2, 0, 0), u1 * u0 * psi * (u1 * u0).adjoint())) < 1e-12);
  const auto out1 = apply(restrict_control(sw, ControlState({0.0, 1.0})), psi);
  CHECK(max_abs_diff(out1, kron(ComplexMatrix::unit(2, 1, 1), u0 * u1 * psi * (u0 * u1).adjoint())) < 1e-12);
  // |+> keeps the output pure: a superposition of the two orders.
  CHECK(purity(apply(restrict_control(sw, ControlState::plus()), psi)) == doctest::Approx(1.0));
}

TEST_CASE("switch of depolarizing channels has the block form [[I/4, rho/8], [rho/8, I/4]]") {
  SeededRng rng(52);
  const auto n = named::depolarizing();
  const auto sw = restrict_control(quantum_switch(n, n), ControlState::plus());
  for (int t = 0; t < 5; ++t) {
    const auto rho = testutil::random_density(rng, 2);
    const auto q = 0.25 * ComplexMatrix::identity(2);
    const auto e = 0.125 * rho;
    CHECK(max_abs_diff(apply(sw, rho), blocks(q, e, e, q)) < 1e-14);
  }
}

TEST_CASE("switch of a unitary with itself leaves the control untouched") {
  SeededRng rng(53);
  const auto u = haar_unitary(rng, 2);
  const auto sw = restrict_control(quantum_switch(QuantumChannel({u}), QuantumChannel({u})), ControlState::plus());
  const auto rho = testutil::random_density(rng, 2);
  CHECK(max_abs_diff(apply(sw, rho), kron(plus_projector(), u * u * rho * (u * u).adjoint())) < 1e-12);
}

TEST_CASE("switch rejects mismatched dimensions") {
  CHECK_THROWS_AS(quantum_switch(named::identity(2), named::identity(3)), ContractViolation);
  CHECK_THROWS_AS(superpose(named::identity(2), named::identity(3)), ContractViolation);
}

TEST_CASE("superposition of a channel with itself: diagonal C(rho)/2, coherence from the Kraus sum") {
  SeededRng rng(54);
  for (int t = 0; t < 5; ++t) {
    const auto c = random_choi_channel(rng, 2);
    const auto sup = restrict_control(superpose(c, c), ControlState::plus());
    const auto rho = testutil::random_density(rng, 2);
    const auto tk = kraus_sum(c);
    const double n = static_cast<double>(c.kraus_count());
    const auto diag = 0.5 * apply(c, rho);
    const auto off = (0.5 / n) * (tk * rho * tk.adjoint());
    CHECK(max_abs_diff(apply(sup, rho), blocks(diag, off, off, diag)) < 1e-12);
  }
}

TEST_CASE("superposition of unitaries acts on pure states coherently") {
  SeededRng rng(55);
  const auto u0 = haar_unitary(rng, 2), u1 = haar_unitary(rng, 2);
  const Complex alpha(0.6, 0.0), beta(0.0, 0.8);
  const auto sup = restrict_control(superpose(QuantumChannel({u0}), QuantumChannel({u1})), ControlState({alpha, beta}));
  const auto v = ginibre(rng, 2, 1);
  ComplexMatrix psi = multiply_adjoint(v, v);
  psi *= 1.0 / psi.trace().real();
  // |Psi> = alpha |0> U0 |psi> + beta |1> U1 |psi>
  ComplexMatrix ket = (1.0 / std::sqrt(std::norm(v(0, 0)) + std::norm(v(1, 0)))) * v;
  const auto a = u0 * ket, b = u1 * ket;
  const ComplexMatrix big(4, 1, {alpha * a(0, 0), alpha * a(1, 0), beta * b(0, 0), beta * b(1, 0)});
  CHECK(max_abs_diff(apply(sup, psi), multiply_adjoint(big, big)) < 1e-12);
}

TEST_CASE("superposition of identities keeps pure inputs pure") {
  SeededRng rng(56);
  const auto sup = restrict_control(superpose(named::identity(2), named::identity(2)), ControlState::plus());
  CHECK(purity(apply(sup, testutil::random_pure(rng, 2))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("superposition weights follow the opposite branch's Kraus count") {
  SeededRng rng(57);
  const auto c0 = random_unitary_mixture(rng, 2, 3);
  const auto c1 = random_unitary_mixture(rng, 2, 2);
  const auto sup = superpose(c0, c1);
  CHECK(sup.kraus_count() == 6);
  CHECK(validate_channel(sup).completeness_residual < 1e-10);
}

TEST_CASE("combined channels are trace preserving") {
  SeededRng rng(58);
  for (int t = 0; t < 100; ++t) {
    const auto c0 = random_choi_channel(rng, 2), c1 = random_choi_channel(rng, 2);
    CHECK(validate_channel(quantum_switch(c0, c1)).completeness_residual <= 1e-8);
    CHECK(validate_channel(superpose(c0, c1)).completeness_residual <= 1e-8);
    CHECK(validate_channel(restrict_control(quantum_switch(c0, c1), ControlState::plus())).completeness_residual <= 1e-8);
  }
  const std::vector<QuantumChannel> trio{random_choi_channel(rng, 2), random_choi_channel(rng, 2),
                                         random_choi_channel(rng, 2)};
  const auto orders = all_orderings(3);
  CHECK(validate_channel(n_switch(trio, orders)).completeness_residual <= 1e-8);
}

TEST_CASE("orderings are lexicographic permutations") {
  const auto o = all_orderings(3);
  REQUIRE(o.size() == 6);
  CHECK(o.front() == Ordering{0, 1, 2});
  CHECK(o[1] == Ordering{0, 2, 1});
  CHECK(o.back() == Ordering{2, 1, 0});
}

TEST_CASE("two-channel generalized switch reduces to the switch") {
  SeededRng rng(59);
  for (int t = 0; t < 5; ++t) {
    const std::vector<QuantumChannel> pair{random_choi_channel(rng, 2), random_choi_channel(rng, 2)};
    const auto gen = n_switch(pair, all_orderings(2));
    CHECK(testutil::choi_distance(gen, quantum_switch(pair[0], pair[1])) < 1e-10);
  }
}

TEST_CASE("generalized switch argument checks") {
  const std::vector<QuantumChannel> pair{named::identity(2), named::identity(2)};
  CHECK_THROWS_AS(n_switch(pair, std::vector<Ordering>{}), ContractViolation);
  CHECK_THROWS_AS(n_switch(pair, std::vector<Ordering>{{0, 0}}), ContractViolation);
  const std::vector<QuantumChannel> mixed{named::identity(2), named::identity(3)};
  CHECK_THROWS_AS(n_switch(mixed, all_orderings(2)), ContractViolation);
}

TEST_CASE("three identity channels in a switch keep pure inputs pure") {
  SeededRng rng(60);
  const std::vector<QuantumChannel> ids(3, named::identity(2));
  const auto orders = all_orderings(3);
  const auto sw = restrict_control(n_switch(ids, orders), ControlState::uniform(orders.size()));
  CHECK(purity(apply(sw, testutil::random_pure(rng, 2))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("three depolarizing channels in a switch carry some information") {
  const std::vector<QuantumChannel> ns(3, named::depolarizing());
  const auto orders = all_orderings(3);
  const auto sw = restrict_control(n_switch(ns, orders), ControlState::uniform(orders.size()));
  OptimizerConfig cfg;
  cfg.restarts = 2;
  cfg.hops = 5;
  CHECK(estimate_capacity(sw, cfg, SeededRng(3)).chi > 1e-3);
}

TEST_CASE("dephasing zeroes control coherences and is idempotent") {
  SeededRng rng(61);
  const auto p = dephase_control(2, 2);
  const auto m = ginibre(rng, 4, 4);
  const auto out = apply(p, m);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(out(i, 2 + j) == Complex(0.0));
      CHECK(out(2 + i, j) == Complex(0.0));
      CHECK(out(i, j) == m(i, j));
      CHECK(out(2 + i, 2 + j) == m(2 + i, 2 + j));
    }
  CHECK(testutil::choi_distance(compose(p, p), p) < 1e-10);
  CHECK(validate_channel(dephase_control(3, 2)).passed());
}

TEST_CASE("dephased self-superposition adds exactly one bit of entropy") {
  SeededRng rng(62);
  const auto p = dephase_control(2, 2);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_choi_channel(rng, 2);
    const auto rho = testutil::random_density(rng, 2);
    const auto sup = restrict_control(superpose(c, c), ControlState::plus());
    const double lhs = von_neumann_entropy(apply(p, apply(sup, rho)));
    CHECK(std::abs(lhs - von_neumann_entropy(apply(c, rho)) - 1.0) < 1e-9);
  }
}

TEST_CASE("restricted switch of depolarizing channels on |0><0| has spectrum {3/8, 1/4, 1/4, 1/8}") {
  const auto n = named::depolarizing();
  const auto sw = restrict_control(quantum_switch(n, n), ControlState::plus());
  const auto ev = hermitian_eigenvalues(apply(sw, ComplexMatrix::unit(2, 0, 0)));
  CHECK(ev[0] == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("control |0> gives the definite order c1 after c0") {
  SeededRng rng(63);
  const auto c0 = random_choi_channel(rng, 2), c1 = random_choi_channel(rng, 2);
  const auto r = restrict_control(quantum_switch(c0, c1), ControlState::zero());
  CHECK(validate_channel(r).passed());
  const auto rho = testutil::random_density(rng, 2);
  const auto out = apply(r, rho);
  CHECK(max_abs_diff(partial_trace(out, 2, 2, TraceOut::A), apply(compose(c1, c0), rho)) < 1e-12);
  CHECK(max_abs_diff(partial_trace(out, 2, 2, TraceOut::B), ComplexMatrix::unit(2, 0, 0)) < 1e-12);
}

TEST_CASE("restricted superposition of depolarizing channels with control |0> outputs I/2 on the target") {
  SeededRng rng(64);
  const auto n = named::depolarizing();
  const auto r = restrict_control(superpose(n, n), ControlState::zero());
  const auto out = apply(r, testutil::random_density(rng, 2));
  CHECK(max_abs_diff(partial_trace(out, 2, 2, TraceOut::A), 0.5 * ComplexMatrix::identity(2)) < 1e-14);
}

TEST_CASE("restrict_control argument checks") {
  const auto sw = quantum_switch(named::identity(2), named::identity(2));
  CHECK_THROWS_AS(restrict_control(sw, ControlState::uniform(3)), ContractViolation);
}

TEST_CASE("switch is gauge invariant; superposition is not") {
  SeededRng rng(65);
  const auto c = random_choi_channel(rng, 2);
  const auto sw = quantum_switch(c, c);
  const auto sup = superpose(c, c);
  bool sup_changed = false;
  for (int t = 0; t < 10; ++t) {
    const auto gu = gauge_transform(c, haar_unitary(rng, 4));
    const auto gv = gauge_transform(c, haar_unitary(rng, 4));
    CHECK(testutil::choi_distance(quantum_switch(gu, gv), sw) < 1e-8);
    if (testutil::choi_distance(superpose(gu, gu), sup) > 1e-3) sup_changed = true;
  }
  CHECK(sup_changed);
}

TEST_CASE("self-switch differs from the superposed double composition for non-commuting Kraus sets") {
  SeededRng rng(66);
  int tested = 0;
  while (tested < 5) {
    const auto c = random_choi_channel(rng, 2);
    if (q_commutativity(c) <= 0.1) continue;
    const auto cc = compose(c, c);
    CHECK(testutil::choi_distance(quantum_switch(c, c), superpose(cc, cc)) > 1e-3);
    ++tested;
  }
  const QuantumChannel phase({ComplexMatrix{{1.0, 0.0}, {0.0, std::polar(1.0, 0.7)}}});
  const auto pp = compose(phase, phase);
  CHECK(testutil::choi_distance(quantum_switch(phase, phase), superpose(pp, pp)) < 1e-8);
}

}  // TEST_SUITE
