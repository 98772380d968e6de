#include "qswitch/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "qswitch/errors.hpp"

namespace qswitch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t engine_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

constexpr int kMaxChoiAttempts = 100;

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(engine_seed(seed, stream)) {}

SeededRng SeededRng::derive(std::initializer_list<std::uint64_t> keys) const {
  std::uint64_t h = splitmix64(stream_ ^ 0xd1b54a32d192ed03ULL);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
  return SeededRng(seed_, h);
}

double SeededRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

ComplexMatrix ginibre(SeededRng& rng, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw ContractViolation("ginibre: dimensions must be positive");
  ComplexMatrix m(rows, cols);
  for (Complex& z : m.data()) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(re, im);
  }
  return m;
}

ComplexMatrix haar_unitary(SeededRng& rng, std::size_t n) {
  if (n == 0) throw ContractViolation("haar_unitary: n must be positive");
  ComplexMatrix q = ginibre(rng, n, n);
  // Modified Gram-Schmidt over columns.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      Complex proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += std::conj(q(i, k)) * q(i, j);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::norm(q(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

ChoiMatrix random_choi_matrix(SeededRng& rng, std::size_t d) {
  if (d < 2) throw ContractViolation("random_choi_channel: d must be at least 2");
  const std::size_t n = d * d;
  for (int attempt = 0; attempt < kMaxChoiAttempts; ++attempt) {
    const ComplexMatrix x = ginibre(rng, n, n);
    const ComplexMatrix xx = multiply_adjoint(x, x);
    const ComplexMatrix y = partial_trace(xx, d, d, TraceOut::A);
    ComplexMatrix y_inv_sqrt;
    try {
      y_inv_sqrt = inv_sqrt_psd(0.5 * (y + y.adjoint()));
    } catch (const NearSingularError&) {
      continue;
    }
    const ComplexMatrix lift = kron(ComplexMatrix::identity(d), y_inv_sqrt);
    ComplexMatrix c = lift * xx * lift;
    c = 0.5 * (c + c.adjoint());
    return {d, d, std::move(c)};
  }
  throw std::runtime_error("random_choi_channel: normalization stayed singular after 100 draws");
}

QuantumChannel random_choi_channel(SeededRng& rng, std::size_t d) {
  return kraus_from_choi(random_choi_matrix(rng, d));
}

QuantumChannel random_unitary_mixture(SeededRng& rng, std::size_t d, std::size_t k) {
  if (d == 0 || k == 0) throw ContractViolation("random_unitary_mixture: d and k must be positive");
  std::vector<double> weights(k);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& w : weights) {
      w = std::abs(rng.normal());
      norm += w * w;
    }
  } while (norm <= 0.0);
  norm = std::sqrt(norm);

  std::vector<ComplexMatrix> kraus;
  kraus.reserve(k);
  for (double w : weights) kraus.push_back((w / norm) * haar_unitary(rng, d));
  return QuantumChannel(std::move(kraus));
}

}  // namespace qswitch
