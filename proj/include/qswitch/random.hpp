#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "qswitch/channel.hpp"
#include "qswitch/matrix.hpp"

namespace qswitch {

/// Reproducible random stream keyed by (seed, stream).
///
/// The engine is mt19937_64, whose output sequence is fixed by the C++
/// standard; uniform and normal variates are derived here rather than through
/// <random> distributions, whose algorithms are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent child stream; the same keys always give the same child.
  SeededRng derive(std::initializer_list<std::uint64_t> keys) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// iid entries with real and imaginary parts each N(0, 1).
ComplexMatrix ginibre(SeededRng& rng, std::size_t rows, std::size_t cols);

/// Haar-distributed n x n unitary: Gram-Schmidt QR of a Ginibre matrix,
/// which leaves R with a positive real diagonal.
ComplexMatrix haar_unitary(SeededRng& rng, std::size_t n);

/// Channel with a random Choi matrix built from a d^2 x d^2 Ginibre matrix
/// and normalized by (I (x) Y^{-1/2}), Y = Tr_out X X^dagger.
QuantumChannel random_choi_channel(SeededRng& rng, std::size_t d = 2);

/// Same sampling, returning the Choi matrix itself.
ChoiMatrix random_choi_matrix(SeededRng& rng, std::size_t d = 2);

/// Kraus c_i U_i with Haar U_i and c_i = |g_i| / ||g||, g_i ~ N(0, 1).
QuantumChannel random_unitary_mixture(SeededRng& rng, std::size_t d, std::size_t k);

}  // namespace qswitch
