#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qswitch {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Sized for the small operators this
/// library handles (density matrices, Kraus operators, Choi matrices).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(std::span<const double> values);
  /// |i><j| in an n-dimensional space.
  static ComplexMatrix unit(std::size_t n, std::size_t i, std::size_t j);
  /// Column vector from amplitudes.
  static ComplexMatrix column(std::span<const Complex> amplitudes);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return entries_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<Complex> data() { return entries_; }
  std::span<const Complex> data() const { return entries_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex scale);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);
ComplexMatrix operator*(ComplexMatrix m, Complex scale);

/// lhs * rhs^dagger without forming the adjoint.
ComplexMatrix multiply_adjoint(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

double frobenius_norm(const ComplexMatrix& m);
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
/// max |M_ij - conj(M_ji)|; infinite for non-square input.
double hermiticity_error(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);
/// ||U U^dagger - I||_max; infinite for non-square input.
double unitarity_error(const ComplexMatrix& u);

/// Pauli matrices.
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();

/// (A (x) B)[i*rB + k][j*cB + l] = A[i][j] * B[k][l].
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Which factor of a bipartite A (x) B operator is traced away.
enum class TraceOut { A, B };

/// Tr_A M (dim_b x dim_b) or Tr_B M (dim_a x dim_a) for M on A (x) B.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            TraceOut which);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // orthonormal columns, vectors(:,k) pairs with values[k]
};

/// Cyclic complex Jacobi. Requires a square Hermitian matrix (1e-10).
EigenDecomposition hermitian_eig(const ComplexMatrix& m);

/// Eigenvalues only (descending): closed form for 2x2, otherwise Householder
/// tridiagonalization followed by implicit QL. Same Hermitian precondition.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// Allocation-light variant for hot loops: `work` holds a row-major Hermitian
/// n x n matrix (not checked) and is overwritten; eigenvalues land in
/// `values`, descending.
void hermitian_eigenvalues_inplace(std::span<Complex> work, std::size_t n, std::span<double> values);

/// R = M^{-1/2} for Hermitian positive definite M.
/// Throws NearSingularError when the smallest eigenvalue is <= 1e-10.
ComplexMatrix inv_sqrt_psd(const ComplexMatrix& m);

}  // namespace qswitch
