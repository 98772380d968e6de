#include "qswitch/matrix.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qswitch/errors.hpp"

namespace qswitch {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kJacobiOffTol = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractViolation(std::string(what) + ": shape mismatch");
  }
}

void require_hermitian(const ComplexMatrix& m, const char* what) {
  if (!m.is_square()) throw ContractViolation(std::string(what) + ": matrix is not square");
  if (hermiticity_error(m) > kHermitianTol) {
    throw ContractViolation(std::string(what) + ": matrix is not Hermitian");
  }
}

double off_diagonal_norm(std::span<const Complex> a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += 2.0 * std::norm(a[i * n + j]);
  }
  return std::sqrt(sum);
}

// Plain complex product; std::complex's operator* carries C99 NaN recovery
// that dominates the cost of small rotations.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// In-place cyclic Jacobi on a Hermitian n x n buffer. On return the diagonal
// holds the eigenvalues; if `vectors` is non-null it accumulates the rotations
// (it must start as the identity).
void jacobi_sweeps(std::span<Complex> a, std::size_t n, Complex* vectors) {
  double scale = 0.0;
  for (const Complex& z : a) scale += std::norm(z);
  scale = std::sqrt(scale);
  const double tol = kJacobiOffTol * std::max(1.0, scale);
  // Entries this small cannot move any eigenvalue at double precision.
  const double negligible = 1e-18 * scale;

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a, n) < tol) return;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a[p * n + q];
        const double r = std::sqrt(std::norm(apq));
        if (r <= negligible || r < 1e-300) continue;
        const Complex phase = apq / r;  // e^{i alpha}
        const double app = a[p * n + p].real();
        const double aqq = a[q * n + q].real();

        // Real rotation for the phase-removed block [[app, r], [r, aqq]].
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // J = [[c, s e^{ia}], [-s e^{-ia}, c]] on (p, q); A <- J^dagger A J.
        // Only columns p, q change off the (p, q) block; rows follow by symmetry.
        const Complex jpq = s * phase;
        const Complex jqp = -s * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Complex akp = a[k * n + p];
          const Complex akq = a[k * n + q];
          const Complex new_kp = c * akp + mul(jqp, akq);
          const Complex new_kq = mul(jpq, akp) + c * akq;
          a[k * n + p] = new_kp;
          a[k * n + q] = new_kq;
          a[p * n + k] = std::conj(new_kp);
          a[q * n + k] = std::conj(new_kq);
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        a[p * n + p] = app - t * r;
        a[q * n + q] = aqq + t * r;

        if (vectors != nullptr) {
          for (std::size_t k = 0; k < n; ++k) {
            const Complex vkp = vectors[k * n + p];
            const Complex vkq = vectors[k * n + q];
            vectors[k * n + p] = c * vkp + mul(jqp, vkq);
            vectors[k * n + q] = mul(jpq, vkp) + c * vkq;
          }
        }
      }
    }
  }
}

// Eigenvalues of the real symmetric tridiagonal matrix (diag, off), with
// off[i] coupling i and i+1. Implicit QL with Wilkinson-style shifts. Plain
// sqrt instead of hypot: entries here are O(1) density-matrix elements.
void tridiagonal_ql(std::span<double> diag, std::span<double> off) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  off[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++iter > 60) throw std::runtime_error("hermitian_eigenvalues: QL iteration did not converge");
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = std::sqrt(g * g + 1.0);
      g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * off[i];
        const double b = c * off[i];
        r = std::sqrt(f * f + g * g);
        off[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= p;
          off[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      diag[l] -= p;
      off[l] = g;
      off[m] = 0.0;
    } while (m != l);
  }
}

// Householder reduction of a Hermitian buffer to real symmetric tridiagonal
// form (phases of the sub-diagonal dropped; the spectrum is unchanged).
void householder_tridiagonal(std::span<Complex> a, std::size_t n, std::span<double> diag,
                             std::span<double> off) {
  constexpr std::size_t kStack = 8;
  std::array<Complex, 3 * kStack> stack_buf;
  std::vector<Complex> heap_buf;
  Complex* buf = stack_buf.data();
  if (n > kStack) {
    heap_buf.resize(3 * n);
    buf = heap_buf.data();
  }
  Complex* v = buf;
  Complex* p = buf + n;
  Complex* w = buf + 2 * n;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double sigma = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) sigma += std::norm(a[i * n + k]);
    const double tail = sigma - std::norm(a[(k + 1) * n + k]);
    if (tail <= 0.0) continue;
    const double xnorm = std::sqrt(sigma);
    const Complex x0 = a[(k + 1) * n + k];
    const double x0abs = std::sqrt(std::norm(x0));
    const Complex phase = x0abs > 0.0 ? x0 / x0abs : Complex(1.0, 0.0);
    const Complex alpha = -phase * xnorm;

    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a[i * n + k];
      if (i == k + 1) v[i] -= alpha;
      vnorm2 += std::norm(v[i]);
    }
    const double beta = 2.0 / vnorm2;

    // p = beta B v, w = p - (beta/2)(v^dagger p) v; B <- B - v w^dagger - w v^dagger.
    Complex vp = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      Complex sum = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) sum += mul(a[i * n + j], v[j]);
      p[i] = beta * sum;
      vp += mul(std::conj(v[i]), p[i]);
    }
    const double half = 0.5 * beta * vp.real();
    for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] - half * v[i];
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i * n + j] -= mul(v[i], std::conj(w[j])) + mul(w[i], std::conj(v[j]));
      }
    }
    a[(k + 1) * n + k] = alpha;
    a[k * n + k + 1] = std::conj(alpha);
    for (std::size_t i = k + 2; i < n; ++i) {
      a[i * n + k] = 0.0;
      a[k * n + i] = 0.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = a[i * n + i].real();
    off[i] = i + 1 < n ? std::sqrt(std::norm(a[(i + 1) * n + i])) : 0.0;
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw ContractViolation("ComplexMatrix: entry count does not match rows*cols");
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw ContractViolation("ComplexMatrix: ragged initializer");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::unit(std::size_t n, std::size_t i, std::size_t j) {
  ComplexMatrix m(n, n);
  m(i, j) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> amplitudes) {
  return {amplitudes.size(), 1, std::vector<Complex>(amplitudes.begin(), amplitudes.end())};
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  }
  return out;
}

Complex ComplexMatrix::trace() const {
  if (!is_square()) throw ContractViolation("trace: matrix is not square");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) sum += (*this)(i, i);
  return sum;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator+=");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += rhs.entries_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator-=");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= rhs.entries_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (Complex& z : entries_) z *= scale;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }
ComplexMatrix operator*(ComplexMatrix m, Complex scale) { return m *= scale; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) throw ContractViolation("operator*: inner dimensions differ");
  ComplexMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const Complex a = lhs(i, k);
      if (a == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

ComplexMatrix multiply_adjoint(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.cols() != rhs.cols()) throw ContractViolation("multiply_adjoint: inner dimensions differ");
  ComplexMatrix out(lhs.rows(), rhs.rows());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t j = 0; j < rhs.rows(); ++j) {
      Complex sum = 0.0;
      for (std::size_t k = 0; k < lhs.cols(); ++k) sum += lhs(i, k) * std::conj(rhs(j, k));
      out(i, j) = sum;
    }
  }
  return out;
}

double frobenius_norm(const ComplexMatrix& m) {
  double sum = 0.0;
  for (const Complex& z : m.data()) sum += std::norm(z);
  return std::sqrt(sum);
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "frobenius_distance");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) sum += std::norm(a.data()[k] - b.data()[k]);
  return std::sqrt(sum);
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    worst = std::max(worst, std::norm(a.data()[k] - b.data()[k]));
  }
  return std::sqrt(worst);
}

double hermiticity_error(const ComplexMatrix& m) {
  if (!m.is_square()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      worst = std::max(worst, std::norm(m(i, j) - std::conj(m(j, i))));
    }
  }
  return std::sqrt(worst);
}

bool is_hermitian(const ComplexMatrix& m, double tol) { return hermiticity_error(m) <= tol; }

double unitarity_error(const ComplexMatrix& u) {
  if (!u.is_square()) return std::numeric_limits<double>::infinity();
  return max_abs_diff(multiply_adjoint(u, u), ComplexMatrix::identity(u.rows()));
}

ComplexMatrix sigma_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix sigma_y() { return {{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}}; }
ComplexMatrix sigma_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0, 0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t l = 0; l < b.cols(); ++l) {
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
      }
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            TraceOut which) {
  const std::size_t n = dim_a * dim_b;
  if (m.rows() != n || m.cols() != n) {
    throw ContractViolation("partial_trace: matrix is not (dim_a*dim_b) square");
  }
  if (which == TraceOut::A) {
    ComplexMatrix out(dim_b, dim_b);
    for (std::size_t k = 0; k < dim_b; ++k) {
      for (std::size_t l = 0; l < dim_b; ++l) {
        Complex sum = 0.0;
        for (std::size_t i = 0; i < dim_a; ++i) sum += m(i * dim_b + k, i * dim_b + l);
        out(k, l) = sum;
      }
    }
    return out;
  }
  ComplexMatrix out(dim_a, dim_a);
  for (std::size_t i = 0; i < dim_a; ++i) {
    for (std::size_t j = 0; j < dim_a; ++j) {
      Complex sum = 0.0;
      for (std::size_t k = 0; k < dim_b; ++k) sum += m(i * dim_b + k, j * dim_b + k);
      out(i, j) = sum;
    }
  }
  return out;
}

EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
  require_hermitian(m, "hermitian_eig");
  const std::size_t n = m.rows();
  std::vector<Complex> work(m.data().begin(), m.data().end());
  ComplexMatrix vectors = ComplexMatrix::identity(n);
  jacobi_sweeps(work, n, vectors.data().data());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return work[x * n + x].real() > work[y * n + y].real();
  });

  EigenDecomposition result{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    result.values[k] = work[order[k] * n + order[k]].real();
    for (std::size_t i = 0; i < n; ++i) result.vectors(i, k) = vectors(i, order[k]);
  }
  return result;
}

void hermitian_eigenvalues_inplace(std::span<Complex> work, std::size_t n, std::span<double> values) {
  if (work.size() != n * n || values.size() != n) {
    throw ContractViolation("hermitian_eigenvalues_inplace: buffer sizes do not match n");
  }
  if (n == 0) return;
  if (n == 1) {
    values[0] = work[0].real();
    return;
  }
  if (n == 2) {
    const double a = work[0].real();
    const double d = work[3].real();
    const double mean = 0.5 * (a + d);
    const double radius = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(work[1]));
    values[0] = mean + radius;
    values[1] = mean - radius;
    return;
  }
  constexpr std::size_t kStack = 64;
  std::array<double, kStack> off_stack;
  std::vector<double> off_heap;
  std::span<double> off(off_stack.data(), n);
  if (n > kStack) {
    off_heap.resize(n);
    off = off_heap;
  }
  householder_tridiagonal(work, n, values, off);
  tridiagonal_ql(values, off);
  std::sort(values.begin(), values.end(), std::greater<>());
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  require_hermitian(m, "hermitian_eigenvalues");
  const std::size_t n = m.rows();
  std::vector<Complex> work(m.data().begin(), m.data().end());
  std::vector<double> values(n);
  hermitian_eigenvalues_inplace(work, n, values);
  return values;
}

ComplexMatrix inv_sqrt_psd(const ComplexMatrix& m) {
  const EigenDecomposition eig = hermitian_eig(m);
  const std::size_t n = m.rows();
  if (n == 0) return {};
  if (eig.values.back() <= 1e-10) {
    throw NearSingularError("inv_sqrt_psd: smallest eigenvalue " + std::to_string(eig.values.back()) +
                            " is at or below 1e-10");
  }
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 1.0 / std::sqrt(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = eig.vectors(i, k) * w;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(eig.vectors(j, k));
    }
  }
  return out;
}

}  // namespace qswitch
