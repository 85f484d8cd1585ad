#pragma once

// Small dense linear algebra for the symmetry tests: sample matrices,
// symmetric matrices, a Jacobi eigen-solver and sample standardization.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace symtest {

/// n observations of a d-dimensional random vector, stored row-major.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t n, std::size_t d);
  SampleMatrix(std::size_t n, std::size_t d, std::vector<double> row_major);

  static SampleMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);
  static SampleMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return d_; }
  bool empty() const noexcept { return n_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * d_, d_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * d_, d_}; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * d_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * d_ + j]; }

  const std::vector<double>& data() const noexcept { return data_; }

  // Throws EmptyInput when n == 0 and DomainError on a non-finite entry.
  void validate() const;

  bool operator==(const SampleMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Dense symmetric d x d matrix. Symmetry is exact: entries (i, j) and (j, i)
/// are the same double.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);
  // Throws std::invalid_argument unless `entries` is exactly symmetric.
  SymMatrix(std::size_t dim, std::vector<double> row_major);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  // Averages (i, j) and (j, i); for products that are symmetric in exact
  // arithmetic but not after rounding.
  static SymMatrix symmetrized(std::size_t dim,
                               std::span<const double> row_major);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }
  void set(std::size_t i, std::size_t j, double value);

  const std::vector<double>& data() const noexcept { return data_; }
  double max_abs() const;
  double frobenius_norm() const;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

/// Eigenpairs sorted by descending eigenvalue. `vectors` is row-major d x d
/// with eigenvector k stored in column k.
struct EigenDecomposition {
  std::vector<double> values;
  std::vector<double> vectors;
  std::size_t dim = 0;

  std::vector<double> vector(std::size_t k) const;
};

inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm drops below
/// tol * ||A||_F; throws EigenFailure after kJacobiMaxSweeps sweeps.
EigenDecomposition sym_eigen(const SymMatrix& a, double tol = 1e-12);

/// Q diag(lambda^-1/2) Q^T. `eps` is the positive-definiteness floor; when
/// absent it is 1e-10 times the largest eigenvalue.
SymMatrix inv_sqrt(const SymMatrix& a, std::optional<double> eps = {});

std::vector<double> empirical_mean(const SampleMatrix& x);

// Uses the 1/n normalizer.
SymMatrix empirical_cov(const SampleMatrix& x);

std::vector<double> row_norms(const SampleMatrix& x);

struct Standardized {
  SampleMatrix x;
  std::vector<double> mean;
  SymMatrix inv_sqrt_cov;
  SymMatrix cov;
  double condition_number;
};

/// x_hat_i = cov^{-1/2} (x_i - mean), followed by one more pass with the
/// mean and covariance of the result. `inv_sqrt_cov` is the first-pass
/// matrix. Throws SingularCovariance.
Standardized standardize(const SampleMatrix& x,
                         std::optional<double> eps = {});

// Row-major d x d products, used by diagnostics and tests.
std::vector<double> matmul(std::span<const double> a, std::span<const double> b,
                           std::size_t d);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace symtest
