#include "symtest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "symtest/errors.hpp"

namespace symtest {

SampleMatrix::SampleMatrix(std::size_t n, std::size_t d)
    : n_(n), d_(d), data_(n * d, 0.0) {}

SampleMatrix::SampleMatrix(std::size_t n, std::size_t d,
                           std::vector<double> row_major)
    : n_(n), d_(d), data_(std::move(row_major)) {
  if (data_.size() != n * d) {
    throw DimensionError("sample matrix: expected " + std::to_string(n * d) +
                         " entries, got " + std::to_string(data_.size()));
  }
}

SampleMatrix SampleMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> copy;
  copy.reserve(rows.size());
  for (const auto& r : rows) copy.emplace_back(r);
  return from_rows(copy);
}

SampleMatrix SampleMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t d = n == 0 ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(n * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw DimensionError("sample matrix: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return SampleMatrix(n, d, std::move(flat));
}

void SampleMatrix::validate() const {
  if (n_ == 0) throw EmptyInput("sample has no rows");
  if (d_ == 0) throw InvalidDimension("sample has zero columns");
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      throw DomainError("non-finite entry at row " + std::to_string(k / d_) +
                        ", column " + std::to_string(k % d_));
    }
  }
}

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
  if (dim == 0) throw InvalidDimension("symmetric matrix needs dim >= 1");
}

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  if (dim == 0) throw InvalidDimension("symmetric matrix needs dim >= 1");
  if (data_.size() != dim * dim) {
    throw std::invalid_argument("symmetric matrix: wrong entry count");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      if (data_[i * dim + j] != data_[j * dim + i]) {
        throw std::invalid_argument("matrix is not exactly symmetric");
      }
    }
  }
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.data_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    m.data_[i * diag.size() + i] = diag[i];
  }
  return m;
}

SymMatrix SymMatrix::symmetrized(std::size_t dim,
                                 std::span<const double> row_major) {
  if (row_major.size() != dim * dim) {
    throw std::invalid_argument("symmetric matrix: wrong entry count");
  }
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m.data_[i * dim + i] = row_major[i * dim + i];
    for (std::size_t j = i + 1; j < dim; ++j) {
      m.set(i, j, 0.5 * (row_major[i * dim + j] + row_major[j * dim + i]));
    }
  }
  return m;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  data_[i * dim_ + j] = value;
  data_[j * dim_ + i] = value;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

std::vector<double> EigenDecomposition::vector(std::size_t k) const {
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = vectors[i * dim + k];
  return out;
}

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j) s += a[i * d + j] * a[i * d + j];
    }
  }
  return std::sqrt(s);
}

// Zeroes a(p, q) with one plane rotation and accumulates it into v.
void rotate(std::vector<double>& a, std::vector<double>& v, std::size_t d,
            std::size_t p, std::size_t q) {
  const double apq = a[p * d + q];
  if (apq == 0.0) return;
  const double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) /
        (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t r = 0; r < d; ++r) {
    if (r == p || r == q) continue;
    const double arp = a[r * d + p];
    const double arq = a[r * d + q];
    const double nrp = c * arp - s * arq;
    const double nrq = s * arp + c * arq;
    a[r * d + p] = a[p * d + r] = nrp;
    a[r * d + q] = a[q * d + r] = nrq;
  }
  a[p * d + p] -= t * apq;
  a[q * d + q] += t * apq;
  a[p * d + q] = a[q * d + p] = 0.0;

  for (std::size_t r = 0; r < d; ++r) {
    const double vrp = v[r * d + p];
    const double vrq = v[r * d + q];
    v[r * d + p] = c * vrp - s * vrq;
    v[r * d + q] = s * vrp + c * vrq;
  }
}

}  // namespace

EigenDecomposition sym_eigen(const SymMatrix& a, double tol) {
  const std::size_t d = a.dim();
  for (double x : a.data()) {
    if (!std::isfinite(x)) throw EigenFailure("non-finite matrix entry");
  }
  std::vector<double> work = a.data();
  std::vector<double> v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

  const double threshold = tol * a.frobenius_norm();
  int sweep = 0;
  while (off_diagonal_norm(work, d) > threshold) {
    if (sweep++ == kJacobiMaxSweeps) {
      throw EigenFailure("Jacobi did not converge in " +
                         std::to_string(kJacobiMaxSweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) rotate(work, v, d, p, q);
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return work[x * d + x] > work[y * d + y];
  });

  EigenDecomposition out;
  out.dim = d;
  out.values.resize(d);
  out.vectors.resize(d * d);
  for (std::size_t k = 0; k < d; ++k) {
    out.values[k] = work[order[k] * d + order[k]];
    for (std::size_t i = 0; i < d; ++i) {
      out.vectors[i * d + k] = v[i * d + order[k]];
    }
  }
  return out;
}

SymMatrix inv_sqrt(const SymMatrix& a, std::optional<double> eps) {
  const EigenDecomposition eig = sym_eigen(a);
  const std::size_t d = a.dim();
  const double floor = eps.value_or(1e-10 * eig.values.front());
  std::vector<double> scale(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (!(eig.values[k] > floor) || eig.values[k] <= 0.0) {
      throw SingularCovariance(
          "eigenvalue " + std::to_string(eig.values[k]) +
          " is not above the positive-definiteness floor " +
          std::to_string(floor) + " (degenerate data or n < d + 1)");
    }
    scale[k] = 1.0 / std::sqrt(eig.values[k]);
  }
  SymMatrix b(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        s += eig.vectors[i * d + k] * scale[k] * eig.vectors[j * d + k];
      }
      b.set(i, j, s);
    }
  }
  return b;
}

std::vector<double> empirical_mean(const SampleMatrix& x) {
  if (x.empty()) throw EmptyInput("mean of an empty sample");
  const std::size_t d = x.cols();
  std::vector<double> m(d, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) m[j] += r[j];
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (double& v : m) v *= inv_n;
  return m;
}

SymMatrix empirical_cov(const SampleMatrix& x) {
  const std::vector<double> m = empirical_mean(x);
  const std::size_t d = x.cols();
  std::vector<double> acc(d * d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) centered[j] = r[j] - m[j];
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t l = j; l < d; ++l) acc[j * d + l] += centered[j] * centered[l];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  SymMatrix cov(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t l = j; l < d; ++l) cov.set(j, l, acc[j * d + l] * inv_n);
  }
  return cov;
}

std::vector<double> row_norms(const SampleMatrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    out[i] = std::sqrt(dot(r, r));
  }
  return out;
}

namespace {

// Rows x_i -> b (x_i - mean).
SampleMatrix affine_rows(const SampleMatrix& x, const std::vector<double>& mean,
                         const SymMatrix& b) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  SampleMatrix out(n, d);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) centered[j] = r[j] - mean[j];
    auto o = out.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < d; ++l) s += b(j, l) * centered[l];
      o[j] = s;
    }
  }
  return out;
}

}  // namespace

Standardized standardize(const SampleMatrix& x, std::optional<double> eps) {
  std::vector<double> mean = empirical_mean(x);
  SymMatrix cov = empirical_cov(x);
  const EigenDecomposition eig = sym_eigen(cov);
  SymMatrix b = inv_sqrt(cov, eps);
  SampleMatrix first = affine_rows(x, mean, b);
  // Second pass on the nearly standardized rows; its covariance is close to
  // I, so this removes the rounding error of an ill-conditioned first pass.
  SampleMatrix out = affine_rows(first, empirical_mean(first), inv_sqrt(empirical_cov(first)));
  const double cond = eig.values.front() / eig.values.back();
  return {std::move(out), std::move(mean), std::move(b), std::move(cov), cond};
}

std::vector<double> matmul(std::span<const double> a, std::span<const double> b,
                           std::size_t d) {
  std::vector<double> c(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double aik = a[i * d + k];
      for (std::size_t j = 0; j < d; ++j) c[i * d + j] += aik * b[k * d + j];
    }
  }
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace symtest
