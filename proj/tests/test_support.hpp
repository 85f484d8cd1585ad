#pragma once

// Independent helpers for the test suites: data generators that do not go
// through the library's streams, random orthogonal matrices, numerical
// integration and Kolmogorov distances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "symtest/linalg.hpp"

namespace symtest::testing {

inline SampleMatrix gaussian_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  SampleMatrix x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = z(gen);
  }
  return x;
}

// Haar-ish orthogonal matrix by Gram-Schmidt on Gaussian columns; row-major.
inline std::vector<double> random_orthogonal(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> q(d * d);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> col(d);
    for (double& v : col) v = z(gen);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < c; ++p) {
        double s = 0.0;
        for (std::size_t r = 0; r < d; ++r) s += col[r] * q[r * d + p];
        for (std::size_t r = 0; r < d; ++r) col[r] -= s * q[r * d + p];
      }
    }
    double norm = 0.0;
    for (double v : col) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < d; ++r) q[r * d + c] = col[r] / norm;
  }
  return q;
}

// y = M x for row-major M.
inline std::vector<double> apply(const std::vector<double>& m, std::span<const double> x) {
  const std::size_t d = x.size();
  std::vector<double> y(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) y[r] += m[r * d + c] * x[c];
  }
  return y;
}

// Rows x_i -> M x_i + shift.
inline SampleMatrix transform_rows(const SampleMatrix& x, const std::vector<double>& m,
                                   const std::vector<double>& shift = {}) {
  SampleMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto y = apply(m, x.row(i));
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out(i, j) = y[j] + (shift.empty() ? 0.0 : shift[j]);
    }
  }
  return out;
}

// Composite Simpson rule with an even number of intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t intervals = 20000) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

// Tabulated CDF of a density on [0, upper], normalized numerically.
class TabulatedCdf {
 public:
  TabulatedCdf(const std::function<double(double)>& density, double upper,
               std::size_t cells = 200000)
      : upper_(upper), step_(upper / static_cast<double>(cells)), cdf_(cells + 1, 0.0) {
    for (std::size_t i = 0; i < cells; ++i) {
      const double a = step_ * static_cast<double>(i);
      const double m = a + 0.5 * step_;
      const double b = a + step_;
      cdf_[i + 1] = cdf_[i] + step_ / 6.0 * (density(a) + 4.0 * density(m) + density(b));
    }
    const double total = cdf_.back();
    for (double& v : cdf_) v /= total;
  }

  double operator()(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= upper_) return 1.0;
    const double pos = x / step_;
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
  }

 private:
  double upper_;
  double step_;
  std::vector<double> cdf_;
};

// sup_x |F_n(x) - F(x)|.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f),
                  std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

// Two-sample Kolmogorov distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline std::vector<double> column(const SampleMatrix& x, std::size_t j) {
  std::vector<double> c(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) c[i] = x(i, j);
  return c;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Q diag(kappa^(k/(d-1))) Q^T for a random orthogonal Q.
inline SymMatrix spd_with_condition(std::size_t d, double kappa, std::uint64_t seed) {
  const auto q = testing::random_orthogonal(d, seed);
  std::vector<double> lambda(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double t = d == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(d - 1);
    lambda[k] = std::pow(kappa, t);
  }
  std::vector<double> a(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) a[i * d + j] += q[i * d + k] * lambda[k] * q[j * d + k];
    }
  }
  return SymMatrix::symmetrized(d, a);
}

// Max-norm distance of a row-major d x d matrix from the identity.
inline double identity_deviation(const std::vector<double>& m, std::size_t d) {
  double dev = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      dev = std::max(dev, std::abs(m[i * d + j] - (i == j ? 1.0 : 0.0)));
    }
  }
  return dev;
}

}  // namespace symtest::testing
