#include "symtest/statistic.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "symtest/errors.hpp"
#include "symtest/rng.hpp"
#include "symtest/samplers.hpp"

namespace symtest {

namespace {

constexpr double kUnitTolerance = 1e-12;

void check_unit_rows(const std::vector<double>& rows, std::size_t d,
                     const char* what) {
  for (std::size_t k = 0; k * d < rows.size(); ++k) {
    std::span<const double> r(rows.data() + k * d, d);
    if (std::abs(std::sqrt(dot(r, r)) - 1.0) > kUnitTolerance) {
      throw InvalidSpec(std::string(what) + " row " + std::to_string(k) +
                        " is not a unit vector");
    }
  }
}

int resolve_threads(int requested) {
  if (omp_in_parallel()) return 1;
  return requested > 0 ? requested : omp_get_max_threads();
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Largest j with c[j] <= p, or -1.
long locate_cell(double p, const DirectionGrid& g, double inv_step) {
  const auto& c = g.c_values;
  const long last = static_cast<long>(c.size()) - 1;
  if (p < c.front()) return -1;
  if (p >= c.back()) return last;
  long j;
  if (g.uniform_thresholds) {
    // Non-negative, so truncation is floor.
    j = static_cast<long>((p - c.front()) * inv_step);
    j = std::clamp(j, 0L, last);
    while (j < last && c[j + 1] <= p) ++j;
    while (j > 0 && c[j] > p) --j;
  } else {
    j = static_cast<long>(std::upper_bound(c.begin(), c.end(), p) - c.begin()) - 1;
  }
  return j;
}

// The sample transposed to d x n so that projections vectorize over
// observations while each one still sums coordinates in index order, which
// keeps them bit-identical to dot().
std::vector<double> transpose(const SampleMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> xt(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < d; ++l) xt[l * n + i] = x(i, l);
  }
  return xt;
}

void project(const std::vector<double>& xt, std::size_t n,
             std::span<const double> dir, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t l = 0; l < dir.size(); ++l) {
    const double a = dir[l];
    const double* col = xt.data() + l * n;
    for (std::size_t i = 0; i < n; ++i) out[i] += a * col[i];
  }
}

struct PairBest {
  double abs_sum = -1.0;  // max over thresholds of |sum_i f(X_i)|
  std::size_t j = 0;
};

// Per-thread buffers for the binned kernel.
class BinnedKernel {
 public:
  BinnedKernel(const DirectionGrid& grid, std::size_t n)
      : grid_(grid),
        p_(n),
        q_(n),
        slot_(n),
        bucket_(grid.c_values.size() + 1, 0.0),
        bits_((grid.c_values.size() + 64) / 64, 0) {
    const double span = grid.c_values.back() - grid.c_values.front();
    inv_step_ = span > 0 ? static_cast<double>(grid.c_values.size() - 1) / span : 0.0;
  }

  std::vector<double>& p() { return p_; }
  std::vector<double>& q() { return q_; }

  // Slot 0 collects the points below every threshold; slot j + 1 is cell j.
  void locate_cells() {
    for (std::size_t i = 0; i < p_.size(); ++i) {
      slot_[i] = static_cast<std::size_t>(locate_cell(p_[i], grid_, inv_step_) + 1);
    }
  }

  // Uses the cells from the last locate_cells() and the current q.
  PairBest evaluate() {
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const std::size_t s = slot_[i];
      bucket_[s] += q_[i];
      bits_[s >> 6] |= std::uint64_t{1} << (s & 63);
    }
    bits_[0] &= ~std::uint64_t{1};
    bucket_[0] = 0.0;

    // Walk the occupied cells from the top. The suffix sum after adding cell
    // c holds for thresholds (next lower occupied cell, c].
    const long last = static_cast<long>(grid_.c_values.size()) - 1;
    PairBest best;
    long pending = -2;  // highest cell whose threshold range is still open
    CompensatedSum suffix;
    auto close = [&](long lower) {
      const double v = std::abs(suffix.value());
      if (v >= best.abs_sum) {
        best.abs_sum = v;
        best.j = static_cast<std::size_t>(lower + 1);
      }
    };
    for (std::size_t w = bits_.size(); w-- > 0;) {
      std::uint64_t word = bits_[w];
      bits_[w] = 0;
      while (word != 0) {
        const int hi = 63 - std::countl_zero(word);
        word &= ~(std::uint64_t{1} << hi);
        const long cell = static_cast<long>(w * 64 + hi) - 1;
        if (pending == -2) {
          // Thresholds above every projection: empty indicator.
          best.abs_sum = 0.0;
          best.j = static_cast<std::size_t>(cell + 1);
          if (cell == last) best.abs_sum = -1.0;
        } else {
          close(cell);
        }
        double& b = bucket_[static_cast<std::size_t>(cell + 1)];
        suffix.add(b);
        b = 0.0;
        pending = cell;
      }
    }
    if (pending == -2) {
      best.abs_sum = 0.0;
      best.j = 0;
    } else {
      close(-1);
    }
    return best;
  }

  // Exact supremum over all real thresholds from the current p and q.
  PairBest evaluate_exact() {
    const std::size_t n = p_.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(),
              [&](std::size_t a, std::size_t b) { return p_[a] < p_[b]; });
    PairBest best;
    best.abs_sum = 0.0;
    best.j = n;
    CompensatedSum suffix;
    for (std::size_t i = n; i-- > 0;) {
      suffix.add(q_[order_[i]]);
      if (i == 0 || p_[order_[i - 1]] < p_[order_[i]]) {
        const double v = std::abs(suffix.value());
        if (v >= best.abs_sum) {
          best.abs_sum = v;
          best.j = i;
        }
      }
    }
    return best;
  }

 private:
  const DirectionGrid& grid_;
  std::vector<double> p_;
  std::vector<double> q_;
  std::vector<std::size_t> slot_;
  std::vector<double> bucket_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> order_;
  double inv_step_ = 0.0;
};

void check_inputs(const SampleMatrix& x, const DirectionGrid& grid) {
  if (x.empty()) throw EmptyInput("statistic of an empty sample");
  if (x.cols() != grid.dim) {
    throw DimensionError("sample has d = " + std::to_string(x.cols()) +
                         " but the grid has d = " + std::to_string(grid.dim));
  }
  if (grid.nu == 0 || grid.c_values.empty()) {
    throw InvalidSpec("direction grid is empty");
  }
}

StatValue finish(const std::vector<PairBest>& per_pair, std::size_t n) {
  StatValue out;
  out.n = n;
  double best = -1.0;
  for (std::size_t k = 0; k < per_pair.size(); ++k) {
    if (per_pair[k].abs_sum > best) {
      best = per_pair[k].abs_sum;
      out.k = k;
      out.j = per_pair[k].j;
    }
  }
  const double nd = static_cast<double>(n);
  out.t = std::sqrt(nd) * (best / nd);
  return out;
}

}  // namespace

void DirectionGrid::validate() const {
  if (dim < 2) throw InvalidSpec("direction grid needs d >= 2");
  if (nu == 0) throw InvalidSpec("direction grid needs Nu >= 1");
  if (u.size() != nu * dim || v.size() != nu * dim) {
    throw InvalidSpec("direction arrays do not match Nu * d");
  }
  if (c_values.empty()) throw InvalidSpec("threshold grid is empty");
  for (std::size_t j = 1; j < c_values.size(); ++j) {
    if (!(c_values[j] > c_values[j - 1])) {
      throw InvalidSpec("thresholds must be strictly increasing");
    }
  }
  check_unit_rows(u, dim, "U");
  check_unit_rows(v, dim, "V");
}

DirectionGrid DirectionGrid::custom(std::size_t dim, std::vector<double> u,
                                    std::vector<double> v,
                                    std::vector<double> c_values) {
  DirectionGrid g;
  g.dim = dim;
  g.nu = dim == 0 ? 0 : u.size() / dim;
  g.u = std::move(u);
  g.v = std::move(v);
  g.nc = c_values.empty() ? 0 : c_values.size() - 1;
  g.c0 = c_values.empty() ? 0.0 : std::max(std::abs(c_values.front()),
                                           std::abs(c_values.back()));
  g.c_values = std::move(c_values);
  g.uniform_thresholds = false;
  g.validate();
  return g;
}

std::vector<double> threshold_grid(std::size_t nc, double c0) {
  std::vector<double> c(nc + 1);
  const double ncd = static_cast<double>(nc);
  for (std::size_t j = 0; j <= nc; ++j) {
    c[j] = -c0 + 2.0 * c0 * (static_cast<double>(j) / ncd);
  }
  return c;
}

DirectionGrid make_grid(std::size_t d, std::size_t nu, std::size_t nc, double c0,
                        std::uint64_t master_seed, std::uint64_t replicate,
                        std::uint64_t bootstrap) {
  if (d < 2) throw InvalidSpec("direction grid needs d >= 2");
  if (nu < 1) throw InvalidSpec("Nu must be at least 1");
  if (nc < 1) throw InvalidSpec("Nc must be at least 1");
  if (!(c0 >= 2.0) || !std::isfinite(c0)) throw InvalidSpec("c0 must be >= 2");

  DirectionGrid g;
  g.dim = d;
  g.nu = nu;
  g.u.resize(nu * d);
  g.v.resize(nu * d);
  RngStream su(master_seed, {replicate, bootstrap, Purpose::GridU});
  RngStream sv(master_seed, {replicate, bootstrap, Purpose::GridV});
  for (std::size_t k = 0; k < nu; ++k) {
    draw_unit_vector({g.u.data() + k * d, d}, su);
    draw_unit_vector({g.v.data() + k * d, d}, sv);
  }
  g.c0 = c0;
  g.nc = nc;
  g.c_values = threshold_grid(nc, c0);
  g.uniform_thresholds = true;
  return g;
}

void orthogonal_component(std::span<const double> u, std::span<const double> v,
                          std::span<double> w) {
  const double vu = dot(v, u);
  for (std::size_t l = 0; l < u.size(); ++l) w[l] = v[l] - vu * u[l];
}

double eval_f(std::span<const double> u, std::span<const double> v, double c,
              std::span<const double> x) {
  std::array<double, 32> stack{};
  std::vector<double> heap;
  std::span<double> w;
  if (u.size() <= stack.size()) {
    w = {stack.data(), u.size()};
  } else {
    heap.resize(u.size());
    w = heap;
  }
  orthogonal_component(u, v, w);
  if (!(dot(u, x) >= c)) return 0.0;
  return dot(w, x);
}

StatValue ks_statistic(const SampleMatrix& x, const DirectionGrid& grid,
                       const StatisticOptions& opts) {
  check_inputs(x, grid);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t nu = grid.nu;
  const bool full = opts.pairing == Pairing::FullProduct;
  const bool exact = opts.thresholds == ThresholdMode::ExactSupremum;
  const std::vector<double> xt = transpose(x);
  std::vector<PairBest> per_pair(full ? nu * nu : nu);
  const int threads = resolve_threads(opts.threads);

#pragma omp parallel num_threads(threads) if (threads > 1)
  {
    BinnedKernel kernel(grid, n);
    std::vector<double> w(d);
#pragma omp for schedule(static)
    for (long kk = 0; kk < static_cast<long>(nu); ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      const auto u = grid.u_row(k);
      project(xt, n, u, kernel.p());
      if (!exact) kernel.locate_cells();
      const std::size_t l_begin = full ? 0 : k;
      const std::size_t l_end = full ? nu : k + 1;
      for (std::size_t l = l_begin; l < l_end; ++l) {
        orthogonal_component(u, grid.v_row(l), w);
        project(xt, n, w, kernel.q());
        const std::size_t slot = full ? k * nu + l : k;
        per_pair[slot] = exact ? kernel.evaluate_exact() : kernel.evaluate();
      }
    }
  }
  return finish(per_pair, n);
}

StatValue ks_statistic_brute(const SampleMatrix& x, const DirectionGrid& grid,
                             Pairing pairing) {
  check_inputs(x, grid);
  const std::size_t n = x.rows();
  const std::size_t nu = grid.nu;
  const bool full = pairing == Pairing::FullProduct;
  const double nd = static_cast<double>(n);
  StatValue out;
  out.n = n;
  double best = -1.0;
  for (std::size_t slot = 0; slot < (full ? nu * nu : nu); ++slot) {
    const auto u = grid.u_row(full ? slot / nu : slot);
    const auto v = grid.v_row(full ? slot % nu : slot);
    for (std::size_t j = 0; j < grid.c_values.size(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += eval_f(u, v, grid.c_values[j], x.row(i));
      const double m = std::abs(s / nd);
      if (m > best) {
        best = m;
        out.k = slot;
        out.j = j;
      }
    }
  }
  out.t = std::sqrt(nd) * best;
  return out;
}

StatValue ks_statistic_exact_brute(const SampleMatrix& x,
                                   const DirectionGrid& grid, Pairing pairing) {
  check_inputs(x, grid);
  const std::size_t n = x.rows();
  const std::size_t nu = grid.nu;
  const bool full = pairing == Pairing::FullProduct;
  const double nd = static_cast<double>(n);
  StatValue out;
  out.n = n;
  double best = -1.0;
  for (std::size_t slot = 0; slot < (full ? nu * nu : nu); ++slot) {
    const auto u = grid.u_row(full ? slot / nu : slot);
    const auto v = grid.v_row(full ? slot % nu : slot);
    std::vector<double> thresholds;
    for (std::size_t i = 0; i < n; ++i) thresholds.push_back(dot(u, x.row(i)));
    thresholds.push_back(std::numeric_limits<double>::infinity());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                     thresholds.end());
    for (double c : thresholds) {
      double s = 0.0;
      std::size_t below = 0;
      for (std::size_t i = 0; i < n; ++i) {
        s += eval_f(u, v, c, x.row(i));
        if (dot(u, x.row(i)) < c) ++below;
      }
      const double m = std::abs(s / nd);
      if (m > best) {
        best = m;
        out.k = slot;
        out.j = below;
      }
    }
  }
  out.t = std::sqrt(nd) * best;
  return out;
}

}  // namespace symtest
