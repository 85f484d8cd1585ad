#include "symtest/samplers.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "symtest/errors.hpp"

namespace symtest {

namespace {

struct FamilyInfo {
  Family family;
  std::string_view name;
  std::size_t fixed_dim;  // 0 when the dimension is a parameter
};

constexpr std::array<FamilyInfo, 17> kFamilies{{
    {Family::GaussianCorr, "gauss", 0},
    {Family::Cauchy, "cauchy", 0},
    {Family::MVt, "mvt", 0},
    {Family::Kotz, "kotz", 0},
    {Family::PearsonVII, "pvii", 0},
    {Family::GaussMixture, "mg", 0},
    {Family::NonCenteredGauss, "ncg", 0},
    {Family::MetaT, "metat", 0},
    {Family::HyperCube, "cube", 0},
    {Family::ExpThirdCoord, "exp3", 3},
    {Family::TriangleProduct, "tri3", 3},
    {Family::GaussMix2, "mix2", 2},
    {Family::GaussMix3, "mix3", 3},
    {Family::GammaPlusNormal, "gammanormal", 0},
    {Family::Burr, "burr", 0},
    {Family::UnitCube, "unitcube", 0},
    {Family::SectorSetA, "sectorA", 2},
}};

const FamilyInfo& info(Family f) {
  for (const auto& fi : kFamilies) {
    if (fi.family == f) return fi;
  }
  throw InvalidSpec("unknown distribution family");
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_number(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw InvalidSpec("parameter '" + std::string(key) + "' is not a number: '" +
                      std::string(text) + "'");
  }
  return v;
}

// Parameters each family accepts besides d.
std::vector<std::string_view> allowed_keys(Family f) {
  switch (f) {
    case Family::GaussianCorr: return {"rho"};
    case Family::MVt:
    case Family::MetaT: return {"df"};
    case Family::Kotz: return {"N", "r", "s"};
    case Family::PearsonVII: return {"N", "m"};
    case Family::GaussMixture:
    case Family::NonCenteredGauss: return {"mu1"};
    case Family::Burr: return {"beta"};
    case Family::SectorSetA: return {"polar", "cartesian"};
    default: return {};
  }
}

// Lower-triangular Cholesky factor of a small SPD matrix (row-major).
std::vector<double> cholesky(std::span<const double> a, std::size_t d) {
  std::vector<double> l(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      if (i == j) {
        if (s <= 0.0) throw InvalidSpec("covariance is not positive definite");
        l[i * d + i] = std::sqrt(s);
      } else {
        l[i * d + j] = s / l[j * d + j];
      }
    }
  }
  return l;
}

// row = mean + L z with z standard normal.
void draw_gaussian(std::span<double> row, std::span<const double> mean,
                   std::span<const double> chol, RngStream& rng) {
  const std::size_t d = row.size();
  std::array<double, 16> zbuf{};
  std::vector<double> zheap;
  double* z = zbuf.data();
  if (d > zbuf.size()) {
    zheap.resize(d);
    z = zheap.data();
  }
  for (std::size_t j = 0; j < d; ++j) z[j] = rng.normal();
  for (std::size_t i = 0; i < d; ++i) {
    double s = mean.empty() ? 0.0 : mean[i];
    for (std::size_t k = 0; k <= i; ++k) s += chol[i * d + k] * z[k];
    row[i] = s;
  }
}

void draw_mvt(std::span<double> row, double df, RngStream& rng) {
  for (double& v : row) v = rng.normal();
  const double scale = 1.0 / std::sqrt(rng.chi_squared(df) / df);
  for (double& v : row) v *= scale;
}

// Maps a Student-t variate to the standard normal with the same CDF value,
// using the smaller tail so that large |t| does not saturate at 1.
double t_to_normal(double t, double df) {
  const boost::math::students_t st(df);
  const boost::math::normal nd;
  if (t > 0.0) {
    const double upper = boost::math::cdf(boost::math::complement(st, t));
    return boost::math::quantile(boost::math::complement(nd, upper));
  }
  return boost::math::quantile(nd, boost::math::cdf(st, t));
}

void draw_triangle(double& x, double& y, RngStream& rng) {
  // Equilateral, side sqrt(12), centroid at the origin: vertices (0, 2) and
  // (+-sqrt(3), -1).
  const double half = std::sqrt(3.0);
  for (;;) {
    const double px = rng.uniform(-half, half);
    const double py = rng.uniform(-1.0, 2.0);
    // Inside iff below both slanted edges: y <= 2 - sqrt(3) |x|.
    if (py <= 2.0 - half * std::abs(px)) {
      x = px;
      y = py;
      return;
    }
  }
}

// Same interval products read as rectangles in (x, y), weighted by area.
void draw_sector_a_cartesian(double& x, double& y, RngStream& rng) {
  constexpr double pi = std::numbers::pi;
  constexpr double sqrt2 = std::numbers::sqrt2;
  const double w_out = sqrt2 - 1.0;
  const double u = rng.uniform() * (2.0 + 2.0 * w_out);
  double x0, x1, y0;
  if (u < 1.0) x0 = 0.0, x1 = 1.0, y0 = 0.0;
  else if (u < 2.0) x0 = 0.0, x1 = 1.0, y0 = pi;
  else if (u < 2.0 + w_out) x0 = 1.0, x1 = sqrt2, y0 = pi / 2;
  else x0 = 1.0, x1 = sqrt2, y0 = 3 * pi / 2;
  x = rng.uniform(x0, x1);
  y = y0 + rng.uniform() * (pi / 2);
}

void draw_sector_a(double& x, double& y, bool polar, RngStream& rng) {
  constexpr double pi = std::numbers::pi;
  const double outer = std::sqrt(2.0);
  // Pieces: (r0, r1, phi0). Each spans a quarter turn.
  struct Piece {
    double r0, r1, phi0;
  };
  constexpr std::array<Piece, 4> pieces{{{0.0, 1.0, 0.0},
                                         {0.0, 1.0, pi},
                                         {1.0, std::numbers::sqrt2, pi / 2},
                                         {1.0, std::numbers::sqrt2, 3 * pi / 2}}};
  // Planar area of every piece is pi/4, so the pieces are equally likely.
  // In (r, phi) measure the weights are the radial widths.
  std::size_t k;
  if (polar) {
    const double w_in = 1.0;
    const double w_out = outer - 1.0;
    const double u = rng.uniform() * (2.0 * w_in + 2.0 * w_out);
    if (u < w_in) k = 0;
    else if (u < 2 * w_in) k = 1;
    else if (u < 2 * w_in + w_out) k = 2;
    else k = 3;
  } else {
    k = rng.index(4);
  }
  const Piece& p = pieces[k];
  double r;
  if (polar) {
    r = rng.uniform(p.r0, p.r1);
  } else {
    r = std::sqrt(p.r0 * p.r0 + rng.uniform() * (p.r1 * p.r1 - p.r0 * p.r0));
  }
  const double phi = p.phi0 + rng.uniform() * (pi / 2);
  x = r * std::cos(phi);
  y = r * std::sin(phi);
}

}  // namespace

std::string_view family_name(Family f) { return info(f).name; }

void DistributionSpec::validate() const {
  const FamilyInfo& fi = info(family);
  if (fi.fixed_dim != 0 && dim != fi.fixed_dim) {
    throw InvalidSpec(std::string(fi.name) + " requires d = " +
                      std::to_string(fi.fixed_dim) + ", got d = " +
                      std::to_string(dim));
  }
  if (dim < 2) throw InvalidSpec("dimension must be at least 2");
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidSpec(std::string(what) + " must be positive and finite");
    }
  };
  switch (family) {
    case Family::GaussianCorr: {
      // Equicorrelation matrix is PD iff -1/(d-1) < rho < 1.
      const double lo = -1.0 / static_cast<double>(dim - 1);
      if (!(rho > lo && rho < 1.0)) {
        throw InvalidSpec("rho must lie in (-1/(d-1), 1)");
      }
      break;
    }
    case Family::MVt:
    case Family::MetaT: positive(df, "df"); break;
    case Family::Kotz:
      positive(kotz_r, "r");
      positive(kotz_s, "s");
      if (!(2.0 * kotz_N + static_cast<double>(dim) > 2.0)) {
        throw InvalidSpec("kotz requires 2N + d > 2");
      }
      break;
    case Family::PearsonVII:
      positive(pvii_m, "m");
      if (!(2.0 * pvii_N > static_cast<double>(dim))) {
        throw InvalidSpec("pvii requires N > d/2");
      }
      break;
    case Family::GaussMixture:
    case Family::NonCenteredGauss:
      if (!std::isfinite(mu1)) throw InvalidSpec("mu1 must be finite");
      break;
    case Family::Burr: positive(beta, "beta"); break;
    case Family::SectorSetA:
      if (polar && cartesian) throw InvalidSpec("sectorA takes polar or cartesian, not both");
      break;
    default: break;
  }
}

std::string DistributionSpec::to_string() const {
  const FamilyInfo& fi = info(family);
  std::vector<std::string> parts;
  switch (family) {
    case Family::GaussianCorr: parts.push_back("rho=" + format_number(rho)); break;
    case Family::MVt:
    case Family::MetaT: parts.push_back("df=" + format_number(df)); break;
    case Family::Kotz:
      parts.push_back("N=" + format_number(kotz_N));
      parts.push_back("r=" + format_number(kotz_r));
      parts.push_back("s=" + format_number(kotz_s));
      break;
    case Family::PearsonVII:
      parts.push_back("N=" + format_number(pvii_N));
      parts.push_back("m=" + format_number(pvii_m));
      break;
    case Family::GaussMixture:
    case Family::NonCenteredGauss: parts.push_back("mu1=" + format_number(mu1)); break;
    case Family::Burr: parts.push_back("beta=" + format_number(beta)); break;
    case Family::SectorSetA:
      if (polar) parts.push_back("polar=1");
      if (cartesian) parts.push_back("cartesian=1");
      break;
    default: break;
  }
  if (fi.fixed_dim == 0) parts.push_back("d=" + std::to_string(dim));
  std::string out(fi.name);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += (i == 0 ? ':' : ',');
    out += parts[i];
  }
  return out;
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const FamilyInfo* fi = nullptr;
  for (const auto& f : kFamilies) {
    if (f.name == name) fi = &f;
  }
  if (fi == nullptr) {
    throw InvalidSpec("unknown distribution '" + std::string(name) + "'");
  }
  DistributionSpec spec;
  spec.family = fi->family;
  spec.dim = fi->fixed_dim;
  bool have_dim = fi->fixed_dim != 0;

  std::map<std::string, double, std::less<>> seen;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{}
                                             : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw InvalidSpec("expected key=value, got '" + std::string(item) + "'");
      }
      const std::string_view key = item.substr(0, eq);
      const double value = parse_number(key, item.substr(eq + 1));
      if (seen.contains(key)) {
        throw InvalidSpec("duplicate parameter '" + std::string(key) + "'");
      }
      seen.emplace(std::string(key), value);
    }
  }
  const auto allowed = allowed_keys(spec.family);
  for (const auto& [key, value] : seen) {
    if (key == "d") {
      if (value < 0 || value != std::floor(value)) {
        throw InvalidSpec("d must be a non-negative integer");
      }
      spec.dim = static_cast<std::size_t>(value);
      have_dim = true;
      continue;
    }
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) {
      throw InvalidSpec("parameter '" + key + "' does not apply to " +
                        std::string(fi->name));
    }
    if (key == "rho") spec.rho = value;
    else if (key == "df") spec.df = value;
    else if (key == "N" && spec.family == Family::Kotz) spec.kotz_N = value;
    else if (key == "N") spec.pvii_N = value;
    else if (key == "r") spec.kotz_r = value;
    else if (key == "s") spec.kotz_s = value;
    else if (key == "m") spec.pvii_m = value;
    else if (key == "mu1") spec.mu1 = value;
    else if (key == "beta") spec.beta = value;
    else if (key == "polar") spec.polar = value != 0.0;
    else if (key == "cartesian") spec.cartesian = value != 0.0;
  }
  if (!have_dim) {
    throw InvalidSpec(std::string(fi->name) + " needs a dimension (d=...)");
  }
  spec.validate();
  return spec;
}

bool DistributionSpec::is_spherical() const {
  switch (family) {
    case Family::GaussianCorr: return rho == 0.0;
    case Family::Cauchy:
    case Family::MVt:
    case Family::Kotz:
    case Family::PearsonVII: return true;
    case Family::NonCenteredGauss: return mu1 == 0.0;
    default: return false;
  }
}

bool DistributionSpec::is_elliptical() const {
  switch (family) {
    case Family::GaussianCorr:
    case Family::Cauchy:
    case Family::MVt:
    case Family::Kotz:
    case Family::PearsonVII:
    case Family::NonCenteredGauss: return true;
    default: return false;
  }
}

void draw_unit_vector(std::span<double> out, RngStream& rng) {
  for (;;) {
    double s = 0.0;
    for (double& v : out) {
      v = rng.normal();
      s += v * v;
    }
    if (s > 0.0) {
      const double inv = 1.0 / std::sqrt(s);
      for (double& v : out) v *= inv;
      return;
    }
  }
}

SampleMatrix sample_sphere(std::size_t d, std::size_t n, RngStream& rng) {
  if (d < 2) throw InvalidDimension("sphere sampling needs d >= 2");
  SampleMatrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) draw_unit_vector(out.row(i), rng);
  return out;
}

std::vector<double> resample_with_replacement(std::span<const double> values,
                                              std::size_t n, RngStream& rng) {
  if (values.empty()) throw EmptyInput("cannot resample from an empty set");
  std::vector<double> out(n);
  for (double& v : out) v = values[rng.index(values.size())];
  return out;
}

SampleMatrix sample_distribution(const DistributionSpec& spec, std::size_t n,
                                 RngStream& rng) {
  spec.validate();
  if (n == 0) throw EmptyInput("sample size must be at least 1");
  const std::size_t d = spec.dim;
  SampleMatrix x(n, d);

  switch (spec.family) {
    case Family::GaussianCorr: {
      std::vector<double> sigma(d * d, spec.rho);
      for (std::size_t i = 0; i < d; ++i) sigma[i * d + i] = 1.0;
      const auto chol = cholesky(sigma, d);
      for (std::size_t i = 0; i < n; ++i) draw_gaussian(x.row(i), {}, chol, rng);
      break;
    }
    case Family::Cauchy:
      for (std::size_t i = 0; i < n; ++i) draw_mvt(x.row(i), 1.0, rng);
      break;
    case Family::MVt:
      for (std::size_t i = 0; i < n; ++i) draw_mvt(x.row(i), spec.df, rng);
      break;
    case Family::Kotz: {
      // Radial density ~ rho^(2N-2+d-1) exp(-r rho^(2s)); with G = r rho^(2s)
      // G is Gamma((2N-2+d)/(2s), 1).
      const double shape =
          (2.0 * spec.kotz_N - 2.0 + static_cast<double>(d)) / (2.0 * spec.kotz_s);
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        draw_unit_vector(row, rng);
        const double g = rng.gamma(shape, 1.0);
        const double radius = std::pow(g / spec.kotz_r, 1.0 / (2.0 * spec.kotz_s));
        for (double& v : row) v *= radius;
      }
      break;
    }
    case Family::PearsonVII: {
      // Density ~ (1 + |x|^2/m)^-N is sqrt(m / nu) times a t_nu vector with
      // nu = 2N - d.
      const double nu = 2.0 * spec.pvii_N - static_cast<double>(d);
      const double scale = std::sqrt(spec.pvii_m / nu);
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        draw_mvt(row, nu, rng);
        for (double& v : row) v *= scale;
      }
      break;
    }
    case Family::GaussMixture:
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        for (double& v : row) v = rng.normal();
        row[0] += sign * spec.mu1;
      }
      break;
    case Family::NonCenteredGauss:
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        for (double& v : row) v = rng.normal();
        row[0] += spec.mu1;
      }
      break;
    case Family::MetaT:
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        draw_mvt(row, spec.df, rng);
        for (double& v : row) v = t_to_normal(v, spec.df);
      }
      break;
    case Family::HyperCube:
      for (std::size_t i = 0; i < n; ++i) {
        for (double& v : x.row(i)) v = rng.uniform(-1.0, 1.0);
      }
      break;
    case Family::UnitCube:
      for (std::size_t i = 0; i < n; ++i) {
        for (double& v : x.row(i)) v = rng.uniform();
      }
      break;
    case Family::ExpThirdCoord:
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        row[0] = rng.normal();
        row[1] = rng.normal();
        row[2] = rng.exponential(1.0);
      }
      break;
    case Family::TriangleProduct: {
      const double half_width = std::sqrt(12.0);
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        draw_triangle(row[0], row[1], rng);
        row[2] = rng.uniform(-half_width, half_width);
      }
      break;
    }
    case Family::GaussMix2:
    case Family::GaussMix3: {
      std::vector<double> mu;
      std::vector<double> sigma;
      if (spec.family == Family::GaussMix2) {
        mu = {1.0, 2.0};
        sigma = {5.0, -4.0, -4.0, 5.0};
      } else {
        mu = {1.0, 2.0, 3.0};
        sigma = {5.0, -4.0, 1.0, -4.0, 6.0, -4.0, 1.0, -4.0, 5.0};
      }
      const auto chol = cholesky(sigma, d);
      std::vector<double> ident(d * d, 0.0);
      for (std::size_t i = 0; i < d; ++i) ident[i * d + i] = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() < 0.5) {
          draw_gaussian(x.row(i), {}, ident, rng);
        } else {
          draw_gaussian(x.row(i), mu, chol, rng);
        }
      }
      break;
    }
    case Family::GammaPlusNormal:
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        row[0] = rng.gamma(2.0, 3.0);
        for (std::size_t j = 1; j < d; ++j) row[j] = rng.normal();
      }
      break;
    case Family::Burr:
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        const double y = rng.gamma(1.0, spec.beta);
        for (double& v : row) {
          v = std::pow(1.0 + rng.gamma(2.0, 3.0) / y, -spec.beta);
        }
      }
      break;
    case Family::SectorSetA:
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        if (spec.cartesian) draw_sector_a_cartesian(row[0], row[1], rng);
        else draw_sector_a(row[0], row[1], spec.polar, rng);
      }
      break;
  }
  return x;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile needs 0 < p < 1");
  return boost::math::quantile(boost::math::normal(), p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double student_t_cdf(double x, double df) {
  if (!(df > 0.0)) throw DomainError("student_t_cdf needs df > 0");
  if (std::isnan(x)) throw DomainError("student_t_cdf of NaN");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t(df), x);
}

}  // namespace symtest
