#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symtest/linalg.hpp"
#include "symtest/rng.hpp"

namespace symtest {

enum class Family {
  GaussianCorr,      // gauss:rho=..,d=..
  Cauchy,            // cauchy:d=..
  MVt,               // mvt:df=..,d=..
  Kotz,              // kotz:N=..,r=..,s=..,d=..
  PearsonVII,        // pvii:N=..,m=..,d=..
  GaussMixture,      // mg:mu1=..,d=..
  NonCenteredGauss,  // ncg:mu1=..,d=..
  MetaT,             // metat:df=..,d=..
  HyperCube,         // cube:d=..
  ExpThirdCoord,     // exp3         (d = 3)
  TriangleProduct,   // tri3         (d = 3)
  GaussMix2,         // mix2         (d = 2)
  GaussMix3,         // mix3         (d = 3)
  GammaPlusNormal,   // gammanormal:d=..
  Burr,              // burr:beta=..,d=..
  UnitCube,          // unitcube:d=..
  SectorSetA,        // sectorA[:polar=1|cartesian=1]  (d = 2)
};

/// A sampling law from the simulation study, with its parameters. The text
/// form is `name[:key=value,...]`, e.g. `gauss:rho=0.4,d=3` or `mix2`.
struct DistributionSpec {
  Family family = Family::GaussianCorr;
  std::size_t dim = 0;

  double rho = 0.0;     // gauss
  double df = 5.0;      // mvt, metat
  double kotz_N = 2.0;  // kotz
  double kotz_r = 1.0;
  double kotz_s = 0.5;
  double pvii_N = 10.0;  // pvii
  double pvii_m = 2.0;
  double mu1 = 1.0;     // mg, ncg
  double beta = 0.5;    // burr: exponent and scale of the shared gamma
  // sectorA: uniform in the (r, phi) rectangle measure instead of planar area.
  bool polar = false;
  // sectorA: the interval products taken as rectangles in (x, y).
  bool cartesian = false;

  /// Throws InvalidSpec on bad parameters or a family/dimension mismatch.
  void validate() const;
  std::string to_string() const;
  static DistributionSpec parse(std::string_view text);

  // True for the families whose law is spherically symmetric.
  bool is_spherical() const;
  // True for the families whose law is elliptically symmetric.
  bool is_elliptical() const;

  bool operator==(const DistributionSpec&) const = default;
};

std::string_view family_name(Family f);

/// n i.i.d. uniform points on the unit sphere in R^d (normalized Gaussians).
SampleMatrix sample_sphere(std::size_t d, std::size_t n, RngStream& rng);

// Writes one uniform unit vector into `out`.
void draw_unit_vector(std::span<double> out, RngStream& rng);

std::vector<double> resample_with_replacement(std::span<const double> values,
                                              std::size_t n, RngStream& rng);

SampleMatrix sample_distribution(const DistributionSpec& spec, std::size_t n,
                                 RngStream& rng);

double normal_quantile(double p);
double normal_cdf(double x);
double student_t_cdf(double x, double df);

}  // namespace symtest
