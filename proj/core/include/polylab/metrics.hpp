#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polylab/keyed_rng.hpp"
#include "polylab/sampler.hpp"

namespace polylab {

/// Sorted sample of real values.
class EmpiricalMeasure1D {
 public:
  /// Throws std::invalid_argument for an empty sample or a NaN value.
  explicit EmpiricalMeasure1D(std::vector<double> samples);

  std::span<const double> sorted() const { return values_; }
  std::size_t count() const { return values_.size(); }
  /// F(x) = #{x_i <= x} / count.
  double cdf(double x) const;
  /// F(x-) = #{x_i < x} / count.
  double cdf_left(double x) const;

 private:
  std::vector<double> values_;
};

/// A distribution function with its left limits. For continuous laws the two coincide.
struct Cdf {
  std::function<double(double)> value;
  std::function<double(double)> left_limit;

  double operator()(double x) const { return value(x); }
  double left(double x) const { return left_limit ? left_limit(x) : value(x); }

  static Cdf continuous(std::function<double(double)> f) { return Cdf{std::move(f), nullptr}; }
  static Cdf of(const EmpiricalMeasure1D& emp);
  static Cdf point_mass(double at);
  static Cdf gaussian(double mean, double variance);
};

/// Brownian marginal B_t ~ N(0, (t/d) I_d); one coordinate has variance t/d.
struct GaussianMarginalSpec {
  double t = 1.0;
  int dim = 1;

  double variance() const { return t / dim; }
  Cdf coordinate_cdf() const { return Cdf::gaussian(0.0, variance()); }
};

/// sup_x |F_emp(x) - F(x)|, evaluated at the sample points from both sides.
double ks_distance(const EmpiricalMeasure1D& emp, const Cdf& cdf);

/// Smallest eps in [0, 1] with F(x - eps) - eps <= F_emp(x) <= F(x + eps) + eps
/// for all x, by bisection (tolerance `tol`). Never exceeds ks_distance.
double levy_distance(const EmpiricalMeasure1D& emp, const Cdf& cdf, double tol = 1e-9);

struct CovarianceDeviation {
  double value = 0.0;
  bool degenerate = false;  ///< all points equal
};

/// Operator norm of Sigma_hat / v - I_d, Sigma_hat the (1/N, mean-centred)
/// sample covariance. Throws std::invalid_argument for fewer than 2 points.
CovarianceDeviation covariance_deviation(std::span<const Point> points, int d, double v);

/// Paths sampled on a common time grid; values flattened as [path][t][coordinate].
struct PathBatch {
  int dim = 1;
  std::vector<double> tgrid;
  std::vector<double> values;

  std::size_t stride() const { return tgrid.size() * static_cast<std::size_t>(dim); }
  std::size_t size() const { return stride() == 0 ? 0 : values.size() / stride(); }
  std::span<const double> path(std::size_t i) const { return {values.data() + i * stride(), stride()}; }
  void append(std::span<const double> path_values);
};

/// `count` Brownian paths with covariance (t/d) I_d on an increasing grid in (0, 1].
PathBatch brownian_batch(std::span<const double> tgrid, int d, std::size_t count, std::uint64_t seed);

/// phi(theta) = clamp(offset + sum_j w_j theta_{c_j}(t_j), 0, 1) with sum |w_j| = 1:
/// bounded by 1 and 1-Lipschitz for the sup norm on paths.
struct LipschitzTestFunction {
  struct Term {
    std::size_t t_index;
    int coord;
    double weight;
  };
  double offset = 0.5;
  std::vector<Term> terms;

  double operator()(std::span<const double> path, int dim) const;
};

/// `count` random test functions over a grid of `grid_size` times in dimension d.
std::vector<LipschitzTestFunction> random_lipschitz_family(std::size_t count, std::size_t grid_size, int d,
                                                           std::uint64_t seed, int max_terms = 3);

/// max_phi |mean_A phi - mean_B phi|: a lower bound on the bounded-Lipschitz distance.
/// Throws std::invalid_argument for an empty family, an empty batch or mismatched grids.
double bounded_lipschitz_estimate(const PathBatch& a, const PathBatch& b,
                                  std::span<const LipschitzTestFunction> family);

/// Lattice spacing of one rescaled coordinate of X_n / sqrt(n): 2/sqrt(n) in
/// d = 1 (parity), 1/sqrt(n) otherwise.
double marginal_lattice_spacing(int d, std::int64_t n);

/// x_i + U_i * spacing, U_i uniform on (-1/2, 1/2) drawn from stream counter i.
std::vector<double> jitter(std::span<const double> values, double spacing, const KeyedStream& stream);

/// Max over `seeds` runs, and over `coordinates` independent columns per run,
/// of the KS distance between `samples` i.i.d. standard normal draws and the
/// standard normal CDF. KS is scale invariant, so this calibrates any
/// centred Gaussian marginal.
double calibrate_ks_threshold(std::size_t samples, std::size_t coordinates, std::size_t seeds, std::uint64_t seed);

struct MetricReport {
  std::int64_t n = 0;
  double t = 1.0;
  int coordinate = 0;
  std::size_t samples = 0;
  double ks = 0.0;
  double levy = 0.0;
  double covariance_deviation = 0.0;
  double bounded_lipschitz = 0.0;
  bool jittered = false;
  bool degenerate = false;
};

void to_json(nlohmann::json& j, const MetricReport& r);

/// Plot-ready "x,F_emp,F" rows at the sample points.
void write_cdf_csv(std::ostream& os, const EmpiricalMeasure1D& emp, const Cdf& cdf);

}  // namespace polylab
