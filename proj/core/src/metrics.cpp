#include "polylab/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "polylab/normal.hpp"
#include "polylab/numerics.hpp"

namespace polylab {

EmpiricalMeasure1D::EmpiricalMeasure1D(std::vector<double> samples) : values_(std::move(samples)) {
  if (values_.empty()) throw std::invalid_argument("EmpiricalMeasure1D: empty sample");
  for (double v : values_) {
    if (std::isnan(v)) throw std::invalid_argument("EmpiricalMeasure1D: NaN sample");
  }
  std::sort(values_.begin(), values_.end());
}

double EmpiricalMeasure1D::cdf(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalMeasure1D::cdf_left(double x) const {
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

Cdf Cdf::of(const EmpiricalMeasure1D& emp) {
  // Holds a copy so the Cdf may outlive `emp`.
  auto shared = std::make_shared<EmpiricalMeasure1D>(emp);
  return Cdf{[shared](double x) { return shared->cdf(x); }, [shared](double x) { return shared->cdf_left(x); }};
}

Cdf Cdf::point_mass(double at) {
  return Cdf{[at](double x) { return x >= at ? 1.0 : 0.0; }, [at](double x) { return x > at ? 1.0 : 0.0; }};
}

Cdf Cdf::gaussian(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("Cdf::gaussian: variance must be positive");
  const double sd = std::sqrt(variance);
  return Cdf::continuous([mean, sd](double x) { return normal_cdf((x - mean) / sd); });
}

namespace {

/// Calls fn(value, first_index, last_index) for each run of equal sorted values.
template <class Fn>
void for_each_tie_group(std::span<const double> xs, Fn&& fn) {
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j + 1 < xs.size() && xs[j + 1] == xs[i]) ++j;
    fn(xs[i], i, j);
    i = j + 1;
  }
}

bool levy_feasible(const EmpiricalMeasure1D& emp, const Cdf& cdf, double eps) {
  const auto xs = emp.sorted();
  const double n = static_cast<double>(xs.size());
  // Left of the first sample F_emp = 0.
  if (cdf.left(xs.front() - eps) - eps > 0.0) return false;
  bool ok = true;
  std::size_t next = 0;
  for_each_tie_group(xs, [&](double x, std::size_t, std::size_t last) {
    if (!ok) return;
    const double right = static_cast<double>(last + 1) / n;
    if (right > cdf(x + eps) + eps) ok = false;
    next = last + 1;
    if (next < xs.size() && cdf.left(xs[next] - eps) - eps > right) ok = false;
  });
  return ok;
}

}  // namespace

double ks_distance(const EmpiricalMeasure1D& emp, const Cdf& cdf) {
  const auto xs = emp.sorted();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for_each_tie_group(xs, [&](double x, std::size_t first, std::size_t last) {
    d = std::max(d, std::fabs(static_cast<double>(last + 1) / n - cdf(x)));
    d = std::max(d, std::fabs(static_cast<double>(first) / n - cdf.left(x)));
  });
  return std::min(d, 1.0);
}

double levy_distance(const EmpiricalMeasure1D& emp, const Cdf& cdf, double tol) {
  double lo = 0.0;
  double hi = std::min(1.0, ks_distance(emp, cdf));
  if (hi == 0.0 || levy_feasible(emp, cdf, 0.0)) return 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (levy_feasible(emp, cdf, mid) ? hi : lo) = mid;
  }
  return hi;
}

CovarianceDeviation covariance_deviation(std::span<const Point> points, int d, double v) {
  check_dimension(d);
  if (points.size() < 2) throw std::invalid_argument("covariance_deviation: need at least 2 points");
  if (!(v > 0.0)) throw std::invalid_argument("covariance_deviation: expected variance must be positive");
  const auto n = static_cast<double>(points.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& p : points) {
    for (int i = 0; i < d; ++i) mean(i) += p[static_cast<std::size_t>(i)];
  }
  mean /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  bool all_equal = true;
  for (const auto& p : points) {
    Eigen::VectorXd c(d);
    for (int i = 0; i < d; ++i) c(i) = p[static_cast<std::size_t>(i)] - mean(i);
    cov.noalias() += c * c.transpose();
    for (int i = 0; i < d; ++i) all_equal = all_equal && p[static_cast<std::size_t>(i)] == points[0][static_cast<std::size_t>(i)];
  }
  cov /= n;
  const Eigen::MatrixXd dev = cov / v - Eigen::MatrixXd::Identity(d, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dev, Eigen::EigenvaluesOnly);
  const double value = solver.eigenvalues().cwiseAbs().maxCoeff();
  return {value, all_equal};
}

void PathBatch::append(std::span<const double> path_values) {
  if (path_values.size() != stride()) throw std::invalid_argument("PathBatch::append: path does not match the grid");
  values.insert(values.end(), path_values.begin(), path_values.end());
}

PathBatch brownian_batch(std::span<const double> tgrid, int d, std::size_t count, std::uint64_t seed) {
  check_dimension(d);
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    if (!(tgrid[i] > (i == 0 ? 0.0 : tgrid[i - 1]))) throw std::invalid_argument("brownian_batch: grid must increase");
  }
  PathBatch batch{d, std::vector<double>(tgrid.begin(), tgrid.end()), {}};
  batch.values.reserve(count * batch.stride());
  std::vector<double> path(batch.stride());
  for (std::size_t p = 0; p < count; ++p) {
    const auto stream = KeyedStream::derive(seed, keys::kBrownianTag, p, 0);
    std::uint64_t c = 0;
    double prev_t = 0.0;
    std::array<double, kMaxDim> b{};
    for (std::size_t i = 0; i < tgrid.size(); ++i) {
      const double sd = std::sqrt((tgrid[i] - prev_t) / d);
      for (int k = 0; k < d; ++k) {
        b[static_cast<std::size_t>(k)] += sd * normal_quantile(stream.uniform(c++));
        path[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k)];
      }
      prev_t = tgrid[i];
    }
    batch.append(path);
  }
  return batch;
}

double LipschitzTestFunction::operator()(std::span<const double> path, int dim) const {
  double s = offset;
  for (const auto& term : terms) {
    s += term.weight * path[term.t_index * static_cast<std::size_t>(dim) + static_cast<std::size_t>(term.coord)];
  }
  return std::clamp(s, 0.0, 1.0);
}

std::vector<LipschitzTestFunction> random_lipschitz_family(std::size_t count, std::size_t grid_size, int d,
                                                           std::uint64_t seed, int max_terms) {
  check_dimension(d);
  if (grid_size == 0 || max_terms < 1) throw std::invalid_argument("random_lipschitz_family: empty grid");
  std::vector<LipschitzTestFunction> family;
  family.reserve(count);
  for (std::size_t f = 0; f < count; ++f) {
    const auto stream = KeyedStream::derive(seed, keys::kFamilyTag, f, 0);
    std::uint64_t c = 0;
    LipschitzTestFunction phi;
    phi.offset = stream.uniform(c++);
    const int terms = 1 + static_cast<int>(stream.uniform(c++) * max_terms);
    double norm = 0.0;
    for (int j = 0; j < terms; ++j) {
      LipschitzTestFunction::Term term{};
      term.t_index = std::min(grid_size - 1, static_cast<std::size_t>(stream.uniform(c++) * static_cast<double>(grid_size)));
      term.coord = std::min(d - 1, static_cast<int>(stream.uniform(c++) * d));
      term.weight = 2.0 * stream.uniform(c++) - 1.0;
      norm += std::fabs(term.weight);
      phi.terms.push_back(term);
    }
    for (auto& term : phi.terms) term.weight /= norm;
    family.push_back(std::move(phi));
  }
  return family;
}

double bounded_lipschitz_estimate(const PathBatch& a, const PathBatch& b,
                                  std::span<const LipschitzTestFunction> family) {
  if (family.empty()) throw std::invalid_argument("bounded_lipschitz_estimate: empty test family");
  if (a.dim != b.dim || a.tgrid != b.tgrid) throw std::invalid_argument("bounded_lipschitz_estimate: grids differ");
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("bounded_lipschitz_estimate: empty batch");
  auto mean_of = [](const PathBatch& batch, const LipschitzTestFunction& phi) {
    KahanSum s;
    for (std::size_t i = 0; i < batch.size(); ++i) s += phi(batch.path(i), batch.dim);
    return s.value() / static_cast<double>(batch.size());
  };
  double best = 0.0;
  for (const auto& phi : family) best = std::max(best, std::fabs(mean_of(a, phi) - mean_of(b, phi)));
  return std::min(best, 1.0);
}

double marginal_lattice_spacing(int d, std::int64_t n) {
  check_dimension(d);
  if (n < 1) throw std::invalid_argument("marginal_lattice_spacing: n must be >= 1");
  return (d == 1 ? 2.0 : 1.0) / std::sqrt(static_cast<double>(n));
}

std::vector<double> jitter(std::span<const double> values, double spacing, const KeyedStream& stream) {
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += (stream.uniform(i) - 0.5) * spacing;
  return out;
}

double calibrate_ks_threshold(std::size_t samples, std::size_t coordinates, std::size_t seeds, std::uint64_t seed) {
  if (samples == 0 || coordinates == 0 || seeds == 0) throw std::invalid_argument("calibrate_ks_threshold: empty design");
  const Cdf normal = Cdf::gaussian(0.0, 1.0);
  double worst = 0.0;
  std::vector<double> xs(samples);
  for (std::size_t s = 0; s < seeds; ++s) {
    for (std::size_t c = 0; c < coordinates; ++c) {
      const auto stream = KeyedStream::derive(seed, keys::kCalibrationTag, s, c);
      for (std::size_t i = 0; i < samples; ++i) xs[i] = normal_quantile(stream.uniform(i));
      worst = std::max(worst, ks_distance(EmpiricalMeasure1D(xs), normal));
    }
  }
  return worst;
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  j = nlohmann::json{{"n", r.n},
                     {"t", r.t},
                     {"coordinate", r.coordinate + 1},
                     {"samples", r.samples},
                     {"ks", r.ks},
                     {"levy", r.levy},
                     {"covarianceDeviation", r.covariance_deviation},
                     {"boundedLipschitz", r.bounded_lipschitz},
                     {"jittered", r.jittered},
                     {"degenerate", r.degenerate}};
}

void write_cdf_csv(std::ostream& os, const EmpiricalMeasure1D& emp, const Cdf& cdf) {
  os << "x,F_emp,F\n";
  os.precision(12);
  for_each_tie_group(emp.sorted(), [&](double x, std::size_t, std::size_t) {
    os << x << ',' << emp.cdf(x) << ',' << cdf(x) << '\n';
  });
}

}  // namespace polylab
