#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polylab/environment.hpp"
#include "polylab/functionals.hpp"
#include "polylab/oracle.hpp"
#include "polylab/partition.hpp"

namespace polylab {

/// Raised when a harness has nothing to average over (e.g. every replica died).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings shared by the Monte Carlo harnesses.
struct ReplicaPlan {
  EnvironmentSpec environment;
  int d = 1;
  std::size_t replicas = 100;
  int threads = 1;
  Truncation truncation{};
};

/// Environment of replica r: the configured law with a per-replica seed.
EnvironmentField replica_field(const EnvironmentSpec& spec, std::size_t replica);

// ---------------------------------------------------------------- martingale

/// max over n < horizon and over the atoms of layers 1..n of
/// |E[W_{n+1} | layers 1..n] - W_n|, averaging exactly over layer n+1.
double martingale_residual_exact(const TinyInstance& inst);

// --------------------------------------------------------------- contraction

struct NamedPathFunctional {
  std::string id;
  PathFunctional f;
};

/// Endpoint functional viewed as a path functional of X_n.
NamedPathFunctional endpoint_as_path(const EndpointFunctional& g);

struct ContractionRecord {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::string g_id;
  std::string mode;   ///< "exhaustive" or "monteCarlo"
  double lhs = 0.0;   ///< E|W_n(g) - W_m(g)|
  double rhs = 0.0;   ///< E|W_n - W_m|
  double lhs_se = 0.0;
  double rhs_se = 0.0;
  double allowance = 0.0;  ///< lhs may exceed rhs by this much
  bool pass = false;
};

/// Exact expectations over every environment atom of `inst` (n = horizon).
/// Throws std::invalid_argument when some g leaves [0, 1].
std::vector<ContractionRecord> contraction_exhaustive(const TinyInstance& inst, std::int64_t m,
                                                      std::span<const NamedPathFunctional> family,
                                                      double tolerance = 1e-12, int threads = 1);

/// Replica averages; pass iff lhs <= rhs + se_multiplier * sqrt(lhs_se^2 + rhs_se^2).
std::vector<ContractionRecord> contraction_monte_carlo(const ReplicaPlan& plan, std::int64_t m, std::int64_t n,
                                                       std::span<const EndpointFunctional> family,
                                                       double se_multiplier = 4.0);

// ----------------------------------------------------------------------- FKG

/// Finite product of totally ordered coordinates; coordinate i takes levels
/// 0..L_i-1 with the given probabilities.
struct ProductSpace {
  std::vector<std::vector<double>> probabilities;

  int coordinates() const { return static_cast<int>(probabilities.size()); }
  std::uint64_t size() const;
};

using ProductFunction = std::function<double(std::span<const int>)>;

/// Raised when a function handed to the FKG harness is not coordinatewise nondecreasing.
class NonMonotoneError : public std::invalid_argument {
 public:
  NonMonotoneError(const std::string& what, int coordinate)
      : std::invalid_argument(what), coordinate_(coordinate) {}
  int coordinate() const { return coordinate_; }

 private:
  int coordinate_;
};

struct FkgResult {
  double covariance = 0.0;
  double mean_f = 0.0;
  double mean_g = 0.0;
};

/// Cov(f, g) by exhaustive enumeration (at most 2^20 atoms) after checking
/// that f and g are nondecreasing across every pair of neighbouring
/// configurations, up to `slack` * max(1, |f|).
FkgResult fkg_exhaustive(const ProductSpace& space, const ProductFunction& f, const ProductFunction& g,
                         double slack = 0.0);

struct FkgPairRecord {
  std::uint64_t fixed_atom = 0;  ///< configuration of layers 1..m
  double covariance = 0.0;
  double mean_f = 0.0;           ///< E[W_n(1-g) - W_m(1-g) | layers 1..m], zero by the martingale property
  double mean_g = 0.0;
};

/// The pair f = W_n(1-g) - W_m(1-g), h = 1{W_n(g) >= W_m(g)} as functions of
/// layers m+1..n, one record per configuration of layers 1..m.
std::vector<FkgPairRecord> fkg_lemma_pair(const TinyInstance& inst, std::int64_t m, const EndpointFunctional& g);

// ------------------------------------------------------------------ survival

struct SurvivalRow {
  std::int64_t n = 0;
  double mean_w = 0.0;
  double se_w = 0.0;
  double mean_z = 0.0;  ///< (mean W_n - 1) / se
  double median_w = 0.0;
  double frac_positive = 0.0;
  double frac_above = 0.0;
  double mean_log_rate = 0.0;  ///< mean of (1/n) log W_n over replicas with W_n > 0
  std::size_t log_rate_count = 0;
};

struct SurvivalScan {
  double threshold = 0.0;
  std::size_t replicas = 0;
  std::vector<SurvivalRow> rows;
  /// {W_n > 0} shrinks along the grid for every replica.
  bool positivity_nested = true;
  /// log W_n per replica and grid point, [replica][grid index].
  std::vector<std::vector<double>> log_w;
};

/// nGrid must be strictly increasing.
SurvivalScan survival_scan(const ReplicaPlan& plan, std::span<const std::int64_t> n_grid, double threshold);

// ---------------------------------------------------------- theorem schedule

struct BrownianFunctional {
  std::string id;
  std::function<double(std::span<const double>)> psi;  ///< psi on R^d, values in [0, 1]
};

/// E[psi(B_1)], B_1 ~ N(0, I_d / d), by a tensor Gauss-Hermite rule.
double brownian_expectation(const BrownianFunctional& phi, int d, int points = 48);

struct ScheduleRow {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::string phi_id;
  double brownian = 0.0;
  double median_first = 0.0;   ///< median |E_n[phi] - E_m[phi]|
  double median_second = 0.0;  ///< median |E_m[phi] - E_B[phi]|
  std::size_t survivors = 0;
};

/// m = floor(n^{1/4}); medians over replicas with W_N > threshold, N = max nGrid.
/// Throws DegenerateInputError when no replica survives.
std::vector<ScheduleRow> theorem_schedule_check(const ReplicaPlan& plan, std::span<const std::int64_t> n_grid,
                                                std::span<const BrownianFunctional> family, double threshold,
                                                int quadrature_points = 48);

// ---------------------------------------------------------------- uniformity

struct UniformityRecord {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::string event_id;
  double value = 0.0;  ///< mean over survivors of |P_n(B) - P(B)|
  double standard_error = 0.0;
  std::size_t survivors = 0;
};

/// Pattern `steps` placed at every offset m of mGrid. For n <= m the value is
/// 0 exactly: the weights of the first n steps say nothing about later increments.
std::vector<UniformityRecord> uniformity_check(const ReplicaPlan& plan, std::span<const std::int64_t> m_grid,
                                               std::span<const std::int64_t> n_grid,
                                               std::span<const std::vector<int>> patterns, double threshold);

/// log W_n(B) for a cylinder event that may extend past n (steps after n are free).
double constrained_mass_any(const SiteWeights& weights, std::int64_t n, const CylinderEvent& event,
                            const Truncation& truncation = {});

struct UniformitySup {
  std::int64_t m = 0;
  std::string event_id;
  double value = 0.0;
  double standard_error = 0.0;
  std::int64_t at_n = 0;
};

/// sup over n of the records sharing (m, event).
std::vector<UniformitySup> uniformity_sup(std::span<const UniformityRecord> records);

// ------------------------------------------------------------- serialization

void to_json(nlohmann::json& j, const ContractionRecord& r);
void to_json(nlohmann::json& j, const FkgPairRecord& r);
void to_json(nlohmann::json& j, const SurvivalRow& r);
void to_json(nlohmann::json& j, const ScheduleRow& r);
void to_json(nlohmann::json& j, const UniformityRecord& r);
void to_json(nlohmann::json& j, const UniformitySup& r);

}  // namespace polylab
