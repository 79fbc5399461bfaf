#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polylab/environment.hpp"
#include "polylab/functionals.hpp"
#include "polylab/partition.hpp"
#include "polylab/verify.hpp"

namespace polylab {

/// A named functional with numeric parameters, e.g. {"kind": "halfSpace", "axis": 1}.
/// Axes are 1-based in configuration files.
struct FunctionalSpec {
  std::string kind;
  std::map<std::string, double> params;
  friend bool operator==(const FunctionalSpec&, const FunctionalSpec&) = default;
};

struct MetricsSettings {
  std::vector<double> t_grid{0.25, 0.5, 1.0};
  bool jitter = true;
  bool paths = false;  ///< sample whole paths (keeps every slice in memory)
  std::size_t test_functions = 64;
  friend bool operator==(const MetricsSettings&, const MetricsSettings&) = default;
};

struct VerifySettings {
  std::vector<std::string> checks{"martingale", "contraction", "fkg", "decomposition"};
  std::int64_t contraction_m = 5;
  std::int64_t contraction_n = 25;
  int tiny_dim = 1;
  std::int64_t tiny_horizon = 3;
  std::int64_t tiny_m = 1;
  TwoPointLaw tiny_law{};
  std::size_t decomposition_instances = 20;
  double exhaustive_tolerance = 1e-12;
  double decomposition_tolerance = 1e-10;
  double se_multiplier = 4.0;
  friend bool operator==(const VerifySettings&, const VerifySettings&) = default;
};

struct RunConfig {
  EnvironmentSpec environment{};
  int d = 1;
  std::vector<std::int64_t> n_grid{16};
  std::size_t replicas = 100;
  std::size_t samples_per_replica = 1;
  double survival_threshold = 1e-3;
  double truncation_c = 0.0;
  std::vector<std::int64_t> m_grid{0};
  std::vector<FunctionalSpec> g_family;
  std::vector<FunctionalSpec> phi_family;
  std::vector<std::vector<int>> events;  ///< step patterns, placed at each m of mGrid
  MetricsSettings metrics{};
  VerifySettings verify{};
  int threads = 1;
  std::string output_dir = "out";
  std::string format = "json";

  Truncation truncation() const { return Truncation{truncation_c}; }
  ReplicaPlan plan() const { return ReplicaPlan{environment, d, replicas, threads, truncation()}; }
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct Diagnostic {
  std::string field;
  std::string message;
};

void to_json(nlohmann::json& j, const Diagnostic& diag);

/// Every problem found in `j`, each naming the offending field. Empty iff
/// parse_config(j) succeeds.
std::vector<Diagnostic> validate_config(const nlohmann::json& j);

/// Thrown by parse_config; carries the diagnostics.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

RunConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

/// Step names "+e1", "-e2", ... to step indices (see unit_step); throws std::invalid_argument.
int parse_step(const std::string& name, int d);
std::string step_name(int dir);

/// Endpoint functional g on Z^d (contraction family).
EndpointFunctional make_endpoint_functional(const FunctionalSpec& spec, int d);
/// Functional psi on R^d of the rescaled endpoint (schedule family).
BrownianFunctional make_brownian_functional(const FunctionalSpec& spec, int d);

/// The default families shipped with the tool.
std::vector<FunctionalSpec> default_g_family();
std::vector<FunctionalSpec> default_phi_family();

}  // namespace polylab
