#include "polylab/workflows.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polylab/metrics.hpp"
#include "polylab/numerics.hpp"
#include "polylab/oracle.hpp"
#include "polylab/parallel.hpp"
#include "polylab/sampler.hpp"
#include "polylab/verify.hpp"

namespace polylab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

void close_output(std::ofstream& os, const fs::path& path) {
  os.close();
  if (!os) throw IoError("error while writing " + path.string());
}

/// Collects JSON-lines records for one output file.
class JsonLines {
 public:
  void add(const json& record) { lines_.push_back(record.dump()); }
  bool empty() const { return lines_.empty(); }

  void write(const fs::path& path, WorkflowResult& result) const {
    auto os = open_output(path);
    for (const auto& line : lines_) os << line << '\n';
    close_output(os, path);
    result.files.push_back(path);
  }

 private:
  std::vector<std::string> lines_;
};

/// A table written as CSV or as JSON-lines objects, per the configured format.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add(std::vector<json> row) { rows_.push_back(std::move(row)); }

  void write(const fs::path& stem, const std::string& format, WorkflowResult& result) const {
    const fs::path path = stem.string() + (format == "csv" ? ".csv" : ".jsonl");
    auto os = open_output(path);
    if (format == "csv") {
      for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
      os << '\n';
      for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          os << (i ? "," : "") << (row[i].is_string() ? row[i].get<std::string>() : row[i].dump());
        }
        os << '\n';
      }
    } else {
      for (const auto& row : rows_) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = row[i];
        os << obj.dump() << '\n';
      }
    }
    close_output(os, path);
    result.files.push_back(path);
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<json>> rows_;
};

TwoPointLaw tiny_law(const RunConfig& c) {
  if (const auto* tp = std::get_if<TwoPointLaw>(&c.environment.law)) return *tp;
  return c.verify.tiny_law;
}

void record_check(JsonLines& out, WorkflowResult& result, json record, bool pass, const std::string& id) {
  record["pass"] = pass;
  out.add(record);
  if (!pass) result.failures.push_back(id);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

}  // namespace

WorkflowResult run_simulate(const RunConfig& c, const fs::path& out) {
  WorkflowResult result;
  const std::int64_t horizon = c.n_grid.back();
  const std::size_t grid = c.n_grid.size();
  const std::size_t samples = c.samples_per_replica;

  struct ReplicaOutput {
    std::vector<double> log_w;
    std::vector<double> discarded;
    std::vector<Site> endpoints;
    std::vector<std::vector<double>> paths;
  };
  std::vector<ReplicaOutput> reps(c.replicas);
  parallel_for(c.replicas, c.threads, [&](std::size_t r) {
    const EnvironmentField field = replica_field(c.environment, r);
    auto& rep = reps[r];
    if (c.metrics.paths) {
      const auto slices = forward_slices(field, c.d, horizon, c.truncation());
      for (std::int64_t n : c.n_grid) {
        rep.log_w.push_back(total_mass(slices[static_cast<std::size_t>(n)]));
        rep.discarded.push_back(slices[static_cast<std::size_t>(n)].discarded_fraction());
      }
      if (rep.log_w.back() == kNegInf) return;
      const EndpointSampler endpoint(slices.back());
      for (std::size_t s = 0; s < samples; ++s) {
        const PolymerPath path = backward_sample(slices, endpoint, sampler_stream(c.environment.seed, r, s));
        rep.endpoints.push_back(path.sites.back());
        rep.paths.push_back(rescale(path, horizon).on_grid(c.metrics.t_grid));
      }
      return;
    }
    PartitionSlice slice = PartitionSlice::origin(c.d);
    for (std::int64_t n : c.n_grid) {
      slice = propagate(field, std::move(slice), n, c.truncation());
      rep.log_w.push_back(total_mass(slice));
      rep.discarded.push_back(slice.discarded_fraction());
    }
    if (rep.log_w.back() == kNegInf) return;
    const EndpointSampler endpoint(slice);
    for (std::size_t s = 0; s < samples; ++s) {
      rep.endpoints.push_back(endpoint.draw(sampler_stream(c.environment.seed, r, s).uniform(0)));
    }
  });

  JsonLines replicas;
  std::vector<std::string> columns{"replica", "pathIndex"};
  for (int i = 0; i < c.d; ++i) columns.push_back("z" + std::to_string(i + 1));
  Table endpoints(columns);
  std::vector<std::string> path_columns{"replica", "pathIndex", "t"};
  for (int i = 0; i < c.d; ++i) path_columns.push_back("x" + std::to_string(i + 1));
  Table paths(path_columns);
  std::size_t alive = 0;
  for (std::size_t r = 0; r < c.replicas; ++r) {
    const auto& rep = reps[r];
    for (std::size_t i = 0; i < grid; ++i) {
      replicas.add({{"replica", r},
                    {"n", c.n_grid[i]},
                    {"logW", rep.log_w[i] == kNegInf ? json(nullptr) : json(rep.log_w[i])},
                    {"alive", rep.log_w[i] > kNegInf},
                    {"discardedFraction", rep.discarded[i]}});
    }
    if (!rep.endpoints.empty()) ++alive;
    for (std::size_t s = 0; s < rep.endpoints.size(); ++s) {
      std::vector<json> row{r, s};
      for (int i = 0; i < c.d; ++i) row.emplace_back(rep.endpoints[s][i]);
      endpoints.add(std::move(row));
    }
    for (std::size_t s = 0; s < rep.paths.size(); ++s) {
      for (std::size_t t = 0; t < c.metrics.t_grid.size(); ++t) {
        std::vector<json> row{r, s, c.metrics.t_grid[t]};
        for (int i = 0; i < c.d; ++i) row.emplace_back(rep.paths[s][t * static_cast<std::size_t>(c.d) + static_cast<std::size_t>(i)]);
        paths.add(std::move(row));
      }
    }
  }
  replicas.add({{"summary", "simulate"},
                {"replicas", c.replicas},
                {"alive", alive},
                {"horizon", horizon},
                {"samplesPerReplica", samples}});
  replicas.write(out / "replicas.jsonl", result);
  endpoints.write(out / "endpoints", c.format, result);
  if (c.metrics.paths) paths.write(out / "paths", c.format, result);
  return result;
}

WorkflowResult run_verify(const RunConfig& c, const fs::path& out) {
  WorkflowResult result;
  JsonLines lines;
  const auto& v = c.verify;
  const ReplicaPlan plan = c.plan();
  auto selected = [&](const std::string& name) {
    return std::find(v.checks.begin(), v.checks.end(), name) != v.checks.end();
  };
  std::vector<EndpointFunctional> g_family;
  for (const auto& spec : c.g_family) g_family.push_back(make_endpoint_functional(spec, c.d));
  std::vector<EndpointFunctional> tiny_g_family;
  for (const auto& spec : c.g_family) tiny_g_family.push_back(make_endpoint_functional(spec, v.tiny_dim));

  if (selected("martingale")) {
    const TinyInstance inst(v.tiny_dim, v.tiny_horizon, tiny_law(c));
    const double residual = martingale_residual_exact(inst);
    record_check(lines, result,
                 {{"check", "martingale"}, {"d", v.tiny_dim}, {"horizon", v.tiny_horizon},
                  {"residual", residual}, {"tolerance", v.exhaustive_tolerance}},
                 residual <= v.exhaustive_tolerance, "martingale");
  }

  if (selected("contraction")) {
    const TinyInstance inst(v.tiny_dim, v.tiny_horizon, tiny_law(c));
    std::vector<NamedPathFunctional> family;
    for (const auto& g : tiny_g_family) family.push_back(endpoint_as_path(g));
    for (const auto& rec : contraction_exhaustive(inst, v.tiny_m, family, v.exhaustive_tolerance, c.threads)) {
      record_check(lines, result, json(rec), rec.pass, "contraction:exhaustive:" + rec.g_id);
    }
    for (const auto& rec : contraction_monte_carlo(plan, v.contraction_m, v.contraction_n, g_family, v.se_multiplier)) {
      record_check(lines, result, json(rec), rec.pass, "contraction:monteCarlo:" + rec.g_id);
    }
  }

  if (selected("fkg")) {
    const TinyInstance inst(v.tiny_dim, v.tiny_horizon, tiny_law(c));
    for (const auto& g : tiny_g_family) {
      const auto records = fkg_lemma_pair(inst, v.tiny_m, g);
      double worst = 0.0;
      for (const auto& r : records) worst = std::min(worst, r.covariance);
      record_check(lines, result,
                   {{"check", "fkgLemmaPair"}, {"gId", g.id()}, {"atoms", records.size()},
                    {"minCovariance", worst}, {"tolerance", v.exhaustive_tolerance}},
                   worst >= -v.exhaustive_tolerance, "fkg:" + g.id());
    }
  }

  if (selected("decomposition")) {
    double worst = 0.0;
    std::vector<double> residuals(v.decomposition_instances);
    parallel_for(v.decomposition_instances, c.threads, [&](std::size_t i) {
      const auto stream = KeyedStream::derive(c.environment.seed, keys::kDecompositionTag, i, 0);
      const auto n = static_cast<std::int64_t>(stream.uniform(0) * 11.0);
      const auto k = static_cast<std::int64_t>(stream.uniform(1) * 11.0);
      residuals[i] = decomposition_residual(replica_field(c.environment, i), c.d, n, k).value;
    });
    for (double r : residuals) worst = std::max(worst, r);
    record_check(lines, result,
                 {{"check", "decomposition"}, {"instances", v.decomposition_instances}, {"maxResidual", worst},
                  {"tolerance", v.decomposition_tolerance}},
                 worst <= v.decomposition_tolerance, "decomposition");
  }

  if (selected("survival") || selected("meanOne")) {
    const SurvivalScan scan = survival_scan(plan, c.n_grid, c.survival_threshold);
    for (const auto& row : scan.rows) {
      json rec = row;
      const bool mean_one = std::fabs(row.mean_z) <= v.se_multiplier;
      rec["meanOneWithinSe"] = mean_one;
      if (selected("meanOne")) {
        record_check(lines, result, rec, mean_one, "meanOne:n=" + std::to_string(row.n));
      } else {
        lines.add(rec);
      }
    }
    if (selected("survival")) {
      record_check(lines, result,
                   {{"check", "survivalNested"}, {"replicas", scan.replicas}, {"threshold", scan.threshold}},
                   scan.positivity_nested, "survival:nested");
    }
  }

  if (selected("schedule")) {
    std::vector<BrownianFunctional> phis;
    for (const auto& spec : c.phi_family) phis.push_back(make_brownian_functional(spec, c.d));
    const auto rows = theorem_schedule_check(plan, c.n_grid, phis, c.survival_threshold);
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> columns;
    for (const auto& row : rows) {
      lines.add(json(row));
      columns[row.phi_id].first.push_back(row.median_first);
      columns[row.phi_id].second.push_back(row.median_second);
    }
    for (const auto& [id, cols] : columns) {
      lines.add({{"check", "scheduleOrdering"},
                 {"phiId", id},
                 {"firstDecreasing", strictly_decreasing(cols.first)},
                 {"secondDecreasing", strictly_decreasing(cols.second)}});
    }
  }

  if (selected("uniformity")) {
    const auto records = uniformity_check(plan, c.m_grid, c.n_grid, c.events, c.survival_threshold);
    for (const auto& rec : records) {
      const bool pass = rec.n > rec.m || rec.value == 0.0;
      record_check(lines, result, json(rec), pass, "uniformity:" + rec.event_id + ":n=" + std::to_string(rec.n));
    }
    for (const auto& sup : uniformity_sup(records)) lines.add(json(sup));
  }

  lines.add({{"summary", "verify"}, {"checks", v.checks}, {"failures", result.failures}});
  lines.write(out / "verify.jsonl", result);
  result.exit_code = result.failures.empty() ? kExitOk : kExitCheckFailure;
  return result;
}

WorkflowResult run_scaling(const RunConfig& c, const fs::path& out) {
  WorkflowResult result;
  const std::size_t grid = c.n_grid.size();
  const std::size_t samples = c.samples_per_replica;
  const std::vector<double> t_endpoint{1.0};
  const std::vector<double>& tgrid = c.metrics.paths ? c.metrics.t_grid : t_endpoint;
  const std::size_t tcount = tgrid.size();
  const auto d = static_cast<std::size_t>(c.d);

  // values[r][grid] = flattened rescaled samples [sample][t][coordinate]
  std::vector<std::vector<std::vector<double>>> values(c.replicas, std::vector<std::vector<double>>(grid));
  parallel_for(c.replicas, c.threads, [&](std::size_t r) {
    const EnvironmentField field = replica_field(c.environment, r);
    PartitionSlice slice = PartitionSlice::origin(c.d);
    for (std::size_t i = 0; i < grid; ++i) {
      const std::int64_t n = c.n_grid[i];
      auto& dst = values[r][i];
      if (c.metrics.paths) {
        const auto slices = forward_slices(field, c.d, n, c.truncation());
        if (total_mass(slices.back()) == kNegInf) continue;
        const EndpointSampler endpoint(slices.back());
        for (std::size_t s = 0; s < samples; ++s) {
          const auto stream = sampler_stream(c.environment.seed, r, i * samples + s);
          const auto row = rescale(backward_sample(slices, endpoint, stream), n).on_grid(tgrid);
          dst.insert(dst.end(), row.begin(), row.end());
        }
        continue;
      }
      slice = propagate(field, std::move(slice), n, c.truncation());
      if (total_mass(slice) == kNegInf) continue;
      const EndpointSampler endpoint(slice);
      const double inv = 1.0 / std::sqrt(static_cast<double>(n));
      for (std::size_t s = 0; s < samples; ++s) {
        const Site z = endpoint.draw(sampler_stream(c.environment.seed, r, i * samples + s).uniform(0));
        for (int k = 0; k < c.d; ++k) dst.push_back(z[k] * inv);
      }
    }
  });

  JsonLines lines;
  Table table({"n", "t", "coordinate", "samples", "ks", "levy", "covarianceDeviation", "boundedLipschitz"});
  auto dat = open_output(out / "scaling.dat");
  dat << "# n ks_max levy_max covariance_deviation\n";
  const auto family = random_lipschitz_family(c.metrics.test_functions, tcount, c.d, c.environment.seed);
  for (std::size_t i = 0; i < grid; ++i) {
    const std::int64_t n = c.n_grid[i];
    PathBatch batch{c.d, tgrid, {}};
    for (std::size_t r = 0; r < c.replicas; ++r) {
      batch.values.insert(batch.values.end(), values[r][i].begin(), values[r][i].end());
    }
    const std::size_t count = batch.size();
    if (count < 2) {
      lines.add({{"n", n}, {"samples", count}, {"degenerate", true}});
      continue;
    }
    double bl = 0.0;
    if (c.metrics.paths) {
      const PathBatch reference = brownian_batch(tgrid, c.d, count, mix64(c.environment.seed ^ static_cast<std::uint64_t>(n)));
      bl = bounded_lipschitz_estimate(batch, reference, family);
    }
    double ks_max = 0.0, levy_max = 0.0, cov_at_one = 0.0;
    for (std::size_t t = 0; t < tcount; ++t) {
      std::vector<Point> points(count);
      for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t k = 0; k < d; ++k) points[s][k] = batch.values[s * batch.stride() + t * d + k];
      }
      const GaussianMarginalSpec marginal{tgrid[t], c.d};
      const CovarianceDeviation cov = covariance_deviation(points, c.d, marginal.variance());
      if (tgrid[t] == 1.0) cov_at_one = cov.value;
      for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> xs(count);
        for (std::size_t s = 0; s < count; ++s) xs[s] = points[s][k];
        if (c.metrics.jitter) {
          const auto stream = KeyedStream::derive(c.environment.seed, keys::kJitterTag, i * tcount + t, k);
          xs = jitter(xs, marginal_lattice_spacing(c.d, n), stream);
        }
        const EmpiricalMeasure1D emp(std::move(xs));
        const Cdf cdf = marginal.coordinate_cdf();
        MetricReport rep;
        rep.n = n;
        rep.t = tgrid[t];
        rep.coordinate = static_cast<int>(k);
        rep.samples = count;
        rep.ks = ks_distance(emp, cdf);
        rep.levy = levy_distance(emp, cdf);
        rep.covariance_deviation = cov.value;
        rep.bounded_lipschitz = bl;
        rep.jittered = c.metrics.jitter;
        rep.degenerate = cov.degenerate;
        ks_max = std::max(ks_max, rep.ks);
        levy_max = std::max(levy_max, rep.levy);
        lines.add(json(rep));
        table.add({n, rep.t, k + 1, count, rep.ks, rep.levy, rep.covariance_deviation, rep.bounded_lipschitz});
        if (tgrid[t] == 1.0 && k == 0) {
          const fs::path cdf_path = out / ("cdf_n" + std::to_string(n) + ".csv");
          auto os = open_output(cdf_path);
          write_cdf_csv(os, emp, cdf);
          close_output(os, cdf_path);
          result.files.push_back(cdf_path);
        }
      }
    }
    dat << n << ' ' << ks_max << ' ' << levy_max << ' ' << cov_at_one << '\n';
  }
  close_output(dat, out / "scaling.dat");
  result.files.push_back(out / "scaling.dat");
  lines.write(out / "scaling.jsonl", result);
  table.write(out / "scaling_table", c.format, result);
  return result;
}

WorkflowResult run_report(const fs::path& dir) {
  WorkflowResult result;
  const std::vector<std::string> known{"verify.jsonl", "scaling.jsonl", "replicas.jsonl"};
  std::map<std::string, std::vector<json>> inputs;
  for (const auto& name : known) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) continue;
    std::ifstream is(p);
    if (!is) throw IoError("cannot read " + p.string());
    std::string line;
    auto& records = inputs[name];
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      try {
        records.push_back(json::parse(line));
      } catch (const json::parse_error&) {
        throw IoError("malformed JSON line in " + p.string());
      }
    }
  }
  if (inputs.empty()) {
    throw IoError("no outputs to report on in " + dir.string() + " (expected one of verify.jsonl, scaling.jsonl, replicas.jsonl)");
  }

  std::ostringstream txt;
  txt << "polylab report\n";
  if (inputs.contains("verify.jsonl")) {
    std::map<std::string, std::pair<int, int>> tally;  // check -> (passed, failed)
    for (const auto& r : inputs["verify.jsonl"]) {
      if (!r.contains("check") || !r.contains("pass")) continue;
      auto& t = tally[r["check"].get<std::string>()];
      (r["pass"].get<bool>() ? t.first : t.second) += 1;
    }
    txt << "\nverification\n";
    for (const auto& [check, t] : tally) {
      txt << "  " << std::left << std::setw(20) << check << " passed " << t.first << "  failed " << t.second << '\n';
      if (t.second > 0) result.failures.push_back(check);
    }
  }
  if (inputs.contains("scaling.jsonl")) {
    txt << "\nscaling (n, t, coordinate, ks, levy, covariance deviation)\n";
    const fs::path dat_path = dir / "report_scaling.dat";
    auto dat = open_output(dat_path);
    dat << "# n t coordinate ks levy covariance_deviation\n";
    for (const auto& r : inputs["scaling.jsonl"]) {
      if (!r.contains("ks")) continue;
      txt << "  " << r["n"] << ' ' << r["t"] << ' ' << r["coordinate"] << ' ' << r["ks"] << ' ' << r["levy"] << ' '
          << r["covarianceDeviation"] << '\n';
      dat << r["n"] << ' ' << r["t"] << ' ' << r["coordinate"] << ' ' << r["ks"] << ' ' << r["levy"] << ' '
          << r["covarianceDeviation"] << '\n';
    }
    close_output(dat, dat_path);
    result.files.push_back(dat_path);
  }
  if (inputs.contains("replicas.jsonl")) {
    std::map<std::int64_t, std::vector<double>> log_w;
    for (const auto& r : inputs["replicas.jsonl"]) {
      if (!r.contains("n")) continue;
      log_w[r["n"].get<std::int64_t>()].push_back(r["logW"].is_null() ? kNegInf : r["logW"].get<double>());
    }
    txt << "\nsimulation (n, replicas, median log W_n)\n";
    const fs::path dat_path = dir / "report_simulate.dat";
    auto dat = open_output(dat_path);
    dat << "# n median_log_w\n";
    for (const auto& [n, lw] : log_w) {
      const double med = median(lw);
      txt << "  " << n << ' ' << lw.size() << ' ' << med << '\n';
      dat << n << ' ' << med << '\n';
    }
    close_output(dat, dat_path);
    result.files.push_back(dat_path);
  }
  const fs::path txt_path = dir / "report.txt";
  auto os = open_output(txt_path);
  os << txt.str();
  close_output(os, txt_path);
  result.files.push_back(txt_path);
  return result;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_run_meta(const fs::path& out, const std::string& subcommand, const RunConfig* config,
                    const std::string& started_at, const std::string& finished_at) {
  json meta{{"subcommand", subcommand}, {"version", kVersion}, {"startedAt", started_at}, {"finishedAt", finished_at}};
  if (config) meta["config"] = config_to_json(*config);
  const fs::path path = out / "run_meta.json";
  auto os = open_output(path);
  os << meta.dump(2) << '\n';
  close_output(os, path);
}

}  // namespace polylab
