#include "polylab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "polylab/normal.hpp"
#include "polylab/numerics.hpp"
#include "polylab/parallel.hpp"

namespace polylab {

EnvironmentField replica_field(const EnvironmentSpec& spec, std::size_t replica) {
  EnvironmentSpec s = spec;
  s.seed = replica_seed(spec.seed, replica);
  return EnvironmentField(s);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mass(double log_mass) { return std::exp(log_mass); }

void require_increasing_grid(std::span<const std::int64_t> grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + ": grid must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing and nonnegative");
    }
  }
}

std::uint64_t layer_probability_mask(int bits) { return bits >= 64 ? ~0ULL : (1ULL << bits) - 1; }

double bits_probability(const TwoPointLaw& law, std::uint64_t bits, int count) {
  double p = 1.0;
  for (int i = 0; i < count; ++i) p *= (bits >> i) & 1U ? 1.0 - law.p_low : law.p_low;
  return p;
}

/// (2d)^{-n} sum over paths of prod zeta * g(X_n), with plain (uncompensated)
/// sums in a fixed order. Every operation is a rounded sum or product of
/// nonnegative numbers, so the result is exactly nondecreasing in each zeta.
double monotone_endpoint_mass(const SiteWeights& weights, int d, std::int64_t n, const EndpointFunctional& g) {
  std::uint64_t count = 1;
  for (std::int64_t k = 0; k < n; ++k) count *= static_cast<std::uint64_t>(2 * d);
  double total = 0.0;
  for (std::uint64_t p = 0; p < count; ++p) {
    Site z;
    double w = 1.0;
    std::uint64_t rest = p;
    for (std::int64_t k = 1; k <= n; ++k) {
      z = z + unit_step(static_cast<int>(rest % static_cast<std::uint64_t>(2 * d)));
      rest /= static_cast<std::uint64_t>(2 * d);
      w *= weights.value(k, z);
    }
    const double gz = g(z);
    require_unit_range(gz, "functional " + g.id());
    total += w * gz;
  }
  return total * std::pow(2.0 * d, -static_cast<double>(n));
}

}  // namespace

double martingale_residual_exact(const TinyInstance& inst) {
  const int d = inst.dim();
  const TwoPointLaw& law = inst.law();
  double worst = 0.0;
  for (std::int64_t n = 0; n < inst.horizon(); ++n) {
    const auto [lo, hi] = inst.layer(n + 1);
    const int layer_bits = hi - lo;
    for (std::uint64_t a = 0; a < (1ULL << lo); ++a) {
      const PartitionSlice head = propagate(inst.weights(a), PartitionSlice::origin(d), n);
      const double wn = mass(total_mass(head));
      KahanSum e;
      for (std::uint64_t c = 0; c <= layer_probability_mask(layer_bits); ++c) {
        const AtomWeights w = inst.weights(a | (c << lo));
        e += bits_probability(law, c, layer_bits) * mass(total_mass(forward_step(w, head)));
      }
      worst = std::max(worst, std::fabs(e.value() - wn));
    }
  }
  return worst;
}

NamedPathFunctional endpoint_as_path(const EndpointFunctional& g) {
  return {g.id(), [g](const PolymerPath& path) { return g(path.sites.back()); }};
}

std::vector<ContractionRecord> contraction_exhaustive(const TinyInstance& inst, std::int64_t m,
                                                      std::span<const NamedPathFunctional> family,
                                                      double tolerance, int threads) {
  const std::int64_t n = inst.horizon();
  const int d = inst.dim();
  if (m < 0 || m > n) throw std::invalid_argument("contraction_exhaustive: need 0 <= m <= n");
  const PathFunctional one = [](const PolymerPath&) { return 1.0; };
  const double rhs = enumerate_environment_expectation(
      inst,
      [&](const AtomWeights& w) {
        const HorizonWeights wm(w, m);
        return std::fabs(enumerate_path_mass(w, d, n, one) - enumerate_path_mass(wm, d, n, one));
      },
      threads);
  std::vector<ContractionRecord> out;
  for (const auto& g : family) {
    const PathFunctional checked = [&g](const PolymerPath& path) {
      const double v = g.f(path);
      require_unit_range(v, "g = " + g.id);
      return v;
    };
    const double lhs = enumerate_environment_expectation(
        inst,
        [&](const AtomWeights& w) {
          const HorizonWeights wm(w, m);
          return std::fabs(enumerate_path_mass(w, d, n, checked) - enumerate_path_mass(wm, d, n, checked));
        },
        threads);
    ContractionRecord r;
    r.m = m;
    r.n = n;
    r.g_id = g.id;
    r.mode = "exhaustive";
    r.lhs = lhs;
    r.rhs = rhs;
    r.allowance = tolerance;
    r.pass = lhs <= rhs + tolerance;
    out.push_back(r);
  }
  return out;
}

std::vector<ContractionRecord> contraction_monte_carlo(const ReplicaPlan& plan, std::int64_t m, std::int64_t n,
                                                       std::span<const EndpointFunctional> family,
                                                       double se_multiplier) {
  if (m < 0 || m > n) throw std::invalid_argument("contraction_monte_carlo: need 0 <= m <= n");
  if (plan.replicas < 2) throw std::invalid_argument("contraction_monte_carlo: need at least 2 replicas");
  const std::size_t g_count = family.size();
  // Per replica: |W_n - W_m| followed by |W_n(g) - W_m(g)| for each g.
  std::vector<std::vector<double>> values(plan.replicas);
  parallel_for(plan.replicas, plan.threads, [&](std::size_t r) {
    const EnvironmentField field = replica_field(plan.environment, r);
    const HorizonWeights horizon(field, m);
    const PartitionSlice sn = propagate(field, PartitionSlice::origin(plan.d), n, plan.truncation);
    const PartitionSlice sm = propagate(horizon, PartitionSlice::origin(plan.d), n, plan.truncation);
    auto& row = values[r];
    row.push_back(std::fabs(mass(total_mass(sn)) - mass(total_mass(sm))));
    for (const auto& g : family) row.push_back(std::fabs(mass(endpoint_mass(sn, g)) - mass(endpoint_mass(sm, g))));
  });
  auto column = [&](std::size_t c) {
    std::vector<double> col(plan.replicas);
    for (std::size_t r = 0; r < plan.replicas; ++r) col[r] = values[r][c];
    return mean_estimate(col);
  };
  const MeanEstimate rhs = column(0);
  std::vector<ContractionRecord> out;
  for (std::size_t i = 0; i < g_count; ++i) {
    const MeanEstimate lhs = column(i + 1);
    ContractionRecord r;
    r.m = m;
    r.n = n;
    r.g_id = family[i].id();
    r.mode = "monteCarlo";
    r.lhs = lhs.mean;
    r.rhs = rhs.mean;
    r.lhs_se = lhs.standard_error;
    r.rhs_se = rhs.standard_error;
    r.allowance = se_multiplier * std::hypot(lhs.standard_error, rhs.standard_error);
    r.pass = r.lhs <= r.rhs + r.allowance;
    out.push_back(r);
  }
  return out;
}

std::uint64_t ProductSpace::size() const {
  std::uint64_t s = 1;
  for (const auto& p : probabilities) {
    if (p.empty()) return 0;
    s *= p.size();
    if (s > (1ULL << 20)) return s;
  }
  return s;
}

FkgResult fkg_exhaustive(const ProductSpace& space, const ProductFunction& f, const ProductFunction& g, double slack) {
  const std::uint64_t size = space.size();
  if (size == 0) throw std::invalid_argument("fkg_exhaustive: empty coordinate");
  if (size > (1ULL << 20)) throw TooLargeError("fkg_exhaustive: more than 2^20 atoms");
  const int c = space.coordinates();
  for (int i = 0; i < c; ++i) {
    KahanSum s;
    for (double p : space.probabilities[static_cast<std::size_t>(i)]) {
      if (!(p >= 0.0)) throw std::invalid_argument("fkg_exhaustive: negative probability");
      s += p;
    }
    if (std::fabs(s.value() - 1.0) > 1e-12) throw std::invalid_argument("fkg_exhaustive: probabilities must sum to 1");
  }

  // Tabulate in mixed radix, coordinate 0 fastest.
  std::vector<std::uint64_t> stride(static_cast<std::size_t>(c));
  std::uint64_t acc = 1;
  for (int i = 0; i < c; ++i) {
    stride[static_cast<std::size_t>(i)] = acc;
    acc *= space.probabilities[static_cast<std::size_t>(i)].size();
  }
  std::vector<double> fv(size), gv(size), pv(size);
  std::vector<int> level(static_cast<std::size_t>(c), 0);
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    fv[idx] = f(level);
    gv[idx] = g(level);
    double p = 1.0;
    for (int i = 0; i < c; ++i) p *= space.probabilities[static_cast<std::size_t>(i)][static_cast<std::size_t>(level[static_cast<std::size_t>(i)])];
    pv[idx] = p;
    for (int i = 0; i < c; ++i) {
      auto& l = level[static_cast<std::size_t>(i)];
      if (++l < static_cast<int>(space.probabilities[static_cast<std::size_t>(i)].size())) break;
      l = 0;
    }
  }

  auto check = [&](const std::vector<double>& v, const char* name) {
    for (std::uint64_t idx = 0; idx < size; ++idx) {
      for (int i = 0; i < c; ++i) {
        const auto levels = space.probabilities[static_cast<std::size_t>(i)].size();
        const auto si = stride[static_cast<std::size_t>(i)];
        if ((idx / si) % levels + 1 >= levels) continue;
        const double lo = v[idx];
        const double hi = v[idx + si];
        if (hi < lo - slack * std::max(1.0, std::fabs(lo))) {
          throw NonMonotoneError(std::string("fkg_exhaustive: ") + name + " decreases along coordinate " +
                                     std::to_string(i) + " at atom " + std::to_string(idx),
                                 i);
        }
      }
    }
  };
  check(fv, "f");
  check(gv, "g");

  KahanSum ef, eg;
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    ef += pv[idx] * fv[idx];
    eg += pv[idx] * gv[idx];
  }
  FkgResult r;
  r.mean_f = ef.value();
  r.mean_g = eg.value();
  KahanSum cov;
  for (std::uint64_t idx = 0; idx < size; ++idx) cov += pv[idx] * (fv[idx] - r.mean_f) * (gv[idx] - r.mean_g);
  r.covariance = cov.value();
  return r;
}

std::vector<FkgPairRecord> fkg_lemma_pair(const TinyInstance& inst, std::int64_t m, const EndpointFunctional& g) {
  const std::int64_t n = inst.horizon();
  const int d = inst.dim();
  if (m < 0 || m >= n) throw std::invalid_argument("fkg_lemma_pair: need 0 <= m < n");
  const int fixed = m == 0 ? 0 : inst.layer(m).second;
  const int free = inst.site_count() - fixed;
  if (free > 20) throw TooLargeError("fkg_lemma_pair: more than 2^20 free atoms");
  const EndpointFunctional gbar("1-" + g.id(), [g](const Site& z) { return 1.0 - g(z); });

  ProductSpace space;
  space.probabilities.assign(static_cast<std::size_t>(free), {inst.law().p_low, 1.0 - inst.law().p_low});

  std::vector<FkgPairRecord> out;
  for (std::uint64_t a = 0; a < (1ULL << fixed); ++a) {
    auto atom_of = [&](std::span<const int> levels) {
      std::uint64_t atom = a;
      for (int i = 0; i < free; ++i) {
        if (levels[static_cast<std::size_t>(i)] != 0) atom |= 1ULL << (fixed + i);
      }
      return atom;
    };
    const AtomWeights base = inst.weights(a);
    const HorizonWeights base_m(base, m);
    const double wm_gbar = monotone_endpoint_mass(base_m, d, n, gbar);
    const double wm_g = monotone_endpoint_mass(base_m, d, n, g);
    const ProductFunction f = [&](std::span<const int> levels) {
      return monotone_endpoint_mass(inst.weights(atom_of(levels)), d, n, gbar) - wm_gbar;
    };
    const ProductFunction h = [&](std::span<const int> levels) {
      return monotone_endpoint_mass(inst.weights(atom_of(levels)), d, n, g) >= wm_g ? 1.0 : 0.0;
    };
    const FkgResult res = fkg_exhaustive(space, f, h);
    out.push_back({a, res.covariance, res.mean_f, res.mean_g});
  }
  return out;
}

SurvivalScan survival_scan(const ReplicaPlan& plan, std::span<const std::int64_t> n_grid, double threshold) {
  require_increasing_grid(n_grid, "survival_scan");
  if (plan.replicas < 1) throw std::invalid_argument("survival_scan: need at least one replica");
  SurvivalScan scan;
  scan.threshold = threshold;
  scan.replicas = plan.replicas;
  scan.log_w.assign(plan.replicas, std::vector<double>(n_grid.size(), kNegInf));
  parallel_for(plan.replicas, plan.threads, [&](std::size_t r) {
    const EnvironmentField field = replica_field(plan.environment, r);
    PartitionSlice slice = PartitionSlice::origin(plan.d);
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      slice = propagate(field, std::move(slice), n_grid[i], plan.truncation);
      scan.log_w[r][i] = total_mass(slice);
    }
  });

  for (const auto& row : scan.log_w) {
    bool dead = false;
    for (double lw : row) {
      if (dead && lw > kNegInf) scan.positivity_nested = false;
      dead = dead || lw == kNegInf;
    }
  }
  const double log_threshold = std::log(threshold);
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    SurvivalRow row;
    row.n = n_grid[i];
    std::vector<double> w(plan.replicas), rates;
    std::size_t positive = 0, above = 0;
    for (std::size_t r = 0; r < plan.replicas; ++r) {
      const double lw = scan.log_w[r][i];
      w[r] = mass(lw);
      if (lw > kNegInf) {
        ++positive;
        if (row.n > 0) rates.push_back(lw / static_cast<double>(row.n));
      }
      if (lw > log_threshold) ++above;
    }
    const MeanEstimate e = mean_estimate(w);
    row.mean_w = e.mean;
    row.se_w = e.standard_error;
    row.mean_z = e.standard_error > 0.0 ? (e.mean - 1.0) / e.standard_error : 0.0;
    row.median_w = median(w);
    row.frac_positive = static_cast<double>(positive) / static_cast<double>(plan.replicas);
    row.frac_above = static_cast<double>(above) / static_cast<double>(plan.replicas);
    row.log_rate_count = rates.size();
    row.mean_log_rate = rates.empty() ? 0.0 : mean_estimate(rates).mean;
    scan.rows.push_back(row);
  }
  return scan;
}

double brownian_expectation(const BrownianFunctional& phi, int d, int points) {
  check_dimension(d);
  const QuadratureRule rule = gauss_hermite_probabilists(points);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  KahanSum s;
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
      x[static_cast<std::size_t>(i)] = rule.nodes[k] * scale;
      w *= rule.weights[k];
    }
    s += w * phi.psi(x);
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[static_cast<std::size_t>(i)] < points) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
    if (i == d) break;
  }
  return s.value();
}

std::vector<ScheduleRow> theorem_schedule_check(const ReplicaPlan& plan, std::span<const std::int64_t> n_grid,
                                                std::span<const BrownianFunctional> family, double threshold,
                                                int quadrature_points) {
  require_increasing_grid(n_grid, "theorem_schedule_check");
  if (n_grid.front() < 1) throw std::invalid_argument("theorem_schedule_check: n must be >= 1");
  const std::size_t grid = n_grid.size();
  const std::size_t phis = family.size();
  std::vector<double> brownian(phis);
  for (std::size_t j = 0; j < phis; ++j) brownian[j] = brownian_expectation(family[j], plan.d, quadrature_points);

  struct ReplicaValues {
    bool survives = false;
    std::vector<double> first, second;  // [grid][phi]
  };
  std::vector<ReplicaValues> values(plan.replicas);
  parallel_for(plan.replicas, plan.threads, [&](std::size_t r) {
    const EnvironmentField field = replica_field(plan.environment, r);
    auto& out = values[r];
    out.first.assign(grid * phis, kNaN);
    out.second.assign(grid * phis, kNaN);
    PartitionSlice free_slice = PartitionSlice::origin(plan.d);
    for (std::size_t i = 0; i < grid; ++i) {
      const std::int64_t n = n_grid[i];
      const std::int64_t m = fourth_root_floor(n);
      free_slice = propagate(field, std::move(free_slice), n, plan.truncation);
      const HorizonWeights horizon(field, m);
      const PartitionSlice horizon_slice = propagate(horizon, PartitionSlice::origin(plan.d), n, plan.truncation);
      const double log_wn = total_mass(free_slice);
      const double log_wm = total_mass(horizon_slice);
      if (log_wn == kNegInf || log_wm == kNegInf) continue;
      for (std::size_t j = 0; j < phis; ++j) {
        const EndpointFunctional g = EndpointFunctional::rescaled(family[j].id, family[j].psi, n, plan.d);
        const double en = mass(endpoint_mass(free_slice, g) - log_wn);
        const double em = mass(endpoint_mass(horizon_slice, g) - log_wm);
        out.first[i * phis + j] = std::fabs(en - em);
        out.second[i * phis + j] = std::fabs(em - brownian[j]);
      }
    }
    out.survives = total_mass(free_slice) > std::log(threshold);
  });

  std::size_t survivors = 0;
  for (const auto& v : values) survivors += v.survives ? 1 : 0;
  if (survivors == 0) throw DegenerateInputError("theorem_schedule_check: no replica survives (W_N <= threshold)");

  std::vector<ScheduleRow> rows;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < phis; ++j) {
      std::vector<double> a, b;
      for (const auto& v : values) {
        if (!v.survives) continue;
        a.push_back(v.first[i * phis + j]);
        b.push_back(v.second[i * phis + j]);
      }
      ScheduleRow row;
      row.n = n_grid[i];
      row.m = fourth_root_floor(row.n);
      row.phi_id = family[j].id;
      row.brownian = brownian[j];
      row.median_first = median(a);
      row.median_second = median(b);
      row.survivors = survivors;
      rows.push_back(row);
    }
  }
  return rows;
}

double constrained_mass_any(const SiteWeights& weights, std::int64_t n, const CylinderEvent& event,
                            const Truncation& truncation) {
  if (event.end() <= n) return constrained_mass(weights, n, event, truncation);
  const HorizonWeights horizon(weights, n);
  return constrained_mass(horizon, event.end(), event, truncation);
}

std::vector<UniformityRecord> uniformity_check(const ReplicaPlan& plan, std::span<const std::int64_t> m_grid,
                                               std::span<const std::int64_t> n_grid,
                                               std::span<const std::vector<int>> patterns, double threshold) {
  require_increasing_grid(m_grid, "uniformity_check (mGrid)");
  require_increasing_grid(n_grid, "uniformity_check (nGrid)");
  std::vector<CylinderEvent> events;  // [m][pattern]
  for (std::int64_t m : m_grid) {
    for (const auto& steps : patterns) {
      CylinderEvent e{plan.d, m, steps};
      e.validate();
      events.push_back(std::move(e));
    }
  }
  const std::size_t grid = n_grid.size();
  struct ReplicaValues {
    bool survives = false;
    std::vector<double> dev;  // [event][grid]
  };
  std::vector<ReplicaValues> values(plan.replicas);
  parallel_for(plan.replicas, plan.threads, [&](std::size_t r) {
    const EnvironmentField field = replica_field(plan.environment, r);
    auto& out = values[r];
    out.dev.assign(events.size() * grid, 0.0);
    std::vector<double> log_w(grid);
    PartitionSlice slice = PartitionSlice::origin(plan.d);
    for (std::size_t i = 0; i < grid; ++i) {
      slice = propagate(field, std::move(slice), n_grid[i], plan.truncation);
      log_w[i] = total_mass(slice);
    }
    out.survives = log_w.back() > std::log(threshold);
    if (!out.survives) return;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const CylinderEvent& ev = events[e];
      const double p_walk = ev.walk_probability();
      // Constrained recursion shared by every n >= end of the pattern.
      PartitionSlice constrained = propagate(field, PartitionSlice::origin(plan.d), ev.offset, plan.truncation);
      bool forced = false;
      for (std::size_t i = 0; i < grid; ++i) {
        const std::int64_t n = n_grid[i];
        if (n <= ev.offset) continue;  // P_n(B) = P(B) exactly
        double log_wb;
        if (n < ev.end()) {
          log_wb = constrained_mass_any(field, n, ev, plan.truncation);
        } else {
          if (!forced) {
            for (int dir : ev.steps) constrained = forced_step(field, constrained, dir, plan.truncation);
            forced = true;
          }
          constrained = propagate(field, std::move(constrained), n, plan.truncation);
          log_wb = total_mass(constrained);
        }
        out.dev[e * grid + i] = std::fabs(mass(log_wb - log_w[i]) - p_walk);
      }
    }
  });

  std::vector<UniformityRecord> records;
  for (std::size_t e = 0; e < events.size(); ++e) {
    for (std::size_t i = 0; i < grid; ++i) {
      std::vector<double> dev;
      for (const auto& v : values) {
        if (v.survives) dev.push_back(v.dev[e * grid + i]);
      }
      UniformityRecord rec;
      rec.m = events[e].offset;
      rec.n = n_grid[i];
      rec.event_id = events[e].id();
      rec.survivors = dev.size();
      if (!dev.empty()) {
        const MeanEstimate est = mean_estimate(dev);
        rec.value = est.mean;
        rec.standard_error = est.standard_error;
      }
      records.push_back(rec);
    }
  }
  return records;
}

std::vector<UniformitySup> uniformity_sup(std::span<const UniformityRecord> records) {
  std::vector<UniformitySup> out;
  std::map<std::pair<std::int64_t, std::string>, std::size_t> slot;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.m, r.event_id);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, out.size());
      out.push_back({r.m, r.event_id, r.value, r.standard_error, r.n});
    } else if (r.value > out[it->second].value) {
      out[it->second] = {r.m, r.event_id, r.value, r.standard_error, r.n};
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const ContractionRecord& r) {
  j = {{"check", "contraction"}, {"mode", r.mode}, {"m", r.m},         {"n", r.n},
       {"gId", r.g_id},          {"lhs", r.lhs},   {"rhs", r.rhs},     {"lhsSe", r.lhs_se},
       {"rhsSe", r.rhs_se},      {"allowance", r.allowance}, {"pass", r.pass}};
}

void to_json(nlohmann::json& j, const FkgPairRecord& r) {
  j = {{"check", "fkgLemmaPair"}, {"fixedAtom", r.fixed_atom}, {"covariance", r.covariance},
       {"meanF", r.mean_f},       {"meanG", r.mean_g}};
}

void to_json(nlohmann::json& j, const SurvivalRow& r) {
  j = {{"check", "survival"},          {"n", r.n},
       {"meanW", r.mean_w},            {"seW", r.se_w},
       {"meanZ", r.mean_z},            {"medianW", r.median_w},
       {"fracPositive", r.frac_positive}, {"fracAbove", r.frac_above},
       {"meanLogRate", r.mean_log_rate},  {"logRateCount", r.log_rate_count}};
}

void to_json(nlohmann::json& j, const ScheduleRow& r) {
  j = {{"check", "schedule"},          {"n", r.n},
       {"m", r.m},                     {"phiId", r.phi_id},
       {"brownian", r.brownian},       {"medianFirst", r.median_first},
       {"medianSecond", r.median_second}, {"survivors", r.survivors}};
}

void to_json(nlohmann::json& j, const UniformityRecord& r) {
  j = {{"check", "uniformity"}, {"m", r.m},         {"n", r.n},
       {"eventId", r.event_id}, {"value", r.value}, {"standardError", r.standard_error},
       {"survivors", r.survivors}};
}

void to_json(nlohmann::json& j, const UniformitySup& r) {
  j = {{"check", "uniformitySup"}, {"m", r.m}, {"eventId", r.event_id}, {"value", r.value},
       {"standardError", r.standard_error}, {"atN", r.at_n}};
}

}  // namespace polylab
