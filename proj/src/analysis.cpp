#include "srm/analysis.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "format.hpp"
#include "parallel.hpp"
#include "srm/errors.hpp"

namespace srm {

namespace {

using detail::shortest;

// Re-raises `e` with the sweep parameter prepended, keeping its category.
[[noreturn]] void rethrow_at(double param, const std::exception& e) {
  const std::string msg = "sweep aborted at parameter " + shortest(param) + ": " + e.what();
  if (dynamic_cast<const ConvergenceError*>(&e) != nullptr) {
    const auto& ce = static_cast<const ConvergenceError&>(e);
    throw ConvergenceError(msg, ce.best_estimate(), ce.error_bound());
  }
  if (dynamic_cast<const NumericError*>(&e) != nullptr) throw NumericError(msg);
  if (dynamic_cast<const DataError*>(&e) != nullptr) throw DataError(msg);
  if (dynamic_cast<const DomainError*>(&e) != nullptr) throw DomainError(msg);
  throw ParameterError(msg);
}

}  // namespace

QuadratureConfig sweep_default_config() { return QuadratureConfig::replication(kSweepGridPoints); }

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count < 1) throw ParameterError("grid: count must be >= 1");
  if (count == 1) return {lo};
  if (!(lo < hi)) throw ParameterError("grid: requires min < max");
  std::vector<double> grid(count);
  const double span = hi - lo;
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo + span * (static_cast<double>(i) / static_cast<double>(count - 1));
  }
  grid.back() = hi;
  return grid;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0)) throw ParameterError("log grid: min must be > 0");
  auto grid = linear_grid(std::log10(lo), std::log10(hi), count);
  for (double& g : grid) g = std::pow(10.0, g);
  grid.front() = lo;
  if (count > 1) grid.back() = hi;
  return grid;
}

SweepResult sweep_srm(WeightFamily family, std::span<const double> grid,
                      const QuantileSource& source, const QuadratureConfig& config) {
  if (grid.empty()) throw ParameterError("sweep: empty parameter grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ParameterError("sweep: grid must be strictly increasing");
  }
  config.validate();

  // Validate every parameter before spending time on quadrature.
  std::vector<WeightSpec> specs;
  specs.reserve(grid.size());
  for (double g : grid) {
    try {
      specs.push_back(WeightSpec::make(family, g));
    } catch (const std::exception& e) {
      rethrow_at(g, e);
    }
  }

  SweepResult result;
  result.family = family;
  result.config = config;
  result.rows.resize(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    try {
      result.rows[i] = {grid[i], srm(source, specs[i], config)};
    } catch (const std::exception& e) {
      rethrow_at(grid[i], e);
    }
  });
  return result;
}

SweepRow find_peak(const SweepResult& sweep) {
  if (sweep.rows.size() < 3) throw ParameterError("find_peak: needs at least 3 rows");
  SweepRow best = sweep.rows.front();
  for (const auto& row : sweep.rows) {
    if (row.value > best.value) best = row;
  }
  return best;
}

std::vector<WeightPoint> weight_curve(const WeightSpec& spec, std::size_t n_points, double p_max) {
  if (n_points < 2) throw ParameterError("weight_curve: n_points must be >= 2");
  if (!(p_max > 0.0 && p_max < 1.0)) throw ParameterError("weight_curve: p_max must lie in (0,1)");
  std::vector<WeightPoint> curve;
  curve.reserve(n_points);
  for (double p : linear_grid(0.0, p_max, n_points)) curve.push_back({p, weight(spec, p)});
  return curve;
}

PairOutcome subadditivity_pair(const RiskMeasure& measure, std::span<const double> a,
                               std::span<const double> b) {
  if (a.empty() || a.size() != b.size()) {
    throw DataError("subadditivity: samples must be non-empty and of equal length");
  }
  std::vector<double> sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];

  PairOutcome out{};
  out.rho_a = evaluate(measure, load_empirical(a));
  out.rho_b = evaluate(measure, load_empirical(b));
  out.rho_sum = evaluate(measure, QuantileSource::empirical(std::move(sum)));
  out.gap = out.rho_sum - out.rho_a - out.rho_b;
  const double scale = std::max(std::abs(out.rho_a) + std::abs(out.rho_b), std::abs(out.rho_sum));
  out.violation = out.gap > kSubadditivityRelTol * scale;
  return out;
}

SubadditivityReport subadditivity_check(const RiskMeasure& measure, std::size_t sample_size,
                                        std::size_t trials, std::uint64_t seed) {
  if (sample_size < 10) throw ParameterError("subadditivity: sample_size must be >= 10");
  if (trials < 1) throw ParameterError("subadditivity: trials must be >= 1");
  measure.validate();

  std::vector<PairOutcome> outcomes(trials);
  detail::parallel_for(trials, [&](std::size_t t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t & 0xffffffffULL),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(t) >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> mix(-1.0, 1.0);
    const double r = mix(rng);
    const double s = std::sqrt(1.0 - r * r);
    std::vector<double> a(sample_size);
    std::vector<double> b(sample_size);
    for (std::size_t i = 0; i < sample_size; ++i) {
      a[i] = normal(rng);
      b[i] = r * a[i] + s * normal(rng);
    }
    outcomes[t] = subadditivity_pair(measure, a, b);
  });

  SubadditivityReport report;
  report.trials = trials;
  report.seed = seed;
  report.worst_gap = -std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    if (o.violation) ++report.violations;
    report.worst_gap = std::max(report.worst_gap, o.gap);
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "param,value\n";
  for (const auto& row : sweep.rows) out << shortest(row.param) << ',' << shortest(row.value) << '\n';
}

void write_weight_curve_csv(std::ostream& out, std::span<const WeightPoint> curve) {
  out << "p,weight\n";
  for (const auto& pt : curve) out << shortest(pt.p) << ',' << shortest(pt.weight) << '\n';
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergencePoint> points) {
  out << "n,value\n";
  for (const auto& pt : points) out << pt.n_points << ',' << shortest(pt.value) << '\n';
}

void to_json(nlohmann::json& j, const SubadditivityReport& report) {
  j = nlohmann::json{{"trials", report.trials},
                     {"violations", report.violations},
                     {"worst_gap", report.worst_gap},
                     {"seed", report.seed}};
}

}  // namespace srm
