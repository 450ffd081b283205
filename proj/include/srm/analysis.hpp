// analysis.hpp
//
// Parameter sweeps of spectral measures, peak location, weight curves and a
// seeded Monte Carlo subadditivity check.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "srm/distributions.hpp"
#include "srm/measures.hpp"
#include "srm/quadrature.hpp"
#include "srm/risk_aversion.hpp"

namespace srm {

/// Sweeps use a 100,001-point replication grid unless told otherwise.
inline constexpr std::size_t kSweepGridPoints = 100'001;

QuadratureConfig sweep_default_config();

struct SweepRow {
  double param;
  double value;
};

struct SweepResult {
  WeightFamily family = WeightFamily::exponential;
  std::vector<SweepRow> rows;
  QuadratureConfig config;
};

/// `count` points spaced uniformly (or geometrically) over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t count);
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// One srm() evaluation per grid value. The grid must be strictly increasing
/// and inside the family's parameter range. A failing point aborts the sweep
/// with an error naming the parameter.
SweepResult sweep_srm(WeightFamily family, std::span<const double> grid,
                      const QuantileSource& source,
                      const QuadratureConfig& config = sweep_default_config());

/// Row with the largest value; ties go to the smaller parameter. Needs >= 3 rows.
SweepRow find_peak(const SweepResult& sweep);

struct WeightPoint {
  double p;
  double weight;
};

/// phi on a uniform grid of n_points over [0, p_max].
std::vector<WeightPoint> weight_curve(const WeightSpec& spec, std::size_t n_points, double p_max);

struct SubadditivityReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_gap = 0.0;  // max over trials of rho(A+B) - rho(A) - rho(B)
  std::uint64_t seed = 0;
};

inline constexpr double kSubadditivityRelTol = 1e-9;

struct PairOutcome {
  double rho_a;
  double rho_b;
  double rho_sum;
  double gap;      // rho_sum - rho_a - rho_b
  bool violation;  // gap > kSubadditivityRelTol * max(|rho_a| + |rho_b|, |rho_sum|)
};

/// Evaluates the measure on empirical sources built from A, B and the
/// elementwise sum A + B. The samples must have equal, non-zero length.
PairOutcome subadditivity_pair(const RiskMeasure& measure, std::span<const double> a,
                               std::span<const double> b);

/// Per trial: A ~ N(0,1) iid, B = r A + sqrt(1 - r^2) Z with r ~ U(-1,1),
/// drawn from a generator seeded by (seed, trial index).
SubadditivityReport subadditivity_check(const RiskMeasure& measure, std::size_t sample_size,
                                        std::size_t trials, std::uint64_t seed);

void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
void write_weight_curve_csv(std::ostream& out, std::span<const WeightPoint> curve);
void write_convergence_csv(std::ostream& out, std::span<const ConvergencePoint> points);

void to_json(nlohmann::json& j, const SubadditivityReport& report);

}  // namespace srm
