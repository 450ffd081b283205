#include "srm/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "format.hpp"
#include "srm/errors.hpp"

namespace srm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Acklam's rational approximation (relative error ~1.15e-9), refined below.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// p in (0, 0.5]; returns z <= 0.
double inverse_normal_lower(double p) {
  double x = acklam_lower(p);
  // One Halley step on the erfc-based CDF.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

// log Phi(x) for x << 0 via the asymptotic Mills-ratio series.
double log_normal_cdf_asymptotic(double x) {
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(series);
}

// Below this, exp(log_p) loses precision or the Halley step overflows.
constexpr double kLogTailSwitch = -690.0;

}  // namespace

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::standard_normal: return "standard-normal";
    case SourceKind::normal: return "normal";
    case SourceKind::empirical: return "empirical";
    case SourceKind::constant: return "constant";
    case SourceKind::uniform: return "uniform";
  }
  return "unknown";
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("inverse_normal_cdf: p must lie in (0,1), got " + detail::shortest(p));
  }
  if (p > 0.5) {
    return -inverse_normal_cdf(1.0 - p);
  }
  if (p < 1e-300) {
    return inverse_normal_cdf_log(std::log(p));
  }
  return inverse_normal_lower(p);
}

double inverse_normal_cdf_log(double log_p) {
  if (!(log_p < 0.0)) {
    throw DomainError("inverse_normal_cdf_log: log_p must be negative");
  }
  if (log_p > kLogTailSwitch) {
    return inverse_normal_cdf(std::exp(log_p));
  }
  // Newton on log Phi(x) = log_p; d/dx log Phi(x) ~ -x / series.
  double x = -std::sqrt(-2.0 * log_p);
  for (int i = 0; i < 50; ++i) {
    const double r = 1.0 / (x * x);
    const double slope = -x / (1.0 - r);
    const double step = (log_normal_cdf_asymptotic(x) - log_p) / slope;
    x -= step;
    if (std::abs(step) <= 1e-15 * std::abs(x)) break;
  }
  return x;
}

QuantileSource QuantileSource::standard_normal() { return QuantileSource{}; }

QuantileSource QuantileSource::normal(double mean, double sd) {
  if (!std::isfinite(mean)) throw ParameterError("normal: mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw ParameterError("normal: sd must be > 0");
  QuantileSource s;
  s.kind_ = SourceKind::normal;
  s.mean_ = mean;
  s.sd_ = sd;
  return s;
}

QuantileSource QuantileSource::empirical(std::vector<double> samples) {
  if (samples.empty()) throw DataError("empirical: at least one sample is required");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw DataError("empirical: non-finite loss at row " + std::to_string(i + 1));
    }
  }
  std::sort(samples.begin(), samples.end());
  QuantileSource s;
  s.kind_ = SourceKind::empirical;
  s.samples_ = std::move(samples);
  return s;
}

QuantileSource QuantileSource::constant(double value) {
  if (!std::isfinite(value)) throw ParameterError("constant: value must be finite");
  QuantileSource s;
  s.kind_ = SourceKind::constant;
  s.mean_ = value;
  return s;
}

QuantileSource QuantileSource::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ParameterError("uniform: requires finite lo < hi");
  }
  QuantileSource s;
  s.kind_ = SourceKind::uniform;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

// h is the 0-based fractional order-statistic position in [0, n-1].
double QuantileSource::empirical_at(double h) const {
  const std::size_t n = samples_.size();
  if (n == 1 || h <= 0.0) return samples_.front();
  if (h >= static_cast<double>(n - 1)) return samples_.back();
  const auto k = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(k);
  return samples_[k] + frac * (samples_[k + 1] - samples_[k]);
}

double QuantileSource::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("quantile: p must lie in (0,1), got " + detail::shortest(p));
  }
  switch (kind_) {
    case SourceKind::standard_normal: return inverse_normal_cdf(p);
    case SourceKind::normal: return mean_ + sd_ * inverse_normal_cdf(p);
    case SourceKind::empirical:
      return empirical_at(static_cast<double>(samples_.size() - 1) * p);
    case SourceKind::constant: return mean_;
    case SourceKind::uniform: return lo_ + (hi_ - lo_) * p;
  }
  return 0.0;
}

double QuantileSource::upper_quantile(double tail) const {
  if (!(tail > 0.0 && tail < 1.0)) {
    throw DomainError("upper_quantile: tail must lie in (0,1), got " + detail::shortest(tail));
  }
  switch (kind_) {
    case SourceKind::standard_normal: return -inverse_normal_cdf(tail);
    case SourceKind::normal: return mean_ - sd_ * inverse_normal_cdf(tail);
    case SourceKind::empirical: {
      const double last = static_cast<double>(samples_.size() - 1);
      return empirical_at(last - last * tail);
    }
    case SourceKind::constant: return mean_;
    case SourceKind::uniform: return hi_ - (hi_ - lo_) * tail;
  }
  return 0.0;
}

double QuantileSource::quantile_from_log_tail(double log_tail) const {
  if (!(log_tail <= 0.0)) throw DomainError("quantile_from_log_tail: log_tail must be <= 0");
  if (log_tail < -std::numbers::ln2) {
    if (kind_ == SourceKind::standard_normal) return -inverse_normal_cdf_log(log_tail);
    if (kind_ == SourceKind::normal) return mean_ - sd_ * inverse_normal_cdf_log(log_tail);
    const double tail = std::exp(log_tail);
    return tail > 0.0 ? upper_quantile(tail) : quantile_closed(1.0);
  }
  const double p = -std::expm1(log_tail);
  return p > 0.0 ? quantile(p) : quantile_closed(0.0);
}

double QuantileSource::quantile_closed(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("quantile_closed: p must lie in [0,1], got " + detail::shortest(p));
  }
  if (p == 0.0) return lower_bound();
  if (p == 1.0) return upper_bound();
  return quantile(p);
}

double QuantileSource::lower_bound() const {
  switch (kind_) {
    case SourceKind::standard_normal:
    case SourceKind::normal: return -kInf;
    case SourceKind::empirical: return samples_.front();
    case SourceKind::constant: return mean_;
    case SourceKind::uniform: return lo_;
  }
  return -kInf;
}

double QuantileSource::upper_bound() const {
  switch (kind_) {
    case SourceKind::standard_normal:
    case SourceKind::normal: return kInf;
    case SourceKind::empirical: return samples_.back();
    case SourceKind::constant: return mean_;
    case SourceKind::uniform: return hi_;
  }
  return kInf;
}

QuantileSource load_empirical(std::span<const double> records) {
  return QuantileSource::empirical(std::vector<double>(records.begin(), records.end()));
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<double> read_loss_csv(std::istream& in) {
  std::vector<double> losses;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view field = trim(line);
    if (line_no == 1 && field.starts_with("\xEF\xBB\xBF")) field = trim(field.substr(3));
    if (field.empty()) continue;
    if (!seen_content) {
      seen_content = true;
      if (field == "loss") continue;
    }
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
      throw DataError("line " + std::to_string(line_no) + ": not a number: '" +
                      std::string(field) + "'");
    }
    if (!std::isfinite(value)) {
      throw DataError("line " + std::to_string(line_no) + ": non-finite loss '" +
                      std::string(field) + "'");
    }
    losses.push_back(value);
  }
  if (losses.empty()) throw DataError("loss CSV contains no data rows");
  return losses;
}

std::vector<double> read_loss_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open loss CSV '" + path.string() + "'");
  return read_loss_csv(in);
}

}  // namespace srm
