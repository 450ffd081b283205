#include "srm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srm/analysis.hpp"
#include "srm/distributions.hpp"
#include "srm/errors.hpp"
#include "srm/measures.hpp"
#include "srm/quadrature.hpp"
#include "srm/risk_aversion.hpp"

namespace srm::cli {

namespace {

struct Options {
  // distribution
  std::string dist = "standard-normal";
  double mean = 0.0;
  double sd = 1.0;
  std::string input;
  std::optional<double> value;
  std::optional<double> lo;
  std::optional<double> hi;
  // measure
  std::string measure = "srm";
  std::optional<std::string> family;
  std::optional<double> a;
  std::optional<double> c;
  std::optional<double> alpha;
  std::optional<double> gamma;
  // quadrature
  std::optional<std::size_t> n;
  std::optional<std::string> scheme;
  std::string endpoint = "zero";
  double epsilon = 1e-9;
  double rel_tol = 1e-10;
  // output
  std::string out;
  std::uint64_t seed = 42;
  int precision = 6;
  // sweep
  std::string grid;
  bool log_grid = false;
  // weights
  std::size_t points = 1001;
  double p_max = 0.99;
  // validate
  std::size_t grid_size = 10001;
  // convergence
  std::string n_list = "1001,10001,100001,1000001,10000001";
  bool no_reference = false;
  // subadd
  std::size_t sample_size = 500;
  std::size_t trials = 1000;
};

template <class T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParameterError(std::string(what) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

QuantileSource make_source(const Options& o) {
  if (o.dist == "standard-normal") return QuantileSource::standard_normal();
  if (o.dist == "normal") return QuantileSource::normal(o.mean, o.sd);
  if (o.dist == "constant") {
    if (!o.value) throw ParameterError("--dist constant requires --value");
    return QuantileSource::constant(*o.value);
  }
  if (o.dist == "uniform") {
    if (!o.lo || !o.hi) throw ParameterError("--dist uniform requires --lo and --hi");
    return QuantileSource::uniform(*o.lo, *o.hi);
  }
  if (o.dist == "empirical") {
    if (o.input.empty()) throw ParameterError("--dist empirical requires --input");
    return load_empirical(read_loss_csv(std::filesystem::path(o.input)));
  }
  throw ParameterError("unknown distribution '" + o.dist + "'");
}

WeightFamily family_of(const Options& o) {
  if (!o.family) throw ParameterError("--family is required");
  return parse_weight_family(*o.family);
}

WeightSpec make_spec(const Options& o) {
  switch (family_of(o)) {
    case WeightFamily::exponential:
      if (o.gamma) return WeightSpec::exponential_gamma(*o.gamma);
      if (!o.a) throw ParameterError("--family exponential requires --a or --gamma");
      return WeightSpec::exponential(*o.a);
    case WeightFamily::power:
      if (!o.c) throw ParameterError("--family power requires --c");
      return WeightSpec::power(*o.c);
    case WeightFamily::es:
      if (!o.alpha) throw ParameterError("--family es requires --alpha");
      return WeightSpec::expected_shortfall(*o.alpha);
    case WeightFamily::flat: return WeightSpec::flat();
  }
  return WeightSpec::flat();
}

QuadratureConfig make_config(const Options& o, std::size_t default_n, Scheme default_scheme) {
  QuadratureConfig config;
  config.n_points = o.n.value_or(default_n_from_env().value_or(default_n));
  config.scheme = default_scheme;
  if (o.scheme) {
    if (*o.scheme == "replication") {
      config.scheme = Scheme::replication;
    } else if (*o.scheme == "converged") {
      config.scheme = Scheme::converged;
    } else {
      throw ParameterError("unknown scheme '" + *o.scheme + "'");
    }
  }
  if (o.endpoint == "zero") {
    config.endpoint_policy = EndpointPolicy::zero_endpoints;
  } else if (o.endpoint == "clip") {
    config.endpoint_policy = EndpointPolicy::clip_epsilon;
  } else {
    throw ParameterError("unknown endpoint policy '" + o.endpoint + "'");
  }
  config.epsilon = o.epsilon;
  config.rel_tol = o.rel_tol;
  config.validate();
  return config;
}

RiskMeasure make_measure(const Options& o, std::size_t default_n) {
  if (o.measure == "var") {
    if (!o.alpha) throw ParameterError("--measure var requires --alpha");
    return RiskMeasure::value_at_risk(*o.alpha);
  }
  if (o.measure == "es") {
    if (!o.alpha) throw ParameterError("--measure es requires --alpha");
    return RiskMeasure::expected_shortfall(*o.alpha, make_config(o, default_n, Scheme::converged));
  }
  if (o.measure == "srm") {
    return RiskMeasure::spectral(make_spec(o), make_config(o, default_n, Scheme::replication));
  }
  throw ParameterError("unknown measure '" + o.measure + "'");
}

std::vector<double> parse_grid(const Options& o) {
  const auto parts = split(o.grid, ':');
  if (parts.size() != 3) throw ParameterError("--grid must have the form min:max:count");
  const double lo = parse_number<double>(parts[0], "--grid min");
  const double hi = parse_number<double>(parts[1], "--grid max");
  const auto count = parse_number<std::size_t>(parts[2], "--grid count");
  return o.log_grid ? log_grid(lo, hi, count) : linear_grid(lo, hi, count);
}

// Writes `body` to --out (printing the path) or to stdout.
template <class Body>
void emit(const Options& o, std::ostream& out, Body&& body) {
  if (o.out.empty()) {
    body(out);
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw DataError("cannot open output file '" + o.out + "'");
  body(file);
  file.flush();
  if (!file) throw DataError("failed writing output file '" + o.out + "'");
  out << o.out << '\n';
}

void add_distribution_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--dist", o.dist, "standard-normal | normal | empirical | constant | uniform")
      ->check(CLI::IsMember({"standard-normal", "normal", "empirical", "constant", "uniform"}));
  cmd.add_option("--mean", o.mean, "Normal mean");
  cmd.add_option("--sd", o.sd, "Normal standard deviation");
  cmd.add_option("--input", o.input, "Loss CSV for --dist empirical");
  cmd.add_option("--value", o.value, "Constant loss");
  cmd.add_option("--lo", o.lo, "Uniform lower bound");
  cmd.add_option("--hi", o.hi, "Uniform upper bound");
}

void add_family_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--family", o.family, "exponential | power | es | flat")
      ->check(CLI::IsMember({"exponential", "power", "es", "flat"}));
  auto* a = cmd.add_option("--a", o.a, "Exponential absolute risk aversion");
  auto* g = cmd.add_option("--gamma", o.gamma, "Exponential alias, a = 1/gamma");
  a->excludes(g);
  cmd.add_option("--c", o.c, "Power relative risk aversion");
  cmd.add_option("--alpha", o.alpha, "Confidence level");
}

void add_quadrature_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--n", o.n, "Grid points (odd)");
  cmd.add_option("--scheme", o.scheme, "replication | converged")
      ->check(CLI::IsMember({"replication", "converged"}));
  cmd.add_option("--endpoint", o.endpoint, "zero | clip")->check(CLI::IsMember({"zero", "clip"}));
  cmd.add_option("--epsilon", o.epsilon, "Clip distance for --endpoint clip");
  cmd.add_option("--rel-tol", o.rel_tol, "Relative tolerance of the converged scheme");
}

void add_output_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--out", o.out, "Output file");
  cmd.add_option("--precision", o.precision, "Significant digits")->check(CLI::Range(1, 17));
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e) != nullptr) return kExitNumeric;
  if (dynamic_cast<const DataError*>(&e) != nullptr) return kExitData;
  if (dynamic_cast<const ParameterError*>(&e) != nullptr) return kExitUsage;
  if (dynamic_cast<const DomainError*>(&e) != nullptr) return kExitUsage;
  return kExitData;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}

}  // namespace

std::string format_value(double value, int precision) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  int decimals = precision;
  if (value != 0.0) {
    const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(value))));
    decimals = std::max(precision, precision - 1 - magnitude);
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::optional<std::size_t> default_n_from_env() {
  const char* env = std::getenv("SRM_DEFAULT_N");
  if (env == nullptr || *env == '\0') return std::nullopt;
  const auto n = parse_number<std::size_t>(env, "SRM_DEFAULT_N");
  if (n < 3 || n % 2 == 0) throw ParameterError("SRM_DEFAULT_N must be odd and >= 3");
  return n;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Spectral risk measures: compute, sweep, validate and stress-test."};
  app.name("srm");
  app.require_subcommand(1);

  auto* compute = app.add_subcommand("compute", "Evaluate one risk measure");
  compute->add_option("--measure", o.measure, "var | es | srm")
      ->check(CLI::IsMember({"var", "es", "srm"}));
  add_distribution_options(*compute, o);
  add_family_options(*compute, o);
  add_quadrature_options(*compute, o);
  add_output_options(*compute, o);

  auto* sweep = app.add_subcommand("sweep", "SRM over a parameter grid (param,value CSV)");
  sweep->add_option("--grid", o.grid, "min:max:count")->required();
  sweep->add_flag("--log-grid", o.log_grid, "Geometric spacing");
  add_distribution_options(*sweep, o);
  add_family_options(*sweep, o);
  add_quadrature_options(*sweep, o);
  add_output_options(*sweep, o);

  auto* weights = app.add_subcommand("weights", "Weight curve phi(p) (p,weight CSV)");
  weights->add_option("--points", o.points, "Grid points");
  weights->add_option("--p-max", o.p_max, "Upper end of the p grid");
  add_family_options(*weights, o);
  add_output_options(*weights, o);

  auto* validate = app.add_subcommand("validate", "Admissibility report (JSON)");
  validate->add_option("--grid-size", o.grid_size, "Interior grid points");
  add_family_options(*validate, o);
  add_output_options(*validate, o);

  auto* convergence =
      app.add_subcommand("convergence", "Replication values over grid sizes (n,value CSV)");
  convergence->add_option("--n-list", o.n_list, "Comma-separated odd grid sizes");
  convergence->add_flag("--no-reference", o.no_reference, "Skip the converged reference value");
  add_distribution_options(*convergence, o);
  add_family_options(*convergence, o);
  add_quadrature_options(*convergence, o);
  add_output_options(*convergence, o);

  auto* subadd = app.add_subcommand("subadd", "Monte Carlo subadditivity check (JSON)");
  subadd->add_option("--measure", o.measure, "var | es | srm")
      ->check(CLI::IsMember({"var", "es", "srm"}));
  subadd->add_option("--sample-size", o.sample_size, "Losses per sample");
  subadd->add_option("--trials", o.trials, "Number of paired trials");
  subadd->add_option("--seed", o.seed, "Generator seed");
  add_family_options(*subadd, o);
  add_quadrature_options(*subadd, o);
  add_output_options(*subadd, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  try {
    if (compute->parsed()) {
      const auto source = make_source(o);
      const auto measure = make_measure(o, kDefaultGridPoints);
      out << format_value(evaluate(measure, source), o.precision) << '\n';
    } else if (sweep->parsed()) {
      const auto source = make_source(o);
      const auto family = family_of(o);
      const auto grid = parse_grid(o);
      const auto config = make_config(o, kSweepGridPoints, Scheme::replication);
      const auto result = sweep_srm(family, grid, source, config);
      emit(o, out, [&](std::ostream& s) { write_sweep_csv(s, result); });
    } else if (weights->parsed()) {
      const auto curve = weight_curve(make_spec(o), o.points, o.p_max);
      emit(o, out, [&](std::ostream& s) { write_weight_curve_csv(s, curve); });
    } else if (validate->parsed()) {
      const auto report = check_admissibility(make_spec(o), o.grid_size);
      emit(o, out, [&](std::ostream& s) { s << nlohmann::json(report).dump() << '\n'; });
    } else if (convergence->parsed()) {
      const auto source = make_source(o);
      const auto spec = make_spec(o);
      std::vector<std::size_t> n_list;
      for (auto part : split(o.n_list, ',')) n_list.push_back(parse_number<std::size_t>(part, "--n-list"));
      const auto config = make_config(o, kDefaultGridPoints, Scheme::replication);
      const auto points = convergence_study(source, spec, n_list, config);
      emit(o, out, [&](std::ostream& s) { write_convergence_csv(s, points); });
      if (!o.no_reference && !points.empty()) {
        const double reference = srm_converged(source, spec, o.rel_tol).value;
        std::ostream& summary = o.out.empty() ? err : out;
        summary << "converged " << format_value(reference, o.precision) << '\n'
                << "gap " << format_value(reference - points.back().value, o.precision) << '\n';
      }
    } else if (subadd->parsed()) {
      if (!o.family && o.measure == "srm") {
        o.family = "exponential";
        if (!o.a && !o.gamma) o.a = 5.0;
      }
      const auto measure = make_measure(o, kSweepGridPoints);
      const auto report = subadditivity_check(measure, o.sample_size, o.trials, o.seed);
      emit(o, out, [&](std::ostream& s) { s << nlohmann::json(report).dump() << '\n'; });
    }
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace srm::cli
