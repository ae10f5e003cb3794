#include "cauchygof/dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/extreme_value.hpp>
#include <boost/math/distributions/laplace.hpp>
#include <boost/math/distributions/logistic.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/roots.hpp>

#include "cauchygof/errors.hpp"

namespace cauchygof {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(15);
  os << x;
  return os.str();
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

double parse_number(std::string_view text) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParameterError("cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

// Tukey lambda quantile, stable as lambda -> 0 (logistic limit).
double tukey_lambda_quantile(double lambda, double u) {
  const double lu = std::log(u);
  const double l1u = std::log1p(-u);
  if (lambda == 0.0) return lu - l1u;
  return (std::expm1(lambda * lu) - std::expm1(lambda * l1u)) / lambda;
}

// Chambers-Mallows-Stuck draw, S1 parametrization.
double stable_draw(double index, double skew, RngStream& rng) {
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  if (index == 1.0) {
    const double half_pi = kPi / 2.0;
    const double shifted = half_pi + skew * v;
    return (shifted * std::tan(v) -
            skew * std::log(half_pi * w * std::cos(v) / shifted)) /
           half_pi;
  }
  const double zeta = skew * std::tan(kPi * index / 2.0);
  const double b = std::atan(zeta) / index;
  const double s = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * index));
  const double arg = index * (v + b);
  return s * std::sin(arg) / std::pow(std::cos(v), 1.0 / index) *
         std::pow(std::cos(v - arg) / w, (1.0 - index) / index);
}

// Positive stable law with Laplace transform exp(-t^index) (Kanter).
double positive_stable_draw(double index, RngStream& rng) {
  if (index == 1.0) return 1.0;
  const double v = kPi * rng.uniform();
  const double w = rng.exponential();
  return std::sin(index * v) / std::pow(std::sin(v), 1.0 / index) *
         std::pow(std::sin((1.0 - index) * v) / w, (1.0 - index) / index);
}

// Asymptotic Kolmogorov survival function P(K > x).
double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

void validate(const DistributionSpec& spec) {
  std::visit(
      Overloaded{
          [](const Cauchy& d) {
            require(std::isfinite(d.location), "cauchy location must be finite");
            require(d.scale > 0.0, "cauchy scale must be positive");
          },
          [](const Normal& d) {
            require(std::isfinite(d.mean), "normal mean must be finite");
            require(d.sd > 0.0, "normal sd must be positive");
          },
          [](const CauchyNormalMix& d) {
            require(d.p >= 0.0 && d.p <= 1.0, "mixture weight must be in [0,1]");
          },
          [](const StudentT& d) {
            require(d.dof >= 1, "student dof must be a positive integer");
          },
          [](const Stable& d) {
            require(d.index > 0.0 && d.index <= 2.0,
                    "stable index must be in (0,2]");
            require(d.skew >= -1.0 && d.skew <= 1.0,
                    "stable skew must be in [-1,1]");
          },
          [](const TukeyGH& d) { require(d.h >= 0.0, "tukey h must be >= 0"); },
          [](const TukeyLambda& d) {
            require(std::isfinite(d.lambda), "tukey lambda must be finite");
          },
          [](const Uniform& d) {
            require(d.lower < d.upper, "uniform requires lower < upper");
          },
          [](const Logistic&) {}, [](const Laplace&) {}, [](const Gumbel&) {},
          [](const Exponential&) {},
          [](const MittagLeffler& d) {
            require(d.index > 0.0 && d.index <= 1.0,
                    "mittag-leffler index must be in (0,1]");
          },
          [](const Arcsine& d) {
            require(d.lower < d.upper, "arcsine requires lower < upper");
          },
      },
      spec);
}

std::string to_string(const DistributionSpec& spec) {
  const auto f = format_number;
  return std::visit(
      Overloaded{
          [&](const Cauchy& d) {
            return "cauchy:" + f(d.location) + ":" + f(d.scale);
          },
          [&](const Normal& d) {
            return "normal:" + f(d.mean) + ":" + f(d.sd);
          },
          [&](const CauchyNormalMix& d) { return "cn:" + f(d.p); },
          [&](const StudentT& d) { return "t:" + std::to_string(d.dof); },
          [&](const Stable& d) {
            return "stable:" + f(d.index) + ":" + f(d.skew);
          },
          [&](const TukeyGH& d) { return "tukey:" + f(d.h); },
          [&](const TukeyLambda& d) { return "tukeyl:" + f(d.lambda); },
          [&](const Uniform& d) {
            const Uniform standard;
            if (d.lower == standard.lower && d.upper == standard.upper) {
              return std::string("uniform");
            }
            return "uniform:" + f(d.lower) + ":" + f(d.upper);
          },
          [](const Logistic&) { return std::string("logistic"); },
          [](const Laplace&) { return std::string("laplace"); },
          [](const Gumbel&) { return std::string("gumbel"); },
          [](const Exponential&) { return std::string("exp"); },
          [&](const MittagLeffler& d) { return "ml:" + f(d.index); },
          [&](const Arcsine& d) {
            return "arcsine:" + f(d.lower) + ":" + f(d.upper);
          },
      },
      spec);
}

std::string display_name(const DistributionSpec& spec) {
  const auto f = format_number;
  return std::visit(
      Overloaded{
          [&](const Cauchy& d) {
            return "C(" + f(d.location) + "," + f(d.scale) + ")";
          },
          [&](const Normal& d) {
            return "N(" + f(d.mean) + "," + f(d.sd) + ")";
          },
          [&](const CauchyNormalMix& d) { return "CN(" + f(d.p) + ")"; },
          [&](const StudentT& d) {
            return "Student(" + std::to_string(d.dof) + ")";
          },
          [&](const Stable& d) {
            return "Stable(" + f(d.index) + "," + f(d.skew) + ")";
          },
          [&](const TukeyGH& d) { return "Tukey(" + f(d.h) + ")"; },
          [&](const TukeyLambda& d) { return "Tukey-L(" + f(d.lambda) + ")"; },
          [](const Uniform&) { return std::string("Uniform"); },
          [](const Logistic&) { return std::string("Logistic"); },
          [](const Laplace&) { return std::string("Laplace"); },
          [](const Gumbel&) { return std::string("Gumbel"); },
          [](const Exponential&) { return std::string("Exponential"); },
          [&](const MittagLeffler& d) { return "ML(" + f(d.index) + ")"; },
          [&](const Arcsine& d) {
            return "Arcsine(" + f(d.lower) + "," + f(d.upper) + ")";
          },
      },
      spec);
}

DistributionSpec parse_distribution(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string_view tag = parts.front();
  const std::size_t args = parts.size() - 1;
  auto arg = [&](std::size_t i) { return parse_number(parts.at(i + 1)); };
  auto expect_args = [&](std::size_t lo, std::size_t hi) {
    if (args < lo || args > hi) {
      throw ParameterError("wrong number of parameters in '" +
                           std::string(text) + "'");
    }
  };

  DistributionSpec spec;
  if (tag == "cauchy") {
    expect_args(0, 2);
    spec = Cauchy{args > 0 ? arg(0) : 0.0, args > 1 ? arg(1) : 1.0};
  } else if (tag == "normal" || tag == "norm") {
    expect_args(0, 2);
    spec = Normal{args > 0 ? arg(0) : 0.0, args > 1 ? arg(1) : 1.0};
  } else if (tag == "cn") {
    expect_args(1, 1);
    spec = CauchyNormalMix{arg(0)};
  } else if (tag == "t" || tag == "student") {
    expect_args(1, 1);
    const double k = arg(0);
    if (k != std::floor(k)) throw ParameterError("student dof must be integer");
    spec = StudentT{static_cast<int>(k)};
  } else if (tag == "stable") {
    expect_args(1, 2);
    spec = Stable{arg(0), args > 1 ? arg(1) : 0.0};
  } else if (tag == "tukey") {
    expect_args(1, 1);
    spec = TukeyGH{arg(0)};
  } else if (tag == "tukeyl") {
    expect_args(1, 1);
    spec = TukeyLambda{arg(0)};
  } else if (tag == "uniform") {
    expect_args(0, 2);
    if (args == 1) throw ParameterError("uniform takes zero or two bounds");
    spec = args == 2 ? Uniform{arg(0), arg(1)} : Uniform{};
  } else if (tag == "logistic") {
    expect_args(0, 0);
    spec = Logistic{};
  } else if (tag == "laplace") {
    expect_args(0, 0);
    spec = Laplace{};
  } else if (tag == "gumbel") {
    expect_args(0, 0);
    spec = Gumbel{};
  } else if (tag == "exp" || tag == "exponential") {
    expect_args(0, 0);
    spec = Exponential{};
  } else if (tag == "ml") {
    expect_args(1, 1);
    spec = MittagLeffler{arg(0)};
  } else if (tag == "arcsine") {
    expect_args(0, 2);
    if (args == 1) throw ParameterError("arcsine takes zero or two bounds");
    spec = args == 2 ? Arcsine{arg(0), arg(1)} : Arcsine{};
  } else {
    throw ParameterError("unknown distribution '" + std::string(tag) + "'");
  }
  validate(spec);
  return spec;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x43617563u};
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53 random bits centred in their cell: never exactly 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  return u * factor;
}

double RngStream::exponential() { return -std::log(uniform()); }

double draw(const DistributionSpec& spec, RngStream& rng) {
  return std::visit(
      Overloaded{
          [&](const Cauchy& d) {
            return d.location + d.scale * std::tan(kPi * (rng.uniform() - 0.5));
          },
          [&](const Normal& d) { return d.mean + d.sd * rng.normal(); },
          [&](const CauchyNormalMix& d) {
            // One uniform picks the component so the stream use is fixed.
            const bool normal = rng.uniform() < d.p;
            return normal ? rng.normal()
                          : std::tan(kPi * (rng.uniform() - 0.5));
          },
          [&](const StudentT& d) {
            const double z = rng.normal();
            double chi2 = 0.0;
            for (int i = 0; i < d.dof; ++i) {
              const double g = rng.normal();
              chi2 += g * g;
            }
            return z / std::sqrt(chi2 / d.dof);
          },
          [&](const Stable& d) { return stable_draw(d.index, d.skew, rng); },
          [&](const TukeyGH& d) {
            const double z = rng.normal();
            return z * std::exp(0.5 * d.h * z * z);
          },
          [&](const TukeyLambda& d) {
            return tukey_lambda_quantile(d.lambda, rng.uniform());
          },
          [&](const Uniform& d) {
            return d.lower + (d.upper - d.lower) * rng.uniform();
          },
          [&](const Logistic&) {
            const double u = rng.uniform();
            return std::log(u) - std::log1p(-u);
          },
          [&](const Laplace&) {
            const double e = rng.exponential();
            return rng.uniform() < 0.5 ? -e : e;
          },
          [&](const Gumbel&) { return -std::log(rng.exponential()); },
          [&](const Exponential&) { return rng.exponential(); },
          [&](const MittagLeffler& d) {
            const double e = rng.exponential();
            return std::pow(e, 1.0 / d.index) *
                   positive_stable_draw(d.index, rng);
          },
          [&](const Arcsine& d) {
            const double s = std::sin(0.5 * kPi * rng.uniform());
            return d.lower + (d.upper - d.lower) * s * s;
          },
      },
      spec);
}

Sample sample(const DistributionSpec& spec, std::size_t n, RngStream& rng) {
  validate(spec);
  if (n == 0) throw ParameterError("sample size must be at least 1");
  Sample out(n);
  for (auto& x : out) x = draw(spec, rng);
  return out;
}

double cauchy_pdf(double x, double location, double scale) {
  if (!(scale > 0.0)) throw ParameterError("cauchy scale must be positive");
  const double z = (x - location) / scale;
  return 1.0 / (kPi * scale * (1.0 + z * z));
}

double cauchy_cdf(double x, double location, double scale) {
  if (!(scale > 0.0)) throw ParameterError("cauchy scale must be positive");
  const double z = (x - location) / scale;
  if (z < 0.0) return std::atan2(1.0, -z) / kPi;
  return 1.0 - std::atan2(1.0, z) / kPi;
}

double cauchy_sf(double x, double location, double scale) {
  if (!(scale > 0.0)) throw ParameterError("cauchy scale must be positive");
  const double z = (x - location) / scale;
  if (z > 0.0) return std::atan2(1.0, z) / kPi;
  return 1.0 - std::atan2(1.0, -z) / kPi;
}

double arcsine_cdf(double x, double lower, double upper) {
  if (!(lower < upper)) throw ParameterError("arcsine requires lower < upper");
  if (x <= lower) return 0.0;
  if (x >= upper) return 1.0;
  return 2.0 / kPi * std::asin(std::sqrt((x - lower) / (upper - lower)));
}

double arcsine_transform(double x) {
  const double q = 1.0 + x * x;
  return 4.0 * x * x / (q * q);
}

double ks_distance(std::span<const double> values,
                   const std::function<double(double)>& cdf) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double arcsine_transform_check(std::span<const double> cauchy_sample) {
  std::vector<double> v(cauchy_sample.size());
  std::transform(cauchy_sample.begin(), cauchy_sample.end(), v.begin(),
                 arcsine_transform);
  return ks_distance(v, [](double x) { return arcsine_cdf(x); });
}

double ks_critical_value(std::size_t n, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ParameterError("level must be in (0,1)");
  }
  if (n == 0) throw ParameterError("n must be positive");
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::bisect(
      [level](double x) { return kolmogorov_sf(x) - level; }, 0.1, 5.0, tol,
      iterations);
  return 0.5 * (root.first + root.second) / std::sqrt(static_cast<double>(n));
}

std::optional<double> pdf(const DistributionSpec& spec, double x) {
  namespace bm = boost::math;
  return std::visit(
      Overloaded{
          [&](const Cauchy& d) -> std::optional<double> {
            return cauchy_pdf(x, d.location, d.scale);
          },
          [&](const Normal& d) -> std::optional<double> {
            return bm::pdf(bm::normal(d.mean, d.sd), x);
          },
          [&](const CauchyNormalMix& d) -> std::optional<double> {
            return (1.0 - d.p) * cauchy_pdf(x) +
                   d.p * bm::pdf(bm::normal(), x);
          },
          [&](const StudentT& d) -> std::optional<double> {
            return bm::pdf(bm::students_t(d.dof), x);
          },
          [&](const Stable& d) -> std::optional<double> {
            if (d.index == 1.0 && d.skew == 0.0) return cauchy_pdf(x);
            if (d.index == 2.0) {
              return bm::pdf(bm::normal(0.0, std::numbers::sqrt2), x);
            }
            return std::nullopt;
          },
          [&](const TukeyGH& d) -> std::optional<double> {
            if (d.h == 0.0) return bm::pdf(bm::normal(), x);
            return std::nullopt;
          },
          [&](const TukeyLambda& d) -> std::optional<double> {
            if (d.lambda == 0.0) return bm::pdf(bm::logistic(), x);
            if (d.lambda == 1.0) return (x > -1.0 && x < 1.0) ? 0.5 : 0.0;
            return std::nullopt;
          },
          [&](const Uniform& d) -> std::optional<double> {
            return (x >= d.lower && x <= d.upper) ? 1.0 / (d.upper - d.lower)
                                                  : 0.0;
          },
          [&](const Logistic&) -> std::optional<double> {
            return bm::pdf(bm::logistic(), x);
          },
          [&](const Laplace&) -> std::optional<double> {
            return bm::pdf(bm::laplace(), x);
          },
          [&](const Gumbel&) -> std::optional<double> {
            return bm::pdf(bm::extreme_value(), x);
          },
          [&](const Exponential&) -> std::optional<double> {
            return x >= 0.0 ? std::exp(-x) : 0.0;
          },
          [&](const MittagLeffler& d) -> std::optional<double> {
            if (d.index == 1.0) return x >= 0.0 ? std::exp(-x) : 0.0;
            return std::nullopt;
          },
          [&](const Arcsine& d) -> std::optional<double> {
            if (x <= d.lower || x >= d.upper) return 0.0;
            return 1.0 / (kPi * std::sqrt((x - d.lower) * (d.upper - x)));
          },
      },
      spec);
}

std::optional<double> quantile(const DistributionSpec& spec, double u) {
  namespace bm = boost::math;
  if (!(u > 0.0 && u < 1.0)) throw ParameterError("quantile level in (0,1)");
  return std::visit(
      Overloaded{
          [&](const Cauchy& d) -> std::optional<double> {
            return d.location + d.scale * std::tan(kPi * (u - 0.5));
          },
          [&](const Normal& d) -> std::optional<double> {
            return bm::quantile(bm::normal(d.mean, d.sd), u);
          },
          [&](const CauchyNormalMix&) -> std::optional<double> {
            return std::nullopt;
          },
          [&](const StudentT& d) -> std::optional<double> {
            return bm::quantile(bm::students_t(d.dof), u);
          },
          [&](const Stable& d) -> std::optional<double> {
            if (d.index == 1.0 && d.skew == 0.0) {
              return std::tan(kPi * (u - 0.5));
            }
            if (d.index == 2.0) {
              return bm::quantile(bm::normal(0.0, std::numbers::sqrt2), u);
            }
            return std::nullopt;
          },
          [&](const TukeyGH& d) -> std::optional<double> {
            const double z = bm::quantile(bm::normal(), u);
            return z * std::exp(0.5 * d.h * z * z);
          },
          [&](const TukeyLambda& d) -> std::optional<double> {
            return tukey_lambda_quantile(d.lambda, u);
          },
          [&](const Uniform& d) -> std::optional<double> {
            return d.lower + (d.upper - d.lower) * u;
          },
          [&](const Logistic&) -> std::optional<double> {
            return std::log(u) - std::log1p(-u);
          },
          [&](const Laplace&) -> std::optional<double> {
            return bm::quantile(bm::laplace(), u);
          },
          [&](const Gumbel&) -> std::optional<double> {
            return -std::log(-std::log(u));
          },
          [&](const Exponential&) -> std::optional<double> {
            return -std::log1p(-u);
          },
          [&](const MittagLeffler& d) -> std::optional<double> {
            if (d.index == 1.0) return -std::log1p(-u);
            return std::nullopt;
          },
          [&](const Arcsine& d) -> std::optional<double> {
            const double s = std::sin(0.5 * kPi * u);
            return d.lower + (d.upper - d.lower) * s * s;
          },
      },
      spec);
}

}  // namespace cauchygof
