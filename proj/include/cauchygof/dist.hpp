#pragma once

// Distributions used as the Cauchy null and as alternatives in power studies:
// seeded samplers, a few closed-form densities/CDFs, and the arcsine law of
// 4X^2/(1+X^2)^2 under the standard Cauchy.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cauchygof {

using Sample = std::vector<double>;

struct Cauchy {
  double location = 0.0;
  double scale = 1.0;
};
struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};
// (1 - p) C(0,1) + p N(0,1)
struct CauchyNormalMix {
  double p = 0.5;
};
struct StudentT {
  int dof = 1;
};
// Chambers-Mallows-Stuck parametrization (S1), unit scale, zero location.
struct Stable {
  double index = 1.0;
  double skew = 0.0;
};
// Tukey g-h with g = 0: Z exp(h Z^2 / 2).
struct TukeyGH {
  double h = 0.0;
};
struct TukeyLambda {
  double lambda = 0.0;
};
struct Uniform {
  double lower = -1.7320508075688772;
  double upper = 1.7320508075688772;
};
struct Logistic {};
struct Laplace {};
// Max-form Gumbel(0, 1).
struct Gumbel {};
// Rate 1.
struct Exponential {};
// Positive law with Laplace transform 1 / (1 + t^index).
struct MittagLeffler {
  double index = 1.0;
};
struct Arcsine {
  double lower = 0.0;
  double upper = 1.0;
};

using DistributionSpec =
    std::variant<Cauchy, Normal, CauchyNormalMix, StudentT, Stable, TukeyGH,
                 TukeyLambda, Uniform, Logistic, Laplace, Gumbel, Exponential,
                 MittagLeffler, Arcsine>;

// Throws ParameterError when the parameters are outside their domain.
void validate(const DistributionSpec& spec);

// Canonical text form, e.g. "cauchy:0:1", "stable:0.5:1", "tukeyl:-2".
std::string to_string(const DistributionSpec& spec);
// Label in the style of the power tables, e.g. "Stable(0.5,1)".
std::string display_name(const DistributionSpec& spec);
DistributionSpec parse_distribution(std::string_view text);

// Independent pseudo-random stream identified by (seed, index). The engine is
// mt19937_64 seeded through std::seed_seq, both of which are fully specified
// by the standard, so streams are reproducible across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index);

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t index_;
  std::optional<double> spare_normal_;
};

double draw(const DistributionSpec& spec, RngStream& rng);
Sample sample(const DistributionSpec& spec, std::size_t n, RngStream& rng);

double cauchy_pdf(double x, double location = 0.0, double scale = 1.0);
double cauchy_cdf(double x, double location = 0.0, double scale = 1.0);
// 1 - cauchy_cdf, without cancellation in the upper tail.
double cauchy_sf(double x, double location = 0.0, double scale = 1.0);

double arcsine_cdf(double x, double lower = 0.0, double upper = 1.0);
// 4x^2 / (1 + x^2)^2; maps C(0,1) onto Arcsine(0,1).
double arcsine_transform(double x);

// sup_x |F_n(x) - F(x)| for a continuous F.
double ks_distance(std::span<const double> values,
                   const std::function<double(double)>& cdf);
// KS distance of the arcsine-transformed sample to the Arcsine(0,1) CDF.
double arcsine_transform_check(std::span<const double> cauchy_sample);
// Asymptotic one-sample KS critical value c(level)/sqrt(n).
double ks_critical_value(std::size_t n, double level);

// Density, if the family has a closed form usable for quadrature.
std::optional<double> pdf(const DistributionSpec& spec, double x);
// Quantile function, if the family has one in closed form (or via Boost).
std::optional<double> quantile(const DistributionSpec& spec, double u);

}  // namespace cauchygof
