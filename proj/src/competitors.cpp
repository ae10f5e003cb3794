#include "cauchygof/competitors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"
#include "numeric.hpp"

namespace cauchygof {

namespace {

std::vector<double> sorted_finite(std::span<const double> y) {
  std::vector<double> s(y.begin(), y.end());
  for (double v : s) {
    if (!std::isfinite(v)) throw DataError("residuals contain non-finite values");
  }
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

EdfStatistics edf_statistics(std::span<const double> y) {
  if (y.size() < 2) throw DataError("edf statistics need n >= 2");
  const std::vector<double> s = sorted_finite(y);
  const std::size_t n = s.size();
  const double dn = static_cast<double>(n);
  constexpr double kEps = 1e-300;

  EdfStatistics out;
  std::vector<double> z(n), log_cdf(n), log_sf(n);
  for (std::size_t j = 0; j < n; ++j) {
    double lo = cauchy_cdf(s[j]);
    double hi = cauchy_sf(s[j]);
    if (lo < kEps || hi < kEps) ++out.clamped;
    lo = std::max(lo, kEps);
    hi = std::max(hi, kEps);
    z[j] = lo;
    log_cdf[j] = std::log(lo);
    log_sf[j] = std::log(hi);
  }

  detail::CompensatedSum cm, ad, zsum;
  for (std::size_t j = 0; j < n; ++j) {
    const double i = static_cast<double>(j + 1);
    out.ks = std::max({out.ks, i / dn - z[j], z[j] - (i - 1.0) / dn});
    const double d = z[j] - (2.0 * i - 1.0) / (2.0 * dn);
    cm += d * d;
    ad += (2.0 * i - 1.0) * (log_cdf[j] + log_sf[n - 1 - j]);
    zsum += z[j];
  }
  out.cm = cm.value() + 1.0 / (12.0 * dn);
  out.ad = -dn - ad.value() / dn;
  const double zbar = zsum.value() / dn;
  out.watson = out.cm - dn * (zbar - 0.5) * (zbar - 0.5);
  return out;
}

double compute_dnl(std::span<const double> y, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("lambda must be positive");
  }
  const std::vector<double> s = sorted_finite(y);
  if (s.empty()) throw DataError("empty residual vector");
  const std::size_t n = s.size();
  const double dn = static_cast<double>(n);
  const double l2 = lambda * lambda;
  const double c = lambda + 1.0;

  detail::CompensatedSum pairs;
  for (std::size_t j = 0; j < n; ++j) {
    double row = 0.0;
    for (std::size_t k = j + 1; k < n; ++k) {
      const double d = s[j] - s[k];
      row += 1.0 / (l2 + d * d);
    }
    pairs += row;
  }
  detail::CompensatedSum single;
  for (double v : s) single += 2.0 * c / (c * c + v * v);

  const double double_sum = (dn * 2.0 / lambda + 4.0 * lambda * pairs.value()) / dn;
  return double_sum - 2.0 * single.value() + 2.0 * dn / (lambda + 2.0);
}

KlValue compute_kl(std::span<const double> y, std::size_t m) {
  const std::vector<double> s = sorted_finite(y);
  const std::size_t n = s.size();
  if (m < 1 || 2 * m >= n) {
    throw ParameterError("KL window must satisfy 1 <= m < n/2");
  }
  const double dn = static_cast<double>(n);
  KlValue out;
  detail::CompensatedSum entropy, loglik;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t hi = std::min(j + m, n - 1);
    const std::size_t lo = j >= m ? j - m : 0;
    double spacing = s[hi] - s[lo];
    if (!(spacing > 0.0)) {
      spacing = 1e-12;
      ++out.ties;
    }
    entropy += std::log(dn * spacing / (2.0 * static_cast<double>(m)));
    loglik += -std::log(std::numbers::pi) - std::log1p(s[j] * s[j]);
  }
  out.value = -entropy.value() / dn - loglik.value() / dn;
  return out;
}

std::size_t default_kl_window(std::size_t n) {
  std::size_t m = n <= 20 ? 4 : n <= 50 ? 20 : n < 400 ? 50 : 100;
  const std::size_t cap = n >= 3 ? (n - 1) / 2 : 1;
  return std::max<std::size_t>(1, std::min(m, cap));
}

}  // namespace cauchygof
