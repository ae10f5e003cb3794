#pragma once

// Competing tests for the Cauchy null, all on scaled residuals: the classical
// edf statistics, the ECF distance D_{n,lambda} and an entropy-based
// Kullback-Leibler statistic.

#include <cstddef>
#include <span>

namespace cauchygof {

struct EdfStatistics {
  double ks = 0.0;
  double cm = 0.0;
  double ad = 0.0;
  double watson = 0.0;
  // Number of probability-integral-transform values pushed away from 0 or 1.
  std::size_t clamped = 0;
};

// Kolmogorov-Smirnov, Cramer-von Mises, Anderson-Darling and Watson statistics
// of z_j = F(Y_j), F the C(0,1) CDF. Needs n >= 2.
EdfStatistics edf_statistics(std::span<const double> y);

// n int |phi_n(t) - e^{-|t|}|^2 e^{-lambda |t|} dt in closed form.
double compute_dnl(std::span<const double> y, double lambda);

struct KlValue {
  double value = 0.0;
  // Zero spacings perturbed to keep the logarithms finite.
  std::size_t ties = 0;
};

// -H_{m,n} - (1/n) sum log f(Y_j), with H_{m,n} the Vasicek spacing entropy
// estimator (endpoint replication) and f the C(0,1) density. Large values
// speak against the null. Needs 1 <= m < n/2.
KlValue compute_kl(std::span<const double> y, std::size_t m);

// Window used when none is given: 4 for n <= 20, 20 for n <= 50, otherwise
// 50 below n = 400 and 100 from there on; always kept below n/2.
std::size_t default_kl_window(std::size_t n);

}  // namespace cauchygof
