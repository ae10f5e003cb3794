#pragma once

// Covariance kernels of the limiting Gaussian process of sqrt(n)-scaled
// empirical process Z_n under the Cauchy null, for the three estimators, and
// the moments of ||Z||^2 they imply.

#include <array>
#include <cstdint>
#include <vector>

#include "cauchygof/estimate.hpp"

namespace cauchygof {

// Influence functions (psi_1, psi_2) of the location and scale estimators.
std::array<double, 2> psi(const EstimatorKind& kind, double x);
// E[psi psi^T] is diagonal under C(0,1); returns its (common) diagonal entry.
double psi_second_moment(const EstimatorKind& kind);

// c1(t) = (t^2+|t|+1) e^{-|t|}, c2(t) = t (|t|+1) e^{-|t|}.
double kernel_c1(double t);
double kernel_c2(double t);

// The linearization function g(t, x) of the process in the estimators.
// Under C(0,1): E g(t,X) = -c1(t)/2 and E[X g(t,X)] = c2(t)/2.
double linearization_g(double t, double x);

// One i.i.d. summand of the linearized process:
// (u+t) cos tx + (t-u) sin tx - c1(t) psi_1(x)/2 + c2(t) psi_2(x)/2.
double linearized_summand(const EstimatorKind& kind, double t, double x);

// J-integrals appearing in the MIQ kernel:
//   J1 = int_0^1 x sin(tx)/(1+x^2)^2,   J2 = int_0^1 cos(tx)/(1+x^2),
//   J3 = int_0^inf sin(tx)/(1+x^2),     J4 = int_0^inf x cos(tx)/(1+x^2)^2.
double miq_j1(double t);
double miq_j2(double t);
double miq_j3(double t);
double miq_j4(double t);
// and in the published EISE kernel:
//   J1 = int_0^inf x^2 cos(tx) / ((1+x^2) ((nu+1)^2+x^2)^2),
//   J2 = int_0^inf x^3 sin(tx) / ((1+x^2)^2 ((nu+1)^2+x^2)^2).
double eise_j1(double t, double nu);
double eise_j2(double t, double nu);

double kernel_ml(double s, double t);
double kernel_miq(double s, double t);
// EISE kernel from the general structure, with the cross-moments
// E[psi_i(X) h(s,X)] by Fourier quadrature.
double kernel_eise(double s, double t, double nu);
// The published closed-form EISE kernel. It does not agree with
// E[Z(s)Z(t)]; kept for the kernel-check report.
double kernel_eise_display(double s, double t, double nu);

double kernel_eval(const EstimatorKind& kind, double s, double t);
// E[Z(s) Z(t)] of the linearized summand by direct quadrature against the
// Cauchy density. Independent of the closed forms above.
double kernel_by_expectation(const EstimatorKind& kind, double s, double t);

// int K(t,t) e^{-a|t|} dt by quadrature.
double expected_norm_sq(const EstimatorKind& kind, double a);
// Rational closed forms in a (and pi^2 for MIQ).
double expected_norm_sq_ml_closed(double a);
double expected_norm_sq_miq_closed(double a);

// 2 int int K_ML(s,t)^2 e^{-a|s|-a|t|} ds dt by quadrature, and the closed
// form.
double variance_norm_sq_ml(double a);
double variance_norm_sq_ml_closed(double a);

struct KernelConsistency {
  std::vector<double> grid;
  // Row-major grid.size() x grid.size().
  std::vector<double> empirical;
  std::vector<double> theoretical;
  double max_abs_deviation = 0.0;
};

// Empirical covariance of `draws` simulated linearized summands under C(0,1)
// against kernel_eval on grid x grid.
KernelConsistency mc_kernel_consistency(const EstimatorKind& kind,
                                        std::size_t draws,
                                        const std::vector<double>& grid,
                                        std::uint64_t seed);

}  // namespace cauchygof
