#ifndef CVAUDIT_STATS_DISTRIBUTIONS_HPP
#define CVAUDIT_STATS_DISTRIBUTIONS_HPP

#include <cstddef>
#include <span>

namespace cvaudit::stats {

// Standard normal CDF / survival function.
double norm_cdf(double x);
double norm_sf(double x);

// Regularised incomplete beta I_x(a, b), continued-fraction evaluation.
double incbeta(double a, double b, double x);

// Regularised lower incomplete gamma P(a, x).
double incgamma_p(double a, double x);

// Student-t CDF with (possibly fractional) df.
double t_cdf(double x, double df);

// Two-sided p-value for a t statistic.
double t_test_p(double t, double df);

// Chi-square survival function, df > 0.
double chisq_sf(double x, double df);

// Pearson goodness-of-fit test of observed counts against expected
// probabilities. Returns the p-value.
struct ChiSquareResult {
    double statistic;
    double df;
    double p_value;
};
ChiSquareResult chi_square_gof(std::span<const long> observed, std::span<const double> expected_probs);

}  // namespace cvaudit::stats

#endif
