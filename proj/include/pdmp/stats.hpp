#pragma once

#include <functional>
#include <vector>

namespace pdmp {

double mean(const std::vector<double>& v);
double sample_stddev(const std::vector<double>& v);

/// Standard error of the mean.
double std_error(const std::vector<double>& v);

/// sup |F_n - F| against an analytic CDF.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Critical value c(alpha) * sqrt((n+m)/(n m)); c = 1.358 at 5%, 1.628 at 1%.
double ks_two_sample_critical(std::size_t n, std::size_t m, double c_alpha);

}  // namespace pdmp
