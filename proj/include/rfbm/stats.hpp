#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rfbm {

/// Neumaier-compensated running sum; results are independent of how the
/// terms were produced as long as they are added in the same order.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> xs);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
// distribution (effective sample size n m / (n + m)).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double kolmogorov_survival(double lambda);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence);

double normal_quantile(double p);

// Least-squares slope of y on x through the origin.
double slope_through_origin(std::span<const double> x, std::span<const double> y);

}  // namespace rfbm
