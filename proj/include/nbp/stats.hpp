// Statistical primitives with fixed conventions: confidence intervals,
// two-sample law-equality tests, parallel replicate scheduling.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nbp {

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::optional<double> p_value;
  bool pass = false;
  std::uint64_t seed = 0;
  std::vector<std::size_t> sample_sizes;
  std::string detail;
};

// Quantile of the standard normal distribution (Acklam's rational
// approximation, |relative error| < 1.15e-9).
double normal_quantile(double prob);

// Regularized upper incomplete gamma Q(a, x); chi-square tail is
// Q(dof/2, stat/2).
double gamma_q(double a, double x);

double chi_square_tail(double statistic, std::size_t dof);

// Normal-approximation CI at the given two-sided confidence level.
// Requires n >= 2.
MeanCi mc_mean_ci(std::span<const double> samples, double level);

// Chi-square homogeneity test between two samples of nonnegative integer
// counts. Adjacent value-bins are merged until every expected count is at
// least 5; fewer than two effective bins is an error.
TestReport two_sample_test(std::span<const std::uint64_t> counts_a,
                           std::span<const std::uint64_t> counts_b,
                           double p_threshold = 0.01);

// Runs fn(replicate) for replicate in [0, n) on up to `threads` workers
// (0 = hardware concurrency). Results must be written into per-replicate
// slots by the callee; the schedule carries no randomness so output is
// independent of the thread count.
void run_replicates(std::size_t n, unsigned threads,
                    const std::function<void(std::size_t)>& fn);

double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs);  // unbiased

}  // namespace nbp
