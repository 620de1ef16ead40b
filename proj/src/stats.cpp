#include "nbp/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace nbp {

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0))
    throw std::invalid_argument("normal_quantile: prob must be in (0,1)");

  // Acklam's algorithm.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  const double phigh = 1.0 - plow;

  double q, r;
  if (prob < plow) {
    q = std::sqrt(-2.0 * std::log(prob));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (prob <= phigh) {
    q = prob - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - prob));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

namespace {

// Series expansion of P(a,x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_tail(double statistic, std::size_t dof) {
  if (dof == 0) throw std::invalid_argument("chi_square_tail: zero dof");
  return gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

MeanCi mc_mean_ci(std::span<const double> samples, double level) {
  if (samples.size() < 2)
    throw std::invalid_argument("mc_mean_ci: need at least two samples");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("mc_mean_ci: level must be in (0,1)");
  MeanCi out;
  out.n = samples.size();
  out.mean = mean_of(samples);
  out.std_error = std::sqrt(variance_of(samples) / static_cast<double>(out.n));
  out.half_width = normal_quantile(0.5 * (1.0 + level)) * out.std_error;
  return out;
}

TestReport two_sample_test(std::span<const std::uint64_t> counts_a,
                           std::span<const std::uint64_t> counts_b,
                           double p_threshold) {
  TestReport report;
  report.name = "two_sample_chi_square";
  report.threshold = p_threshold;
  report.sample_sizes = {counts_a.size(), counts_b.size()};
  if (counts_a.empty() || counts_b.empty())
    throw std::invalid_argument("two_sample_test: empty sample");

  std::map<std::uint64_t, std::pair<double, double>> hist;
  for (auto v : counts_a) hist[v].first += 1.0;
  for (auto v : counts_b) hist[v].second += 1.0;

  const double na = static_cast<double>(counts_a.size());
  const double nb = static_cast<double>(counts_b.size());
  const double n = na + nb;

  // Merge adjacent value-bins left to right until both expected counts
  // reach 5; the final bin absorbs any undersized remainder.
  struct Bin {
    double oa = 0.0, ob = 0.0;
  };
  std::vector<Bin> bins;
  Bin cur;
  auto expected_ok = [&](const Bin& bin) {
    const double pooled = bin.oa + bin.ob;
    return (na * pooled / n >= 5.0) && (nb * pooled / n >= 5.0);
  };
  for (const auto& [value, counts] : hist) {
    (void)value;
    cur.oa += counts.first;
    cur.ob += counts.second;
    if (expected_ok(cur)) {
      bins.push_back(cur);
      cur = Bin{};
    }
  }
  if (cur.oa + cur.ob > 0.0) {
    if (!bins.empty()) {
      bins.back().oa += cur.oa;
      bins.back().ob += cur.ob;
    } else {
      bins.push_back(cur);
    }
  }
  if (bins.size() < 2)
    throw std::runtime_error("two_sample_test: fewer than 2 effective bins");

  double stat = 0.0;
  for (const auto& bin : bins) {
    const double pooled = (bin.oa + bin.ob) / n;
    const double ea = na * pooled;
    const double eb = nb * pooled;
    stat += (bin.oa - ea) * (bin.oa - ea) / ea;
    stat += (bin.ob - eb) * (bin.ob - eb) / eb;
  }
  const std::size_t dof = bins.size() - 1;
  report.statistic = stat;
  report.p_value = chi_square_tail(stat, dof);
  report.pass = *report.p_value >= p_threshold;
  std::ostringstream os;
  os << "bins=" << bins.size() << " dof=" << dof;
  report.detail = os.str();
  return report;
}

void run_replicates(std::size_t n, unsigned threads,
                    const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nbp
