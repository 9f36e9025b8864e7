#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace rql {

// Sorted-sample empirical CDF; evaluation is right-continuous.
class EcdfView {
  public:
    explicit EcdfView(std::vector<double> samples);  // copies and sorts

    double operator()(double x) const;  // (# samples <= x) / n
    const std::vector<double>& sorted() const noexcept { return sorted_; }
    std::size_t size() const noexcept { return sorted_.size(); }

  private:
    std::vector<double> sorted_;
};

// sup_x |ECDF(x) - F(x)|. Both one-sided gaps are examined at every distinct
// sample value, with F's left limit taken at the previous representable
// double -- so reference laws with atoms (like a point mass at zero) are
// handled correctly, not just continuous ones.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

enum class TailKind { power, exponential };

struct TailFit {
    double exponent = 0.0;  // alpha for f ~ t^-alpha, or the rate r for f ~ e^{-rt}
    double t_lo = 0.0;
    double t_hi = 0.0;
    double residual = 0.0;  // rms deviation of log f from the fitted line
    TailKind kind = TailKind::power;
};

// Least-squares slope of log f against log t (power) or against t
// (exponential) over a geometric grid on [t_lo, t_hi]. At least 20 grid
// points; the window must sit inside the support (log f finite throughout).
TailFit fit_tail(const std::function<double(double)>& log_density, double t_lo, double t_hi,
                 TailKind kind, std::size_t grid_points = 64);

// Fits both shapes and returns the one with the smaller residual.
TailFit classify_tail(const std::function<double(double)>& log_density, double t_lo,
                      double t_hi, std::size_t grid_points = 64);

// Sample mean and its normal-approximation confidence half width
// z_{(1+c)/2} * sd / sqrt(n). Needs n >= 2 and 0 <= confidence < 1.
std::pair<double, double> mean_ci(std::span<const double> samples, double confidence);

// Standard normal quantile (exposed because several estimators need it).
double normal_quantile(double p);

}  // namespace rql
