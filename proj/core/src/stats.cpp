#include "rql/stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rql/errors.hpp"

namespace rql {
namespace {

// Neumaier-compensated sum: order-stable to an ulp for our sample sizes.
double compensated_sum(std::span<const double> values) {
    double sum = 0.0, comp = 0.0;
    for (const double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

EcdfView::EcdfView(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw validation_error("ECDF needs at least one sample");
    for (const double v : sorted_)
        if (std::isnan(v)) throw validation_error("ECDF samples must not be NaN");
    std::sort(sorted_.begin(), sorted_.end());
}

double EcdfView::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf) {
    if (samples.empty()) throw validation_error("ks_distance needs samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    for (const double v : sorted)
        if (std::isnan(v)) throw validation_error("ks_distance: NaN sample");
    std::sort(sorted.begin(), sorted.end());

    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double v = sorted[i];
        // Right limit of the ECDF against F(v); left limit against F(v-),
        // evaluated one representable double below v so reference laws with
        // an atom at v are scored on the correct side of the jump.
        const double f_at = cdf(v);
        const double f_before = cdf(std::nextafter(v, -std::numeric_limits<double>::infinity()));
        const double ecdf_hi = static_cast<double>(j) / n;
        const double ecdf_lo = static_cast<double>(i) / n;
        d = std::max({d, std::abs(ecdf_hi - f_at), std::abs(ecdf_lo - f_before)});
        i = j;
    }
    return d;
}

namespace {

TailFit fit_one(const std::function<double(double)>& log_density, double t_lo, double t_hi,
                TailKind kind, std::size_t grid_points) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw validation_error("tail window must satisfy 0 < t_lo < t_hi");
    if (grid_points < 20) throw validation_error("tail fit needs at least 20 grid points");

    const double log_step = std::log(t_hi / t_lo) / static_cast<double>(grid_points - 1);
    std::vector<double> xs(grid_points), ys(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = t_lo * std::exp(log_step * static_cast<double>(i));
        const double y = log_density(t);
        if (!std::isfinite(y))
            throw validation_error("log-density is not finite inside the fit window");
        xs[i] = kind == TailKind::power ? std::log(t) : t;
        ys[i] = y;
    }

    const double g = static_cast<double>(grid_points);
    const double mean_x = compensated_sum(xs) / g;
    const double mean_y = compensated_sum(ys) / g;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    }
    const double slope = sxy / sxx;
    const double intercept = mean_y - slope * mean_x;
    double rss = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        rss += r * r;
    }

    TailFit fit;
    fit.kind = kind;
    fit.exponent = -slope;  // f ~ t^-alpha gives slope -alpha; f ~ e^-rt gives -r
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.residual = std::sqrt(rss / g);
    return fit;
}

}  // namespace

TailFit fit_tail(const std::function<double(double)>& log_density, double t_lo, double t_hi,
                 TailKind kind, std::size_t grid_points) {
    return fit_one(log_density, t_lo, t_hi, kind, grid_points);
}

TailFit classify_tail(const std::function<double(double)>& log_density, double t_lo,
                      double t_hi, std::size_t grid_points) {
    const TailFit power = fit_one(log_density, t_lo, t_hi, TailKind::power, grid_points);
    const TailFit expo = fit_one(log_density, t_lo, t_hi, TailKind::exponential, grid_points);
    return power.residual <= expo.residual ? power : expo;
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw validation_error("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::pair<double, double> mean_ci(std::span<const double> samples, double confidence) {
    if (samples.size() < 2) throw validation_error("mean_ci needs at least two samples");
    if (!(confidence >= 0.0) || !(confidence < 1.0))
        throw validation_error("confidence must lie in [0, 1)");
    const double n = static_cast<double>(samples.size());
    const double mean = compensated_sum(samples) / n;
    double ss = 0.0;
    for (const double v : samples) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (confidence == 0.0) return {mean, 0.0};
    const double z = normal_quantile(0.5 * (1.0 + confidence));
    return {mean, z * sd / std::sqrt(n)};
}

}  // namespace rql
