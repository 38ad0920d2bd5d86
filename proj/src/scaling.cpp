#include "growthdyn/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "growthdyn/errors.hpp"

namespace growthdyn {

namespace {

struct SizeGrowthPoint {
    double size;
    double growth;        // pooled mode: one growth rate; per-region: sigma
    std::size_t region;
    int year;
};

double sample_sd(const std::vector<double>& values) {
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

std::vector<BinStat> bin_points(std::vector<SizeGrowthPoint> points,
                                const BinOptions& options, bool growth_is_sigma) {
    std::stable_sort(points.begin(), points.end(),
                     [](const SizeGrowthPoint& a, const SizeGrowthPoint& b) {
                         if (a.size != b.size) return a.size < b.size;
                         if (a.region != b.region) return a.region < b.region;
                         return a.year < b.year;
                     });

    const std::size_t n = points.size();
    const std::size_t k = options.n_bins;
    if (n < k * options.min_occupancy)
        throw TooFewObservations("binned_volatility: " + std::to_string(n) +
                                 " observations cannot fill " + std::to_string(k) +
                                 " bins at occupancy " +
                                 std::to_string(options.min_occupancy));

    std::vector<BinStat> bins;
    bins.reserve(k);
    std::vector<double> member_growth;
    for (std::size_t b = 0; b < k; ++b) {
        const std::size_t from = b * n / k;
        const std::size_t to = (b + 1) * n / k;
        double mean_size = 0.0;
        member_growth.clear();
        for (std::size_t i = from; i < to; ++i) {
            mean_size += points[i].size;
            member_growth.push_back(points[i].growth);
        }
        const std::size_t count = to - from;
        mean_size /= static_cast<double>(count);
        double sigma;
        if (growth_is_sigma) {
            sigma = 0.0;
            for (double v : member_growth) sigma += v;
            sigma /= static_cast<double>(count);
        } else {
            sigma = sample_sd(member_growth);
        }
        bins.push_back({mean_size, sigma, count});
    }
    return bins;
}

}  // namespace

std::vector<BinStat> binned_volatility(const PanelSlice& slice,
                                       GrowthVariable variable,
                                       const BinOptions& options) {
    if (options.n_bins < 3)
        throw std::invalid_argument("binned_volatility: need at least 3 bins");
    if (slice.n_growth_years() < 2)
        throw TooFewObservations("binned_volatility: period provides fewer than 2 growth years");

    const GrowthPanel& panel = slice.panel();
    const std::size_t n_regions = panel.n_regions();
    const int t0 = slice.growth_start_year();
    const int t1 = slice.end_year();

    if (!options.per_region) {
        std::vector<SizeGrowthPoint> points;
        points.reserve(slice.n_obs());
        for (std::size_t i = 0; i < n_regions; ++i)
            for (int t = t0; t <= t1; ++t) {
                const double growth =
                    variable == GrowthVariable::emissions ? panel.r(i, t) : panel.g(i, t);
                points.push_back({panel.y(i, t - 1), growth, i, t});
            }
        return bin_points(std::move(points), options, false);
    }

    std::vector<SizeGrowthPoint> points;
    points.reserve(n_regions);
    std::vector<double> growth;
    for (std::size_t i = 0; i < n_regions; ++i) {
        growth.clear();
        double mean_size = 0.0;
        for (int t = t0; t <= t1; ++t) {
            growth.push_back(variable == GrowthVariable::emissions ? panel.r(i, t)
                                                                   : panel.g(i, t));
            mean_size += panel.y(i, t - 1);
        }
        mean_size /= static_cast<double>(growth.size());
        points.push_back({mean_size, sample_sd(growth), i, 0});
    }
    return bin_points(std::move(points), options, true);
}

ScalingFit fit_scaling(const std::vector<BinStat>& bins) {
    if (bins.size() < 3)
        throw TooFewObservations("fit_scaling: need at least 3 bins");
    for (const BinStat& b : bins)
        if (!(b.sigma > 0.0))
            throw ZeroVolatilityBin("fit_scaling: bin at size " +
                                    std::to_string(b.bin_center) +
                                    " has zero volatility");

    const std::size_t n = bins.size();
    double mean_x = 0.0, mean_ls = 0.0;
    for (const BinStat& b : bins) {
        mean_x += b.bin_center;
        mean_ls += std::log(b.sigma);
    }
    mean_x /= static_cast<double>(n);
    mean_ls /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0, tss = 0.0;
    for (const BinStat& b : bins) {
        const double dx = b.bin_center - mean_x;
        const double dy = std::log(b.sigma) - mean_ls;
        sxx += dx * dx;
        sxy += dx * dy;
        tss += dy * dy;
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("fit_scaling: degenerate bin centers");

    ScalingFit fit;
    fit.bins = bins;
    fit.beta = sxy / sxx;
    fit.intercept = mean_ls - fit.beta * mean_x;

    double rss = 0.0;
    for (const BinStat& b : bins) {
        const double resid = std::log(b.sigma) - (fit.intercept + fit.beta * b.bin_center);
        rss += resid * resid;
    }
    fit.beta_se = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    return fit;
}

}  // namespace growthdyn
