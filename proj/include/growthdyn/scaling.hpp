#ifndef GROWTHDYN_SCALING_HPP_
#define GROWTHDYN_SCALING_HPP_

#include <cstddef>
#include <vector>

#include "growthdyn/panel.hpp"

namespace growthdyn {

enum class GrowthVariable {
    emissions,  // growth rates r
    gdp,        // growth rates g
};

struct BinStat {
    double bin_center = 0.0;  // mean relative GDP size of members
    double sigma = 0.0;       // standard deviation of growth rates in the bin
    std::size_t count = 0;
};

struct BinOptions {
    std::size_t n_bins = 20;
    std::size_t min_occupancy = 10;
    // Pooled mode (default) treats every region-year growth observation as
    // one point. The per-region mode first reduces each region to (mean
    // size, own growth-rate standard deviation) and bins those.
    bool per_region = false;
};

// Equal-count bins of growth observations ranked by the relative GDP size
// at the start of the growth year (y_{i,t-1}); ties broken by region
// order. Each bin reports its mean size and growth-rate standard
// deviation.
std::vector<BinStat> binned_volatility(const PanelSlice& slice,
                                       GrowthVariable variable,
                                       const BinOptions& options = {});

struct ScalingFit {
    double beta = 0.0;       // slope of ln sigma on size
    double intercept = 0.0;
    double beta_se = 0.0;
    double r_squared = 0.0;
    std::vector<BinStat> bins;
};

// Ordinary least squares of ln(sigma) on bin_center.
ScalingFit fit_scaling(const std::vector<BinStat>& bins);

}  // namespace growthdyn

#endif  // GROWTHDYN_SCALING_HPP_
