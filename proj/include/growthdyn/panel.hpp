#ifndef GROWTHDYN_PANEL_HPP_
#define GROWTHDYN_PANEL_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace growthdyn {

// One region-year record of raw levels. Both levels must be strictly
// positive; dev_class is an optional development-level label carried
// through to reports untouched.
struct RegionYearObservation {
    std::string region_id;
    int year = 0;
    double emissions = 0.0;
    double gdp = 0.0;
    std::string dev_class;
};

struct PeriodDefinition {
    std::string name;
    int start_year = 0;
    int end_year = 0;
};

// Full sample plus the four trading-scheme phases used throughout.
std::vector<PeriodDefinition> canonical_periods();

// Balanced panel of relative sizes and centered growth rates.
//
//   s_{i,t} = ln E_{i,t} - mean_j ln E_{j,t}      (emissions, relative size)
//   y_{i,t} = ln GDP_{i,t} - mean_j ln GDP_{j,t}  (output, relative size)
//   r_{i,t} = s_{i,t} - s_{i,t-1}                 (centered growth)
//   g_{i,t} = y_{i,t} - y_{i,t-1}
//
// Cross-sectional means of s and y are zero every year by construction,
// so r and g are centered as well. Immutable after construction.
class GrowthPanel {
public:
    static GrowthPanel build(const std::vector<RegionYearObservation>& observations,
                             std::optional<std::pair<int, int>> year_range = {});

    std::size_t n_regions() const { return regions_.size(); }
    int first_year() const { return first_year_; }
    int last_year() const { return first_year_ + static_cast<int>(n_years_) - 1; }
    std::size_t n_years() const { return n_years_; }

    const std::vector<std::string>& regions() const { return regions_; }
    const std::string& dev_class(std::size_t region) const { return dev_class_[region]; }

    double s(std::size_t region, int year) const { return s_[flat(region, year)]; }
    double y(std::size_t region, int year) const { return y_[flat(region, year)]; }

    // Growth rates exist for years first_year()+1 .. last_year().
    double r(std::size_t region, int year) const {
        return s_[flat(region, year)] - s_[flat(region, year - 1)];
    }
    double g(std::size_t region, int year) const {
        return y_[flat(region, year)] - y_[flat(region, year - 1)];
    }

private:
    GrowthPanel() = default;

    std::size_t flat(std::size_t region, int year) const;

    std::vector<std::string> regions_;
    std::vector<std::string> dev_class_;
    int first_year_ = 0;
    std::size_t n_years_ = 0;
    std::vector<double> s_;  // n_regions x n_years, row-major
    std::vector<double> y_;
};

// Contiguous period view over a panel. Sizes are not re-centered within
// the period. Growth rates for the first year of the slice reference the
// prior year when the parent panel has it; otherwise that year drops out
// of the growth range.
class PanelSlice {
public:
    PanelSlice(const GrowthPanel& panel, PeriodDefinition period);

    const GrowthPanel& panel() const { return *panel_; }
    const PeriodDefinition& period() const { return period_; }
    int start_year() const { return period_.start_year; }
    int end_year() const { return period_.end_year; }

    // First calendar year with a usable growth rate inside the slice.
    int growth_start_year() const;
    std::size_t n_growth_years() const;
    std::size_t n_obs() const { return n_growth_years() * panel_->n_regions(); }

private:
    const GrowthPanel* panel_;
    PeriodDefinition period_;
};

PanelSlice restrict(const GrowthPanel& panel, const PeriodDefinition& period);

}  // namespace growthdyn

#endif  // GROWTHDYN_PANEL_HPP_
