#include "growthdyn/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "growthdyn/errors.hpp"

namespace growthdyn {

std::vector<PeriodDefinition> canonical_periods() {
    return {
        {"full", 1990, 2022},
        {"pre-ETS", 1990, 2004},
        {"ETS-1", 2005, 2007},
        {"ETS-2", 2008, 2012},
        {"ETS-3", 2013, 2020},
    };
}

std::size_t GrowthPanel::flat(std::size_t region, int year) const {
    const int offset = year - first_year_;
    if (region >= regions_.size() || offset < 0 ||
        offset >= static_cast<int>(n_years_))
        throw std::out_of_range("GrowthPanel: region/year out of range");
    return region * n_years_ + static_cast<std::size_t>(offset);
}

GrowthPanel GrowthPanel::build(const std::vector<RegionYearObservation>& observations,
                               std::optional<std::pair<int, int>> year_range) {
    if (observations.empty())
        throw UnbalancedPanel("build_panel: no observations");

    int lo = year_range ? year_range->first : observations.front().year;
    int hi = year_range ? year_range->second : observations.front().year;
    if (!year_range) {
        for (const auto& obs : observations) {
            lo = std::min(lo, obs.year);
            hi = std::max(hi, obs.year);
        }
    }
    if (lo > hi) throw UnbalancedPanel("build_panel: empty year range");

    std::set<std::string> region_set;
    for (const auto& obs : observations)
        if (obs.year >= lo && obs.year <= hi) region_set.insert(obs.region_id);
    if (region_set.empty())
        throw UnbalancedPanel("build_panel: no observations inside the year range");

    GrowthPanel panel;
    panel.regions_.assign(region_set.begin(), region_set.end());
    panel.dev_class_.resize(panel.regions_.size());
    panel.first_year_ = lo;
    panel.n_years_ = static_cast<std::size_t>(hi - lo + 1);

    const std::size_t n = panel.regions_.size();
    const std::size_t t = panel.n_years_;
    std::vector<char> seen(n * t, 0);
    panel.s_.assign(n * t, 0.0);
    panel.y_.assign(n * t, 0.0);

    std::map<std::string, std::size_t> region_index;
    for (std::size_t i = 0; i < n; ++i) region_index[panel.regions_[i]] = i;

    for (const auto& obs : observations) {
        if (obs.year < lo || obs.year > hi) continue;
        const std::size_t i = region_index.at(obs.region_id);
        const std::size_t k = i * t + static_cast<std::size_t>(obs.year - lo);
        if (seen[k])
            throw DuplicateRecord("build_panel: duplicate record for region " +
                                  obs.region_id + ", year " + std::to_string(obs.year));
        if (!(obs.emissions > 0.0) || !std::isfinite(obs.emissions))
            throw NonPositiveValue("build_panel: non-positive emissions for region " +
                                   obs.region_id + ", year " + std::to_string(obs.year));
        if (!(obs.gdp > 0.0) || !std::isfinite(obs.gdp))
            throw NonPositiveValue("build_panel: non-positive gdp for region " +
                                   obs.region_id + ", year " + std::to_string(obs.year));
        seen[k] = 1;
        panel.s_[k] = std::log(obs.emissions);
        panel.y_[k] = std::log(obs.gdp);
        if (panel.dev_class_[i].empty() && !obs.dev_class.empty())
            panel.dev_class_[i] = obs.dev_class;
    }

    std::vector<std::string> missing;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < t; ++j)
            if (!seen[i * t + j])
                missing.push_back(panel.regions_[i] + ":" +
                                  std::to_string(lo + static_cast<int>(j)));
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "build_panel: unbalanced panel, " << missing.size()
            << " missing region-years:";
        const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
        for (std::size_t k = 0; k < shown; ++k) msg << ' ' << missing[k];
        if (missing.size() > shown) msg << " ... (" << missing.size() - shown << " more)";
        throw UnbalancedPanel(msg.str());
    }

    // Center each cross-section on its log mean.
    for (std::size_t j = 0; j < t; ++j) {
        double mean_s = 0.0, mean_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean_s += panel.s_[i * t + j];
            mean_y += panel.y_[i * t + j];
        }
        mean_s /= static_cast<double>(n);
        mean_y /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            panel.s_[i * t + j] -= mean_s;
            panel.y_[i * t + j] -= mean_y;
        }
    }
    return panel;
}

PanelSlice::PanelSlice(const GrowthPanel& panel, PeriodDefinition period)
    : panel_(&panel), period_(std::move(period)) {
    if (period_.start_year > period_.end_year)
        throw EmptyPeriod("restrict: period '" + period_.name + "' has start after end");
    if (period_.start_year < panel.first_year() || period_.end_year > panel.last_year())
        throw EmptyPeriod("restrict: period '" + period_.name + "' (" +
                          std::to_string(period_.start_year) + "-" +
                          std::to_string(period_.end_year) +
                          ") not contained in panel years " +
                          std::to_string(panel.first_year()) + "-" +
                          std::to_string(panel.last_year()));
}

int PanelSlice::growth_start_year() const {
    return std::max(period_.start_year, panel_->first_year() + 1);
}

std::size_t PanelSlice::n_growth_years() const {
    const int n = period_.end_year - growth_start_year() + 1;
    return n > 0 ? static_cast<std::size_t>(n) : 0;
}

PanelSlice restrict(const GrowthPanel& panel, const PeriodDefinition& period) {
    return PanelSlice(panel, period);
}

}  // namespace growthdyn
