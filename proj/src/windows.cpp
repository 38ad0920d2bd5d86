#include "growthdyn/windows.hpp"

#include <string>

#include "growthdyn/errors.hpp"
#include "growthdyn/rng.hpp"

namespace growthdyn {

WindowSeries run_moving_windows(const GrowthPanel& panel, int window_length,
                                const WindowOptions& options) {
    if (window_length < 2)
        throw std::invalid_argument("run_moving_windows: window length must be >= 2");
    if (static_cast<int>(panel.n_years()) < window_length + 1)
        throw WindowTooLong("run_moving_windows: window length " +
                            std::to_string(window_length) + " needs at least " +
                            std::to_string(window_length + 1) + " panel years, have " +
                            std::to_string(panel.n_years()));

    WindowSeries series;
    series.window_length = window_length;

    const int first_start = panel.first_year();
    const int last_start = panel.last_year() - window_length;  // ends before the panel end
    for (int start = first_start; start <= last_start; ++start) {
        const int end = start + window_length - 1;
        WindowEntry entry;
        entry.start_year = start;
        entry.end_year = end;
        const std::uint64_t window_seed =
            derive_seed(options.seed, static_cast<std::uint64_t>(start - first_start));
        try {
            const PeriodDefinition period{std::to_string(start) + "-" + std::to_string(end),
                                          start, end};
            const PanelSlice slice = restrict(panel, period);
            ConvergenceFit fit = fit_lad(slice, options.lad);
            if (options.compute_std_errors)
                fit.std_errors = bootstrap_se(slice, fit, options.bootstrap_replicates,
                                              window_seed, options.lad);
            entry.fit = std::move(fit);
            if (options.fit_residual_distribution) {
                const std::vector<double>& residuals = rescaled_residuals(*entry.fit);
                entry.residual_fit = aep::fit_mle(residuals, options.aep);
            }
        } catch (const Error& e) {
            entry.error = e.what();
        }
        series.entries.push_back(std::move(entry));
    }
    return series;
}

}  // namespace growthdyn
