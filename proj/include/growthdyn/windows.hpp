#ifndef GROWTHDYN_WINDOWS_HPP_
#define GROWTHDYN_WINDOWS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "growthdyn/aep.hpp"
#include "growthdyn/convergence.hpp"
#include "growthdyn/panel.hpp"

namespace growthdyn {

// Start years of the four trading-scheme phases, for plot annotations.
inline constexpr std::array<int, 4> kPhaseStartYears = {2005, 2008, 2013, 2021};

struct WindowEntry {
    int start_year = 0;
    int end_year = 0;
    std::optional<ConvergenceFit> fit;
    std::optional<aep::AepFit> residual_fit;
    std::string error;  // empty when the window succeeded
};

struct WindowSeries {
    int window_length = 5;
    std::vector<WindowEntry> entries;
    std::array<int, 4> phase_markers = kPhaseStartYears;
};

struct WindowOptions {
    LadOptions lad;
    aep::FitOptions aep;
    int bootstrap_replicates = 200;
    std::uint64_t seed = 1;
    bool compute_std_errors = true;
    bool fit_residual_distribution = true;
};

// Slides a window of the given length over the panel with stride one year
// (the last window ends one year short of the panel end), fitting the
// convergence model and, on its rescaled residuals, the AEP distribution.
// Windows that fail are recorded with their error instead of being
// dropped. Per-window seeds derive from the master seed, so results do not
// depend on evaluation order.
WindowSeries run_moving_windows(const GrowthPanel& panel, int window_length = 5,
                                const WindowOptions& options = {});

}  // namespace growthdyn

#endif  // GROWTHDYN_WINDOWS_HPP_
