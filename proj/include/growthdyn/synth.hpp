#ifndef GROWTHDYN_SYNTH_HPP_
#define GROWTHDYN_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "growthdyn/aep.hpp"
#include "growthdyn/panel.hpp"

namespace growthdyn::synth {

enum class ResidualLaw { laplace, normal, aep };

struct ResidualSpec {
    ResidualLaw law = ResidualLaw::laplace;
    double scale = 0.05;  // Laplace scale or Normal standard deviation
    std::optional<aep::AepParams> aep_params;  // required when law == aep
};

struct GdpProcess {
    // Default process: iid Laplace shocks on g, initial sizes dispersed
    // per region.
    double shock_scale = 0.02;
    // Subunit mode (max_subunits >= 1): regional GDP is the sum of k
    // subunit levels with k spaced geometrically in [1, max_subunits].
    // common_shock_share is the variance share of a within-region shared
    // shock: 0 gives independent subunits (volatility falls as 1/sqrt(k)),
    // 1 makes each region move as one unit (volatility flat in size).
    int max_subunits = 0;
    double common_shock_share = 0.0;
    double subunit_shock_sd = 0.05;
};

struct GeneratorSpec {
    int n_regions = 242;
    int n_years = 33;
    int first_year = 1990;
    double alpha = 0.0;
    double phi = 0.0;
    double beta = 0.0;
    ResidualSpec residual;
    GdpProcess gdp;
    double initial_s_sd = 1.0;
    double initial_y_sd = 1.0;
    // Optional regime switch: phi jumps to phi_after for years >= switch_year.
    std::optional<double> phi_after;
    int switch_year = 0;
    std::uint64_t seed = 1;
};

// Simulates the dynamic convergence model forward,
//
//   s_t = s_{t-1} + alpha s_{t-1} + phi g_t + exp(beta y_{t-1}) eps_t,
//
// re-centering every simulated cross-section so the output honors the
// panel's centered definitions, and exponentiates to emission/GDP levels
// (bases 1e6 tonnes and 1e10 currency units; only relative values carry
// information). Deterministic given the seed.
std::vector<RegionYearObservation> generate_panel(const GeneratorSpec& spec);

}  // namespace growthdyn::synth

#endif  // GROWTHDYN_SYNTH_HPP_
