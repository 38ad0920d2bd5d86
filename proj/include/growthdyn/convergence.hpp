#ifndef GROWTHDYN_CONVERGENCE_HPP_
#define GROWTHDYN_CONVERGENCE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "growthdyn/panel.hpp"

namespace growthdyn {

// Flattened estimation sample for the dynamic convergence model. One row
// per region-year with a usable growth rate, region-major order, so that
// region blocks stay contiguous for the block bootstrap.
struct RegressionData {
    std::vector<double> r;      // emissions growth
    std::vector<double> s_lag;  // relative emission size, prior year
    std::vector<double> g;      // GDP growth
    std::vector<double> y_lag;  // relative GDP size, prior year
    std::vector<std::uint32_t> region;
    std::vector<int> year;
    std::size_t n_regions = 0;

    std::size_t size() const { return r.size(); }
};

RegressionData build_regression_data(const PanelSlice& slice);

// Resample whole regions with replacement, keeping each region's full
// time path, and re-center every cross-section the way a panel built from
// those regions would be.
RegressionData resample_regions(const RegressionData& data,
                                const std::vector<std::size_t>& chosen);

struct LadOptions {
    double beta_lo = -1.0;
    double beta_hi = 1.0;
    double outer_tol = 1e-6;        // tolerance on beta
    double inner_tol = 1e-10;       // tolerance on (alpha, phi)
    long inner_cap = 10000;
    int outer_cap = 200;            // refinement evaluations
    double smoothing_delta = 1e-8;  // |u| ~ sqrt(u^2 + delta^2)
    std::optional<double> fixed_beta;  // skip the outer search entirely
    // Warm start for the inner chain; affects speed only, the smoothed
    // inner problem has a unique optimum.
    std::optional<std::array<double, 2>> warm_start;
};

struct ConvergenceFit {
    double alpha = 0.0;  // lagged relative-size coefficient
    double phi = 0.0;    // GDP growth coupling
    double beta = 0.0;   // volatility-size scaling
    std::array<double, 3> std_errors{};  // filled by bootstrap_se
    double objective = 0.0;              // sum of absolute rescaled deviations
    std::vector<double> residuals;       // rescaled, same order as RegressionData
    std::size_t n_obs = 0;
    bool converged = false;
    PeriodDefinition period;
};

inline constexpr std::array<const char*, 3> kConvergenceParamNames = {"alpha", "phi",
                                                                      "beta"};

// Minimizes sum |(r - alpha s_lag - phi g) / exp(beta y_lag)| by profiling:
// for fixed beta the inner weighted-L1 problem is solved by iteratively
// reweighted least squares on the smoothed objective; the outer search over
// beta is golden section on [beta_lo, beta_hi] refined by a one-dimensional
// simplex. The smoothing delta makes the optimum unique and is part of the
// estimator definition.
ConvergenceFit fit_lad(const PanelSlice& slice, const LadOptions& options = {});

// Same estimator on a prepared sample; used by the bootstrap and by tests
// that transform the regression sample directly.
ConvergenceFit fit_lad_data(const RegressionData& data, const LadOptions& options = {});

struct BootstrapResult {
    std::array<double, 3> std_errors{};
    std::vector<std::array<double, 3>> replicates;  // converged replicates only
    int n_failed = 0;
};

// Region-level block bootstrap: resample regions with replacement, refit
// per replicate, report standard deviations of the replicate estimates.
// The fitted model warm-starts the replicates. Replicate seeds derive from
// the master seed, so the result does not depend on evaluation order.
// Throws NoConvergence when more than 10% of replicates fail.
BootstrapResult bootstrap(const PanelSlice& slice, const ConvergenceFit& fit,
                          int replicates, std::uint64_t seed,
                          const LadOptions& options = {});

std::array<double, 3> bootstrap_se(const PanelSlice& slice, const ConvergenceFit& fit,
                                   int replicates, std::uint64_t seed,
                                   const LadOptions& options = {});

// The homoscedastic innovations of the model at the fitted parameters,
// as a flat sample suitable for distribution fitting.
const std::vector<double>& rescaled_residuals(const ConvergenceFit& fit);

}  // namespace growthdyn

#endif  // GROWTHDYN_CONVERGENCE_HPP_
