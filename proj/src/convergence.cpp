#include "growthdyn/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "growthdyn/errors.hpp"
#include "growthdyn/optimize.hpp"
#include "growthdyn/rng.hpp"

namespace growthdyn {

namespace {

struct InnerSolution {
    double alpha = 0.0;
    double phi = 0.0;
    double smoothed_objective = 0.0;
    bool converged = false;
};

// Weighted L1 regression of r on (s_lag, g) with per-observation weights
// exp(-beta y_lag), smoothed through sqrt(u^2 + delta^2) and solved by
// iteratively reweighted least squares. The smoothed problem is strictly
// convex, so the warm start affects speed only.
InnerSolution solve_inner(const RegressionData& data, const std::vector<double>& weight,
                          double alpha, double phi, const LadOptions& options) {
    const std::size_t n = data.size();
    const double* rr = data.r.data();
    const double* ss = data.s_lag.data();
    const double* gg = data.g.data();
    const double* cc = weight.data();
    const double dd = options.smoothing_delta * options.smoothing_delta;

    InnerSolution sol;
    double prev_objective = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (long iter = 0; iter < options.inner_cap; ++iter) {
        double sxx = 0.0, sxg = 0.0, sgg = 0.0, bx = 0.0, bg = 0.0, obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rr[i] - alpha * ss[i] - phi * gg[i];
            const double root = std::sqrt(u * u + dd);
            obj += cc[i] * root;
            const double v = cc[i] / root;
            const double vs = v * ss[i];
            const double vg = v * gg[i];
            sxx += vs * ss[i];
            sxg += vs * gg[i];
            sgg += vg * gg[i];
            bx += vs * rr[i];
            bg += vg * rr[i];
        }
        const double det = sxx * sgg - sxg * sxg;
        if (!(std::fabs(det) > 1e-300))
            throw NoConvergence("fit_lad: singular design matrix in inner solve");
        const double next_alpha = (bx * sgg - bg * sxg) / det;
        const double next_phi = (bg * sxx - bx * sxg) / det;
        const double change = std::fabs(next_alpha - alpha) + std::fabs(next_phi - phi);
        alpha = next_alpha;
        phi = next_phi;
        if (change < options.inner_tol * (1.0 + std::fabs(alpha) + std::fabs(phi))) {
            sol.converged = true;
            break;
        }
        // The iteration decreases the objective monotonically; once the
        // decrease sits at double-precision rounding, the coefficient
        // flutter around the smoothing kinks cannot shrink further and the
        // solve is as converged as the arithmetic allows.
        if (prev_objective - obj <= 1e-14 * obj) {
            if (++stalled >= 3) {
                sol.converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
        prev_objective = obj;
    }

    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rr[i] - alpha * ss[i] - phi * gg[i];
        obj += cc[i] * std::sqrt(u * u + dd);
    }
    sol.alpha = alpha;
    sol.phi = phi;
    sol.smoothed_objective = obj;
    return sol;
}

class ProfileObjective {
public:
    ProfileObjective(const RegressionData& data, const LadOptions& options)
        : data_(data), options_(options), search_options_(options),
          weight_(data.size()) {
        // The search phase can run the inner solver at reduced precision;
        // the optimum reported to the caller comes from final_solve().
        search_options_.inner_tol = std::max(options.inner_tol, 1e-8);
        if (options.warm_start) {
            warm_alpha_ = (*options.warm_start)[0];
            warm_phi_ = (*options.warm_start)[1];
        }
    }

    double operator()(double beta) { return solve_at(beta, search_options_); }

    double final_solve(double beta) { return solve_at(beta, options_); }

    const InnerSolution& last() const { return last_; }

private:
    double solve_at(double beta, const LadOptions& options) {
        const std::size_t n = data_.size();
        for (std::size_t i = 0; i < n; ++i)
            weight_[i] = std::exp(-beta * data_.y_lag[i]);
        last_ = solve_inner(data_, weight_, warm_alpha_, warm_phi_, options);
        warm_alpha_ = last_.alpha;
        warm_phi_ = last_.phi;
        return last_.smoothed_objective;
    }

    const RegressionData& data_;
    const LadOptions& options_;
    LadOptions search_options_;
    std::vector<double> weight_;
    double warm_alpha_ = 0.0;
    double warm_phi_ = 0.0;
    InnerSolution last_;
};

}  // namespace

RegressionData build_regression_data(const PanelSlice& slice) {
    const GrowthPanel& panel = slice.panel();
    const std::size_t n_regions = panel.n_regions();
    const int t0 = slice.growth_start_year();
    const int t1 = slice.end_year();

    RegressionData data;
    data.n_regions = n_regions;
    const std::size_t n = slice.n_obs();
    data.r.reserve(n);
    data.s_lag.reserve(n);
    data.g.reserve(n);
    data.y_lag.reserve(n);
    data.region.reserve(n);
    data.year.reserve(n);
    for (std::size_t i = 0; i < n_regions; ++i)
        for (int t = t0; t <= t1; ++t) {
            data.r.push_back(panel.r(i, t));
            data.s_lag.push_back(panel.s(i, t - 1));
            data.g.push_back(panel.g(i, t));
            data.y_lag.push_back(panel.y(i, t - 1));
            data.region.push_back(static_cast<std::uint32_t>(i));
            data.year.push_back(t);
        }
    return data;
}

RegressionData resample_regions(const RegressionData& data,
                                const std::vector<std::size_t>& chosen) {
    // Region blocks are contiguous and equally sized in region-major order.
    const std::size_t block = data.size() / data.n_regions;
    RegressionData out;
    out.n_regions = chosen.size();
    const std::size_t n = block * chosen.size();
    out.r.reserve(n);
    out.s_lag.reserve(n);
    out.g.reserve(n);
    out.y_lag.reserve(n);
    out.region.reserve(n);
    out.year.reserve(n);
    for (std::size_t k = 0; k < chosen.size(); ++k) {
        const std::size_t from = chosen[k] * block;
        for (std::size_t j = 0; j < block; ++j) {
            out.r.push_back(data.r[from + j]);
            out.s_lag.push_back(data.s_lag[from + j]);
            out.g.push_back(data.g[from + j]);
            out.y_lag.push_back(data.y_lag[from + j]);
            out.region.push_back(static_cast<std::uint32_t>(k));
            out.year.push_back(data.year[from + j]);
        }
    }

    // Relative sizes and centered growth rates are defined against yearly
    // cross-sectional means; a panel built from the resampled region set
    // would be centered again, so the replicate must be too. Without this
    // the replicate mean of y shifts by O(1/sqrt(N)), which the exp(beta y)
    // weighting turns into spurious variance in the beta estimates. Rows
    // share the year layout within each block.
    const std::size_t m = chosen.size();
    for (std::size_t j = 0; j < block; ++j) {
        double mean_r = 0.0, mean_s = 0.0, mean_g = 0.0, mean_y = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t at = k * block + j;
            mean_r += out.r[at];
            mean_s += out.s_lag[at];
            mean_g += out.g[at];
            mean_y += out.y_lag[at];
        }
        mean_r /= static_cast<double>(m);
        mean_s /= static_cast<double>(m);
        mean_g /= static_cast<double>(m);
        mean_y /= static_cast<double>(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t at = k * block + j;
            out.r[at] -= mean_r;
            out.s_lag[at] -= mean_s;
            out.g[at] -= mean_g;
            out.y_lag[at] -= mean_y;
        }
    }
    return out;
}

ConvergenceFit fit_lad_data(const RegressionData& data, const LadOptions& options) {
    if (data.size() < 3)
        throw TooFewObservations("fit_lad: need at least 3 observations");

    ProfileObjective profile(data, options);

    double beta;
    bool outer_converged = true;
    if (options.fixed_beta) {
        beta = *options.fixed_beta;
    } else {
        // Warm the inner chain at beta = 0 unless a warm start was given:
        // the first inner solve is then the plain L1 fit, which seeds
        // (alpha, phi) for the search.
        if (!options.warm_start) profile(0.0);
        const double golden = minimize_golden_section(
            [&profile](double b) { return profile(b); }, options.beta_lo,
            options.beta_hi, options.outer_tol, 200);

        // Local polish around the golden-section bracket. Profile values
        // carry inner-solve noise of order 1e-9 relative, so the value
        // tolerance is set at that resolution rather than at an absolute
        // level the evaluations cannot distinguish.
        const double f_golden = profile(golden);
        SimplexOptions refine;
        refine.diameter_tol = 0.01 * options.outer_tol;
        refine.value_tol = std::max(1e-12, 1e-9 * std::fabs(f_golden));
        refine.max_evals = options.outer_cap;
        refine.initial_step = {4.0 * options.outer_tol};
        const SimplexResult res = minimize_simplex(
            [&profile](const std::vector<double>& b) { return profile(b[0]); },
            {golden}, refine);
        beta = res.x[0];
        outer_converged = res.converged;
    }
    profile.final_solve(beta);

    const InnerSolution& inner = profile.last();

    ConvergenceFit fit;
    fit.alpha = inner.alpha;
    fit.phi = inner.phi;
    fit.beta = beta;
    fit.n_obs = data.size();
    fit.converged = outer_converged && inner.converged;

    fit.residuals.resize(data.size());
    double objective = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double u = data.r[i] - fit.alpha * data.s_lag[i] - fit.phi * data.g[i];
        const double eps = u * std::exp(-fit.beta * data.y_lag[i]);
        fit.residuals[i] = eps;
        objective += std::fabs(eps);
    }
    fit.objective = objective;
    return fit;
}

ConvergenceFit fit_lad(const PanelSlice& slice, const LadOptions& options) {
    if (slice.n_growth_years() < 2)
        throw TooFewObservations("fit_lad: period provides fewer than 2 growth years");
    const RegressionData data = build_regression_data(slice);
    ConvergenceFit fit = fit_lad_data(data, options);
    fit.period = slice.period();
    return fit;
}

BootstrapResult bootstrap(const PanelSlice& slice, const ConvergenceFit& fit,
                          int replicates, std::uint64_t seed,
                          const LadOptions& options) {
    if (replicates < 100)
        throw std::invalid_argument("bootstrap: need at least 100 replicates");
    const RegressionData data = build_regression_data(slice);
    const std::size_t n_regions = data.n_regions;

    LadOptions replicate_options = options;
    replicate_options.warm_start = {{fit.alpha, fit.phi}};

    BootstrapResult result;
    result.replicates.reserve(replicates);
    std::vector<std::size_t> chosen(n_regions);
    for (int b = 0; b < replicates; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        for (std::size_t i = 0; i < n_regions; ++i) chosen[i] = rng.index(n_regions);
        try {
            const ConvergenceFit rep =
                fit_lad_data(resample_regions(data, chosen), replicate_options);
            if (rep.converged)
                result.replicates.push_back({rep.alpha, rep.phi, rep.beta});
            else
                ++result.n_failed;
        } catch (const Error&) {
            ++result.n_failed;
        }
    }

    if (result.n_failed * 10 > replicates)
        throw NoConvergence("bootstrap: " + std::to_string(result.n_failed) + " of " +
                            std::to_string(replicates) + " replicates failed to converge");

    const std::size_t m = result.replicates.size();
    for (int k = 0; k < 3; ++k) {
        double mean = 0.0;
        for (const auto& rep : result.replicates) mean += rep[k];
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (const auto& rep : result.replicates) var += (rep[k] - mean) * (rep[k] - mean);
        result.std_errors[k] = std::sqrt(var / static_cast<double>(m - 1));
    }
    return result;
}

std::array<double, 3> bootstrap_se(const PanelSlice& slice, const ConvergenceFit& fit,
                                   int replicates, std::uint64_t seed,
                                   const LadOptions& options) {
    return bootstrap(slice, fit, replicates, seed, options).std_errors;
}

const std::vector<double>& rescaled_residuals(const ConvergenceFit& fit) {
    if (!fit.converged)
        throw NoConvergence("rescaled_residuals: fit did not converge");
    return fit.residuals;
}

}  // namespace growthdyn
