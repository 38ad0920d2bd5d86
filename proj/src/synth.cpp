#include "growthdyn/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "growthdyn/errors.hpp"
#include "growthdyn/rng.hpp"

namespace growthdyn::synth {

namespace {

constexpr double kLogEmissionBase = 13.815510557964274;  // ln 1e6
constexpr double kLogGdpBase = 23.025850929940457;       // ln 1e10

void validate(const GeneratorSpec& spec) {
    if (spec.n_regions < 2) throw InvalidSpec("generate_panel: need at least 2 regions");
    if (spec.n_years < 3) throw InvalidSpec("generate_panel: need at least 3 years");
    if (spec.residual.scale < 0.0)
        throw InvalidSpec("generate_panel: residual scale must be nonnegative");
    if (spec.residual.law == ResidualLaw::aep && !spec.residual.aep_params)
        throw InvalidSpec("generate_panel: AEP residual law needs parameters");
    if (spec.gdp.shock_scale < 0.0)
        throw InvalidSpec("generate_panel: GDP shock scale must be nonnegative");
    if (spec.gdp.common_shock_share < 0.0 || spec.gdp.common_shock_share > 1.0)
        throw InvalidSpec("generate_panel: common shock share must be in [0, 1]");
    if (spec.gdp.max_subunits < 0)
        throw InvalidSpec("generate_panel: max_subunits must be nonnegative");
    if (spec.initial_s_sd < 0.0 || spec.initial_y_sd < 0.0)
        throw InvalidSpec("generate_panel: initial dispersions must be nonnegative");
}

void center(std::vector<double>& values) {
    double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                  static_cast<double>(values.size());
    for (double& v : values) v -= mean;
}

double draw_residual(const ResidualSpec& spec, Rng& rng) {
    switch (spec.law) {
        case ResidualLaw::laplace:
            return rng.laplace(spec.scale);
        case ResidualLaw::normal:
            return spec.scale * rng.normal();
        case ResidualLaw::aep:
            return aep::draw(*spec.aep_params, rng);
    }
    return 0.0;
}

std::string region_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "R%04d", i);
    return buf;
}

}  // namespace

std::vector<RegionYearObservation> generate_panel(const GeneratorSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);

    const int n = spec.n_regions;
    const int t_count = spec.n_years;
    const bool subunits = spec.gdp.max_subunits >= 1;

    // Per-region GDP state: either the relative size directly, or the
    // subunit levels it aggregates.
    std::vector<double> y(n);
    std::vector<std::vector<double>> units;
    if (subunits) {
        units.resize(n);
        const double log_max = std::log(static_cast<double>(spec.gdp.max_subunits));
        for (int i = 0; i < n; ++i) {
            const double frac = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
            const int k = std::max(1, static_cast<int>(std::lround(std::exp(log_max * frac))));
            units[i].assign(k, 1.0);
        }
        for (int i = 0; i < n; ++i) y[i] = std::log(units[i].size() * 1.0);
        center(y);
    } else {
        for (int i = 0; i < n; ++i) y[i] = spec.initial_y_sd * rng.normal();
        center(y);
    }

    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = spec.initial_s_sd * rng.normal();
    center(s);

    std::vector<RegionYearObservation> out;
    out.reserve(static_cast<std::size_t>(n) * t_count);
    auto emit_year = [&](int year) {
        for (int i = 0; i < n; ++i)
            out.push_back({region_name(i), year, std::exp(s[i] + kLogEmissionBase),
                           std::exp(y[i] + kLogGdpBase), ""});
    };
    emit_year(spec.first_year);

    std::vector<double> g(n), raw(n), y_prev(n);
    for (int step = 1; step < t_count; ++step) {
        const int year = spec.first_year + step;
        y_prev = y;

        // GDP side.
        if (subunits) {
            const double rho = spec.gdp.common_shock_share;
            const double w_shared = std::sqrt(rho);
            const double w_own = std::sqrt(1.0 - rho);
            for (int i = 0; i < n; ++i) {
                // Shared component correlates the subunits of one region;
                // rho = 1 makes a region move as a single unit.
                const double shared = rng.normal();
                double level = 0.0;
                for (double& u : units[i]) {
                    u *= std::exp(spec.gdp.subunit_shock_sd *
                                  (w_shared * shared + w_own * rng.normal()));
                    level += u;
                }
                y[i] = std::log(level);
            }
            center(y);
        } else {
            for (int i = 0; i < n; ++i) g[i] = rng.laplace(spec.gdp.shock_scale);
            center(g);
            for (int i = 0; i < n; ++i) y[i] += g[i];
        }
        for (int i = 0; i < n; ++i) g[i] = y[i] - y_prev[i];

        // Emissions side: the dynamic model, then cross-sectional centering.
        const double phi_t = (spec.phi_after && year >= spec.switch_year)
                                 ? *spec.phi_after
                                 : spec.phi;
        for (int i = 0; i < n; ++i)
            raw[i] = spec.alpha * s[i] + phi_t * g[i] +
                     std::exp(spec.beta * y_prev[i]) * draw_residual(spec.residual, rng);
        center(raw);
        for (int i = 0; i < n; ++i) s[i] += raw[i];

        emit_year(year);
    }
    return out;
}

}  // namespace growthdyn::synth
