#include "growthdyn/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace growthdyn {

namespace {

double simplex_diameter(const std::vector<std::vector<double>>& verts) {
    double diam = 0.0;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < verts[i].size(); ++k) {
                const double d = verts[i][k] - verts[j][k];
                d2 += d * d;
            }
            diam = std::max(diam, d2);
        }
    return std::sqrt(diam);
}

}  // namespace

SimplexResult minimize_simplex(const ObjectiveFn& f, std::vector<double> x0,
                               const SimplexOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("minimize_simplex: empty start point");

    auto step_for = [&](std::size_t i) {
        if (options.initial_step.size() == 1) return options.initial_step[0];
        return options.initial_step.at(i);
    };

    std::vector<std::vector<double>> verts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += step_for(i);

    SimplexResult result;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = f(verts[i]);
        ++result.evaluations;
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    while (result.evaluations < options.max_evals) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second_worst = order[n - 1];

        if (std::fabs(fv[worst] - fv[best]) < options.value_tol ||
            simplex_diameter(verts) < options.diameter_tol) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += verts[i][k];
        }
        for (std::size_t k = 0; k < n; ++k) centroid[k] /= static_cast<double>(n);

        for (std::size_t k = 0; k < n; ++k)
            xr[k] = centroid[k] + (centroid[k] - verts[worst][k]);
        const double fr = f(xr);
        ++result.evaluations;

        if (fr < fv[best]) {
            for (std::size_t k = 0; k < n; ++k)
                xe[k] = centroid[k] + 2.0 * (centroid[k] - verts[worst][k]);
            const double fe = f(xe);
            ++result.evaluations;
            if (fe < fr) {
                verts[worst] = xe;
                fv[worst] = fe;
            } else {
                verts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            verts[worst] = xr;
            fv[worst] = fr;
        } else {
            // Contract toward the centroid, from the better of worst/reflected.
            const bool outside = fr < fv[worst];
            const std::vector<double>& base = outside ? xr : verts[worst];
            for (std::size_t k = 0; k < n; ++k)
                xc[k] = centroid[k] + 0.5 * (base[k] - centroid[k]);
            const double fc = f(xc);
            ++result.evaluations;
            if (fc < (outside ? fr : fv[worst])) {
                verts[worst] = xc;
                fv[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < n; ++k)
                        verts[i][k] = verts[best][k] + 0.5 * (verts[i][k] - verts[best][k]);
                    fv[i] = f(verts[i]);
                    ++result.evaluations;
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    result.x = verts[best];
    result.value = fv[best];
    return result;
}

double minimize_golden_section(const std::function<double(double)>& f,
                               double lo, double hi, double tol, int max_iter) {
    if (!(lo < hi)) throw std::invalid_argument("minimize_golden_section: lo >= hi");
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace growthdyn
