#ifndef GROWTHDYN_OPTIMIZE_HPP_
#define GROWTHDYN_OPTIMIZE_HPP_

#include <functional>
#include <vector>

namespace growthdyn {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct SimplexOptions {
    double diameter_tol = 1e-8;  // max vertex distance in parameter space
    double value_tol = 1e-10;    // spread of objective values over the simplex
    long max_evals = 100000;
    // Initial vertex offsets, one per coordinate; a single value is
    // broadcast when the vector has size 1.
    std::vector<double> initial_step{0.1};
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    long evaluations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). Stops when the simplex diameter or the value spread falls
// under its tolerance.
SimplexResult minimize_simplex(const ObjectiveFn& f, std::vector<double> x0,
                               const SimplexOptions& options = {});

// Golden-section search for a minimum of f on [lo, hi]; returns the
// midpoint of the final bracket.
double minimize_golden_section(const std::function<double(double)>& f,
                               double lo, double hi, double tol, int max_iter);

}  // namespace growthdyn

#endif  // GROWTHDYN_OPTIMIZE_HPP_
