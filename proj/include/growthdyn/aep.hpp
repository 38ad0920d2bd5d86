#ifndef GROWTHDYN_AEP_HPP_
#define GROWTHDYN_AEP_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "growthdyn/rng.hpp"

namespace growthdyn::aep {

// Five-parameter asymmetric exponential power distribution. Two scale and
// two shape parameters govern the left/right tails around the mode; the
// family nests Laplace (shape 1) and Normal (shape 2, scale = standard
// deviation).
struct AepParams {
    double left_scale;   // a_l > 0
    double right_scale;  // a_r > 0
    double left_shape;   // b_l > 0
    double right_shape;  // b_r > 0
    double mode;         // m

    AepParams(double a_l, double a_r, double b_l, double b_r, double m);

    static AepParams laplace(double scale, double mode = 0.0) {
        return {scale, scale, 1.0, 1.0, mode};
    }
    static AepParams normal(double sd, double mode = 0.0) {
        return {sd, sd, 2.0, 2.0, mode};
    }
};

// Parameter order used for std_errors and tabular output.
enum ParamIndex : std::size_t {
    kLeftScale = 0,
    kRightScale = 1,
    kLeftShape = 2,
    kRightShape = 3,
    kMode = 4,
};

inline constexpr std::array<const char*, 5> kParamNames = {"a_l", "a_r", "b_l",
                                                           "b_r", "m"};

// A = a_l b_l^(1/b_l) Gamma(1 + 1/b_l) + a_r b_r^(1/b_r) Gamma(1 + 1/b_r).
double normalization_constant(const AepParams& params);

// Probability mass left of the mode, A_l / A.
double left_tail_mass(const AepParams& params);

double pdf(double x, const AepParams& params);

// ln pdf, computed without evaluating the exponential; usable for
// |x - mode| / scale well beyond the underflow range of pdf.
double log_pdf(double x, const AepParams& params);

// Branchwise via the regularized incomplete gamma with the substitution
// w = (|x - m| / a)^b / b.
double cdf(double x, const AepParams& params);

// One exact draw: the branch is chosen with probability equal to its tail
// mass, then |x - m| = a (b w)^(1/b) with w ~ Gamma(1/b, 1).
double draw(const AepParams& params, Rng& rng);

std::vector<double> sample(const AepParams& params, std::size_t n,
                           std::uint64_t seed);

enum class SeMethod {
    observed_information,
    bootstrap,
};

struct FitOptions {
    std::size_t min_sample = 50;
    int n_starts = 5;
    long max_evals = 100000;       // per start
    double diameter_tol = 1e-8;
    double value_tol = 1e-10;
    double se_rel_step = 1e-4;     // central-difference step, relative
    bool bootstrap_fallback = true;
    int bootstrap_replicates = 200;
    std::uint64_t bootstrap_seed = 0x5EEDAE9ull;
};

struct AepFit {
    AepParams params;
    std::array<double, 5> std_errors;  // ordered per ParamIndex
    double log_likelihood = 0.0;
    std::size_t n = 0;
    bool converged = false;            // optimizer converged and information matrix PD
    long iterations = 0;               // objective evaluations, all starts
    SeMethod se_method = SeMethod::observed_information;
};

// Maximum likelihood fit. Nelder-Mead over (ln a_l, ln a_r, ln b_l,
// ln b_r, m) with five deterministic starts around a moment-based
// initializer (median, mean absolute deviation, shapes 1). Standard errors
// come from the inverse observed information; a nonparametric bootstrap
// takes over when that matrix is not positive definite.
AepFit fit_mle(std::span<const double> sample, const FitOptions& options = {});

}  // namespace growthdyn::aep

#endif  // GROWTHDYN_AEP_HPP_
