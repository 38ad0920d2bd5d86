#include "growthdyn/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace growthdyn {

namespace {

constexpr double kLanczosCoef[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

// Series representation of P(a, x) * Gamma(a) * exp(x) * x^-a, valid for
// x < a + 1 where it converges quickly.
double lower_gamma_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * std::numeric_limits<double>::epsilon())
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Continued fraction for Q(a, x), modified Lentz, valid for x >= a + 1.
double upper_gamma_cf(double a, double x) {
    constexpr double kTiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= std::numeric_limits<double>::epsilon())
            break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: argument must be positive");
    const double tmp0 = x + 5.24218750000000000;  // x + g + 1/2, g = 607/128
    const double tmp = (x + 0.5) * std::log(tmp0) - tmp0;
    double ser = kLanczosCoef[0];
    double y = x;
    for (int j = 1; j < 15; ++j) ser += kLanczosCoef[j] / (y += 1.0);
    return tmp + std::log(2.5066282746310005 * ser / x);
}

double gamma_function(double x) { return std::exp(log_gamma(x)); }

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::domain_error("reg_lower_gamma: need a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return lower_gamma_series(a, x);
    return 1.0 - upper_gamma_cf(a, x);
}

double reg_upper_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::domain_error("reg_upper_gamma: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - lower_gamma_series(a, x);
    return upper_gamma_cf(a, x);
}

}  // namespace growthdyn
