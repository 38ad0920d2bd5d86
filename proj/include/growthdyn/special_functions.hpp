#ifndef GROWTHDYN_SPECIAL_FUNCTIONS_HPP_
#define GROWTHDYN_SPECIAL_FUNCTIONS_HPP_

namespace growthdyn {

// ln Gamma(x) for x > 0. Lanczos approximation (g = 607/128, 15 terms),
// relative accuracy better than 1e-13 over the shape range used here.
double log_gamma(double x);

// Gamma(x) for x > 0.
double gamma_function(double x);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double reg_lower_gamma(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed on
// the branch that avoids cancellation.
double reg_upper_gamma(double a, double x);

}  // namespace growthdyn

#endif  // GROWTHDYN_SPECIAL_FUNCTIONS_HPP_
