#pragma once
// Gamma function and the one-parameter Mittag-Leffler function E_alpha,
// plus the exponential-type weight built from E_alpha that the solver
// uses for its weighted-supremum iteration norm.

#include "caputo/common.hpp"

namespace caputo {

// Gamma(x) for x > 0.  Throws std::domain_error otherwise; returns +inf
// once the result exceeds the double range (x >~ 171.62).
double gamma_fn(double x);

// E_alpha(t) = sum_{k>=0} t^k / Gamma(alpha k + 1) for alpha in (0,1] and
// real t.  alpha == 1 reduces to exp(t).  Throws std::domain_error for
// invalid arguments, std::overflow_error when the value exceeds the double
// range, and accuracy_error if no evaluation regime can certify ~1e-12
// relative accuracy at the requested point.
double mittag_leffler(double alpha, double t);

// Parameters of the comparison weight w(t) = E_alpha(gamma * t^alpha).
struct WeightParams {
    WeightParams(FractionalOrder a, double g) : alpha(a), gamma(g) {
        if (!(g > 0.0) || !std::isfinite(g))
            throw std::domain_error("WeightParams: gamma must be positive and finite");
    }
    FractionalOrder alpha;
    double gamma;
};

// w(t) above; requires t >= 0.
double bielecki_weight(const WeightParams& p, double t);

namespace detail {
// sin(pi x) with exact zeros at integer x.
double sin_pi(double x);
// 1 / Gamma(y) on the whole real line (entire function).
double rgamma(double y);

// Individual evaluation regimes, exposed so their overlap windows can be
// cross-checked.  `error` is an absolute bound; `certified` means the bound
// clears the internal accuracy target relative to `value`.
struct Evaluation {
    double value;
    double error;
    bool certified;
};
Evaluation ml_series(double alpha, double t);
Evaluation ml_asymptotic_negative(double alpha, double x);  // value of E_alpha(-x)
double ml_integral_negative(double alpha, double x);        // ditto; throws on failure
}  // namespace detail

}  // namespace caputo
