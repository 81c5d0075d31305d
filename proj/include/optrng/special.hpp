#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "optrng/errors.hpp"

// Special functions used by the test battery and the threshold solver.
//  erfc:    C library erfc (correctly rounded to a few ulp on glibc).
//  igamc:   Boost.Math gamma_q, the regularized upper incomplete gamma Q(a, x),
//           series/continued-fraction evaluation with ~1e-15 relative error.
//  erfcinv: Boost.Math erfc_inv (rational approximations + Halley refinement).
namespace optrng::special {

inline double erfc(double x) noexcept { return std::erfc(x); }

/// Q(a, x) = Gamma(a, x) / Gamma(a); returns 1 for x <= 0.
inline double igamc(double a, double x) {
    if (!(a > 0.0)) throw DomainError("igamc requires a > 0");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(a, x);
}

/// Standard normal CDF.
inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double erfc_inv(double p) {
    if (!(p > 0.0 && p < 2.0)) throw DomainError("erfc_inv requires 0 < p < 2");
    return boost::math::erfc_inv(p);
}

/// Upper-tail critical value of the chi-square distribution with `dof` degrees of freedom.
inline double chi_square_critical(double dof, double alpha) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

}  // namespace optrng::special
