#pragma once

namespace omckit {

/// Real part of the Faddeeva function w(z) = exp(-z^2) erfc(-iz) for
/// z = x + iy with y >= 0. Humlicek's four-region rational approximation,
/// relative error < 1e-4 over the right half plane. Thread safe (no cached
/// state); the Voigt profile is K(x,y)/(sigma*sqrt(2*pi)).
double faddeeva_re(double x, double y);

/// Upper incomplete gamma function Gamma(alpha, z), unregularized.
/// Series for z < alpha+1, Lentz continued fraction otherwise.
/// alpha > 0, z >= 0.
double upper_incomplete_gamma(double alpha, double z);

/// Riemann zeta(a) for a > 1 by Euler-Maclaurin summation.
double riemann_zeta(double a);

}  // namespace omckit
