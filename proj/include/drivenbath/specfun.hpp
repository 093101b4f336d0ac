#pragma once

#include "drivenbath/constants.hpp"

namespace drivenbath {

/// Si(x) = integral of sin(t)/t over [0, x]. Odd in x.
/// Power series for |x| < 8, continued fraction of E1(-ix) beyond;
/// the two branches agree to ~1e-13 at the seam.
double sine_integral(double x);

/// Ci(x) = -integral of cos(t)/t over [x, inf), x > 0.
double cosine_integral(double x);

/// coth(hbar * omega / 2 kB T); exactly 1 in the T = 0 limit.
double thermal_factor(double omega, const ThermalContext& ctx);

/// Bose-Einstein occupation nbar = (thermal_factor - 1) / 2.
/// 2 * bose_occupation + 1 reproduces thermal_factor bit-for-bit.
double bose_occupation(double omega, const ThermalContext& ctx);

} // namespace drivenbath
