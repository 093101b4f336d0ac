#include "drivenbath/specfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace drivenbath {

namespace {

constexpr double kSeriesLimit = 8.0;

// Si and Cin by direct power series, safe in double up to the seam
// (worst intermediate term ~4e2, so cancellation costs < 1e-13 absolute).
void si_cin_series(double x, double& si, double& cin) {
    const double x2 = x * x;

    double term = x; // x^(2k+1) / (2k+1)!
    double sum = x;  // k = 0 contribution, term / (2k+1) with 2k+1 = 1
    for (int k = 1; k < 64; ++k) {
        const double n = 2.0 * k;
        term *= -x2 / (n * (n + 1.0));
        const double contrib = term / (n + 1.0);
        sum += contrib;
        if (std::fabs(contrib) < 1e-18 * std::fabs(sum)) break;
    }
    si = sum;

    double cterm = x2 / 2.0; // (-1)^(k+1) x^(2k) / (2k)!, k = 1
    double csum = cterm / 2.0;
    for (int k = 2; k < 64; ++k) {
        const double n = 2.0 * k;
        cterm *= -x2 / ((n - 1.0) * n);
        const double contrib = cterm / n;
        csum += contrib;
        if (std::fabs(contrib) < 1e-18 * std::fabs(csum)) break;
    }
    cin = csum;
}

// E1(-ix) via the Lentz continued fraction; then
//   Ci(x) = -Re E1(-ix),  Si(x) = pi/2 - Im E1(-ix).
void si_ci_continued_fraction(double x, double& si, double& ci) {
    using cd = std::complex<double>;
    const cd z(0.0, -x);
    const double tiny = std::numeric_limits<double>::min() * 1e4;
    const double eps = std::numeric_limits<double>::epsilon();

    cd b = z + 1.0;
    cd c = cd(1.0 / tiny, 0.0);
    cd d = 1.0 / b;
    cd h = d;
    for (int k = 1; k < 400; ++k) {
        const double a = -static_cast<double>(k) * static_cast<double>(k);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const cd del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    // e^{-z} = e^{ix}
    const cd e1 = cd(std::cos(x), std::sin(x)) * h;
    ci = -e1.real();
    si = M_PI_2 - e1.imag();
}

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

} // namespace

double sine_integral(double x) {
    if (!std::isfinite(x)) throw std::domain_error("sine_integral: non-finite argument");
    const double ax = std::fabs(x);
    double si;
    if (ax < kSeriesLimit) {
        double cin;
        si_cin_series(ax, si, cin);
    } else {
        double ci;
        si_ci_continued_fraction(ax, si, ci);
    }
    return x < 0.0 ? -si : si;
}

double cosine_integral(double x) {
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("cosine_integral: requires finite x > 0");
    if (x < kSeriesLimit) {
        double si, cin;
        si_cin_series(x, si, cin);
        return kEulerGamma + std::log(x) - cin;
    }
    double si, ci;
    si_ci_continued_fraction(x, si, ci);
    return ci;
}

double thermal_factor(double omega, const ThermalContext& ctx) {
    if (!std::isfinite(omega) || omega <= 0.0)
        throw std::domain_error("thermal_factor: requires finite omega > 0");
    if (ctx.is_zero()) return 1.0;
    // coth(u) = 1 + 2/(e^{2u} - 1), 2u = hbar omega / kB T; expm1 keeps
    // the small-argument regime exact.
    const double two_u = ThermalContext::hbar * omega /
                         (ThermalContext::k_boltzmann * ctx.temperature());
    return 1.0 + 2.0 / std::expm1(two_u);
}

double bose_occupation(double omega, const ThermalContext& ctx) {
    if (!std::isfinite(omega) || omega <= 0.0)
        throw std::domain_error("bose_occupation: requires finite omega > 0");
    if (ctx.is_zero()) return 0.0;
    const double two_u = ThermalContext::hbar * omega /
                         (ThermalContext::k_boltzmann * ctx.temperature());
    return 1.0 / std::expm1(two_u);
}

} // namespace drivenbath
