#pragma once

#include <functional>

namespace drivenbath {

/// Globally adaptive Gauss-Kronrod (7, 15) integration of f over [a, b].
/// The worst interval is bisected until the summed error estimate drops below
/// max(abs_tol, rel_tol * |integral|). Throws std::runtime_error when the
/// evaluation budget is exhausted without convergence.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol = 0.0,
                          std::size_t max_intervals = 20000);

} // namespace drivenbath
