#pragma once

#include "drivenbath/bath.hpp"
#include "drivenbath/constants.hpp"
#include "drivenbath/field.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace drivenbath {

enum class SamplingRegime { classical, quantum_wigner };
enum class NoiseKind { xi, eta };
enum class AveragingMode { ensemble, time_average };

/// Snapshot of the bath phase space at t = 0, one (x, p) pair per mode.
struct BathInitialState {
    std::vector<double> position; // m
    std::vector<double> momentum; // kg m/s
    SamplingRegime regime;
    std::uint64_t seed; // recorded for reproducibility
};

/// Noise force sampled on a uniform time grid.
struct NoisePath {
    std::vector<double> time;  // s
    std::vector<double> value; // N
    NoiseKind kind;
};

/// Correlation vs lag with its statistical error.
struct CorrelationEstimate {
    std::vector<double> lag;            // s
    std::vector<double> mean;           // N^2
    std::vector<double> standard_error; // N^2
    std::size_t count = 0;              // realizations (ensemble) or window samples
    AveragingMode mode = AveragingMode::ensemble;
};

/// Two-time correlation matrix estimated over an ensemble (row-major t x t').
struct TwoTimeCorrelation {
    std::vector<double> t;       // s
    std::vector<double> t_prime; // s
    std::vector<double> mean;
    std::vector<double> standard_error;
    std::size_t count = 0;
};

/// Pointwise ensemble mean of a path family.
struct MeanPathEstimate {
    std::vector<double> time;
    std::vector<double> mean;
    std::vector<double> standard_error;
    std::size_t count = 0;
};

/// Draw independent Gaussian (x_a, p_a) for every mode of the bath in thermal
/// equilibrium.
///
/// Covariances carry the anticommutator normalization used by all correlation
/// formulas in this library: products of sampled quantities estimate
/// <{A, B}> = <AB + BA>, i.e. the sampled second moments are twice the
/// physical (Wigner / equipartition) ones:
///
///   classical:       Var[x_a] = 2 kB T / (m_a omega_a^2),  Var[p_a] = 2 m_a kB T
///   quantum_wigner:  Var[x_a] = (hbar / m_a omega_a) coth(hbar omega_a / 2 kB T),
///                    Var[p_a] = m_a hbar omega_a coth(hbar omega_a / 2 kB T)
///
/// With this convention the plain ensemble product of xi paths converges to
/// analytic_sym_correlation, and its classical limit to 2 kB T K(t - t').
/// Classical T = 0 means a bath at rest (all zeros, deterministic).
BathInitialState sample_thermal_state(const BathSpec& bath, const ThermalContext& ctx,
                                      SamplingRegime regime, std::uint64_t seed);

/// xi(t) = sum_a m_a nu_a^2 [x_a(0) cos(omega_a t) + p_a(0)/(m_a omega_a) sin(omega_a t)].
NoisePath xi_path(const BathSpec& bath, const BathInitialState& init,
                  std::span<const double> grid);

/// Deterministic drive shift D(t) = integral of M(t - s) dE/ds over [0, t]
///   = E0 Omega sum_a q_a nu_a^2/omega_a^2 *
///     (omega_a sin(omega_a t) - Omega sin(Omega t)) / (omega_a^2 - Omega^2),
/// with the resonant mode evaluated by its analytic limit. Returns 0 for t <= 0.
double drive_shift(const BathSpec& bath, const FieldProtocol& field, double t);

/// Same, per unit field amplitude (D / E0; well defined also when E0 = 0).
double unit_drive_shift(const BathSpec& bath, double big_omega, double t);

/// eta(t) = xi(t) - D(t) pointwise on the same grid.
NoisePath eta_path(const NoisePath& xi, const BathSpec& bath, const FieldProtocol& field,
                   std::span<const double> grid);

/// Equilibrium anticommutator correlation
///   C(t, t') = sum_a (hbar m_a nu_a^4 / omega_a) coth(hbar omega_a / 2 kB T)
///              cos(omega_a (t - t')).
/// Stationary: depends on t, t' through t - t' only.
double analytic_sym_correlation(const BathSpec& bath, const ThermalContext& ctx,
                                double t, double t_prime);

/// Driven-bath correlation C(t, t') + D(t) D(t').
double analytic_eta_correlation(const BathSpec& bath, const ThermalContext& ctx,
                                const FieldProtocol& field, double t, double t_prime);

/// Correlation estimate at the given lag indices.
///
/// ensemble mode: averages A(t_ref) A(t_ref + lag) across paths at the fixed
/// reference index. time_average mode: takes exactly one path and evaluates
/// (1/T) integral A(t') A(t' + lag) dt' by the trapezoidal rule over the
/// window that all requested lags share; its standard error comes from 16
/// contiguous batch means.
CorrelationEstimate estimate_correlation(std::span<const NoisePath> paths,
                                         std::span<const std::size_t> lag_indices,
                                         AveragingMode mode,
                                         std::size_t reference_index = 0);

TwoTimeCorrelation estimate_two_time(std::span<const NoisePath> paths,
                                     std::span<const std::size_t> indices_t,
                                     std::span<const std::size_t> indices_t_prime);

MeanPathEstimate estimate_mean_path(std::span<const NoisePath> paths);

void write_correlation_csv(const CorrelationEstimate& estimate, std::ostream& out);
void write_correlation_csv(const CorrelationEstimate& estimate, const std::string& path);

} // namespace drivenbath
