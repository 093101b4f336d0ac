#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace drivenbath {

/// One charged harmonic oscillator of the bath. Couplings are in units of
/// frequency, so the memory kernel weight of a mode is mass * coupling^4 / omega^2.
struct OscillatorMode {
    double mass;     // kg
    double omega;    // rad/s
    double coupling; // nu, rad/s
    double charge;   // C
};

/// Debye continuum description: density of states rho(omega) = prefactor * omega^2
/// up to the cutoff, with a constant electron damping rate nu across the band.
struct DebyeSpec {
    double omega_debye; // rad/s
    double prefactor;   // A_D, s^3
    double coupling;    // nu, rad/s
    double charge_mean; // qbar, C
    double mass_mean;   // mbar, kg

    /// prefactor derived as 9 / omega_debye^3.
    static DebyeSpec from_cutoff(double omega_debye, double coupling,
                                 double charge_mean, double mass_mean);

    /// omega_debye derived as (9 / prefactor)^(1/3). Material tables quote the
    /// prefactor directly, so the printed value is stored verbatim.
    static DebyeSpec from_prefactor(double prefactor, double coupling,
                                    double charge_mean, double mass_mean);
};

/// Ordered mode list, optionally remembering the continuum it was discretized from.
class BathSpec {
public:
    explicit BathSpec(std::vector<OscillatorMode> modes);
    BathSpec(std::vector<OscillatorMode> modes, const DebyeSpec& origin);

    const std::vector<OscillatorMode>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    const std::optional<DebyeSpec>& debye_origin() const { return origin_; }

    double min_frequency() const { return modes_.front().omega; }
    double max_frequency() const { return modes_.back().omega; }

private:
    void validate() const;

    std::vector<OscillatorMode> modes_;
    std::optional<DebyeSpec> origin_;
};

/// Sampled K(t) and M(t) on a uniform grid starting at 0.
struct KernelTable {
    std::vector<double> time;   // s
    std::vector<double> memory; // K, kg/s^2
    std::vector<double> delay;  // M, C
    double dt = 0.0;
};

/// Discretize the Debye continuum into n_modes oscillators.
///
/// Every kernel sum carries the folded measure rho(omega)/omega^2 d omega
/// (constant for the Debye form), so the band is split into cells of equal
/// folded measure with one mode at each cell midpoint, and the exact cell
/// integral is folded into the mode weight:
///
///   mass_a   = mass_mean   * prefactor * d_omega_cell * omega_a^2
///   charge_a = charge_mean * prefactor * d_omega_cell * omega_a^2
///
/// so that K(0) = mbar nu^4 A_D omega_D and M(0) = qbar nu^2 A_D omega_D hold
/// exactly for every n_modes, and K(t), M(t) converge to the continuum kernels
/// as the cell width shrinks.
BathSpec build_debye_bath(const DebyeSpec& spec, std::size_t n_modes);

/// K(t) = sum_a m_a nu_a^4 / omega_a^2 * cos(omega_a t).
/// Returns 0 for t < 0 (the causal theta(t) factor), by definition not an error.
double memory_kernel(const BathSpec& bath, double t);

/// M(t) = sum_a q_a nu_a^2 / omega_a^2 * cos(omega_a t).
/// Temperature-independent; depends on the bath parameters only.
double delay_kernel(const BathSpec& bath, double t);

/// Tabulate both kernels on [0, t_max]. Requires dt <= pi / (10 * omega_max)
/// so the fastest mode is resolved.
KernelTable kernel_table(const BathSpec& bath, double t_max, double dt);

/// One-sided cosine transform of the continuum memory kernel:
/// flat at mbar nu^4 A_D pi/2 inside the Debye band, 0 above the cutoff
/// (half the plateau exactly at the cutoff).
double memory_kernel_transform(const DebyeSpec& spec, double omega);

/// Same transform through a discretized bath; requires Debye provenance.
/// A bare mode list has a line spectrum and no broadening convention is imposed.
double memory_kernel_transform(const BathSpec& bath, double omega);

/// overlap(omega, Omega, t) = integral of cos(omega (t-s)) cos(Omega s) over [0, t]
///   = (omega sin(omega t) - Omega sin(Omega t)) / (omega^2 - Omega^2),
/// evaluated in a cancellation-free form; at omega = Omega it continues to
/// (sin(Omega t) + Omega t cos(Omega t)) / (2 Omega).
double driven_mode_response(double omega, double big_omega, double t);

void write_bath_csv(const BathSpec& bath, std::ostream& out);
void write_bath_csv(const BathSpec& bath, const std::string& path);
BathSpec read_bath_csv(std::istream& in);
BathSpec read_bath_csv(const std::string& path);

} // namespace drivenbath
