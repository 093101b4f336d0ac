#include "drivenbath/circuit.hpp"

#include "drivenbath/noise.hpp"
#include "drivenbath/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drivenbath {

CircuitParams::CircuitParams(double q, double n, double area, double mass)
    : carrier_charge(q), carrier_density(n), cross_section(area), carrier_mass(mass) {
    if (!(lambda() > 0.0))
        throw std::invalid_argument("CircuitParams: lambda = q n A must be > 0");
    if (!(mass > 0.0))
        throw std::invalid_argument("CircuitParams: carrier mass must be > 0");
}

double MaterialPreset::omega_debye() const {
    if (!(debye_prefactor > 0.0))
        throw std::invalid_argument("MaterialPreset: prefactor must be > 0");
    return std::cbrt(9.0 / debye_prefactor);
}

MaterialPreset MaterialPreset::copper() {
    return MaterialPreset{"copper", 6.72e-41, 4e13, 1.602176634e-19};
}

DebyeSpec to_debye_spec(const MaterialPreset& preset, double mass_mean) {
    DebyeSpec spec = DebyeSpec::from_prefactor(preset.debye_prefactor,
                                               preset.damping_rate, preset.charge_mean,
                                               mass_mean);
    return spec;
}

Ohms resistance(const DebyeSpec& spec, const CircuitParams& circuit, double omega) {
    // no DC limit is defined for the band resistance
    if (!(omega > 0.0))
        throw std::domain_error("resistance: requires omega > 0");
    const double lambda = circuit.lambda();
    return Ohms{circuit.carrier_mass * memory_kernel_transform(spec, omega) /
                (lambda * lambda)};
}

std::complex<double> circuit_response(const CircuitParams& circuit, Ohms resistance,
                                      double voltage, double noise_voltage,
                                      double omega) {
    if (!(resistance.value >= 0.0))
        throw std::domain_error("circuit_response: resistance must be >= 0");
    if (resistance.value == 0.0 && omega == 0.0)
        throw std::domain_error("circuit_response: singular response at R = 0, omega = 0");
    return (voltage + noise_voltage) /
           std::complex<double>(resistance.value, omega * circuit.inductance());
}

VoltsSquared voltage_noise_correlation(const BathSpec& bath, const ThermalContext& ctx,
                                       const CircuitParams& circuit,
                                       const FieldProtocol& drive, double t,
                                       double t_prime) {
    if (!(t >= 0.0) || !(t_prime >= 0.0))
        throw std::domain_error("voltage_noise_correlation: requires t, t' >= 0");
    const double lambda2 = circuit.lambda() * circuit.lambda();
    const double equilibrium = analytic_sym_correlation(bath, ctx, t, t_prime) / lambda2;
    // (1/q^2) D_V(t) D_V(t') with D_V = (q/lambda) D reduces to D D' / lambda^2
    const double driven =
        drive_shift(bath, drive, t) * drive_shift(bath, drive, t_prime) / lambda2;
    return VoltsSquared{equilibrium + driven};
}

namespace {

// (bandwidth / 4 pi) * integral over [0, 2 pi / bandwidth] of d(t+tau) d(t) dt,
// d the unit drive shift; returned in C^2 (the caller applies E0^2/lambda^2).
double driven_window_average(const BathSpec& bath, double big_omega, double bandwidth,
                             double tau, double abs_tol) {
    const double window = 2.0 * M_PI / bandwidth;
    const auto integrand = [&](double t) {
        return unit_drive_shift(bath, big_omega, t + tau) *
               unit_drive_shift(bath, big_omega, t);
    };
    const double integral =
        integrate_adaptive(integrand, 0.0, window, 1e-8, abs_tol, 200000);
    return bandwidth / (4.0 * M_PI) * integral;
}

} // namespace

SpectrumResult noise_spectrum(const BathSpec& bath, const ThermalContext& ctx,
                              const CircuitParams& circuit, const FieldProtocol& drive,
                              double bandwidth, std::span<const double> lags,
                              SpectrumMethod method) {
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("noise_spectrum: bandwidth must be > 0");
    (void)method; // quadrature is the only evaluation path

    SpectrumResult result;
    result.bandwidth = bandwidth;
    result.provenance = "quadrature";
    result.lag.assign(lags.begin(), lags.end());
    result.equilibrium.reserve(lags.size());
    result.driven.reserve(lags.size());

    const double lambda2 = circuit.lambda() * circuit.lambda();
    const double drive_scale =
        drive.amplitude * drive.amplitude / lambda2; // E0^2 / lambda^2

    // tau = 0 integral is positive definite and sets the absolute floor for
    // the oscillatory lags.
    double abs_floor = 0.0;
    if (drive.amplitude > 0.0)
        abs_floor = 1e-8 * std::fabs(driven_window_average(bath, drive.omega, bandwidth,
                                                           0.0, 0.0)) +
                    1e-300;

    for (const double tau : lags) {
        result.equilibrium.push_back(analytic_sym_correlation(bath, ctx, tau, 0.0) /
                                     lambda2);
        if (drive.amplitude == 0.0) {
            result.driven.push_back(0.0);
        } else {
            result.driven.push_back(
                drive_scale *
                driven_window_average(bath, drive.omega, bandwidth, tau, abs_floor));
        }
    }
    return result;
}

double debye_response_integral(const DebyeSpec& spec, double big_omega, double t,
                               ResponseMethod method) {
    if (!(big_omega > 0.0) || !(big_omega < spec.omega_debye))
        throw std::domain_error(
            "debye_response_integral: requires 0 < Omega < omega_debye");
    if (method == ResponseMethod::asymptotic) return M_PI_2 * std::cos(big_omega * t);
    const auto integrand = [&](double omega) {
        return driven_mode_response(omega, big_omega, t);
    };
    return integrate_adaptive(integrand, 0.0, spec.omega_debye, 1e-9, 1e-12, 200000);
}

VoltsSquared driven_bath_spectrum_closed(const MaterialPreset& material, double bandwidth,
                                         double big_omega, double tau,
                                         double drive_group_v2) {
    const double nu2 = material.damping_rate * material.damping_rate;
    const double pi3 = M_PI * M_PI * M_PI;
    return VoltsSquared{pi3 / 8.0 * material.debye_prefactor * material.debye_prefactor *
                        nu2 * nu2 * bandwidth * big_omega * std::cos(big_omega * tau) *
                        drive_group_v2};
}

VoltsSquared driven_bath_spectrum_closed(const MaterialPreset& material,
                                         const CircuitParams& circuit, double bandwidth,
                                         double big_omega, double tau, double e0) {
    const double lambda = circuit.lambda();
    const double group = material.charge_mean * material.charge_mean * e0 * e0 /
                         (lambda * lambda);
    return driven_bath_spectrum_closed(material, bandwidth, big_omega, tau, group);
}

VoltsSquared driven_bath_spectrum_window_closed(const MaterialPreset& material,
                                                double big_omega, double tau,
                                                double drive_group_v2) {
    const double nu2 = material.damping_rate * material.damping_rate;
    return VoltsSquared{M_PI * M_PI / 16.0 * material.debye_prefactor *
                        material.debye_prefactor * nu2 * nu2 * big_omega * big_omega *
                        std::cos(big_omega * tau) * drive_group_v2};
}

VoltsSquared averaged_driven_noise(const MaterialPreset& material, double bandwidth,
                                   double big_omega, double window,
                                   double drive_group_v2) {
    if (!(window > 0.0))
        throw std::invalid_argument("averaged_driven_noise: window must be > 0");
    const double nu2 = material.damping_rate * material.damping_rate;
    const double pi3 = M_PI * M_PI * M_PI;
    return VoltsSquared{pi3 / 8.0 * material.debye_prefactor * material.debye_prefactor *
                        nu2 * nu2 * bandwidth * std::sin(big_omega * window) / window *
                        drive_group_v2};
}

VoltsSquared averaged_driven_noise(const MaterialPreset& material,
                                   const CircuitParams& circuit, double bandwidth,
                                   double big_omega, double window, double e0) {
    const double lambda = circuit.lambda();
    const double group = material.charge_mean * material.charge_mean * e0 * e0 /
                         (lambda * lambda);
    return averaged_driven_noise(material, bandwidth, big_omega, window, group);
}

VoltsSquaredPerHz classical_nyquist_level(Ohms resistance, const ThermalContext& ctx) {
    if (!(resistance.value >= 0.0))
        throw std::domain_error("classical_nyquist_level: resistance must be >= 0");
    if (ctx.is_zero())
        throw std::domain_error("classical_nyquist_level: requires T > 0");
    return VoltsSquaredPerHz{4.0 * resistance.value * ThermalContext::k_boltzmann *
                             ctx.temperature()};
}

CopperReport copper_estimate() {
    CopperReport report;
    report.material = MaterialPreset::copper();
    report.big_omega = 1e12;
    report.bandwidth = 1e12;
    report.drive_group_v2 = 1.0;
    report.bath_modes = 512;

    report.closed_form_tau0 = driven_bath_spectrum_closed(
        report.material, report.bandwidth, report.big_omega, 0.0, report.drive_group_v2);
    report.window_closed_form_tau0 = driven_bath_spectrum_window_closed(
        report.material, report.big_omega, 0.0, report.drive_group_v2);

    // quadrature reference through a discretized bath; the pinned drive group
    // replaces E0^2/lambda^2, so the mode sum is normalized by qbar^2
    const DebyeSpec spec = to_debye_spec(report.material, kCopperIonMass);
    const BathSpec bath = build_debye_bath(spec, report.bath_modes);
    const double raw = driven_window_average(bath, report.big_omega, report.bandwidth,
                                             0.0, 0.0); // C^2
    report.quadrature_tau0 = VoltsSquared{
        raw / (report.material.charge_mean * report.material.charge_mean) *
        report.drive_group_v2};
    report.quadrature_to_closed_ratio =
        report.quadrature_tau0.value / report.closed_form_tau0.value;

    // averaging window ~1 s aligned to a drive quarter-period, so that
    // sin(Omega T) = 1 and sin(Omega T)/T = 1 per second
    const double k = std::round((report.big_omega - M_PI_2) / (2.0 * M_PI));
    report.averaging_window = (2.0 * M_PI * k + M_PI_2) / report.big_omega;
    report.averaged = averaged_driven_noise(report.material, report.bandwidth,
                                            report.big_omega, report.averaging_window,
                                            report.drive_group_v2);
    report.rms_volts = std::sqrt(report.averaged.value);

    report.ratio_vs_reference_s = report.averaged.value / report.reference_s_v2;
    report.ratio_vs_reference_rms = report.rms_volts / report.reference_rms_v;
    return report;
}

void print_report(const CopperReport& report, std::ostream& out) {
    char buf[256];
    out << "driven-bath noise estimate for " << report.material.name << "\n";
    std::snprintf(buf, sizeof(buf),
                  "  inputs: A_D = %.6g s^3, nu = %.6g 1/s, Omega = %.6g rad/s, "
                  "bandwidth = %.6g Hz\n",
                  report.material.debye_prefactor, report.material.damping_rate,
                  report.big_omega, report.bandwidth);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "  drive group qbar^2 E0^2 / lambda^2 = %.6g, read as V^2 here "
                  "(often quoted as a voltage)\n",
                  report.drive_group_v2);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "  closed form (pi^3/8 df Omega) at tau = 0:   %.6e V^2\n",
                  report.closed_form_tau0.value);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "  window-average closed form (pi^2/16 Omega^2): %.6e V^2\n",
                  report.window_closed_form_tau0.value);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "  quadrature reference (N = %zu modes):       %.6e V^2\n",
                  report.bath_modes, report.quadrature_tau0.value);
    out << buf;
    std::snprintf(buf, sizeof(buf), "  quadrature / closed-form factor:            %.6g\n",
                  report.quadrature_to_closed_ratio);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "  time average over T = %.9g s (sin(Omega T)/T = %.6g 1/s): %.6e V^2\n",
                  report.averaging_window,
                  std::sin(report.big_omega * report.averaging_window) /
                      report.averaging_window,
                  report.averaged.value);
    out << buf;
    std::snprintf(buf, sizeof(buf), "  rms voltage: %.6e V\n", report.rms_volts);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "  vs reference %.1e V^2: ratio %.6g (%.2f orders of magnitude)\n",
                  report.reference_s_v2, report.ratio_vs_reference_s,
                  std::fabs(std::log10(report.ratio_vs_reference_s)));
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "  vs reference rms %.1e V: ratio %.6g (%.2f orders of magnitude)\n",
                  report.reference_rms_v, report.ratio_vs_reference_rms,
                  std::fabs(std::log10(report.ratio_vs_reference_rms)));
    out << buf;
}

std::vector<MaterialPreset> read_material_presets(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("read_material_presets: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "name,A_D_s3,nu_per_s,qbar_C")
        throw std::invalid_argument("read_material_presets: unexpected header '" + line +
                                    "'");
    std::vector<MaterialPreset> presets;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        MaterialPreset p;
        std::string field;
        if (!std::getline(row, p.name, ',') || p.name.empty())
            throw std::invalid_argument("read_material_presets: malformed row '" + line +
                                        "'");
        double* const targets[3] = {&p.debye_prefactor, &p.damping_rate, &p.charge_mean};
        for (double* target : targets) {
            if (!std::getline(row, field, ','))
                throw std::invalid_argument("read_material_presets: malformed row '" +
                                            line + "'");
            *target = std::stod(field);
        }
        if (!(p.debye_prefactor > 0.0))
            throw std::invalid_argument("read_material_presets: A_D_s3 must be > 0 in '" +
                                        line + "'");
        presets.push_back(std::move(p));
    }
    return presets;
}

std::vector<MaterialPreset> read_material_presets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_material_presets: cannot open " + path);
    return read_material_presets(in);
}

void write_spectrum_csv(const SpectrumResult& spectrum, std::ostream& out) {
    out << "tau_s,equilibrium_V2,driven_V2,total_V2\n";
    char buf[160];
    for (std::size_t i = 0; i < spectrum.lag.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", spectrum.lag[i],
                      spectrum.equilibrium[i], spectrum.driven[i], spectrum.total(i));
        out << buf;
    }
}

void write_spectrum_csv(const SpectrumResult& spectrum, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_spectrum_csv: cannot open " + path);
    write_spectrum_csv(spectrum, out);
}

} // namespace drivenbath
