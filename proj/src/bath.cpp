#include "drivenbath/bath.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drivenbath {

DebyeSpec DebyeSpec::from_cutoff(double omega_debye, double coupling,
                                 double charge_mean, double mass_mean) {
    if (!(omega_debye > 0.0))
        throw std::invalid_argument("DebyeSpec: omega_debye must be > 0");
    return DebyeSpec{omega_debye, 9.0 / (omega_debye * omega_debye * omega_debye),
                     coupling, charge_mean, mass_mean};
}

DebyeSpec DebyeSpec::from_prefactor(double prefactor, double coupling,
                                    double charge_mean, double mass_mean) {
    if (!(prefactor > 0.0))
        throw std::invalid_argument("DebyeSpec: prefactor must be > 0");
    return DebyeSpec{std::cbrt(9.0 / prefactor), prefactor, coupling, charge_mean,
                     mass_mean};
}

BathSpec::BathSpec(std::vector<OscillatorMode> modes) : modes_(std::move(modes)) {
    validate();
}

BathSpec::BathSpec(std::vector<OscillatorMode> modes, const DebyeSpec& origin)
    : modes_(std::move(modes)), origin_(origin) {
    validate();
}

void BathSpec::validate() const {
    if (modes_.empty()) throw std::invalid_argument("BathSpec: empty mode list");
    double prev = 0.0;
    for (const auto& m : modes_) {
        if (!(m.mass > 0.0)) throw std::invalid_argument("BathSpec: mass must be > 0");
        if (!(m.omega > 0.0)) throw std::invalid_argument("BathSpec: omega must be > 0");
        if (!(m.coupling >= 0.0))
            throw std::invalid_argument("BathSpec: coupling must be >= 0");
        if (!(m.omega > prev))
            throw std::invalid_argument("BathSpec: frequencies must be strictly increasing");
        prev = m.omega;
    }
}

BathSpec build_debye_bath(const DebyeSpec& spec, std::size_t n_modes) {
    if (n_modes == 0) throw std::invalid_argument("build_debye_bath: n_modes must be >= 1");
    if (!(spec.omega_debye > 0.0))
        throw std::invalid_argument("build_debye_bath: omega_debye must be > 0");
    if (!(spec.prefactor > 0.0))
        throw std::invalid_argument("build_debye_bath: prefactor must be > 0");

    // Every kernel sum folds rho(omega)/omega^2 = A_D d omega, so the cells are
    // taken equal in that folded measure (uniform in omega for the Debye form)
    // with midpoint nodes. The exact cell integral A_D * d_omega goes into the
    // per-mode weight, which keeps K(0) and M(0) at their continuum values for
    // every n_modes and makes K(t), M(t) converge as (t * d_omega)^2 / 24.
    std::vector<OscillatorMode> modes;
    modes.reserve(n_modes);
    const double cell = spec.omega_debye / static_cast<double>(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double omega = (static_cast<double>(k) + 0.5) * cell;
        const double weight = spec.prefactor * cell * omega * omega;
        modes.push_back(OscillatorMode{spec.mass_mean * weight, omega, spec.coupling,
                                       spec.charge_mean * weight});
    }
    return BathSpec(std::move(modes), spec);
}

double memory_kernel(const BathSpec& bath, double t) {
    if (!std::isfinite(t)) throw std::domain_error("memory_kernel: non-finite t");
    if (t < 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& m : bath.modes()) {
        const double nu2 = m.coupling * m.coupling;
        sum += m.mass * nu2 * nu2 / (m.omega * m.omega) * std::cos(m.omega * t);
    }
    return sum;
}

double delay_kernel(const BathSpec& bath, double t) {
    if (!std::isfinite(t)) throw std::domain_error("delay_kernel: non-finite t");
    double sum = 0.0;
    for (const auto& m : bath.modes()) {
        const double nu2 = m.coupling * m.coupling;
        sum += m.charge * nu2 / (m.omega * m.omega) * std::cos(m.omega * t);
    }
    return sum;
}

KernelTable kernel_table(const BathSpec& bath, double t_max, double dt) {
    if (!(t_max >= 0.0)) throw std::invalid_argument("kernel_table: t_max must be >= 0");
    const double dt_max = M_PI / (10.0 * bath.max_frequency());
    if (!(dt > 0.0) || dt > dt_max) {
        std::ostringstream msg;
        msg << "kernel_table: grid under-resolves the fastest mode; need 0 < dt <= "
            << dt_max << " s";
        throw std::invalid_argument(msg.str());
    }
    KernelTable table;
    table.dt = dt;
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
    table.time.reserve(n);
    table.memory.reserve(n);
    table.delay.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        table.time.push_back(t);
        table.memory.push_back(memory_kernel(bath, t));
        table.delay.push_back(delay_kernel(bath, t));
    }
    return table;
}

double memory_kernel_transform(const DebyeSpec& spec, double omega) {
    if (!(omega >= 0.0))
        throw std::domain_error("memory_kernel_transform: omega must be >= 0");
    const double nu2 = spec.coupling * spec.coupling;
    const double plateau = spec.mass_mean * nu2 * nu2 * spec.prefactor * M_PI_2;
    if (omega < spec.omega_debye) return plateau;
    if (omega == spec.omega_debye) return 0.5 * plateau;
    return 0.0;
}

double memory_kernel_transform(const BathSpec& bath, double omega) {
    if (!bath.debye_origin())
        throw std::logic_error(
            "memory_kernel_transform: discrete bath has a line spectrum; the transform "
            "is only defined through a Debye continuum provenance");
    return memory_kernel_transform(*bath.debye_origin(), omega);
}

double driven_mode_response(double omega, double big_omega, double t) {
    if (!std::isfinite(omega) || !std::isfinite(big_omega) || !std::isfinite(t))
        throw std::domain_error("driven_mode_response: non-finite argument");
    const double delta = omega - big_omega;
    if (std::fabs(delta) < 1e-9 * std::fabs(big_omega)) {
        // removable singularity: limit of the quotient at omega = Omega
        return (std::sin(big_omega * t) + big_omega * t * std::cos(big_omega * t)) /
               (2.0 * big_omega);
    }
    // (omega sin(omega t) - Omega sin(Omega t)) / (omega^2 - Omega^2) rewritten as
    // [sin(omega t) + 2 Omega cos((omega+Omega)t/2) sinc(delta t/2)] / (omega + Omega)
    // to avoid cancellation near resonance.
    const double z = 0.5 * delta * t;
    double sinc; // sin(z)/delta
    if (std::fabs(z) < 1e-8)
        sinc = 0.5 * t * (1.0 - z * z / 6.0);
    else
        sinc = std::sin(z) / delta;
    return (std::sin(omega * t) +
            2.0 * big_omega * std::cos(0.5 * (omega + big_omega) * t) * sinc) /
           (omega + big_omega);
}

namespace {

void append_full_precision(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

} // namespace

void write_bath_csv(const BathSpec& bath, std::ostream& out) {
    out << "mass_kg,omega_rad_s,nu_rad_s,charge_C\n";
    for (const auto& m : bath.modes()) {
        std::string line;
        append_full_precision(line, m.mass);
        line += ',';
        append_full_precision(line, m.omega);
        line += ',';
        append_full_precision(line, m.coupling);
        line += ',';
        append_full_precision(line, m.charge);
        out << line << '\n';
    }
}

void write_bath_csv(const BathSpec& bath, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_bath_csv: cannot open " + path);
    write_bath_csv(bath, out);
}

BathSpec read_bath_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("read_bath_csv: empty input");
    if (line == "mass_kg,omega_rad_s,nu_rad_s,charge_C\r")
        line.pop_back();
    if (line != "mass_kg,omega_rad_s,nu_rad_s,charge_C")
        throw std::invalid_argument("read_bath_csv: unexpected header '" + line + "'");
    std::vector<OscillatorMode> modes;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        OscillatorMode m{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &m.mass, &m.omega, &m.coupling,
                        &m.charge) != 4)
            throw std::invalid_argument("read_bath_csv: malformed row '" + line + "'");
        modes.push_back(m);
    }
    return BathSpec(std::move(modes));
}

BathSpec read_bath_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_bath_csv: cannot open " + path);
    return read_bath_csv(in);
}

} // namespace drivenbath
