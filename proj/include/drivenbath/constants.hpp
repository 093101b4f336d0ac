#pragma once

#include <stdexcept>

namespace drivenbath {

/// Thermal state descriptor shared by every formula that carries a coth factor.
///
/// T = 0 is an explicit variant rather than a tiny float, so the quantum
/// ground-state limit (coth -> 1, occupation -> 0) is exact.
class ThermalContext {
public:
    // CODATA / exact-SI values, fixed on purpose.
    static constexpr double hbar = 1.054571817e-34;     // J s
    static constexpr double k_boltzmann = 1.380649e-23; // J / K

    static ThermalContext zero_temperature() { return ThermalContext(0.0, true); }

    /// temperature > 0 in kelvin; exactly 0 maps to the zero-temperature variant.
    static ThermalContext kelvin(double temperature) {
        if (!(temperature >= 0.0))
            throw std::domain_error("ThermalContext: temperature_K must be >= 0");
        if (temperature == 0.0) return zero_temperature();
        return ThermalContext(temperature, false);
    }

    bool is_zero() const { return zero_; }
    double temperature() const { return temperature_; } // kelvin, 0 in the zero limit

private:
    ThermalContext(double t, bool z) : temperature_(t), zero_(z) {}

    double temperature_;
    bool zero_;
};

} // namespace drivenbath
