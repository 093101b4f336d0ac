#pragma once

#include <cmath>
#include <stdexcept>

namespace drivenbath {

/// Switched-on sinusoidal drive: E(t) = 0 for t < 0, E0 sin(Omega t) for t >= 0.
struct FieldProtocol {
    double amplitude; // E0, V/m
    double omega;     // Omega, rad/s

    FieldProtocol(double e0, double loading_frequency)
        : amplitude(e0), omega(loading_frequency) {
        if (!(amplitude >= 0.0))
            throw std::invalid_argument("FieldProtocol: amplitude must be >= 0");
        if (!(omega > 0.0))
            throw std::invalid_argument("FieldProtocol: omega must be > 0");
    }

    static FieldProtocol off() { return FieldProtocol(0.0, 1.0); }
};

inline double field_value(const FieldProtocol& protocol, double t) {
    if (t < 0.0) return 0.0;
    return protocol.amplitude * std::sin(protocol.omega * t);
}

} // namespace drivenbath
