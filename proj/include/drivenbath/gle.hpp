#pragma once

#include "drivenbath/bath.hpp"
#include "drivenbath/field.hpp"
#include "drivenbath/noise.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace drivenbath {

/// Tagged particle. The microscopic model drives the particle with
/// charge * E(t) while the reduced equation uses drive_charge * E(t);
/// drive_charge defaults to charge and set to charge + delta_q(bath) makes the
/// two descriptions exactly equivalent (the bath-mediated charge renormalization).
struct ParticleParams {
    double mass;         // kg
    double charge;       // q, C
    double drive_charge; // q_eff, C

    ParticleParams(double m, double q) : ParticleParams(m, q, q) {}
    ParticleParams(double m, double q, double q_eff);
};

/// External potential: free, harmonic (V = 1/2 m omega0^2 x^2), or a tabulated
/// force -dV/dx interpolated linearly (held constant outside the grid).
class Potential {
public:
    enum class Kind { free_particle, harmonic, tabulated };

    static Potential free_particle();
    static Potential harmonic(double omega0);
    static Potential tabulated_force(std::vector<double> grid, std::vector<double> force);

    Kind kind() const { return kind_; }
    double force(double x, double mass) const;  // -dV/dx, N
    double energy(double x, double mass) const; // V(x), J

private:
    Potential(Kind k) : kind_(k) {}

    Kind kind_;
    double omega0_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> force_;
    std::vector<double> potential_; // cumulative -integral of force over grid_
};

struct Trajectory {
    std::vector<double> time;     // s
    std::vector<double> position; // m
    std::vector<double> velocity; // m/s
    // per-mode bath trajectories, recorded by the microscopic integrator on request
    std::vector<std::vector<double>> bath_position; // [mode][step]
    std::vector<std::vector<double>> bath_velocity;
};

/// Integrate m x'' + dV/dx = q_eff E(t) + noise(t) - conv(K, x') on the given
/// uniform grid (grid[0] must be 0 and dt must satisfy the kernel_table
/// resolution rule). Velocity-Verlet stepping, second-order accurate; the
/// friction convolution is the trapezoidal quadrature of the stored velocity
/// history, accumulated per bath mode in O(steps x modes).
/// The noise path (already including any bath drive shift) must live on the
/// same grid.
Trajectory integrate_gle(const ParticleParams& particle, const Potential& potential,
                         const BathSpec& bath, const NoisePath& noise,
                         const FieldProtocol& field, std::span<const double> grid,
                         double x0, double v0);

struct MicroscopicOptions {
    bool include_counterterm = true;
    bool record_bath = false;
};

/// Integrate the full particle + bath system with a fixed-step classic RK4:
///   m x''   = -dV/dx + sum_a m_a nu_a^2 x_a + q E(t) [- K(0) x when the
///             counterterm is on]
///   x_a''   = -omega_a^2 x_a + nu_a^2 x + (q_a / m_a) E(t)
/// This is the ground-truth oracle for integrate_gle.
/// Quantum-sampled initial states are only accepted with free or harmonic
/// potentials, where sampled trajectories carry the same statistics as
/// symmetrized operator averages; anharmonic potentials are rejected.
Trajectory integrate_microscopic(const ParticleParams& particle,
                                 const Potential& potential, const BathSpec& bath,
                                 const BathInitialState& init, const FieldProtocol& field,
                                 std::span<const double> grid, double x0, double v0,
                                 const MicroscopicOptions& options = {});

/// Bath-mediated charge renormalization delta_q = M(0) = sum_a q_a nu_a^2 / omega_a^2.
double delta_q(const BathSpec& bath);

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
void write_trajectory_csv(const Trajectory& trajectory, const std::string& path);

} // namespace drivenbath
