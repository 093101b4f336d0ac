#include "drivenbath/gle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace drivenbath {

ParticleParams::ParticleParams(double m, double q, double q_eff)
    : mass(m), charge(q), drive_charge(q_eff) {
    if (!(mass > 0.0)) throw std::invalid_argument("ParticleParams: mass must be > 0");
}

Potential Potential::free_particle() { return Potential(Kind::free_particle); }

Potential Potential::harmonic(double omega0) {
    if (!(omega0 >= 0.0))
        throw std::invalid_argument("Potential: harmonic omega0 must be >= 0");
    Potential p(Kind::harmonic);
    p.omega0_ = omega0;
    return p;
}

Potential Potential::tabulated_force(std::vector<double> grid, std::vector<double> force) {
    if (grid.size() != force.size() || grid.size() < 2)
        throw std::invalid_argument("Potential: tabulated force needs matching grids, >= 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("Potential: tabulated grid must be strictly increasing");
    Potential p(Kind::tabulated);
    // V(x) = -integral of force, anchored at the first grid point
    p.potential_.resize(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        p.potential_[i] = p.potential_[i - 1] -
                          0.5 * (force[i] + force[i - 1]) * (grid[i] - grid[i - 1]);
    p.grid_ = std::move(grid);
    p.force_ = std::move(force);
    return p;
}

double Potential::force(double x, double mass) const {
    switch (kind_) {
    case Kind::free_particle:
        return 0.0;
    case Kind::harmonic:
        return -mass * omega0_ * omega0_ * x;
    case Kind::tabulated:
        break;
    }
    if (x <= grid_.front()) return force_.front();
    if (x >= grid_.back()) return force_.back();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    const double w = (x - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
    return force_[i - 1] + w * (force_[i] - force_[i - 1]);
}

double Potential::energy(double x, double mass) const {
    switch (kind_) {
    case Kind::free_particle:
        return 0.0;
    case Kind::harmonic:
        return 0.5 * mass * omega0_ * omega0_ * x * x;
    case Kind::tabulated:
        break;
    }
    if (x <= grid_.front())
        return potential_.front() - force_.front() * (x - grid_.front());
    if (x >= grid_.back())
        return potential_.back() - force_.back() * (x - grid_.back());
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    const double h = x - grid_[i - 1];
    const double w = h / (grid_[i] - grid_[i - 1]);
    const double f_mid = force_[i - 1] + 0.5 * w * (force_[i] - force_[i - 1]);
    return potential_[i - 1] - f_mid * h;
}

namespace {

double validate_uniform_grid(std::span<const double> grid, double omega_max) {
    if (grid.size() < 2)
        throw std::invalid_argument("integrator: grid needs at least 2 points");
    if (grid.front() != 0.0)
        throw std::invalid_argument("integrator: grid must start at t = 0");
    const double dt = grid[1] - grid[0];
    if (!(dt > 0.0)) throw std::invalid_argument("integrator: grid must be increasing");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double step = grid[i] - grid[i - 1];
        if (std::fabs(step - dt) > 1e-9 * dt)
            throw std::invalid_argument("integrator: grid must be uniform");
    }
    const double dt_max = M_PI / (10.0 * omega_max);
    if (dt > dt_max) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "integrator: dt = %g under-resolves the fastest bath mode; need dt <= %g",
                      dt, dt_max);
        throw std::invalid_argument(msg);
    }
    return dt;
}

} // namespace

Trajectory integrate_gle(const ParticleParams& particle, const Potential& potential,
                         const BathSpec& bath, const NoisePath& noise,
                         const FieldProtocol& field, std::span<const double> grid,
                         double x0, double v0) {
    const double dt = validate_uniform_grid(grid, bath.max_frequency());
    if (noise.time.size() != grid.size())
        throw std::invalid_argument("integrate_gle: noise grid size does not match");
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (noise.time[i] != grid[i])
            throw std::invalid_argument("integrate_gle: noise grid does not match");

    const auto& modes = bath.modes();
    const std::size_t n_modes = modes.size();
    const std::size_t n = grid.size();

    // kernel weights c_a = m_a nu_a^4 / omega_a^2; K(t) = sum c_a cos(omega_a t)
    std::vector<double> kernel_weight(n_modes), omega(n_modes);
    double k0 = 0.0;
    for (std::size_t a = 0; a < n_modes; ++a) {
        const double nu2 = modes[a].coupling * modes[a].coupling;
        kernel_weight[a] = modes[a].mass * nu2 * nu2 / (modes[a].omega * modes[a].omega);
        omega[a] = modes[a].omega;
        k0 += kernel_weight[a];
    }
    const bool has_friction = k0 != 0.0;

    Trajectory traj;
    traj.time.assign(grid.begin(), grid.end());
    traj.position.resize(n);
    traj.velocity.resize(n);
    traj.position[0] = x0;
    traj.velocity[0] = v0;

    const double m = particle.mass;
    const double q_eff = particle.drive_charge;
    const double denom = 1.0 + dt * dt * k0 / (4.0 * m);

    // Trapezoid history sums per mode:
    //   hist_cos[a] = sum_j w_j v_j cos(omega_a t_j),  hist_sin likewise,
    // with w_0 = dt/2 and w_j = dt for interior samples, so that
    //   conv(t) = sum_a c_a [cos(omega_a t) hist_cos + sin(omega_a t) hist_sin]
    //             + (dt/2) K(0) v(t)
    // reproduces the composite trapezoid of the stored velocity history exactly.
    std::vector<double> hist_cos(n_modes, 0.0), hist_sin(n_modes, 0.0);
    if (has_friction)
        for (std::size_t a = 0; a < n_modes; ++a) hist_cos[a] = 0.5 * dt * v0; // t_0 = 0

    double x = x0, v = v0;
    double accel = (potential.force(x, m) + q_eff * field_value(field, grid[0]) +
                    noise.value[0]) /
                   m; // convolution over an empty interval vanishes at t = 0

    for (std::size_t step = 0; step + 1 < n; ++step) {
        const double t1 = grid[step + 1];
        const double x1 = x + v * dt + 0.5 * accel * dt * dt;

        double conv_known = 0.0;
        if (has_friction) {
            for (std::size_t a = 0; a < n_modes; ++a) {
                const double phase = omega[a] * t1;
                conv_known += kernel_weight[a] * (std::cos(phase) * hist_cos[a] +
                                                  std::sin(phase) * hist_sin[a]);
            }
        }
        const double known_force = potential.force(x1, m) +
                                   q_eff * field_value(field, t1) +
                                   noise.value[step + 1] - conv_known;
        const double v1 = (v + 0.5 * dt * (accel + known_force / m)) / denom;
        const double a1 = (known_force - 0.5 * dt * k0 * v1) / m;

        if (has_friction) {
            for (std::size_t a = 0; a < n_modes; ++a) {
                const double phase = omega[a] * t1;
                hist_cos[a] += dt * v1 * std::cos(phase);
                hist_sin[a] += dt * v1 * std::sin(phase);
            }
        }

        x = x1;
        v = v1;
        accel = a1;
        traj.position[step + 1] = x;
        traj.velocity[step + 1] = v;
    }
    return traj;
}

Trajectory integrate_microscopic(const ParticleParams& particle,
                                 const Potential& potential, const BathSpec& bath,
                                 const BathInitialState& init, const FieldProtocol& field,
                                 std::span<const double> grid, double x0, double v0,
                                 const MicroscopicOptions& options) {
    const double dt = validate_uniform_grid(grid, bath.max_frequency());
    const auto& modes = bath.modes();
    const std::size_t n_modes = modes.size();
    if (init.position.size() != n_modes || init.momentum.size() != n_modes)
        throw std::invalid_argument(
            "integrate_microscopic: initial state does not match the bath size");
    if (init.regime == SamplingRegime::quantum_wigner &&
        potential.kind() == Potential::Kind::tabulated)
        throw std::invalid_argument(
            "integrate_microscopic: quantum-sampled trajectories are only meaningful for "
            "free or harmonic potentials (sampled statistics match symmetrized operator "
            "averages only for quadratic Hamiltonians); use a classical state or a "
            "quadratic potential");

    const std::size_t n = grid.size();
    const double m = particle.mass;
    const double q = particle.charge;
    const double counterterm =
        options.include_counterterm ? memory_kernel(bath, 0.0) : 0.0;

    std::vector<double> nu2(n_modes), omega2(n_modes), charge_over_mass(n_modes),
        mode_force_weight(n_modes);
    for (std::size_t a = 0; a < n_modes; ++a) {
        nu2[a] = modes[a].coupling * modes[a].coupling;
        omega2[a] = modes[a].omega * modes[a].omega;
        charge_over_mass[a] = modes[a].charge / modes[a].mass;
        mode_force_weight[a] = modes[a].mass * nu2[a];
    }

    // state layout: [x, v, xa_0.., va_0..]
    const std::size_t dim = 2 + 2 * n_modes;
    std::vector<double> y(dim), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    y[0] = x0;
    y[1] = v0;
    for (std::size_t a = 0; a < n_modes; ++a) {
        y[2 + a] = init.position[a];
        y[2 + n_modes + a] = init.momentum[a] / modes[a].mass;
    }

    auto deriv = [&](double t, const std::vector<double>& s, std::vector<double>& d) {
        const double x = s[0];
        const double e = field_value(field, t);
        double bath_force = 0.0;
        for (std::size_t a = 0; a < n_modes; ++a)
            bath_force += mode_force_weight[a] * s[2 + a];
        d[0] = s[1];
        d[1] = (potential.force(x, m) + bath_force + q * e - counterterm * x) / m;
        for (std::size_t a = 0; a < n_modes; ++a) {
            d[2 + a] = s[2 + n_modes + a];
            d[2 + n_modes + a] = -omega2[a] * s[2 + a] + nu2[a] * x +
                                 charge_over_mass[a] * e;
        }
    };

    Trajectory traj;
    traj.time.assign(grid.begin(), grid.end());
    traj.position.resize(n);
    traj.velocity.resize(n);
    if (options.record_bath) {
        traj.bath_position.assign(n_modes, std::vector<double>(n));
        traj.bath_velocity.assign(n_modes, std::vector<double>(n));
    }

    auto record = [&](std::size_t step) {
        traj.position[step] = y[0];
        traj.velocity[step] = y[1];
        if (options.record_bath) {
            for (std::size_t a = 0; a < n_modes; ++a) {
                traj.bath_position[a][step] = y[2 + a];
                traj.bath_velocity[a][step] = y[2 + n_modes + a];
            }
        }
    };
    record(0);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        const double t = grid[step];
        deriv(t, y, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        deriv(t + 0.5 * dt, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        deriv(t + 0.5 * dt, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
        deriv(t + dt, tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        record(step + 1);
    }
    return traj;
}

double delta_q(const BathSpec& bath) { return delay_kernel(bath, 0.0); }

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "t_s,x_m,v_m_s\n";
    char buf[96];
    for (std::size_t i = 0; i < trajectory.time.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", trajectory.time[i],
                      trajectory.position[i], trajectory.velocity[i]);
        out << buf;
    }
}

void write_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
    write_trajectory_csv(trajectory, out);
}

} // namespace drivenbath
