#include "drivenbath/noise.hpp"

#include "drivenbath/rng.hpp"
#include "drivenbath/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace drivenbath {

BathInitialState sample_thermal_state(const BathSpec& bath, const ThermalContext& ctx,
                                      SamplingRegime regime, std::uint64_t seed) {
    const auto& modes = bath.modes();
    BathInitialState state;
    state.regime = regime;
    state.seed = seed;
    state.position.resize(modes.size());
    state.momentum.resize(modes.size());

    if (regime == SamplingRegime::classical && ctx.is_zero()) {
        return state; // bath at rest
    }

    RandomStream rng(seed);
    const double kT = ThermalContext::k_boltzmann * ctx.temperature();
    for (std::size_t a = 0; a < modes.size(); ++a) {
        const auto& m = modes[a];
        double var_x, var_p;
        if (regime == SamplingRegime::classical) {
            var_x = 2.0 * kT / (m.mass * m.omega * m.omega);
            var_p = 2.0 * m.mass * kT;
        } else {
            const double factor = thermal_factor(m.omega, ctx);
            var_x = ThermalContext::hbar / (m.mass * m.omega) * factor;
            var_p = m.mass * ThermalContext::hbar * m.omega * factor;
        }
        state.position[a] = std::sqrt(var_x) * rng.gaussian();
        state.momentum[a] = std::sqrt(var_p) * rng.gaussian();
    }
    return state;
}

NoisePath xi_path(const BathSpec& bath, const BathInitialState& init,
                  std::span<const double> grid) {
    const auto& modes = bath.modes();
    if (init.position.size() != modes.size() || init.momentum.size() != modes.size())
        throw std::invalid_argument("xi_path: initial state does not match the bath size");

    // xi(t) = sum_a [a_a cos(w_a t) + b_a sin(w_a t)]
    std::vector<double> amp_cos(modes.size()), amp_sin(modes.size());
    for (std::size_t a = 0; a < modes.size(); ++a) {
        const double nu2 = modes[a].coupling * modes[a].coupling;
        amp_cos[a] = modes[a].mass * nu2 * init.position[a];
        amp_sin[a] = nu2 * init.momentum[a] / modes[a].omega;
    }

    NoisePath path;
    path.kind = NoiseKind::xi;
    path.time.assign(grid.begin(), grid.end());
    path.value.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double sum = 0.0;
        for (std::size_t a = 0; a < modes.size(); ++a) {
            const double phase = modes[a].omega * grid[i];
            sum += amp_cos[a] * std::cos(phase) + amp_sin[a] * std::sin(phase);
        }
        path.value[i] = sum;
    }
    return path;
}

double unit_drive_shift(const BathSpec& bath, double big_omega, double t) {
    if (t <= 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& m : bath.modes()) {
        const double nu2 = m.coupling * m.coupling;
        sum += m.charge * nu2 / (m.omega * m.omega) *
               driven_mode_response(m.omega, big_omega, t);
    }
    return big_omega * sum;
}

double drive_shift(const BathSpec& bath, const FieldProtocol& field, double t) {
    if (field.amplitude == 0.0) return 0.0;
    return field.amplitude * unit_drive_shift(bath, field.omega, t);
}

NoisePath eta_path(const NoisePath& xi, const BathSpec& bath, const FieldProtocol& field,
                   std::span<const double> grid) {
    if (xi.kind != NoiseKind::xi)
        throw std::invalid_argument("eta_path: input must be a bare xi path");
    if (xi.time.size() != grid.size())
        throw std::invalid_argument("eta_path: xi grid size does not match");
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (xi.time[i] != grid[i])
            throw std::invalid_argument("eta_path: xi grid does not match the request grid");

    NoisePath eta;
    eta.kind = NoiseKind::eta;
    eta.time = xi.time;
    eta.value.resize(xi.value.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        eta.value[i] = xi.value[i] - drive_shift(bath, field, grid[i]);
    return eta;
}

double analytic_sym_correlation(const BathSpec& bath, const ThermalContext& ctx,
                                double t, double t_prime) {
    const double tau = t - t_prime;
    double sum = 0.0;
    for (const auto& m : bath.modes()) {
        const double nu2 = m.coupling * m.coupling;
        sum += ThermalContext::hbar * m.mass * nu2 * nu2 / m.omega *
               thermal_factor(m.omega, ctx) * std::cos(m.omega * tau);
    }
    return sum;
}

double analytic_eta_correlation(const BathSpec& bath, const ThermalContext& ctx,
                                const FieldProtocol& field, double t, double t_prime) {
    if (!(t >= 0.0) || !(t_prime >= 0.0))
        throw std::domain_error("analytic_eta_correlation: requires t, t' >= 0");
    return analytic_sym_correlation(bath, ctx, t, t_prime) +
           drive_shift(bath, field, t) * drive_shift(bath, field, t_prime);
}

namespace {

void check_common_grid(std::span<const NoisePath> paths) {
    const auto& t0 = paths.front().time;
    for (const auto& p : paths) {
        if (p.time != t0 || p.value.size() != t0.size())
            throw std::invalid_argument("correlation estimate: paths on different grids");
    }
}

CorrelationEstimate estimate_ensemble(std::span<const NoisePath> paths,
                                      std::span<const std::size_t> lag_indices,
                                      std::size_t ref) {
    if (paths.size() < 2)
        throw std::invalid_argument(
            "estimate_correlation: ensemble mode needs at least 2 paths, got " +
            std::to_string(paths.size()));
    check_common_grid(paths);
    const auto& time = paths.front().time;
    const std::size_t n = time.size();
    if (ref >= n)
        throw std::invalid_argument("estimate_correlation: reference index out of range");

    CorrelationEstimate est;
    est.mode = AveragingMode::ensemble;
    est.count = paths.size();
    for (const std::size_t lag : lag_indices) {
        if (ref + lag >= n)
            throw std::invalid_argument(
                "estimate_correlation: lag index " + std::to_string(lag) +
                " exceeds the grid (length " + std::to_string(n) + ")");
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& p : paths) {
            const double s = p.value[ref] * p.value[ref + lag];
            sum += s;
            sum_sq += s * s;
        }
        const double r = static_cast<double>(paths.size());
        const double mean = sum / r;
        const double var = std::max(0.0, (sum_sq - r * mean * mean) / (r - 1.0));
        est.lag.push_back(time[ref + lag] - time[ref]);
        est.mean.push_back(mean);
        est.standard_error.push_back(std::sqrt(var / r));
    }
    return est;
}

CorrelationEstimate estimate_time_average(const NoisePath& path,
                                          std::span<const std::size_t> lag_indices) {
    const std::size_t n = path.time.size();
    std::size_t max_lag = 0;
    for (const std::size_t lag : lag_indices) max_lag = std::max(max_lag, lag);
    if (n < max_lag + 2)
        throw std::invalid_argument(
            "estimate_correlation: time-average mode needs path length >= max lag + 2; "
            "have " + std::to_string(n) + ", max lag " + std::to_string(max_lag));

    const std::size_t window = n - max_lag; // samples available to every lag

    CorrelationEstimate est;
    est.mode = AveragingMode::time_average;
    est.count = window;
    for (const std::size_t lag : lag_indices) {
        // trapezoid of A(t) A(t + lag) over the common window
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < window; ++j) {
            const double f0 = path.value[j] * path.value[j + lag];
            const double f1 = path.value[j + 1] * path.value[j + 1 + lag];
            acc += 0.5 * (f0 + f1);
        }
        const double mean = window > 1 ? acc / static_cast<double>(window - 1)
                                       : path.value[0] * path.value[lag];

        // batch means over contiguous sub-windows for the error bar
        const std::size_t batches = std::min<std::size_t>(16, window);
        double bsum = 0.0, bsq = 0.0;
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t lo = b * window / batches;
            const std::size_t hi = (b + 1) * window / batches;
            double m = 0.0;
            for (std::size_t j = lo; j < hi; ++j) m += path.value[j] * path.value[j + lag];
            m /= static_cast<double>(hi - lo);
            bsum += m;
            bsq += m * m;
        }
        const double nb = static_cast<double>(batches);
        const double bmean = bsum / nb;
        const double bvar = std::max(0.0, (bsq - nb * bmean * bmean) / (nb - 1.0));
        est.lag.push_back(path.time[lag] - path.time[0]);
        est.mean.push_back(mean);
        est.standard_error.push_back(std::sqrt(bvar / nb));
    }
    return est;
}

} // namespace

CorrelationEstimate estimate_correlation(std::span<const NoisePath> paths,
                                         std::span<const std::size_t> lag_indices,
                                         AveragingMode mode,
                                         std::size_t reference_index) {
    if (paths.empty())
        throw std::invalid_argument("estimate_correlation: no paths given");
    if (mode == AveragingMode::ensemble)
        return estimate_ensemble(paths, lag_indices, reference_index);
    if (paths.size() != 1)
        throw std::invalid_argument(
            "estimate_correlation: time-average mode takes exactly one path, got " +
            std::to_string(paths.size()));
    return estimate_time_average(paths.front(), lag_indices);
}

TwoTimeCorrelation estimate_two_time(std::span<const NoisePath> paths,
                                     std::span<const std::size_t> indices_t,
                                     std::span<const std::size_t> indices_t_prime) {
    if (paths.size() < 2)
        throw std::invalid_argument("estimate_two_time: needs at least 2 paths");
    check_common_grid(paths);
    const auto& time = paths.front().time;

    TwoTimeCorrelation est;
    est.count = paths.size();
    for (const std::size_t i : indices_t) est.t.push_back(time.at(i));
    for (const std::size_t j : indices_t_prime) est.t_prime.push_back(time.at(j));
    est.mean.reserve(indices_t.size() * indices_t_prime.size());
    est.standard_error.reserve(est.mean.capacity());

    const double r = static_cast<double>(paths.size());
    for (const std::size_t i : indices_t) {
        for (const std::size_t j : indices_t_prime) {
            double sum = 0.0, sum_sq = 0.0;
            for (const auto& p : paths) {
                const double s = p.value[i] * p.value[j];
                sum += s;
                sum_sq += s * s;
            }
            const double mean = sum / r;
            const double var = std::max(0.0, (sum_sq - r * mean * mean) / (r - 1.0));
            est.mean.push_back(mean);
            est.standard_error.push_back(std::sqrt(var / r));
        }
    }
    return est;
}

MeanPathEstimate estimate_mean_path(std::span<const NoisePath> paths) {
    if (paths.size() < 2)
        throw std::invalid_argument("estimate_mean_path: needs at least 2 paths");
    check_common_grid(paths);
    const auto& time = paths.front().time;
    const std::size_t n = time.size();
    const double r = static_cast<double>(paths.size());

    MeanPathEstimate est;
    est.count = paths.size();
    est.time = time;
    est.mean.resize(n);
    est.standard_error.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& p : paths) {
            sum += p.value[i];
            sum_sq += p.value[i] * p.value[i];
        }
        const double mean = sum / r;
        const double var = std::max(0.0, (sum_sq - r * mean * mean) / (r - 1.0));
        est.mean[i] = mean;
        est.standard_error[i] = std::sqrt(var / r);
    }
    return est;
}

void write_correlation_csv(const CorrelationEstimate& estimate, std::ostream& out) {
    out << "lag_s,mean,stderr,count\n";
    char buf[128];
    for (std::size_t i = 0; i < estimate.lag.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%zu\n", estimate.lag[i],
                      estimate.mean[i], estimate.standard_error[i], estimate.count);
        out << buf;
    }
}

void write_correlation_csv(const CorrelationEstimate& estimate, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_correlation_csv: cannot open " + path);
    write_correlation_csv(estimate, out);
}

} // namespace drivenbath
