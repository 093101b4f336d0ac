#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drivenbath/circuit.hpp"
#include "drivenbath/noise.hpp"
#include "drivenbath/rng.hpp"
#include "support/quad_oracle.hpp"

#include <cmath>
#include <sstream>

using namespace drivenbath;

namespace {

std::vector<double> make_grid(double t_max, std::size_t points) {
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

BathSpec small_debye(std::size_t n = 16) {
    return build_debye_bath(to_debye_spec(MaterialPreset::copper(), kCopperIonMass), n);
}

std::vector<NoisePath> xi_ensemble(const BathSpec& bath, const ThermalContext& ctx,
                                   SamplingRegime regime, std::span<const double> grid,
                                   std::size_t count, std::uint64_t master) {
    std::vector<NoisePath> paths;
    paths.reserve(count);
    for (std::size_t r = 0; r < count; ++r)
        paths.push_back(
            xi_path(bath, sample_thermal_state(bath, ctx, regime, stream_seed(master, r)),
                    grid));
    return paths;
}

} // namespace

TEST_CASE("classical zero-temperature bath is at rest") {
    const BathSpec bath = small_debye();
    const auto state = sample_thermal_state(bath, ThermalContext::zero_temperature(),
                                            SamplingRegime::classical, 1);
    for (double x : state.position) CHECK(x == 0.0);
    for (double p : state.momentum) CHECK(p == 0.0);

    const auto grid = make_grid(1e-12, 9);
    const auto xi = xi_path(bath, state, grid);
    for (double v : xi.value) CHECK(v == 0.0);
}

TEST_CASE("sampled covariances carry the anticommutator normalization") {
    // one mode, many draws; Var[x] should be twice the Wigner covariance
    const BathSpec bath({{2e-25, 3e12, 1e12, 1.6e-19}});
    const double omega = 3e12, mass = 2e-25;

    SUBCASE("quantum ground state") {
        const auto ctx = ThermalContext::zero_temperature();
        const std::size_t n = 200000;
        double sum_x2 = 0.0, sum_p2 = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const auto s =
                sample_thermal_state(bath, ctx, SamplingRegime::quantum_wigner, stream_seed(3, r));
            sum_x2 += s.position[0] * s.position[0];
            sum_p2 += s.momentum[0] * s.momentum[0];
        }
        const double var_x = ThermalContext::hbar / (mass * omega); // 2 x zero point
        const double var_p = mass * ThermalContext::hbar * omega;
        CHECK(sum_x2 / n == doctest::Approx(var_x).epsilon(0.02));
        CHECK(sum_p2 / n == doctest::Approx(var_p).epsilon(0.02));
    }

    SUBCASE("quantum draws approach classical ones at high temperature") {
        // same seed => same underlying gaussians, so the ratio isolates the
        // variance prefactors
        const double u = 1e-3; // hbar omega / 2 kB T
        const auto ctx = ThermalContext::kelvin(
            ThermalContext::hbar * omega / (2.0 * ThermalContext::k_boltzmann * u));
        const auto qu = sample_thermal_state(bath, ctx, SamplingRegime::quantum_wigner, 17);
        const auto cl = sample_thermal_state(bath, ctx, SamplingRegime::classical, 17);
        const double ratio = qu.position[0] / cl.position[0];
        CHECK(ratio * ratio == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("xi path from a prescribed single-mode state") {
    const double mass = 1.5e-25, omega = 2e12, nu = 5e11;
    const BathSpec bath({{mass, omega, nu, 0.0}});
    BathInitialState state;
    state.regime = SamplingRegime::classical;
    state.seed = 0;
    state.position = {1.0};
    state.momentum = {0.0};

    const auto grid = make_grid(5e-12, 33);
    const auto xi = xi_path(bath, state, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(xi.value[i] ==
              doctest::Approx(mass * nu * nu * std::cos(omega * grid[i])).epsilon(1e-14));

    state.position = {1.0, 2.0};
    state.momentum = {0.0, 0.0};
    CHECK_THROWS_AS(xi_path(bath, state, grid), std::invalid_argument);
}

TEST_CASE("ensemble mean of xi vanishes within 4 standard errors") {
    const BathSpec bath = small_debye();
    const auto ctx = ThermalContext::kelvin(300.0);
    const auto grid = make_grid(2e-12, 17);
    const auto paths = xi_ensemble(bath, ctx, SamplingRegime::classical, grid, 20000, 11);
    const auto mean = estimate_mean_path(paths);
    for (std::size_t i = 0; i < mean.mean.size(); ++i)
        CHECK(std::fabs(mean.mean[i]) <= 4.0 * mean.standard_error[i]);
}

TEST_CASE("drive shift against the defining convolution") {
    CHECK(drive_shift(small_debye(), FieldProtocol(1e5, 1e12), 0.0) == 0.0);

    SUBCASE("single off-resonant mode") {
        const BathSpec bath({{1e-25, 3e12, 8e11, 1.6e-19}});
        const FieldProtocol field(2e5, 1.1e12);
        const double t = 7.3e-12;
        const double by_quadrature = oracle::integrate_oscillatory(
            [&](double s) {
                return delay_kernel(bath, t - s) * field.amplitude * field.omega *
                       std::cos(field.omega * s);
            },
            0.0, t, (3e12 + 1.1e12) * t / (2.0 * M_PI) + 1.0, 1e-14);
        CHECK(drive_shift(bath, field, t) ==
              doctest::Approx(by_quadrature).epsilon(1e-10));
    }

    SUBCASE("resonant mode evaluated by the analytic limit") {
        const BathSpec bath({{1e-25, 1.1e12, 8e11, 1.6e-19}});
        const FieldProtocol field(2e5, 1.1e12);
        const double t = 7.3e-12;
        const double by_quadrature = oracle::integrate_oscillatory(
            [&](double s) {
                return delay_kernel(bath, t - s) * field.amplitude * field.omega *
                       std::cos(field.omega * s);
            },
            0.0, t, 2.2e12 * t / (2.0 * M_PI) + 1.0, 1e-14);
        CHECK(drive_shift(bath, field, t) ==
              doctest::Approx(by_quadrature).epsilon(1e-8));
    }
}

TEST_CASE("eta path") {
    const BathSpec bath = small_debye();
    const auto ctx = ThermalContext::kelvin(200.0);
    const auto grid = make_grid(3e-12, 25);
    const auto init = sample_thermal_state(bath, ctx, SamplingRegime::classical, 23);
    const auto xi = xi_path(bath, init, grid);

    SUBCASE("zero field leaves xi untouched") {
        const auto eta = eta_path(xi, bath, FieldProtocol::off(), grid);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(eta.value[i] == xi.value[i]);
        CHECK(eta.kind == NoiseKind::eta);
    }

    SUBCASE("bath at rest gives eta = -D") {
        const auto rest = sample_thermal_state(bath, ThermalContext::zero_temperature(),
                                               SamplingRegime::classical, 1);
        const auto xi0 = xi_path(bath, rest, grid);
        const FieldProtocol field(3e5, 8e12);
        const auto eta = eta_path(xi0, bath, field, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(eta.value[i] == -drive_shift(bath, field, grid[i]));
    }

    SUBCASE("grid mismatch is rejected") {
        const auto other = make_grid(3e-12, 24);
        CHECK_THROWS_AS(eta_path(xi, bath, FieldProtocol::off(), other),
                        std::invalid_argument);
    }

    SUBCASE("ensemble mean of eta is -D within 4 standard errors") {
        const FieldProtocol field(3e5, 8e12);
        std::vector<NoisePath> etas;
        for (std::size_t r = 0; r < 20000; ++r) {
            const auto state = sample_thermal_state(bath, ctx, SamplingRegime::classical,
                                                    stream_seed(29, r));
            etas.push_back(eta_path(xi_path(bath, state, grid), bath, field, grid));
        }
        const auto mean = estimate_mean_path(etas);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(std::fabs(mean.mean[i] + drive_shift(bath, field, grid[i])) <=
                  4.0 * mean.standard_error[i]);
    }
}

TEST_CASE("analytic equilibrium correlation") {
    SUBCASE("zero-temperature single mode at equal times") {
        const BathSpec bath({{2e-25, 4e12, 9e11, 0.0}});
        const double expected = ThermalContext::hbar * 2e-25 * std::pow(9e11, 4) / 4e12;
        CHECK(analytic_sym_correlation(bath, ThermalContext::zero_temperature(), 3.3e-13,
                                       3.3e-13) == doctest::Approx(expected).epsilon(1e-14));
    }

    SUBCASE("high-temperature limit recovers 2 kB T K(t - t')") {
        const BathSpec bath = small_debye();
        const double u = 1e-3; // hbar omega_max / 2 kB T
        const auto ctx = ThermalContext::kelvin(
            ThermalContext::hbar * bath.max_frequency() /
            (2.0 * ThermalContext::k_boltzmann * u));
        const double two_kt = 2.0 * ThermalContext::k_boltzmann * ctx.temperature();
        for (double tau : {0.0, 2e-13, 9e-13}) {
            const double classical = two_kt * memory_kernel(bath, tau);
            CHECK(analytic_sym_correlation(bath, ctx, tau, 0.0) ==
                  doctest::Approx(classical).epsilon(1e-3));
        }
    }

    SUBCASE("stationarity in the time difference") {
        const BathSpec bath = small_debye();
        const auto ctx = ThermalContext::kelvin(120.0);
        RandomStream rng(8);
        for (int i = 0; i < 20; ++i) {
            const double t = 5e-12 * rng.uniform();
            const double tp = 5e-12 * rng.uniform();
            CHECK(analytic_sym_correlation(bath, ctx, t, tp) ==
                  doctest::Approx(analytic_sym_correlation(bath, ctx, t - tp, 0.0))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("analytic driven correlation") {
    const BathSpec bath = small_debye();
    const auto ctx = ThermalContext::kelvin(150.0);
    const FieldProtocol field(4e5, 1.2e13);

    SUBCASE("zero field reduces to the equilibrium form") {
        CHECK(analytic_eta_correlation(bath, ctx, FieldProtocol::off(), 1e-13, 3e-13) ==
              analytic_sym_correlation(bath, ctx, 1e-13, 3e-13));
    }

    SUBCASE("equal times add a non-negative square") {
        for (double t : {1e-13, 5e-13, 2e-12}) {
            const double driven = analytic_eta_correlation(bath, ctx, field, t, t);
            const double base = analytic_sym_correlation(bath, ctx, t, t);
            CHECK(driven >= base);
            CHECK(driven - base ==
                  doctest::Approx(std::pow(drive_shift(bath, field, t), 2)).epsilon(1e-12));
        }
    }

    SUBCASE("Monte Carlo eta products match on a 4x4 grid") {
        const auto grid = make_grid(2.0 * 2.0 * M_PI / field.omega, 4);
        std::vector<NoisePath> etas;
        for (std::size_t r = 0; r < 20000; ++r) {
            const auto state = sample_thermal_state(
                bath, ctx, SamplingRegime::quantum_wigner, stream_seed(31, r));
            etas.push_back(eta_path(xi_path(bath, state, grid), bath, field, grid));
        }
        const std::vector<std::size_t> idx{0, 1, 2, 3};
        const auto corr = estimate_two_time(etas, idx, idx);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                const double target =
                    analytic_eta_correlation(bath, ctx, field, grid[i], grid[j]);
                CHECK(std::fabs(corr.mean[i * 4 + j] - target) <=
                      4.0 * corr.standard_error[i * 4 + j]);
            }
        }
    }
}

TEST_CASE("correlation estimator") {
    SUBCASE("constant paths estimate c^2 with zero error") {
        NoisePath constant;
        constant.kind = NoiseKind::xi;
        constant.time = make_grid(1.0, 11);
        constant.value.assign(11, 3.0);
        const std::vector<std::size_t> lags{0, 2, 5};

        const std::vector<NoisePath> pair{constant, constant};
        const auto ensemble =
            estimate_correlation(pair, lags, AveragingMode::ensemble, 0);
        for (std::size_t i = 0; i < lags.size(); ++i) {
            CHECK(ensemble.mean[i] == doctest::Approx(9.0));
            CHECK(ensemble.standard_error[i] == 0.0);
        }

        const std::vector<NoisePath> single{constant};
        const auto averaged =
            estimate_correlation(single, lags, AveragingMode::time_average);
        for (std::size_t i = 0; i < lags.size(); ++i) {
            CHECK(averaged.mean[i] == doctest::Approx(9.0));
            CHECK(averaged.standard_error[i] == 0.0);
        }
    }

    SUBCASE("the reference index anchors the fixed time of the product") {
        NoisePath ramp;
        ramp.kind = NoiseKind::xi;
        ramp.time = make_grid(1.0, 8);
        ramp.value = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
        const std::vector<NoisePath> pair{ramp, ramp};
        const std::vector<std::size_t> lags{3};
        const auto est = estimate_correlation(pair, lags, AveragingMode::ensemble, 2);
        CHECK(est.mean[0] == doctest::Approx(2.0 * 5.0));
        CHECK(est.lag[0] == doctest::Approx(ramp.time[5] - ramp.time[2]));
    }

    SUBCASE("standard error halves when the count quadruples") {
        const BathSpec bath = small_debye();
        const auto ctx = ThermalContext::kelvin(300.0);
        const auto grid = make_grid(1e-12, 5);
        const auto paths = xi_ensemble(bath, ctx, SamplingRegime::classical, grid, 16000, 37);
        const std::vector<std::size_t> lags{2};

        const std::span<const NoisePath> all(paths);
        const auto small = estimate_correlation(all.subspan(0, 4000), lags,
                                                AveragingMode::ensemble);
        const auto large = estimate_correlation(all, lags, AveragingMode::ensemble);
        const double ratio = small.standard_error[0] / large.standard_error[0];
        CHECK(ratio > 1.6);
        CHECK(ratio < 2.4);
    }

    SUBCASE("insufficient data is reported") {
        NoisePath path;
        path.kind = NoiseKind::xi;
        path.time = make_grid(1.0, 4);
        path.value.assign(4, 1.0);
        const std::vector<NoisePath> single{path};
        const std::vector<std::size_t> lags{3};
        CHECK_THROWS_AS(
            estimate_correlation(single, lags, AveragingMode::ensemble), // needs 2 paths
            std::invalid_argument);
        CHECK_THROWS_AS(estimate_correlation(single, lags, AveragingMode::time_average),
                        std::invalid_argument); // window too short for lag 3
        CHECK_THROWS_AS(estimate_two_time(single, lags, lags), std::invalid_argument);
        CHECK_THROWS_AS(estimate_mean_path(single), std::invalid_argument);
    }

    SUBCASE("paths on different grids are rejected") {
        NoisePath a, b;
        a.kind = b.kind = NoiseKind::xi;
        a.time = make_grid(1.0, 4);
        a.value.assign(4, 1.0);
        b.time = make_grid(2.0, 4); // same length, different times
        b.value.assign(4, 1.0);
        const std::vector<NoisePath> mixed{a, b};
        const std::vector<std::size_t> lags{1};
        CHECK_THROWS_AS(estimate_correlation(mixed, lags, AveragingMode::ensemble),
                        std::invalid_argument);
    }
}

TEST_CASE("time average of an equilibrium path reproduces the ensemble correlation") {
    // single-mode classical bath; the normalized correlation of one long path
    // matches the ensemble-normalized one (the equilibrium path is ergodic up
    // to the amplitude drawn at t = 0, which normalization removes)
    const double omega = 1e12;
    const BathSpec bath({{1e-25, omega, 4e11, 0.0}});
    const auto ctx = ThermalContext::kelvin(250.0);
    const double period = 2.0 * M_PI / omega;

    const std::size_t per_period = 64;
    const std::size_t n = 100 * per_period + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = period * static_cast<double>(i) / per_period;

    const auto one = xi_path(
        bath, sample_thermal_state(bath, ctx, SamplingRegime::classical, 41), grid);
    const std::vector<NoisePath> single{one};
    const std::vector<std::size_t> lags{0, per_period / 4, per_period / 2};
    const auto from_time = estimate_correlation(single, lags, AveragingMode::time_average);

    const auto grid_short = make_grid(period, per_period + 1);
    const auto paths =
        xi_ensemble(bath, ctx, SamplingRegime::classical, grid_short, 20000, 43);
    const auto from_ensemble =
        estimate_correlation(paths, lags, AveragingMode::ensemble);

    for (std::size_t i = 1; i < lags.size(); ++i) {
        const double t_norm = from_time.mean[i] / from_time.mean[0];
        const double e_norm = from_ensemble.mean[i] / from_ensemble.mean[0];
        const double e_err = 4.0 * (std::fabs(from_ensemble.standard_error[i] /
                                              from_ensemble.mean[0]) +
                                    std::fabs(from_time.standard_error[i] /
                                              from_time.mean[0]));
        CHECK(std::fabs(t_norm - e_norm) <= e_err + 1e-6);
    }
}

TEST_CASE("quantum zero-lag correlation dominates the classical one") {
    const BathSpec bath = small_debye();
    const auto cold = ThermalContext::kelvin(20.0);
    const double quantum = analytic_sym_correlation(bath, cold, 0.0, 0.0);
    const double classical =
        2.0 * ThermalContext::k_boltzmann * cold.temperature() * memory_kernel(bath, 0.0);
    CHECK(quantum > classical * 1.01); // strict zero-point excess at low T
}

TEST_CASE("correlation CSV format") {
    CorrelationEstimate est;
    est.lag = {0.0, 1e-12};
    est.mean = {2.0, 1.0};
    est.standard_error = {0.25, 0.5};
    est.count = 42;
    est.mode = AveragingMode::ensemble;
    std::ostringstream out;
    write_correlation_csv(est, out);
    CHECK(out.str() == "lag_s,mean,stderr,count\n0,2,0.25,42\n9.9999999999999998e-13,1,0.5,42\n");
}
